#pragma once

#include <stdexcept>
#include <string>

namespace dynlf {

enum class Errc {
  malformed_line,
  index_out_of_range,
  duplicate_key,
  non_finite_weight,
  empty_sequence,
  invalid_config,
  not_symmetric,
  not_positive_definite,
  dimension_mismatch,
  non_finite_state,
  empty_design,
  non_positive_lambda,
  empty_train_set,
  empty_test_set,
  io_error,
};

constexpr const char* errc_name(Errc c) {
  switch (c) {
    case Errc::malformed_line: return "malformed_line";
    case Errc::index_out_of_range: return "index_out_of_range";
    case Errc::duplicate_key: return "duplicate_key";
    case Errc::non_finite_weight: return "non_finite_weight";
    case Errc::empty_sequence: return "empty_sequence";
    case Errc::invalid_config: return "invalid_config";
    case Errc::not_symmetric: return "not_symmetric";
    case Errc::not_positive_definite: return "not_positive_definite";
    case Errc::dimension_mismatch: return "dimension_mismatch";
    case Errc::non_finite_state: return "non_finite_state";
    case Errc::empty_design: return "empty_design";
    case Errc::non_positive_lambda: return "non_positive_lambda";
    case Errc::empty_train_set: return "empty_train_set";
    case Errc::empty_test_set: return "empty_test_set";
    case Errc::io_error: return "io_error";
  }
  return "unknown";
}

/// Library error: a category code plus a message. what() is the bare message;
/// callers that need the category check code().
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message) : std::runtime_error(message), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) { throw Error(code, message); }

}  // namespace dynlf
