#include "dynlf/model_io.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dynlf/errors.hpp"
#include "dynlf/text.hpp"

namespace dynlf {

namespace {

void write_matrix(std::ostream& out, const Matrix& m) {
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (c) out << '\t';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
}

class LineReader {
 public:
  LineReader(std::istream& in, std::string path) : in_(in), path_(std::move(path)) {}

  std::vector<std::string> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      std::vector<std::string> tokens;
      std::istringstream ss(line);
      std::string tok;
      while (ss >> tok) tokens.push_back(tok);
      if (!tokens.empty()) return tokens;
    }
    fail(Errc::io_error, path_ + ": unexpected end of file");
  }

  std::vector<std::string> expect(const std::string& keyword, std::size_t token_count) {
    auto tokens = next();
    if (tokens[0] != keyword || tokens.size() != token_count)
      fail(Errc::io_error, path_ + " line " + std::to_string(line_no_) + ": expected '" +
                               keyword + "' with " + std::to_string(token_count - 1) + " values");
    return tokens;
  }

  Matrix matrix(Index rows, Index cols) {
    Matrix m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
      auto tokens = next();
      if (static_cast<Index>(tokens.size()) != cols)
        fail(Errc::io_error, path_ + " line " + std::to_string(line_no_) + ": expected " +
                                 std::to_string(cols) + " values");
      for (Index c = 0; c < cols; ++c) m(r, c) = number(tokens[static_cast<std::size_t>(c)]);
    }
    return m;
  }

  double number(const std::string& token) {
    try {
      return parse_double(token);
    } catch (const Error& e) {
      fail(Errc::io_error, path_ + " line " + std::to_string(line_no_) + ": " + e.what());
    }
  }

  long long integer(const std::string& token) {
    try {
      return parse_int(token);
    } catch (const Error& e) {
      fail(Errc::io_error, path_ + " line " + std::to_string(line_no_) + ": " + e.what());
    }
  }

 private:
  std::istream& in_;
  std::string path_;
  long line_no_ = 0;
};

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot write " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open " + path);
  return in;
}

void write_slot_blocks(std::ostream& out, const std::vector<Matrix>& slots, const Matrix& q) {
  for (std::size_t t = 0; t < slots.size(); ++t) {
    out << "N " << (t + 1) << '\n';
    write_matrix(out, slots[t]);
  }
  out << "Q\n";
  write_matrix(out, q);
  out << "end\n";
}

void read_slot_blocks(LineReader& r, int slot_count, Index nodes, Index rank,
                      std::vector<Matrix>& slots, Matrix& q) {
  slots.clear();
  slots.reserve(static_cast<std::size_t>(slot_count));
  for (int t = 1; t <= slot_count; ++t) {
    auto head = r.expect("N", 2);
    if (r.integer(head[1]) != t) fail(Errc::io_error, "slot blocks out of order");
    slots.push_back(r.matrix(nodes, rank));
  }
  r.expect("Q", 1);
  q = r.matrix(nodes, rank);
  r.expect("end", 1);
}

}  // namespace

void save_model(const TrainedModel& model, const std::string& path) {
  auto out = open_out(path);
  out << "dynlf-model 1\n";
  out << "dims " << model.dims.nodes << ' ' << model.dims.slots << '\n';
  out << "rank " << model.rank << '\n';
  const auto& hp = model.hyper;
  out << "activation "
      << (hp.activation.kind == Activation::Kind::identity ? "identity" : "leaky_relu") << ' '
      << format_double(hp.activation.alpha) << '\n';
  out << "lambda " << format_double(hp.lambda) << '\n';
  out << "w-var " << format_double(hp.noise.w_var) << '\n';
  out << "r-var " << format_double(hp.noise.r_var) << '\n';
  out << "p0 " << format_double(hp.noise.p0) << '\n';
  out << "max-iters " << hp.max_iters << '\n';
  out << "err-threshold " << format_double(hp.err_threshold) << '\n';
  out << "seed " << hp.seed << '\n';
  out << "iterations " << model.iterations_run << '\n';
  out << "best-iteration " << model.best_iteration << '\n';
  write_slot_blocks(out, model.factors.slots, model.target_factors);
  out.flush();
  if (!out) fail(Errc::io_error, "write failed for " + path);
}

TrainedModel load_model(const std::string& path) {
  auto in = open_in(path);
  LineReader r(in, path);
  auto magic = r.next();
  if (magic.size() != 2 || magic[0] != "dynlf-model" || magic[1] != "1")
    fail(Errc::io_error, path + ": not a dynlf model file");
  TrainedModel model;
  auto dims = r.expect("dims", 3);
  model.dims = Dims{static_cast<int>(r.integer(dims[1])), static_cast<int>(r.integer(dims[2]))};
  model.rank = static_cast<int>(r.integer(r.expect("rank", 2)[1]));
  auto act = r.expect("activation", 3);
  model.hyper.activation = act[1] == "identity" ? Activation::identity()
                                                : Activation::leaky_relu(r.number(act[2]));
  model.hyper.rank = model.rank;
  model.hyper.lambda = r.number(r.expect("lambda", 2)[1]);
  model.hyper.noise.w_var = r.number(r.expect("w-var", 2)[1]);
  model.hyper.noise.r_var = r.number(r.expect("r-var", 2)[1]);
  model.hyper.noise.p0 = r.number(r.expect("p0", 2)[1]);
  model.hyper.max_iters = static_cast<int>(r.integer(r.expect("max-iters", 2)[1]));
  model.hyper.err_threshold = r.number(r.expect("err-threshold", 2)[1]);
  model.hyper.seed = static_cast<std::uint64_t>(r.integer(r.expect("seed", 2)[1]));
  model.iterations_run = static_cast<int>(r.integer(r.expect("iterations", 2)[1]));
  model.best_iteration = static_cast<int>(r.integer(r.expect("best-iteration", 2)[1]));
  read_slot_blocks(r, model.dims.slots, model.dims.nodes, model.rank, model.factors.slots,
                   model.target_factors);
  return model;
}

void save_factors(const FactorSet& factors, const std::string& path) {
  auto out = open_out(path);
  const Index nodes = factors.consistent.rows();
  const Index rank = factors.consistent.cols();
  out << "dynlf-factors 1\n";
  out << "dims " << nodes << ' ' << factors.temporal.size() << '\n';
  out << "rank " << rank << '\n';
  write_slot_blocks(out, factors.temporal, factors.consistent);
  out.flush();
  if (!out) fail(Errc::io_error, "write failed for " + path);
}

FactorSet load_factors(const std::string& path) {
  auto in = open_in(path);
  LineReader r(in, path);
  auto magic = r.next();
  if (magic.size() != 2 || magic[0] != "dynlf-factors" || magic[1] != "1")
    fail(Errc::io_error, path + ": not a dynlf factors file");
  auto dims = r.expect("dims", 3);
  const Index nodes = r.integer(dims[1]);
  const int slot_count = static_cast<int>(r.integer(dims[2]));
  const Index rank = r.integer(r.expect("rank", 2)[1]);
  FactorSet f;
  read_slot_blocks(r, slot_count, nodes, rank, f.temporal, f.consistent);
  return f;
}

}  // namespace dynlf
