#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dynlf/dataseq.hpp"
#include "dynlf/trainer.hpp"

namespace dynlf {

/// Machine-readable run record. Serialized field names are stable:
/// command, config, stats, rmse, mae, count, iterations_run,
/// elapsed_seconds, history[], seed.
struct RunReport {
  std::string command;
  nlohmann::json config = nlohmann::json::object();  // resolved, defaulted flags
  std::optional<DatasetStats> stats;
  std::optional<EvalReport> eval;
  std::vector<IterationRecord> history;
  std::optional<std::uint64_t> seed;
  double elapsed_seconds = 0.0;
  nlohmann::json extra = nlohmann::json::object();  // command-specific blocks
};

nlohmann::json stats_json(const DatasetStats& s);
nlohmann::json history_json(const std::vector<IterationRecord>& h);
nlohmann::json to_json(const RunReport& r);

void write_report(const RunReport& r, const std::string& path);
void write_history_csv(const std::vector<IterationRecord>& h, const std::string& path);

}  // namespace dynlf
