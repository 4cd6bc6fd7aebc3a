#include "dynlf/report.hpp"

#include <fstream>

#include "dynlf/errors.hpp"
#include "dynlf/text.hpp"

namespace dynlf {

nlohmann::json stats_json(const DatasetStats& s) {
  return {{"nodes", s.nodes}, {"slots", s.slots}, {"known", s.known}, {"density", s.density}};
}

nlohmann::json history_json(const std::vector<IterationRecord>& h) {
  auto arr = nlohmann::json::array();
  for (const auto& rec : h)
    arr.push_back({{"iteration", rec.iteration},
                   {"train_rmse", rec.train_rmse},
                   {"val_rmse", rec.val_rmse},
                   {"seconds", rec.seconds}});
  return arr;
}

nlohmann::json to_json(const RunReport& r) {
  nlohmann::json j;
  j["command"] = r.command;
  j["config"] = r.config;
  if (r.stats) j["stats"] = stats_json(*r.stats);
  if (r.eval) {
    j["rmse"] = r.eval->rmse;
    j["mae"] = r.eval->mae;
    j["count"] = r.eval->count;
    j["iterations_run"] = r.eval->iterations_run;
  }
  if (!r.history.empty()) j["history"] = history_json(r.history);
  if (r.seed) j["seed"] = *r.seed;
  j["elapsed_seconds"] = r.elapsed_seconds;
  for (const auto& [key, value] : r.extra.items()) j[key] = value;
  return j;
}

void write_report(const RunReport& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot write " + path);
  out << to_json(r).dump(2) << '\n';
  out.flush();
  if (!out) fail(Errc::io_error, "write failed for " + path);
}

void write_history_csv(const std::vector<IterationRecord>& h, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot write " + path);
  out << "iteration,train_rmse,val_rmse,seconds\n";
  for (const auto& rec : h)
    out << rec.iteration << ',' << format_double(rec.train_rmse) << ','
        << format_double(rec.val_rmse) << ',' << format_double(rec.seconds) << '\n';
  out.flush();
  if (!out) fail(Errc::io_error, "write failed for " + path);
}

}  // namespace dynlf
