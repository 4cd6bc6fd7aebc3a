#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "dynlf/model_io.hpp"
#include "dynlf/report.hpp"
#include "dynlf/rng.hpp"
#include "dynlf/text.hpp"
#include "dynlf/trainer.hpp"
#include "oracles.hpp"

using namespace dynlf;
using oracle::thrown_code;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("dynlf-test-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

TrainedModel small_trained_model() {
  SyntheticConfig cfg;
  cfg.nodes = 8;
  cfg.slots = 4;
  cfg.rank = 2;
  cfg.density = 0.5;
  cfg.seed = 5;
  const auto [seq, truth] = generate_synthetic(cfg);
  const auto parts = split(seq, SplitSpec{0.6, 0.2, 0.2, 5});
  HyperParams hp;
  hp.rank = 2;
  hp.lambda = 5.0;
  hp.max_iters = 6;
  hp.seed = 99;
  return train(parts.train, parts.val, hp);
}

}  // namespace

TEST_CASE("doubles render round-trip exactly") {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const double x = (2.0 * rng.unit() - 1.0) * std::pow(10.0, static_cast<double>(rng.below(40)) - 20.0);
    CHECK(parse_double(format_double(x)) == x);
  }
  CHECK(parse_double(format_double(0.1)) == 0.1);
  CHECK(format_double(1.0) == "1");
}

TEST_CASE("model files round-trip bitwise") {
  const TempDir dir;
  const auto model = small_trained_model();
  const auto path = dir.file("model.txt");
  save_model(model, path);
  const auto loaded = load_model(path);

  CHECK(loaded.dims == model.dims);
  CHECK(loaded.rank == model.rank);
  CHECK(loaded.hyper.lambda == model.hyper.lambda);
  CHECK(loaded.hyper.noise.w_var == model.hyper.noise.w_var);
  CHECK(loaded.hyper.noise.r_var == model.hyper.noise.r_var);
  CHECK(loaded.hyper.seed == model.hyper.seed);
  CHECK(loaded.iterations_run == model.iterations_run);
  CHECK(loaded.best_iteration == model.best_iteration);
  REQUIRE(loaded.factors.slots.size() == model.factors.slots.size());
  for (std::size_t t = 0; t < loaded.factors.slots.size(); ++t)
    CHECK(oracle::bitwise_equal(loaded.factors.slots[t], model.factors.slots[t]));
  CHECK(oracle::bitwise_equal(loaded.target_factors, model.target_factors));

  // identical predictions everywhere
  for (int t = 1; t <= model.dims.slots; ++t)
    for (int i = 1; i <= model.dims.nodes; ++i)
      for (int j = 1; j <= model.dims.nodes; ++j)
        CHECK(predict_entry(loaded, t, i, j) == predict_entry(model, t, i, j));
}

TEST_CASE("model loader rejects foreign files") {
  const TempDir dir;
  const auto path = dir.file("bogus.txt");
  std::ofstream(path) << "not a model\n";
  CHECK(thrown_code([&] { load_model(path); }) == Errc::io_error);
  CHECK(thrown_code([&] { load_model(dir.file("missing.txt")); }) == Errc::io_error);
}

TEST_CASE("factor files round-trip bitwise") {
  const TempDir dir;
  SyntheticConfig cfg;
  cfg.nodes = 5;
  cfg.slots = 3;
  cfg.rank = 2;
  cfg.seed = 77;
  const auto [seq, truth] = generate_synthetic(cfg);
  const auto path = dir.file("truth.txt");
  save_factors(truth, path);
  const auto loaded = load_factors(path);
  REQUIRE(loaded.temporal.size() == truth.temporal.size());
  for (std::size_t t = 0; t < loaded.temporal.size(); ++t)
    CHECK(oracle::bitwise_equal(loaded.temporal[t], truth.temporal[t]));
  CHECK(oracle::bitwise_equal(loaded.consistent, truth.consistent));
}

TEST_CASE("report JSON carries the stable schema") {
  RunReport r;
  r.command = "evaluate";
  r.config = {{"input", "x.txt"}};
  r.stats = DatasetStats{4, 2, 10, 0.3125};
  EvalReport e;
  e.rmse = 0.25;
  e.mae = 0.125;
  e.count = 10;
  e.iterations_run = 7;
  r.eval = e;
  r.history = {IterationRecord{1, 0.5, 0.6, 0.0}, IterationRecord{2, 0.4, 0.5, 0.0}};
  r.seed = 1234;
  r.elapsed_seconds = 0.0;

  const auto j = to_json(r);
  CHECK(j.contains("rmse"));
  CHECK(j.contains("mae"));
  CHECK(j["command"] == "evaluate");
  CHECK(j["count"] == 10);
  CHECK(j["iterations_run"] == 7);
  CHECK(j["seed"] == 1234);
  CHECK(j["stats"]["known"] == 10);
  REQUIRE(j["history"].size() == 2);
  CHECK(j["history"][1]["val_rmse"] == 0.5);

  // re-reading reproduces every numeric field exactly
  const auto parsed = nlohmann::json::parse(j.dump(2));
  CHECK(parsed["rmse"].get<double>() == 0.25);
  CHECK(parsed["stats"]["density"].get<double>() == 0.3125);

  const TempDir dir;
  const auto path = dir.file("report.json");
  write_report(r, path);
  std::ifstream in(path);
  const auto from_disk = nlohmann::json::parse(in);
  CHECK(from_disk == j);
}

TEST_CASE("history CSV has a header and one row per iteration") {
  const TempDir dir;
  const std::vector<IterationRecord> h{IterationRecord{1, 0.5, 0.6, 0.01},
                                       IterationRecord{2, 0.25, 0.5, 0.01},
                                       IterationRecord{3, 0.2, 0.45, 0.01}};
  const auto path = dir.file("history.csv");
  write_history_csv(h, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "iteration,train_rmse,val_rmse,seconds");
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 3);
}
