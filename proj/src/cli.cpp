#include "dynlf/cli.hpp"

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dynlf/dataseq.hpp"
#include "dynlf/errors.hpp"
#include "dynlf/model_io.hpp"
#include "dynlf/report.hpp"
#include "dynlf/text.hpp"
#include "dynlf/trainer.hpp"

namespace dynlf {

namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

std::string percent4(double density) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f%%", density * 100.0);
  return buf;
}

std::optional<Dims> parse_dims_flag(const std::string& dims_flag) {
  if (dims_flag.empty()) return std::nullopt;
  const auto comma = dims_flag.find(',');
  if (comma == std::string::npos)
    fail(Errc::invalid_config, "--dims expects 'M,T', got '" + dims_flag + "'");
  return Dims{static_cast<int>(parse_int(dims_flag.substr(0, comma))),
              static_cast<int>(parse_int(dims_flag.substr(comma + 1)))};
}

/// Hyperparameter flags shared by train and compare.
struct HyperFlags {
  int rank = 20;
  double lambda = 0.01;
  double alpha = 0.01;
  double w_var = 0.01;
  double r_var = 0.1;
  double p0 = 1.0;
  int max_iters = 500;
  double err_threshold = 1e-5;
  std::uint64_t seed = kDefaultSeed;
  std::vector<double> lambda_grid;

  HyperParams to_params() const {
    HyperParams hp;
    hp.rank = rank;
    hp.lambda = lambda;
    hp.activation = Activation::leaky_relu(alpha);
    hp.noise = ekf::NoiseConfig{w_var, r_var, p0};
    hp.max_iters = max_iters;
    hp.err_threshold = err_threshold;
    hp.seed = seed;
    return hp;
  }

  void add_to(CLI::App* cmd) {
    cmd->add_option("--rank", rank, "latent dimension");
    cmd->add_option("--lambda", lambda, "regularization coefficient (scales the data term)");
    cmd->add_option("--lambda-grid", lambda_grid,
                    "validation grid over lambda; overrides --lambda")
        ->delimiter(',');
    cmd->add_option("--alpha", alpha, "activation negative-side slope");
    cmd->add_option("--w-var", w_var, "state-transition noise variance");
    cmd->add_option("--r-var", r_var, "observation noise variance");
    cmd->add_option("--p0", p0, "initial covariance scale");
    cmd->add_option("--max-iters", max_iters, "iteration cap");
    cmd->add_option("--err-threshold", err_threshold, "validation RMSE change threshold");
    cmd->add_option("--seed", seed, "random seed");
  }

  json config_json(double effective_lambda) const {
    json j{{"rank", rank},          {"lambda", effective_lambda},
           {"alpha", alpha},        {"w_var", w_var},
           {"r_var", r_var},        {"p0", p0},
           {"max_iters", max_iters}, {"err_threshold", err_threshold}};
    if (!lambda_grid.empty()) j["lambda_grid"] = lambda_grid;
    return j;
  }
};

/// Zeroes timing fields when byte-stable output is requested.
void finalize_timing(RunReport& report, Clock::time_point started, bool no_timing) {
  if (no_timing) {
    report.elapsed_seconds = 0.0;
    for (auto& rec : report.history) rec.seconds = 0.0;
  } else {
    report.elapsed_seconds = std::chrono::duration<double>(Clock::now() - started).count();
  }
}

struct GenerateArgs {
  SyntheticConfig cfg;
  std::string output;
  std::string truth;
  std::string report_path;
  bool no_timing = false;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  const auto started = Clock::now();
  auto [seq, ground_truth] = generate_synthetic(a.cfg);
  write_sequence_file(seq, a.output);
  const std::string truth_path = a.truth.empty() ? a.output + ".truth" : a.truth;
  save_factors(ground_truth, truth_path);
  const auto s = stats(seq);
  out << "generated " << s.known << " observations (" << s.nodes << " nodes, " << s.slots
      << " slots, density " << percent4(s.density) << ") -> " << a.output << '\n';

  if (!a.report_path.empty()) {
    RunReport report;
    report.command = "generate";
    report.config = {{"nodes", a.cfg.nodes},   {"slots", a.cfg.slots},
                     {"rank", a.cfg.rank},     {"density", a.cfg.density},
                     {"drift", a.cfg.drift_scale}, {"noise", a.cfg.noise_sigma},
                     {"alpha", a.cfg.alpha},   {"output", a.output},
                     {"truth", truth_path}};
    report.stats = s;
    report.seed = a.cfg.seed;
    finalize_timing(report, started, a.no_timing);
    write_report(report, a.report_path);
  }
  return 0;
}

struct SplitArgs {
  std::string input;
  std::string output;
  std::string dims_flag;
  SplitSpec spec;
  std::string report_path;
  bool no_timing = false;
};

int cmd_split(const SplitArgs& a, std::ostream& out) {
  const auto started = Clock::now();
  const auto seq = read_sequence_file(a.input, parse_dims_flag(a.dims_flag));
  const auto parts = split(seq, a.spec);
  write_sequence_file(parts.train, a.output + ".train");
  write_sequence_file(parts.val, a.output + ".val");
  write_sequence_file(parts.test, a.output + ".test");
  out << "split " << seq.size() << " -> " << parts.train.size() << " train, " << parts.val.size()
      << " val, " << parts.test.size() << " test\n";

  if (!a.report_path.empty()) {
    RunReport report;
    report.command = "split";
    report.config = {{"input", a.input},
                     {"output", a.output},
                     {"train_frac", a.spec.train_frac},
                     {"val_frac", a.spec.val_frac},
                     {"test_frac", a.spec.test_frac}};
    report.stats = stats(seq);
    report.seed = a.spec.seed;
    report.extra = {{"splits",
                     {{"train", parts.train.size()},
                      {"val", parts.val.size()},
                      {"test", parts.test.size()}}}};
    finalize_timing(report, started, a.no_timing);
    write_report(report, a.report_path);
  }
  return 0;
}

struct TrainArgs {
  std::string train_path;
  std::string val_path;
  std::string dims_flag;
  HyperFlags hyper;
  std::string model_out;
  std::string report_path;
  std::string history_csv;
  int threads = 1;
  bool no_timing = false;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
  const auto started = Clock::now();
  const auto declared = parse_dims_flag(a.dims_flag);
  const auto train_set = read_sequence_file(a.train_path, declared);
  const auto val_set = read_sequence_file(a.val_path, declared);
  const HyperParams hp = a.hyper.to_params();
  const TrainedModel model =
      a.hyper.lambda_grid.empty()
          ? train(train_set, val_set, hp, a.threads)
          : grid_search_lambda(train_set, val_set, hp, a.hyper.lambda_grid, a.threads);
  const EvalReport on_val = evaluate(model, val_set);
  if (!a.model_out.empty()) save_model(model, a.model_out);
  if (!a.history_csv.empty()) write_history_csv(model.history, a.history_csv);
  out << "trained in " << model.iterations_run << " iterations (best " << model.best_iteration
      << "), lambda " << format_double(model.hyper.lambda) << ", validation rmse "
      << format_double(on_val.rmse) << ", mae " << format_double(on_val.mae) << '\n';

  if (!a.report_path.empty()) {
    RunReport report;
    report.command = "train";
    report.config = a.hyper.config_json(model.hyper.lambda);
    report.config["train"] = a.train_path;
    report.config["val"] = a.val_path;
    if (!a.model_out.empty()) report.config["output"] = a.model_out;
    report.stats = stats(train_set);
    report.eval = on_val;
    report.history = model.history;
    report.seed = hp.seed;
    report.extra = {{"best_iteration", model.best_iteration}};
    finalize_timing(report, started, a.no_timing);
    write_report(report, a.report_path);
  }
  return 0;
}

struct EvaluateArgs {
  std::string model_path;
  std::string input;
  std::string dims_flag;
  std::string report_path;
  bool no_timing = false;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const auto started = Clock::now();
  const TrainedModel model = load_model(a.model_path);
  const auto test_set = read_sequence_file(a.input, parse_dims_flag(a.dims_flag));
  const EvalReport rep = evaluate(model, test_set);
  out << "rmse " << format_double(rep.rmse) << ", mae " << format_double(rep.mae) << " over "
      << rep.count << " entries\n";

  if (!a.report_path.empty()) {
    RunReport report;
    report.command = "evaluate";
    report.config = {{"model", a.model_path},
                     {"input", a.input},
                     {"lambda", model.hyper.lambda},
                     {"rank", model.rank}};
    report.stats = stats(test_set);
    report.eval = rep;
    report.seed = model.hyper.seed;
    finalize_timing(report, started, a.no_timing);
    write_report(report, a.report_path);
  }
  return 0;
}

struct InspectArgs {
  std::string input;
  std::string dims_flag;
  std::string report_path;
  bool no_timing = false;
};

int cmd_inspect(const InspectArgs& a, std::ostream& out) {
  const auto started = Clock::now();
  const auto seq = read_sequence_file(a.input, parse_dims_flag(a.dims_flag));
  const auto s = stats(seq);
  out << "nodes " << s.nodes << '\n'
      << "slots " << s.slots << '\n'
      << "known " << s.known << '\n'
      << "density " << format_double(s.density) << " (" << percent4(s.density) << ")\n";

  if (!a.report_path.empty()) {
    RunReport report;
    report.command = "inspect";
    report.config = {{"input", a.input}};
    report.stats = s;
    finalize_timing(report, started, a.no_timing);
    write_report(report, a.report_path);
  }
  return 0;
}

struct CompareArgs {
  std::string train_path;
  std::string val_path;
  std::string test_path;
  std::string dims_flag;
  HyperFlags hyper;
  std::string report_path;
  int threads = 1;
  bool no_timing = false;
};

int cmd_compare(const CompareArgs& a, std::ostream& out) {
  const auto started = Clock::now();
  const auto declared = parse_dims_flag(a.dims_flag);
  const auto train_set = read_sequence_file(a.train_path, declared);
  const auto val_set = read_sequence_file(a.val_path, declared);
  const auto test_set = read_sequence_file(a.test_path, declared);
  const HyperParams hp = a.hyper.to_params();

  auto fit = [&](ModelKind kind) {
    return a.hyper.lambda_grid.empty()
               ? (kind == ModelKind::dynamic ? train(train_set, val_set, hp, a.threads)
                                             : train_static_baseline(train_set, val_set, hp,
                                                                     a.threads))
               : grid_search_lambda(train_set, val_set, hp, a.hyper.lambda_grid, a.threads, kind);
  };
  const TrainedModel dynamic_model = fit(ModelKind::dynamic);
  const TrainedModel static_model = fit(ModelKind::static_pooled);
  const EvalReport dynamic_eval = evaluate(dynamic_model, test_set);
  const EvalReport static_eval = evaluate(static_model, test_set);

  out << "dynamic: test rmse " << format_double(dynamic_eval.rmse) << ", mae "
      << format_double(dynamic_eval.mae) << " (" << dynamic_model.iterations_run
      << " iterations, lambda " << format_double(dynamic_model.hyper.lambda) << ")\n";
  out << "static:  test rmse " << format_double(static_eval.rmse) << ", mae "
      << format_double(static_eval.mae) << " (" << static_model.iterations_run
      << " iterations, lambda " << format_double(static_model.hyper.lambda) << ")\n";

  if (!a.report_path.empty()) {
    RunReport report;
    report.command = "compare";
    report.config = a.hyper.config_json(hp.lambda);
    report.config["train"] = a.train_path;
    report.config["val"] = a.val_path;
    report.config["test"] = a.test_path;
    report.stats = stats(train_set);
    report.seed = hp.seed;
    auto side = [&](const TrainedModel& m, const EvalReport& e) {
      auto h = m.history;
      if (a.no_timing)
        for (auto& rec : h) rec.seconds = 0.0;
      return json{{"rmse", e.rmse},
                  {"mae", e.mae},
                  {"count", e.count},
                  {"iterations_run", e.iterations_run},
                  {"best_iteration", m.best_iteration},
                  {"lambda", m.hyper.lambda},
                  {"history", history_json(h)}};
    };
    report.extra = {{"dynamic", side(dynamic_model, dynamic_eval)},
                    {"static", side(static_model, static_eval)}};
    finalize_timing(report, started, a.no_timing);
    write_report(report, a.report_path);
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"missing edge-weight completion for dynamic weighted directed graphs"};
  app.name("dynlf");
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "write a synthetic sequence + ground truth");
  generate->add_option("--nodes", gen.cfg.nodes, "node count");
  generate->add_option("--slots", gen.cfg.slots, "time slot count");
  generate->add_option("--rank", gen.cfg.rank, "latent rank of the ground truth");
  generate->add_option("--density", gen.cfg.density, "per-entry keep probability");
  generate->add_option("--drift", gen.cfg.drift_scale, "latent random-walk std-dev");
  generate->add_option("--noise", gen.cfg.noise_sigma, "observation noise std-dev");
  generate->add_option("--alpha", gen.cfg.alpha, "activation negative-side slope");
  generate->add_option("--seed", gen.cfg.seed, "random seed");
  generate->add_option("--output", gen.output, "sequence file to write")->required();
  generate->add_option("--truth", gen.truth, "ground-truth factors file (default <output>.truth)");
  generate->add_option("--report", gen.report_path, "JSON report path");
  generate->add_flag("--no-timing", gen.no_timing, "render timing fields as 0");

  SplitArgs sp;
  auto* split_cmd = app.add_subcommand("split", "partition a sequence into train/val/test files");
  split_cmd->add_option("--input", sp.input, "sequence file")->required();
  split_cmd->add_option("--output", sp.output, "output prefix (.train/.val/.test)")->required();
  split_cmd->add_option("--dims", sp.dims_flag, "M,T when the file has no header");
  split_cmd->add_option("--train-frac", sp.spec.train_frac, "training fraction");
  split_cmd->add_option("--val-frac", sp.spec.val_frac, "validation fraction");
  split_cmd->add_option("--test-frac", sp.spec.test_frac, "test fraction");
  split_cmd->add_option("--seed", sp.spec.seed, "shuffle seed");
  split_cmd->add_option("--report", sp.report_path, "JSON report path");
  split_cmd->add_flag("--no-timing", sp.no_timing, "render timing fields as 0");

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "fit the filtered latent factor model");
  train_cmd->add_option("--train", tr.train_path, "training sequence file")->required();
  train_cmd->add_option("--val", tr.val_path, "validation sequence file")->required();
  train_cmd->add_option("--dims", tr.dims_flag, "M,T when files have no header");
  tr.hyper.add_to(train_cmd);
  train_cmd->add_option("--output", tr.model_out, "model file to write");
  train_cmd->add_option("--report", tr.report_path, "JSON report path");
  train_cmd->add_option("--history-csv", tr.history_csv, "per-iteration history CSV path");
  train_cmd->add_option("--threads", tr.threads, "worker threads (does not change results)");
  train_cmd->add_flag("--no-timing", tr.no_timing, "render timing fields as 0");

  EvaluateArgs ev;
  auto* eval_cmd = app.add_subcommand("evaluate", "score a saved model on held-out entries");
  eval_cmd->add_option("--model", ev.model_path, "model file")->required();
  eval_cmd->add_option("--input", ev.input, "test sequence file")->required();
  eval_cmd->add_option("--dims", ev.dims_flag, "M,T when the file has no header");
  eval_cmd->add_option("--report", ev.report_path, "JSON report path");
  eval_cmd->add_flag("--no-timing", ev.no_timing, "render timing fields as 0");

  InspectArgs in;
  auto* inspect_cmd = app.add_subcommand("inspect", "print dataset statistics");
  inspect_cmd->add_option("--input", in.input, "sequence file")->required();
  inspect_cmd->add_option("--dims", in.dims_flag, "M,T when the file has no header");
  inspect_cmd->add_option("--report", in.report_path, "JSON report path");
  inspect_cmd->add_flag("--no-timing", in.no_timing, "render timing fields as 0");

  CompareArgs cp;
  auto* compare_cmd =
      app.add_subcommand("compare", "train the dynamic model and the static baseline side by side");
  compare_cmd->add_option("--train", cp.train_path, "training sequence file")->required();
  compare_cmd->add_option("--val", cp.val_path, "validation sequence file")->required();
  compare_cmd->add_option("--test", cp.test_path, "test sequence file")->required();
  compare_cmd->add_option("--dims", cp.dims_flag, "M,T when files have no header");
  cp.hyper.add_to(compare_cmd);
  compare_cmd->add_option("--report", cp.report_path, "JSON report path");
  compare_cmd->add_option("--threads", cp.threads, "worker threads (does not change results)");
  compare_cmd->add_flag("--no-timing", cp.no_timing, "render timing fields as 0");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("dynlf");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\nrun 'dynlf --help' for usage\n";
    return 2;
  }

  try {
    if (generate->parsed()) return cmd_generate(gen, out);
    if (split_cmd->parsed()) return cmd_split(sp, out);
    if (train_cmd->parsed()) return cmd_train(tr, out);
    if (eval_cmd->parsed()) return cmd_evaluate(ev, out);
    if (inspect_cmd->parsed()) return cmd_inspect(in, out);
    if (compare_cmd->parsed()) return cmd_compare(cp, out);
  } catch (const Error& e) {
    err << "error (" << errc_name(e.code()) << "): " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace dynlf
