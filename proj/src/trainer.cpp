#include "dynlf/trainer.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "dynlf/parallel.hpp"
#include "dynlf/rng.hpp"

namespace dynlf {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Matrix draw_factors(Rng& rng, int rows, int cols) {
  Matrix out(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out(r, c) = rng.factor_init();
  return out;
}

double rmse_against(const MatrixSequence& seq, const std::vector<Matrix>& slots,
                    const Matrix& q) {
  if (seq.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& e : seq.entries()) {
    const double r =
        e.w - slots[static_cast<std::size_t>(e.t - 1)].row(e.i - 1).dot(q.row(e.j - 1));
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(seq.size()));
}

/// Static prediction ignores the slot; one factor matrix serves all of them.
double rmse_static(const MatrixSequence& seq, const Matrix& a, const Matrix& q) {
  if (seq.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& e : seq.entries()) {
    const double r = e.w - a.row(e.i - 1).dot(q.row(e.j - 1));
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(seq.size()));
}

void require_split_dims(const MatrixSequence& train_set, const MatrixSequence& val_set) {
  if (!(train_set.dims() == val_set.dims()))
    fail(Errc::dimension_mismatch, "train and validation splits disagree on dims");
}

}  // namespace

void HyperParams::validate() const {
  if (rank < 1) fail(Errc::invalid_config, "rank must be >= 1");
  if (!(lambda > 0.0)) fail(Errc::invalid_config, "lambda must be > 0");
  if (!(activation.alpha > 0.0)) fail(Errc::invalid_config, "activation slope must be > 0");
  if (max_iters < 1) fail(Errc::invalid_config, "max_iters must be >= 1");
  if (!(err_threshold > 0.0)) fail(Errc::invalid_config, "err_threshold must be > 0");
  noise.validate();
}

double objective(const MatrixSequence& seq, const ekf::TemporalFactors& n, const Matrix& q,
                 double lambda) {
  if (n.slots.size() != static_cast<std::size_t>(seq.slots()))
    fail(Errc::dimension_mismatch, "node factors cover " + std::to_string(n.slots.size()) +
                                       " slots, sequence has " + std::to_string(seq.slots()));
  if (q.rows() != seq.nodes())
    fail(Errc::dimension_mismatch, "target factors have " + std::to_string(q.rows()) +
                                       " rows, sequence has " + std::to_string(seq.nodes()) +
                                       " nodes");
  double acc = 0.0;
  for (const auto& e : seq.entries()) {
    const auto n_row = n.slots[static_cast<std::size_t>(e.t - 1)].row(e.i - 1);
    const auto q_row = q.row(e.j - 1);
    const double r = e.w - n_row.dot(q_row);
    acc += lambda * r * r + n_row.squaredNorm() + q_row.squaredNorm();
  }
  return acc;
}

TrainedModel train(const MatrixSequence& train_set, const MatrixSequence& val_set,
                   const HyperParams& hp, int threads, const TrainHooks& hooks) {
  hp.validate();
  if (train_set.empty()) fail(Errc::empty_train_set, "training split is empty");
  if (val_set.empty()) fail(Errc::empty_sequence, "validation split is empty");
  require_split_dims(train_set, val_set);

  const int node_count = train_set.nodes();
  Rng rng(hp.seed);
  Matrix q = draw_factors(rng, node_count, hp.rank);
  const Matrix init_means = draw_factors(rng, node_count, hp.rank);

  TrainedModel model;
  model.dims = train_set.dims();
  model.rank = hp.rank;
  model.hyper = hp;

  double best_val = std::numeric_limits<double>::infinity();
  double prev_val = std::numeric_limits<double>::quiet_NaN();
  for (int iter = 1; iter <= hp.max_iters; ++iter) {
    const auto started = Clock::now();
    ekf::TemporalFactors factors;
    try {
      factors = ekf::run_n_procedure(train_set, q, hp.activation, hp.noise, init_means, threads,
                                     hooks.on_state);
      double before = 0.0;
      if (hooks.on_q_step) before = objective(train_set, factors, q, hp.lambda);
      q = als::run_q_procedure(train_set, factors, hp.lambda, q, threads);
      if (hooks.on_q_step) hooks.on_q_step(iter, before, objective(train_set, factors, q, hp.lambda));
    } catch (const Error& e) {
      fail(e.code(), "iteration " + std::to_string(iter) + ": " + e.what());
    }

    const double train_rmse = rmse_against(train_set, factors.slots, q);
    const double val_rmse = rmse_against(val_set, factors.slots, q);
    model.history.push_back(IterationRecord{iter, train_rmse, val_rmse, seconds_since(started)});

    if (val_rmse < best_val) {
      best_val = val_rmse;
      model.factors = std::move(factors);
      model.target_factors = q;
      model.best_iteration = iter;
    }
    if (iter >= 2 && std::abs(val_rmse - prev_val) < hp.err_threshold) break;
    prev_val = val_rmse;
  }
  model.iterations_run = static_cast<int>(model.history.size());
  return model;
}

TrainedModel train_static_baseline(const MatrixSequence& train_set,
                                   const MatrixSequence& val_set, const HyperParams& hp,
                                   int threads) {
  hp.validate();
  if (train_set.empty()) fail(Errc::empty_train_set, "training split is empty");
  if (val_set.empty()) fail(Errc::empty_sequence, "validation split is empty");
  require_split_dims(train_set, val_set);

  const int node_count = train_set.nodes();
  // Pool every slot into one completion problem: per-source and per-target
  // observation lists, slot index dropped.
  std::vector<std::vector<std::pair<int, double>>> by_source(
      static_cast<std::size_t>(node_count));
  std::vector<std::vector<std::pair<int, double>>> by_target(
      static_cast<std::size_t>(node_count));
  for (const auto& e : train_set.entries()) {
    by_source[static_cast<std::size_t>(e.i - 1)].emplace_back(e.j, e.w);
    by_target[static_cast<std::size_t>(e.j - 1)].emplace_back(e.i, e.w);
  }

  Rng rng(hp.seed);
  Matrix q = draw_factors(rng, node_count, hp.rank);
  Matrix a = draw_factors(rng, node_count, hp.rank);

  auto ridge_side = [&](Matrix& side, const Matrix& other,
                        const std::vector<std::vector<std::pair<int, double>>>& obs) {
    parallel_for(1, node_count + 1, threads, [&](int row) {
      const auto& list = obs[static_cast<std::size_t>(row - 1)];
      if (list.empty()) return;  // no evidence, keep the previous row
      als::StackedDesign d;
      d.design.resize(static_cast<Index>(list.size()), hp.rank);
      d.targets.resize(static_cast<Index>(list.size()));
      for (Index k = 0; k < static_cast<Index>(list.size()); ++k) {
        d.design.row(k) = other.row(list[static_cast<std::size_t>(k)].first - 1);
        d.targets[k] = list[static_cast<std::size_t>(k)].second;
      }
      side.row(row - 1) = als::solve_qj(d, hp.lambda).transpose();
    });
  };

  TrainedModel model;
  model.dims = train_set.dims();
  model.rank = hp.rank;
  model.hyper = hp;

  Matrix best_a;
  double best_val = std::numeric_limits<double>::infinity();
  double prev_val = std::numeric_limits<double>::quiet_NaN();
  for (int iter = 1; iter <= hp.max_iters; ++iter) {
    const auto started = Clock::now();
    try {
      ridge_side(a, q, by_source);
      ridge_side(q, a, by_target);
    } catch (const Error& e) {
      fail(e.code(), "iteration " + std::to_string(iter) + ": " + e.what());
    }
    const double train_rmse = rmse_static(train_set, a, q);
    const double val_rmse = rmse_static(val_set, a, q);
    model.history.push_back(IterationRecord{iter, train_rmse, val_rmse, seconds_since(started)});
    if (val_rmse < best_val) {
      best_val = val_rmse;
      best_a = a;
      model.target_factors = q;
      model.best_iteration = iter;
    }
    if (iter >= 2 && std::abs(val_rmse - prev_val) < hp.err_threshold) break;
    prev_val = val_rmse;
  }
  model.factors.slots.assign(static_cast<std::size_t>(train_set.slots()), best_a);
  model.iterations_run = static_cast<int>(model.history.size());
  return model;
}

double predict_entry(const TrainedModel& model, int t, int i, int j) {
  if (t < 1 || t > model.dims.slots ||
      static_cast<std::size_t>(t) > model.factors.slots.size())
    fail(Errc::index_out_of_range, "slot " + std::to_string(t) + " outside model");
  if (i < 1 || i > model.dims.nodes || j < 1 || j > model.dims.nodes)
    fail(Errc::index_out_of_range,
         "node pair (" + std::to_string(i) + "," + std::to_string(j) + ") outside model");
  return model.factors.slots[static_cast<std::size_t>(t - 1)].row(i - 1).dot(
      model.target_factors.row(j - 1));
}

EvalReport evaluate(const TrainedModel& model, const MatrixSequence& test_set) {
  if (test_set.empty()) fail(Errc::empty_test_set, "test split is empty");
  const auto started = Clock::now();
  double sq = 0.0;
  double abs_acc = 0.0;
  for (const auto& e : test_set.entries()) {
    const double r = e.w - predict_entry(model, e.t, e.i, e.j);
    sq += r * r;
    abs_acc += std::abs(r);
  }
  EvalReport rep;
  rep.count = test_set.size();
  rep.rmse = std::sqrt(sq / static_cast<double>(rep.count));
  rep.mae = abs_acc / static_cast<double>(rep.count);
  rep.iterations_run = model.iterations_run;
  rep.elapsed_seconds = seconds_since(started);
  return rep;
}

TrainedModel grid_search_lambda(const MatrixSequence& train_set, const MatrixSequence& val_set,
                                HyperParams hp, const std::vector<double>& grid, int threads,
                                ModelKind kind) {
  if (grid.empty()) fail(Errc::invalid_config, "lambda grid is empty");
  TrainedModel best;
  double best_val = std::numeric_limits<double>::infinity();
  for (double lambda : grid) {
    hp.lambda = lambda;
    TrainedModel candidate = kind == ModelKind::dynamic
                                 ? train(train_set, val_set, hp, threads)
                                 : train_static_baseline(train_set, val_set, hp, threads);
    if (candidate.best_val_rmse() < best_val) {
      best_val = candidate.best_val_rmse();
      best = std::move(candidate);
    }
  }
  return best;
}

}  // namespace dynlf
