#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dynlf/als.hpp"
#include "dynlf/dataseq.hpp"
#include "dynlf/ekf.hpp"
#include "dynlf/types.hpp"

namespace dynlf {

struct HyperParams {
  int rank = 20;
  double lambda = 0.01;  // scales the data term; larger means weaker regularization
  Activation activation{Activation::Kind::leaky_relu, 0.01};
  ekf::NoiseConfig noise{};
  int max_iters = 500;
  double err_threshold = 1e-5;  // stop when |delta validation RMSE| falls below
  std::uint64_t seed = kDefaultSeed;
  void validate() const;
};

struct IterationRecord {
  int iteration = 0;
  double train_rmse = 0.0;
  double val_rmse = 0.0;
  double seconds = 0.0;
};

struct TrainedModel {
  Dims dims;
  int rank = 0;
  ekf::TemporalFactors factors;  // static baseline: identical slots
  Matrix target_factors;
  HyperParams hyper;
  std::vector<IterationRecord> history;
  int iterations_run = 0;
  int best_iteration = 0;

  double best_val_rmse() const { return history.at(best_iteration - 1).val_rmse; }
};

struct EvalReport {
  double rmse = 0.0;
  double mae = 0.0;
  std::size_t count = 0;
  double elapsed_seconds = 0.0;
  int iterations_run = 0;
};

/// Instrumentation points for invariant checks; leave empty in normal runs.
struct TrainHooks {
  ekf::StateObserver on_state;
  std::function<void(int iteration, double objective_before, double objective_after)> on_q_step;
};

/// Regularized squared error over the observed entries: per entry,
/// lambda * residual^2 plus the squared norms of both factor rows.
double objective(const MatrixSequence& seq, const ekf::TemporalFactors& n, const Matrix& q,
                 double lambda);

/// Alternates the filter pass and the per-column ridge solves, monitors
/// validation RMSE for termination, and returns the best-validation snapshot
/// with the full per-iteration history.
TrainedModel train(const MatrixSequence& train_set, const MatrixSequence& val_set,
                   const HyperParams& hp, int threads = 1, const TrainHooks& hooks = {});

/// Static control: pools all slots into one completion problem and alternates
/// the same closed-form ridge solve on both factor sides. Same termination
/// and snapshot rules; the returned factors repeat one matrix across slots.
TrainedModel train_static_baseline(const MatrixSequence& train_set, const MatrixSequence& val_set,
                                   const HyperParams& hp, int threads = 1);

double predict_entry(const TrainedModel& model, int t, int i, int j);

EvalReport evaluate(const TrainedModel& model, const MatrixSequence& test_set);

enum class ModelKind { dynamic, static_pooled };

/// Trains once per lambda value and keeps the lowest-validation-RMSE model
/// (ties keep the earlier grid entry).
TrainedModel grid_search_lambda(const MatrixSequence& train_set, const MatrixSequence& val_set,
                                HyperParams hp, const std::vector<double>& grid, int threads = 1,
                                ModelKind kind = ModelKind::dynamic);

}  // namespace dynlf
