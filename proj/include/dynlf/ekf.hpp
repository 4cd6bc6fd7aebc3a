#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "dynlf/activation.hpp"
#include "dynlf/dataseq.hpp"
#include "dynlf/errors.hpp"
#include "dynlf/types.hpp"

namespace dynlf::ekf {

/// Isotropic noise levels of the latent dynamic system.
struct NoiseConfig {
  double w_var = 0.01;  // state-transition noise variance
  double r_var = 0.1;   // observation noise variance
  double p0 = 1.0;      // initial covariance scale
  void validate() const;
};

enum class Flavor { prior, posterior };

/// Gaussian belief over one node's latent state.
struct StateEstimate {
  Vector mean;
  Matrix cov;
  Flavor flavor = Flavor::posterior;
};

/// Affine expansion of the state transition at the previous posterior mean:
/// S(n) ~ jacobian * n + offset, exact at the expansion point.
struct TransitionLinearization {
  Matrix jacobian;  // diagonal for an elementwise transition
  Vector offset;
};

/// Affine expansion of the observation map at the prior mean, plus the
/// target-factor rows it was built from and the nonlinear prediction there.
struct ObservationLinearization {
  Matrix jacobian;     // m x rank
  Vector offset;       // length m
  Matrix target_rows;  // the m selected target-factor rows
  Vector predicted;    // target_rows * f(prior mean)
};

/// Per-slot node factors from the filter; row i-1 of slots[t-1] is the
/// posterior mean of node i at slot t. Covariances are retained for the
/// final slot only.
struct TemporalFactors {
  std::vector<Matrix> slots;
  std::vector<Matrix> last_covs;
};

/// Advances one node's belief a slot forward through the activation.
std::pair<StateEstimate, TransitionLinearization> predict(const StateEstimate& posterior,
                                                          const Activation& act,
                                                          const NoiseConfig& noise);

ObservationLinearization linearize_observation(const StateEstimate& prior,
                                               const Matrix& target_rows, const Activation& act);

/// Folds the slot's observed weights into the belief with one joint solve of
/// the m x m innovation covariance. With no observations, the posterior is
/// the prior unchanged.
StateEstimate update(const StateEstimate& prior, const Vector& observed,
                     const ObservationLinearization& lin, const NoiseConfig& noise);

using StateObserver =
    std::function<void(int t, int node, const StateEstimate& prior, const StateEstimate& posterior)>;

/// Filters every node independently across all slots against the current
/// target factors. An observer forces single-threaded execution so callbacks
/// arrive in (node, slot) order.
TemporalFactors run_n_procedure(const MatrixSequence& train, const Matrix& target_factors,
                                const Activation& act, const NoiseConfig& noise,
                                const Matrix& init_means, int threads = 1,
                                const StateObserver& observer = {});

}  // namespace dynlf::ekf
