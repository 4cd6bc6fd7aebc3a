#include "dynlf/ekf.hpp"

#include <string>
#include <utility>

#include "dynlf/linalg.hpp"
#include "dynlf/parallel.hpp"

namespace dynlf::ekf {

namespace {

void require_flavor(const StateEstimate& s, Flavor expected, const char* who) {
  if (s.flavor != expected)
    fail(Errc::invalid_config, std::string(who) + " expects a " +
                                   (expected == Flavor::prior ? "prior" : "posterior") +
                                   " estimate");
}

void require_finite(const StateEstimate& s, const char* who) {
  if (!s.mean.allFinite() || !s.cov.allFinite())
    fail(Errc::non_finite_state, std::string(who) + ": state has non-finite values");
}

}  // namespace

void NoiseConfig::validate() const {
  if (!(w_var >= 0.0) || !(r_var >= 0.0))
    fail(Errc::invalid_config, "noise variances must be finite and >= 0");
  if (!(p0 > 0.0)) fail(Errc::invalid_config, "initial covariance scale must be > 0");
}

std::pair<StateEstimate, TransitionLinearization> predict(const StateEstimate& posterior,
                                                          const Activation& act,
                                                          const NoiseConfig& noise) {
  require_flavor(posterior, Flavor::posterior, "predict");
  require_finite(posterior, "predict");
  auto [value, slope] = activation_eval(act, posterior.mean);

  TransitionLinearization lin;
  lin.jacobian = Matrix(slope.asDiagonal());
  lin.offset = value - slope.cwiseProduct(posterior.mean);

  StateEstimate prior;
  prior.flavor = Flavor::prior;
  prior.mean = value;
  Matrix cov = slope.asDiagonal() * posterior.cov * slope.asDiagonal();
  cov.diagonal().array() += noise.w_var;
  prior.cov = linalg::symmetrize(cov);
  require_finite(prior, "predict");
  return {std::move(prior), std::move(lin)};
}

ObservationLinearization linearize_observation(const StateEstimate& prior,
                                               const Matrix& target_rows, const Activation& act) {
  require_flavor(prior, Flavor::prior, "linearize_observation");
  if (target_rows.rows() < 1)
    fail(Errc::dimension_mismatch, "linearize_observation: needs at least one target row");
  if (target_rows.cols() != prior.mean.size())
    fail(Errc::dimension_mismatch, "linearize_observation: target rows have " +
                                       std::to_string(target_rows.cols()) +
                                       " columns, state has rank " +
                                       std::to_string(prior.mean.size()));
  auto [value, slope] = activation_eval(act, prior.mean);
  ObservationLinearization lin;
  lin.target_rows = target_rows;
  lin.predicted = target_rows * value;
  lin.jacobian = target_rows * slope.asDiagonal();
  lin.offset = lin.predicted - lin.jacobian * prior.mean;
  return lin;
}

StateEstimate update(const StateEstimate& prior, const Vector& observed,
                     const ObservationLinearization& lin, const NoiseConfig& noise) {
  require_flavor(prior, Flavor::prior, "update");
  require_finite(prior, "update");
  const Index m = observed.size();
  if (m == 0) return StateEstimate{prior.mean, prior.cov, Flavor::posterior};
  if (lin.jacobian.rows() != m || lin.predicted.size() != m)
    fail(Errc::dimension_mismatch, "update: " + std::to_string(m) + " observations vs " +
                                       std::to_string(lin.jacobian.rows()) + " linearized rows");
  if (!observed.allFinite()) fail(Errc::non_finite_state, "update: observations not finite");

  const Matrix cross = lin.jacobian * prior.cov;  // m x f
  Matrix innovation_cov = linalg::symmetrize(cross * lin.jacobian.transpose());
  innovation_cov.diagonal().array() += noise.r_var;

  // gain = P D^T S^{-1}, computed as (S^{-1} D P)^T since S and P are symmetric
  const Matrix gain = linalg::solve_spd(innovation_cov, cross).transpose();

  StateEstimate post;
  post.flavor = Flavor::posterior;
  post.mean = prior.mean + gain * (observed - lin.predicted);
  post.cov = linalg::symmetrize(prior.cov - gain * cross);
  require_finite(post, "update");
  return post;
}

TemporalFactors run_n_procedure(const MatrixSequence& train, const Matrix& target_factors,
                                const Activation& act, const NoiseConfig& noise,
                                const Matrix& init_means, int threads,
                                const StateObserver& observer) {
  noise.validate();
  const int node_count = train.nodes();
  const int slot_count = train.slots();
  const Index rank = target_factors.cols();
  if (target_factors.rows() != node_count)
    fail(Errc::dimension_mismatch, "target factors have " +
                                       std::to_string(target_factors.rows()) + " rows, sequence has " +
                                       std::to_string(node_count) + " nodes");
  if (init_means.rows() != node_count || init_means.cols() != rank)
    fail(Errc::dimension_mismatch, "initial means must be nodes x rank");
  if (!target_factors.allFinite() || !init_means.allFinite())
    fail(Errc::non_finite_state, "target factors and initial means must be finite");

  TemporalFactors out;
  out.slots.assign(static_cast<std::size_t>(slot_count), Matrix(node_count, rank));
  out.last_covs.assign(static_cast<std::size_t>(node_count), Matrix());

  auto track_node = [&](int node) {
    StateEstimate state{init_means.row(node - 1).transpose(),
                        noise.p0 * Matrix::Identity(rank, rank), Flavor::posterior};
    int slot = 0;
    try {
      for (slot = 1; slot <= slot_count; ++slot) {
        auto [prior, transition] = predict(state, act, noise);
        (void)transition;
        const auto obs = train.observations_of_node_at(slot, node);
        StateEstimate post;
        if (obs.empty()) {
          post = StateEstimate{prior.mean, prior.cov, Flavor::posterior};
        } else {
          const Index m = static_cast<Index>(obs.size());
          Matrix rows(m, rank);
          Vector y(m);
          for (Index a = 0; a < m; ++a) {
            rows.row(a) = target_factors.row(obs[static_cast<std::size_t>(a)].first - 1);
            y[a] = obs[static_cast<std::size_t>(a)].second;
          }
          const auto lin = linearize_observation(prior, rows, act);
          post = update(prior, y, lin, noise);
        }
        if (observer) observer(slot, node, prior, post);
        out.slots[static_cast<std::size_t>(slot - 1)].row(node - 1) = post.mean.transpose();
        state = std::move(post);
      }
    } catch (const Error& e) {
      fail(e.code(), "node " + std::to_string(node) + " slot " + std::to_string(slot) + ": " +
                         e.what());
    }
    out.last_covs[static_cast<std::size_t>(node - 1)] = state.cov;
  };

  if (observer) threads = 1;
  parallel_for(1, node_count + 1, threads, track_node);
  return out;
}

}  // namespace dynlf::ekf
