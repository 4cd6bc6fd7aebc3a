#include "dynlf/als.hpp"

#include <string>

#include "dynlf/linalg.hpp"
#include "dynlf/parallel.hpp"

namespace dynlf::als {

StackedDesign build_stacked_design(const MatrixSequence& train, const ekf::TemporalFactors& n,
                                   int j) {
  if (n.slots.size() != static_cast<std::size_t>(train.slots()))
    fail(Errc::dimension_mismatch, "node factors cover " + std::to_string(n.slots.size()) +
                                       " slots, sequence has " + std::to_string(train.slots()));
  const auto obs = train.observations_of_column(j);
  const Index rank = n.slots.empty() ? 0 : n.slots.front().cols();
  StackedDesign d;
  d.design.resize(static_cast<Index>(obs.size()), rank);
  d.targets.resize(static_cast<Index>(obs.size()));
  for (Index a = 0; a < static_cast<Index>(obs.size()); ++a) {
    const auto& [t, i, w] = obs[static_cast<std::size_t>(a)];
    d.design.row(a) = n.slots[static_cast<std::size_t>(t - 1)].row(i - 1);
    d.targets[a] = w;
  }
  return d;
}

Vector solve_qj(const StackedDesign& d, double lambda) {
  if (!(lambda > 0.0)) fail(Errc::non_positive_lambda, "lambda must be > 0");
  const Index m = d.count();
  if (m == 0) fail(Errc::empty_design, "column has no observations");
  if (d.targets.size() != m)
    fail(Errc::dimension_mismatch, "design rows and targets are misaligned");
  Matrix gram = d.design.transpose() * d.design;
  gram = 0.5 * (gram + gram.transpose());
  gram.diagonal().array() += static_cast<double>(m) / lambda;
  return linalg::solve_spd(gram, Vector(d.design.transpose() * d.targets));
}

Vector partial_loss_gradient(const StackedDesign& d, const Vector& q, double lambda) {
  const Index m = d.count();
  if (m == 0) return Vector::Zero(q.size());
  if (d.design.cols() != q.size())
    fail(Errc::dimension_mismatch, "gradient: design has " + std::to_string(d.design.cols()) +
                                       " columns, q has " + std::to_string(q.size()));
  const Vector part1 = -2.0 * lambda * (d.design.transpose() * d.targets);
  const Vector part2 = 2.0 * lambda * (d.design.transpose() * (d.design * q));
  const Vector part3 = 2.0 * static_cast<double>(m) * q;
  return part1 + part2 + part3;
}

ConsistentFactors run_q_procedure(const MatrixSequence& train, const ekf::TemporalFactors& n,
                                  double lambda, const ConsistentFactors& previous, int threads) {
  if (!(lambda > 0.0)) fail(Errc::non_positive_lambda, "lambda must be > 0");
  const int node_count = train.nodes();
  if (previous.rows() != node_count)
    fail(Errc::dimension_mismatch, "previous factors have " + std::to_string(previous.rows()) +
                                       " rows, sequence has " + std::to_string(node_count) +
                                       " nodes");
  Matrix next(previous.rows(), previous.cols());
  parallel_for(1, node_count + 1, threads, [&](int j) {
    const auto d = build_stacked_design(train, n, j);
    if (d.count() == 0) {
      next.row(j - 1) = previous.row(j - 1);  // no evidence, keep the previous row
      return;
    }
    try {
      next.row(j - 1) = solve_qj(d, lambda).transpose();
    } catch (const Error& e) {
      fail(e.code(), "column " + std::to_string(j) + ": " + e.what());
    }
  });
  return next;
}

}  // namespace dynlf::als
