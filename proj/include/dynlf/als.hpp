#pragma once

#include "dynlf/dataseq.hpp"
#include "dynlf/ekf.hpp"
#include "dynlf/errors.hpp"
#include "dynlf/types.hpp"

namespace dynlf::als {

/// One target-factor matrix shared by every slot.
using ConsistentFactors = Matrix;

/// Row-stacked node factors and observed weights of one target column: row a
/// is the node factor behind the a-th observation (in (t, i) order) and
/// targets[a] its weight.
struct StackedDesign {
  Matrix design;   // m x rank
  Vector targets;  // length m
  Index count() const { return design.rows(); }
};

StackedDesign build_stacked_design(const MatrixSequence& train, const ekf::TemporalFactors& n,
                                   int j);

/// Closed-form ridge solve for one target row: the normal equations carry a
/// count-scaled regularizer, (design^T design + (m / lambda) I) q = design^T targets.
Vector solve_qj(const StackedDesign& d, double lambda);

/// Gradient of the per-column partial loss at q; zero at the solve_qj output.
Vector partial_loss_gradient(const StackedDesign& d, const Vector& q, double lambda);

/// Solves every observed column; unobserved columns keep their previous row.
/// Column solves are independent, so results do not depend on thread count.
ConsistentFactors run_q_procedure(const MatrixSequence& train, const ekf::TemporalFactors& n,
                                  double lambda, const ConsistentFactors& previous,
                                  int threads = 1);

}  // namespace dynlf::als
