#pragma once

#include <Eigen/Dense>
#include <vector>

namespace dynlf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Extents of a matrix sequence: M nodes, T time slots.
struct Dims {
  int nodes = 0;
  int slots = 0;
  friend bool operator==(const Dims&, const Dims&) = default;
};

/// A factor pair: one node-factor matrix per slot plus a single
/// target-factor matrix shared across every slot.
struct FactorSet {
  std::vector<Matrix> temporal;  // each nodes x rank
  Matrix consistent;             // nodes x rank
};

}  // namespace dynlf
