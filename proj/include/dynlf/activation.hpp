#pragma once

#include <utility>

#include "dynlf/errors.hpp"
#include "dynlf/types.hpp"

namespace dynlf {

/// Elementwise nonlinearity shared by the state transition and the
/// observation map. identity is leaky_relu with slope 1.
struct Activation {
  enum class Kind { leaky_relu, identity };

  Kind kind = Kind::leaky_relu;
  double alpha = 0.01;  // negative-side slope, > 0

  static Activation leaky_relu(double alpha) {
    if (!(alpha > 0.0)) fail(Errc::invalid_config, "activation slope must be > 0");
    return Activation{Kind::leaky_relu, alpha};
  }
  static Activation identity() { return Activation{Kind::identity, 1.0}; }

  double value(double x) const {
    if (kind == Kind::identity) return x;
    return x > 0.0 ? x : alpha * x;
  }

  /// Derivative; the kink at 0 takes the negative-side slope.
  double slope(double x) const {
    if (kind == Kind::identity) return 1.0;
    return x > 0.0 ? 1.0 : alpha;
  }
};

/// Elementwise (f(x), f'(x)).
std::pair<Vector, Vector> activation_eval(const Activation& act, const Vector& x);

/// Elementwise f over a full matrix.
Matrix activation_apply(const Activation& act, const Matrix& x);

}  // namespace dynlf
