#include "dynlf/activation.hpp"

namespace dynlf {

std::pair<Vector, Vector> activation_eval(const Activation& act, const Vector& x) {
  Vector value(x.size());
  Vector slope(x.size());
  for (Index k = 0; k < x.size(); ++k) {
    value[k] = act.value(x[k]);
    slope[k] = act.slope(x[k]);
  }
  return {std::move(value), std::move(slope)};
}

Matrix activation_apply(const Activation& act, const Matrix& x) {
  return x.unaryExpr([&act](double v) { return act.value(v); });
}

}  // namespace dynlf
