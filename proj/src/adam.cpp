#include "stochgrad/adam.hpp"

#include <cmath>
#include <string>

namespace stochgrad {

AdamResult adam_step(const AdamState& state, double grad, double theta) {
  if (!std::isfinite(grad)) throw OptimizerDiverged("adam: non-finite gradient at step " + std::to_string(state.t));
  AdamResult r{state, theta};
  AdamState& s = r.state;
  s.t += 1;
  s.m = s.beta1 * s.m + (1.0 - s.beta1) * grad;
  s.v = s.beta2 * s.v + (1.0 - s.beta2) * grad * grad;
  const double t = static_cast<double>(s.t);
  const double m_hat = s.m / (1.0 - std::pow(s.beta1, t));
  const double v_hat = s.v / (1.0 - std::pow(s.beta2, t));
  r.theta = theta - s.lr * m_hat / (std::sqrt(v_hat) + s.eps);
  return r;
}

}  // namespace stochgrad
