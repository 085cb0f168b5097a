#pragma once

#include <cstdint>
#include <stdexcept>

namespace stochgrad {

class OptimizerDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scalar Adam with bias-corrected moments.
struct AdamState {
  double m = 0.0;
  double v = 0.0;
  std::uint64_t t = 0;
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamResult {
  AdamState state;
  double theta = 0.0;
};

/// One update: theta - lr * m_hat / (sqrt(v_hat) + eps). Throws on a non-finite gradient.
AdamResult adam_step(const AdamState& state, double grad, double theta);

}  // namespace stochgrad
