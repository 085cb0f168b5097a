#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace stochgrad {

/// Raised when an elementary function is evaluated outside its domain.
class DomainError : public std::domain_error {
 public:
  DomainError(const std::string& op, const std::string& what)
      : std::domain_error(op + ": " + what), op_(op) {}

  const std::string& op() const noexcept { return op_; }

 private:
  std::string op_;
};

/**
 * Forward-mode dual number carrying one tangent.
 *
 * The tangent is the derivative with respect to the single differentiated
 * design parameter. Constants carry a zero tangent; the seed parameter
 * carries a unit tangent.
 */
struct Dual {
  double value = 0.0;
  double tangent = 0.0;

  constexpr Dual() = default;
  constexpr Dual(double v, double t) : value(v), tangent(t) {}

  static constexpr Dual constant(double v) { return {v, 0.0}; }
  static constexpr Dual variable(double v) { return {v, 1.0}; }

  bool finite() const { return std::isfinite(value) && std::isfinite(tangent); }

  Dual& operator+=(const Dual& o) {
    value += o.value;
    tangent += o.tangent;
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    value -= o.value;
    tangent -= o.tangent;
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    tangent = tangent * o.value + value * o.tangent;
    value *= o.value;
    return *this;
  }
};

inline Dual operator-(const Dual& a) { return {-a.value, -a.tangent}; }

inline Dual operator+(Dual a, const Dual& b) { return a += b; }
inline Dual operator-(Dual a, const Dual& b) { return a -= b; }
inline Dual operator*(Dual a, const Dual& b) { return a *= b; }

inline Dual operator+(const Dual& a, double c) { return {a.value + c, a.tangent}; }
inline Dual operator+(double c, const Dual& a) { return a + c; }
inline Dual operator-(const Dual& a, double c) { return {a.value - c, a.tangent}; }
inline Dual operator-(double c, const Dual& a) { return {c - a.value, -a.tangent}; }
inline Dual operator*(const Dual& a, double c) { return {a.value * c, a.tangent * c}; }
inline Dual operator*(double c, const Dual& a) { return a * c; }

inline Dual operator/(const Dual& a, const Dual& b) {
  if (b.value == 0.0) throw DomainError("div", "division by zero");
  const double inv = 1.0 / b.value;
  return {a.value * inv, (a.tangent * b.value - a.value * b.tangent) * inv * inv};
}
inline Dual operator/(const Dual& a, double c) { return a / Dual::constant(c); }
inline Dual operator/(double c, const Dual& b) { return Dual::constant(c) / b; }

inline Dual exp(const Dual& a) {
  const double e = std::exp(a.value);
  return {e, e * a.tangent};
}

inline Dual sin(const Dual& a) { return {std::sin(a.value), std::cos(a.value) * a.tangent}; }

inline Dual cos(const Dual& a) { return {std::cos(a.value), -std::sin(a.value) * a.tangent}; }

inline Dual sqrt(const Dual& a) {
  if (!(a.value > 0.0)) throw DomainError("sqrt", "argument must be positive");
  const double s = std::sqrt(a.value);
  return {s, a.tangent / (2.0 * s)};
}

// atan2(y, x); undefined at the origin.
inline Dual atan2(const Dual& y, const Dual& x) {
  const double r2 = x.value * x.value + y.value * y.value;
  if (r2 == 0.0) throw DomainError("atan2", "undefined at the origin");
  return {std::atan2(y.value, x.value), (x.value * y.tangent - y.value * x.tangent) / r2};
}

/// Logistic function 1 / (1 + e^{-a}), evaluated without overflow for large |a|.
inline Dual sigmoid(const Dual& a) {
  double s;
  if (a.value >= 0.0) {
    s = 1.0 / (1.0 + std::exp(-a.value));
  } else {
    const double e = std::exp(a.value);
    s = e / (1.0 + e);
  }
  return {s, s * (1.0 - s) * a.tangent};
}

}  // namespace stochgrad
