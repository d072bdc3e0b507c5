#pragma once

#include <cmath>

#include "warpsol/errors.hpp"

namespace warpsol {

/// Value of a scalar function of s together with its first three
/// s-derivatives.
struct Jet3 {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;

  static constexpr Jet3 constant(double c) { return {c, 0.0, 0.0, 0.0}; }
  static constexpr Jet3 variable(double s) { return {s, 1.0, 0.0, 0.0}; }

  /// Jet of the derivative; the top channel is unknown and set to zero.
  constexpr Jet3 shifted() const { return {d1, d2, d3, 0.0}; }

  bool finite() const {
    return std::isfinite(v) && std::isfinite(d1) && std::isfinite(d2) &&
           std::isfinite(d3);
  }

  friend constexpr bool operator==(const Jet3&, const Jet3&) = default;
};

/// Chain rule to third order: given g and its derivatives g1..g3 at u.v,
/// returns the jet of g(u).
constexpr Jet3 compose(const Jet3& u, double g0, double g1, double g2, double g3) {
  return {g0, g1 * u.d1, g2 * u.d1 * u.d1 + g1 * u.d2,
          g3 * u.d1 * u.d1 * u.d1 + 3.0 * g2 * u.d1 * u.d2 + g1 * u.d3};
}

constexpr Jet3 operator+(const Jet3& a, const Jet3& b) {
  return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2, a.d3 + b.d3};
}
constexpr Jet3 operator-(const Jet3& a, const Jet3& b) {
  return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2, a.d3 - b.d3};
}
constexpr Jet3 operator-(const Jet3& a) { return {-a.v, -a.d1, -a.d2, -a.d3}; }

constexpr Jet3 operator*(const Jet3& a, const Jet3& b) {
  return {a.v * b.v, a.d1 * b.v + a.v * b.d1,
          a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2,
          a.d3 * b.v + 3.0 * a.d2 * b.d1 + 3.0 * a.d1 * b.d2 + a.v * b.d3};
}

constexpr Jet3 operator*(double c, const Jet3& a) { return {c * a.v, c * a.d1, c * a.d2, c * a.d3}; }
constexpr Jet3 operator*(const Jet3& a, double c) { return c * a; }
constexpr Jet3 operator+(const Jet3& a, double c) { return {a.v + c, a.d1, a.d2, a.d3}; }
constexpr Jet3 operator+(double c, const Jet3& a) { return a + c; }
constexpr Jet3 operator-(const Jet3& a, double c) { return {a.v - c, a.d1, a.d2, a.d3}; }
constexpr Jet3 operator-(double c, const Jet3& a) { return {c - a.v, -a.d1, -a.d2, -a.d3}; }

inline Jet3 reciprocal(const Jet3& a) {
  if (a.v == 0.0) throw DomainError("division by zero");
  const double x = 1.0 / a.v;
  return compose(a, x, -x * x, 2.0 * x * x * x, -6.0 * x * x * x * x);
}

inline Jet3 operator/(const Jet3& a, const Jet3& b) { return a * reciprocal(b); }
inline Jet3 operator/(const Jet3& a, double c) {
  if (c == 0.0) throw DomainError("division by zero");
  return (1.0 / c) * a;
}

inline Jet3 exp(const Jet3& a) {
  const double e = std::exp(a.v);
  return compose(a, e, e, e, e);
}

inline Jet3 log(const Jet3& a) {
  if (!(a.v > 0.0)) throw DomainError("log of non-positive value");
  const double x = 1.0 / a.v;
  return compose(a, std::log(a.v), x, -x * x, 2.0 * x * x * x);
}

/// a^p for a real constant exponent. Non-integer p requires a.v > 0;
/// negative integer p requires a.v != 0.
inline Jet3 pow(const Jet3& a, double p) {
  const bool integral = std::floor(p) == p;
  if (!integral && !(a.v > 0.0)) throw DomainError("fractional power of non-positive value");
  if (integral && p < 0.0 && a.v == 0.0) throw DomainError("division by zero");
  // g_k = p (p-1) ... (p-k+1) a^(p-k); a vanishing falling factorial kills
  // the term even when a^(p-k) would blow up at a = 0.
  double g[4];
  double falling = 1.0;
  for (int k = 0; k < 4; ++k) {
    g[k] = falling == 0.0 ? 0.0 : falling * std::pow(a.v, p - k);
    falling *= (p - k);
  }
  return compose(a, g[0], g[1], g[2], g[3]);
}

/// a^b with a jet exponent; falls back to the constant-exponent rule when b
/// has no s-dependence.
inline Jet3 pow(const Jet3& a, const Jet3& b) {
  if (b.d1 == 0.0 && b.d2 == 0.0 && b.d3 == 0.0) return pow(a, b.v);
  return exp(b * log(a));
}

enum class JetOp { add, sub, mul, div, pow, exp, log };

/// Uniform entry point over the jet rules; `b` is ignored by the unary ops.
Jet3 jet_combine(JetOp op, const Jet3& a, const Jet3& b = Jet3{});

}  // namespace warpsol
