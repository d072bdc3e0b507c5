#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>

#include "warpsol/expr.hpp"

namespace testing_support {

using warpsol::Expr;

// Independent scalar evaluation in extended precision, walking the tree
// with library math only (no jet code involved).
inline long double eval_ld(const Expr& e, long double s) {
  switch (e.kind()) {
    case Expr::Kind::number: return e.value();
    case Expr::Kind::var: return s;
    case Expr::Kind::neg: return -eval_ld(e.arg(), s);
    case Expr::Kind::add: return eval_ld(e.lhs(), s) + eval_ld(e.rhs(), s);
    case Expr::Kind::sub: return eval_ld(e.lhs(), s) - eval_ld(e.rhs(), s);
    case Expr::Kind::mul: return eval_ld(e.lhs(), s) * eval_ld(e.rhs(), s);
    case Expr::Kind::div: return eval_ld(e.lhs(), s) / eval_ld(e.rhs(), s);
    case Expr::Kind::pow: return std::pow(eval_ld(e.lhs(), s), eval_ld(e.rhs(), s));
    case Expr::Kind::exp: return std::exp(eval_ld(e.arg(), s));
    case Expr::Kind::log: return std::log(eval_ld(e.arg(), s));
  }
  return NAN;
}

struct Fd {
  long double d1, d2, d3;
};

// Central differences of order 2, Richardson-extrapolated to order 4.
inline Fd finite_differences(const Expr& e, long double s, long double h) {
  auto f = [&](long double x) { return eval_ld(e, x); };
  auto stencils = [&](long double k) {
    const long double fm2 = f(s - 2 * k), fm1 = f(s - k), f0 = f(s), fp1 = f(s + k), fp2 = f(s + 2 * k);
    return Fd{(fp1 - fm1) / (2 * k), (fp1 - 2 * f0 + fm1) / (k * k), (fp2 - 2 * fp1 + 2 * fm1 - fm2) / (2 * k * k * k)};
  };
  const Fd a = stencils(h), b = stencils(h / 2);
  return {(4 * b.d1 - a.d1) / 3, (4 * b.d2 - a.d2) / 3, (4 * b.d3 - a.d3) / 3};
}

inline double rel_err(double jet, long double fd) {
  return static_cast<double>(std::fabs(static_cast<long double>(jet) - fd) / std::max(1.0L, std::fabs(fd)));
}

class ExprGenerator {
 public:
  explicit ExprGenerator(std::uint64_t seed) : rng_(seed) {}

  std::string generate(int depth) {
    if (depth == 0 || pick(4) == 0) return leaf();
    switch (pick(9)) {
      case 0: return generate(depth - 1) + " + " + generate(depth - 1);
      case 1: return generate(depth - 1) + " - " + generate(depth - 1);
      case 2: return "(" + generate(depth - 1) + ")*(" + generate(depth - 1) + ")";
      case 3: return "(" + generate(depth - 1) + ")/(" + positive(depth - 1) + ")";
      case 4: return "(" + positive(depth - 1) + ")^" + exponent();
      case 5: return "exp(" + small(depth - 1) + ")";
      case 6: return "log(" + positive(depth - 1) + ")";
      case 7: return "-(" + generate(depth - 1) + ")";
      default: return "(" + positive(depth - 1) + ")^(" + small(depth - 1) + ")";
    }
  }

 private:
  int pick(int n) { return static_cast<int>(rng_() % static_cast<std::uint64_t>(n)); }
  double real(double lo, double hi) { return lo + (hi - lo) * static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  std::string num(double lo, double hi) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", real(lo, hi));
    return buf;
  }
  std::string leaf() {
    switch (pick(4)) {
      case 0: return num(0.1, 3.0);
      case 1: return "s";
      case 2: return num(0.2, 2.0) + "*s";
      default: return "s^" + exponent();
    }
  }
  std::string exponent() {
    switch (pick(3)) {
      case 0: return std::to_string(1 + pick(4));
      case 1: return "(-" + std::to_string(1 + pick(3)) + ")";
      default: return "(" + num(-2.5, 2.5) + ")";
    }
  }
  // Strictly positive on s > 0.
  std::string positive(int depth) {
    switch (pick(3)) {
      case 0: return "exp(" + small(depth) + ")";
      case 1: return num(0.5, 2.0) + " + s^2";
      default: return "s*(" + num(1.0, 2.0) + " + exp(" + small(depth) + "))";
    }
  }
  // Bounded-ish argument for exp.
  std::string small(int depth) { return num(-0.8, 0.8) + "*(" + (depth > 0 ? generate(depth - 1) : leaf()) + ")/(1 + s^2)"; }

  std::mt19937_64 rng_;
};

}  // namespace testing_support
