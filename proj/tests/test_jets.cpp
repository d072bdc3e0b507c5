#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>

#include "expr_corpus.hpp"
#include "warpsol/errors.hpp"
#include "warpsol/expr.hpp"
#include "warpsol/jet.hpp"

using namespace warpsol;
using testing_support::ExprGenerator;
using testing_support::Fd;
using testing_support::eval_ld;
using testing_support::finite_differences;
using testing_support::rel_err;

namespace {

void expect_jet(const Jet3& j, double v, double d1, double d2, double d3, double tol = 1e-13) {
  EXPECT_NEAR(j.v, v, tol * (1 + std::fabs(v)));
  EXPECT_NEAR(j.d1, d1, tol * (1 + std::fabs(d1)));
  EXPECT_NEAR(j.d2, d2, tol * (1 + std::fabs(d2)));
  EXPECT_NEAR(j.d3, d3, tol * (1 + std::fabs(d3)));
}

}  // namespace

TEST(Jet3, Arithmetic) {
  const Jet3 s = Jet3::variable(2.0);
  expect_jet(s * s * s, 8, 12, 12, 6);
  expect_jet(s + 3.0, 5, 1, 0, 0);
  expect_jet(3.0 - s, 1, -1, 0, 0);
  expect_jet(2.0 * s - s * s, 0, -2, -2, 0);
  expect_jet(reciprocal(s), 0.5, -0.25, 0.25, -0.375);
  expect_jet(s / (s + 1.0), 2.0 / 3, 1.0 / 9, -2.0 / 27, 6.0 / 81);
  EXPECT_TRUE(Jet3::constant(3.0) == Jet3({3.0, 0, 0, 0}));
}

TEST(Jet3, ElementaryFunctions) {
  const Jet3 s = Jet3::variable(1.5);
  const double e = std::exp(1.5);
  expect_jet(exp(s), e, e, e, e);
  expect_jet(log(s), std::log(1.5), 1 / 1.5, -1 / (1.5 * 1.5), 2 / (1.5 * 1.5 * 1.5));
  // s^(1/2)
  const double r = std::sqrt(1.5);
  expect_jet(pow(s, 0.5), r, 0.5 / r, -0.25 / (r * 1.5), 0.375 / (r * 1.5 * 1.5));
  // s^s: d/ds = s^s (log s + 1)
  const Jet3 ss = pow(s, s);
  EXPECT_NEAR(ss.d1, std::pow(1.5, 1.5) * (std::log(1.5) + 1.0), 1e-13);
}

TEST(Jet3, ChainRuleCompose) {
  // compose(u, g0..g3) for g = exp at u = s^2 near s = 0.7
  const double s = 0.7;
  const Jet3 u = Jet3::variable(s) * Jet3::variable(s);
  const Jet3 viaCompose = exp(u);
  const double e = std::exp(s * s);
  const double d1 = 2 * s * e;
  const double d2 = (2 + 4 * s * s) * e;
  const double d3 = (12 * s + 8 * s * s * s) * e;
  expect_jet(viaCompose, e, d1, d2, d3);
}

TEST(Jet3, IntegerPowersOfNegativeBase) {
  const Jet3 x = Jet3::variable(-2.0);
  expect_jet(pow(x, 3.0), -8, 12, -12, 6);
  expect_jet(pow(x, -1.0), -0.5, -0.25, -0.25, -0.375);
}

TEST(Jet3, DomainErrors) {
  EXPECT_THROW(log(Jet3::constant(0.0)), DomainError);
  EXPECT_THROW(log(Jet3::variable(-1.0)), DomainError);
  EXPECT_THROW(reciprocal(Jet3::constant(0.0)), DomainError);
  EXPECT_THROW(pow(Jet3::variable(-1.0), 0.5), DomainError);
  EXPECT_THROW(pow(Jet3::constant(0.0), -1.0), DomainError);
  EXPECT_THROW(jet_eval(parse_expr("log(s-1)"), 0.5), DomainError);
}

TEST(Parser, Precedence) {
  EXPECT_EQ(unparse(parse_expr("1+2*s")), "(1+(2*s))");
  EXPECT_EQ(unparse(parse_expr("-s^2")), "(-(s^2))");
  EXPECT_EQ(unparse(parse_expr("s^2^3")), "(s^(2^3))");
  EXPECT_EQ(unparse(parse_expr("1-s-2")), "((1-s)-2)");
  EXPECT_EQ(unparse(parse_expr("s/2/3")), "((s/2)/3)");
  EXPECT_EQ(unparse(parse_expr(" exp( s ) ")), "exp(s)");
  EXPECT_DOUBLE_EQ(jet_eval(parse_expr("2^-1"), 1.0).v, 0.5);
  EXPECT_DOUBLE_EQ(jet_eval(parse_expr("1.5e-3*s"), 2.0).v, 0.003);
}

TEST(Parser, ErrorsCarryPositions) {
  struct Case {
    const char* text;
    std::size_t position;
  };
  for (const Case& c : {Case{"", 0}, Case{"s +* 2", 3}, Case{"sin(s)", 0}, Case{"(s", 2}, Case{"1e", 1},
                        Case{"2s", 1}, Case{"s^", 2}, Case{"exp s", 4}, Case{"3*(s+1", 6}, Case{"s@", 1}}) {
    try {
      parse_expr(c.text);
      ADD_FAILURE() << "no error for '" << c.text << "'";
    } catch (const ParseError& e) {
      EXPECT_EQ(e.position(), c.position) << "'" << c.text << "': " << e.what();
    }
  }
}

TEST(Derivative, Symbolic) {
  // d/ds (s^3 exp(s)) = (3 s^2 + s^3) exp(s)
  const Expr e = parse_expr("s^3*exp(s)");
  const double s = 1.3;
  EXPECT_NEAR(jet_eval(derivative(e), s).v, (3 * s * s + s * s * s) * std::exp(s), 1e-12);
  // Higher jets of the derivative agree with the shifted jets of the original.
  const Jet3 j = jet_eval(e, s), dj = jet_eval(derivative(e), s);
  EXPECT_NEAR(dj.v, j.d1, 1e-12);
  EXPECT_NEAR(dj.d1, j.d2, 1e-12);
  EXPECT_NEAR(dj.d2, j.d3, 1e-11);
  EXPECT_FALSE(derivative(parse_expr("3+2^4")).depends_on_s());
  EXPECT_EQ(jet_eval(derivative(parse_expr("3+2^4")), 1.0).v, 0.0);
}

// Property suite: 1000 random expressions. Every derivative channel must
// match extended-precision finite differences, and unparse/parse must be the
// identity on trees.
TEST(JetProperty, FiniteDifferencesAndRoundTrip) {
  ExprGenerator gen(20261018);
  std::mt19937_64 rng(3);
  int accepted = 0, attempts = 0;
  double worst = 0.0;
  while (accepted < 1000) {
    ASSERT_LT(++attempts, 20000) << "generator rejects too much";
    const std::string text = gen.generate(3);
    const Expr e = parse_expr(text);
    const double s = 0.5 + 1.5 * static_cast<double>(rng() >> 11) * 0x1.0p-53;
    Jet3 j;
    try {
      j = jet_eval(e, s);
    } catch (const DomainError&) {
      continue;
    }
    if (!j.finite() || std::fabs(j.v) > 1e4 || std::fabs(j.d3) > 1e6) continue;
    const long double h = 1e-3L;
    const Fd fd = finite_differences(e, s, h);
    if (!std::isfinite(static_cast<double>(fd.d3))) continue;
    ++accepted;

    const double e1 = rel_err(j.d1, fd.d1), e2 = rel_err(j.d2, fd.d2), e3 = rel_err(j.d3, fd.d3);
    worst = std::max({worst, e1, e2, e3});
    EXPECT_LE(e1, 1e-6) << text << " at s=" << s;
    EXPECT_LE(e2, 1e-6) << text << " at s=" << s;
    EXPECT_LE(e3, 1e-6) << text << " at s=" << s << " jet " << j.d3 << " fd " << static_cast<double>(fd.d3);
    EXPECT_NEAR(j.v, static_cast<double>(eval_ld(e, s)), 1e-12 * (1 + std::fabs(j.v))) << text;

    const std::string once = unparse(e);
    const Expr back = parse_expr(once);
    EXPECT_TRUE(back == e) << text << " -> " << once;
    EXPECT_EQ(unparse(back), once);
  }
  RecordProperty("worst_relative_error", std::to_string(worst));
}
