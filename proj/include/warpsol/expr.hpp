#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "warpsol/jet.hpp"

namespace warpsol {

/// Immutable expression tree in the base coordinate s.
///
/// Grammar accepted by parse_expr:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := ('-')? power
///   power  := atom ('^' factor)?
///   atom   := number | 's' | 'exp(' expr ')' | 'log(' expr ')' | '(' expr ')'
class Expr {
 public:
  enum class Kind { number, var, neg, add, sub, mul, div, pow, exp, log };

  /// The constant 0.
  Expr();

  static Expr number(double value);
  static Expr var();
  static Expr unary(Kind kind, Expr arg);
  static Expr binary(Kind kind, Expr lhs, Expr rhs);

  Kind kind() const { return node_->kind; }
  double value() const { return node_->value; }
  const Expr& lhs() const { return *node_->lhs; }
  const Expr& rhs() const { return *node_->rhs; }
  /// Operand of neg / exp / log.
  const Expr& arg() const { return *node_->lhs; }

  bool is_binary() const;
  bool depends_on_s() const { return node_->depends_on_s; }

  /// Structural equality (same shape, same literal bits).
  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Node {
    Kind kind;
    double value = 0.0;
    std::shared_ptr<const Expr> lhs;
    std::shared_ptr<const Expr> rhs;
    bool depends_on_s = false;
  };

  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

Expr parse_expr(std::string_view text);

/// Fully parenthesised text that parses back to a structurally identical tree.
std::string unparse(const Expr& e);

/// Exact value and first three derivatives of `e` at s.
Jet3 jet_eval(const Expr& e, double s);

/// Symbolic d/ds. No simplification beyond dropping constant subtrees.
Expr derivative(const Expr& e);

}  // namespace warpsol
