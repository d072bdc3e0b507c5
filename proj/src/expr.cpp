#include "warpsol/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace warpsol {

Expr::Expr() : Expr(number(0.0)) {}

Expr Expr::number(double value) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::number;
  node->value = value;
  return Expr(std::move(node));
}

Expr Expr::var() {
  auto node = std::make_shared<Node>();
  node->kind = Kind::var;
  node->depends_on_s = true;
  return Expr(std::move(node));
}

Expr Expr::unary(Kind kind, Expr arg) {
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->depends_on_s = arg.depends_on_s();
  node->lhs = std::make_shared<const Expr>(std::move(arg));
  return Expr(std::move(node));
}

Expr Expr::binary(Kind kind, Expr lhs, Expr rhs) {
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->depends_on_s = lhs.depends_on_s() || rhs.depends_on_s();
  node->lhs = std::make_shared<const Expr>(std::move(lhs));
  node->rhs = std::make_shared<const Expr>(std::move(rhs));
  return Expr(std::move(node));
}

bool Expr::is_binary() const {
  switch (kind()) {
    case Kind::add:
    case Kind::sub:
    case Kind::mul:
    case Kind::div:
    case Kind::pow:
      return true;
    default:
      return false;
  }
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Expr::Kind::number:
      return a.value() == b.value() && std::signbit(a.value()) == std::signbit(b.value());
    case Expr::Kind::var:
      return true;
    case Expr::Kind::neg:
    case Expr::Kind::exp:
    case Expr::Kind::log:
      return a.arg() == b.arg();
    default:
      return a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("empty input", pos_);
    Expr e = expr();
    skip_space();
    if (pos_ < text_.size()) throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    return e;
  }

 private:
  Expr expr() {
    Expr lhs = term();
    for (;;) {
      skip_space();
      if (accept('+')) {
        lhs = Expr::binary(Expr::Kind::add, std::move(lhs), term());
      } else if (accept('-')) {
        lhs = Expr::binary(Expr::Kind::sub, std::move(lhs), term());
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = factor();
    for (;;) {
      skip_space();
      if (accept('*')) {
        lhs = Expr::binary(Expr::Kind::mul, std::move(lhs), factor());
      } else if (accept('/')) {
        lhs = Expr::binary(Expr::Kind::div, std::move(lhs), factor());
      } else {
        return lhs;
      }
    }
  }

  Expr factor() {
    skip_space();
    if (accept('-')) return Expr::unary(Expr::Kind::neg, power());
    return power();
  }

  Expr power() {
    Expr base = atom();
    skip_space();
    if (accept('^')) return Expr::binary(Expr::Kind::pow, std::move(base), factor());
    return base;
  }

  Expr atom() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (c == '(') {
      ++pos_;
      Expr inner = expr();
      expect(')');
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string_view ident = text_.substr(start, pos_ - start);
      if (ident == "s") return Expr::var();
      if (ident == "exp" || ident == "log") {
        skip_space();
        expect('(');
        Expr inner = expr();
        expect(')');
        return Expr::unary(ident == "exp" ? Expr::Kind::exp : Expr::Kind::log, std::move(inner));
      }
      throw ParseError("unknown identifier '" + std::string(ident) + "'", start);
    }
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  Expr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t mantissa = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) throw ParseError("malformed number", start);
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      const std::size_t mark = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) throw ParseError("malformed exponent", mark);
    }
    const std::string literal(text_.substr(start, pos_ - start));
    return Expr::number(std::strtod(literal.c_str(), nullptr));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    skip_space();
    if (!accept(c)) {
      if (pos_ >= text_.size()) throw ParseError(std::string("expected '") + c + "' but input ended", pos_);
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  // Literals produced by derivative() can be negative; keep them atomic.
  if (std::signbit(x)) return std::string("(") + buf + ")";
  return buf;
}

}  // namespace

Expr parse_expr(std::string_view text) { return Parser(text).parse(); }

std::string unparse(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::number:
      return format_number(e.value());
    case K::var:
      return "s";
    case K::neg:
      return "(-" + unparse(e.arg()) + ")";
    case K::exp:
      return "exp(" + unparse(e.arg()) + ")";
    case K::log:
      return "log(" + unparse(e.arg()) + ")";
    case K::add:
      return "(" + unparse(e.lhs()) + "+" + unparse(e.rhs()) + ")";
    case K::sub:
      return "(" + unparse(e.lhs()) + "-" + unparse(e.rhs()) + ")";
    case K::mul:
      return "(" + unparse(e.lhs()) + "*" + unparse(e.rhs()) + ")";
    case K::div:
      return "(" + unparse(e.lhs()) + "/" + unparse(e.rhs()) + ")";
    case K::pow:
      return "(" + unparse(e.lhs()) + "^" + unparse(e.rhs()) + ")";
  }
  return {};
}

Jet3 jet_eval(const Expr& e, double s) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::number:
      return Jet3::constant(e.value());
    case K::var:
      return Jet3::variable(s);
    case K::neg:
      return -jet_eval(e.arg(), s);
    case K::exp:
      return exp(jet_eval(e.arg(), s));
    case K::log:
      return log(jet_eval(e.arg(), s));
    case K::add:
      return jet_eval(e.lhs(), s) + jet_eval(e.rhs(), s);
    case K::sub:
      return jet_eval(e.lhs(), s) - jet_eval(e.rhs(), s);
    case K::mul:
      return jet_eval(e.lhs(), s) * jet_eval(e.rhs(), s);
    case K::div:
      return jet_eval(e.lhs(), s) / jet_eval(e.rhs(), s);
    case K::pow: {
      const Jet3 base = jet_eval(e.lhs(), s);
      const Jet3 exponent = jet_eval(e.rhs(), s);
      if (!e.rhs().depends_on_s()) return pow(base, exponent.v);
      return pow(base, exponent);
    }
  }
  return {};
}

namespace {

bool is_zero(const Expr& e) { return e.kind() == Expr::Kind::number && e.value() == 0.0; }
bool is_one(const Expr& e) { return e.kind() == Expr::Kind::number && e.value() == 1.0; }

Expr add(Expr a, Expr b) {
  if (is_zero(a)) return b;
  if (is_zero(b)) return a;
  return Expr::binary(Expr::Kind::add, std::move(a), std::move(b));
}
Expr sub(Expr a, Expr b) {
  if (is_zero(b)) return a;
  if (is_zero(a)) return Expr::unary(Expr::Kind::neg, std::move(b));
  return Expr::binary(Expr::Kind::sub, std::move(a), std::move(b));
}
Expr mul(Expr a, Expr b) {
  if (is_zero(a) || is_zero(b)) return Expr::number(0.0);
  if (is_one(a)) return b;
  if (is_one(b)) return a;
  return Expr::binary(Expr::Kind::mul, std::move(a), std::move(b));
}
Expr div(Expr a, Expr b) {
  if (is_zero(a)) return Expr::number(0.0);
  return Expr::binary(Expr::Kind::div, std::move(a), std::move(b));
}

}  // namespace

Expr derivative(const Expr& e) {
  using K = Expr::Kind;
  if (!e.depends_on_s()) return Expr::number(0.0);
  switch (e.kind()) {
    case K::number:
      return Expr::number(0.0);
    case K::var:
      return Expr::number(1.0);
    case K::neg: {
      Expr d = derivative(e.arg());
      return is_zero(d) ? d : Expr::unary(K::neg, std::move(d));
    }
    case K::exp:
      return mul(e, derivative(e.arg()));
    case K::log:
      return div(derivative(e.arg()), e.arg());
    case K::add:
      return add(derivative(e.lhs()), derivative(e.rhs()));
    case K::sub:
      return sub(derivative(e.lhs()), derivative(e.rhs()));
    case K::mul:
      return add(mul(derivative(e.lhs()), e.rhs()), mul(e.lhs(), derivative(e.rhs())));
    case K::div:
      // (u/v)' = u'/v - u v'/v^2
      return sub(div(derivative(e.lhs()), e.rhs()),
                 div(mul(e.lhs(), derivative(e.rhs())),
                     Expr::binary(K::mul, e.rhs(), e.rhs())));
    case K::pow: {
      const Expr& base = e.lhs();
      const Expr& exponent = e.rhs();
      if (!exponent.depends_on_s()) {
        // The exponent stays a constant subtree, so evaluation keeps using
        // the real-power rule: d(u^p) = p * u^(p-1) * u'.
        Expr lowered_exponent = exponent.kind() == K::number
                                    ? Expr::number(exponent.value() - 1.0)
                                    : sub(exponent, Expr::number(1.0));
        Expr lowered = Expr::binary(K::pow, base, std::move(lowered_exponent));
        return mul(mul(exponent, std::move(lowered)), derivative(base));
      }
      // (u^v)' = u^v * (v' log u + v u'/u)
      return mul(e, add(mul(derivative(exponent), Expr::unary(K::log, base)),
                        div(mul(exponent, derivative(base)), base)));
    }
  }
  return Expr::number(0.0);
}

Jet3 jet_combine(JetOp op, const Jet3& a, const Jet3& b) {
  switch (op) {
    case JetOp::add:
      return a + b;
    case JetOp::sub:
      return a - b;
    case JetOp::mul:
      return a * b;
    case JetOp::div:
      return a / b;
    case JetOp::pow:
      return pow(a, b);
    case JetOp::exp:
      return exp(a);
    case JetOp::log:
      return log(a);
  }
  return {};
}

}  // namespace warpsol
