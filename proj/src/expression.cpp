#include "tubesolv/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <vector>

namespace tubesolv {

struct Expr::Node {
  enum Kind { Const, Var, Sin, Cos, Add, Sub, Mul, Pow, Neg } kind;
  Real value = 0;        // Const; Pow exponent; Sin/Cos integer multiplier
  std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

class Parser {
 public:
  Parser(const std::string& s, ExprVar var) : s_(s), var_(var) {}

  NodePtr run() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  const std::string& s_;
  ExprVar var_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::invalid_argument("expression '" + s_ + "': " + msg + " at position " + std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool eat_word(const char* w) {
    skip_ws();
    size_t len = std::strlen(w);
    if (s_.compare(pos_, len, w) == 0) {
      pos_ += len;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  Real number() {
    skip_ws();
    size_t end = pos_;
    try {
      Real v = std::stod(s_.substr(pos_), &end);
      pos_ += end;
      return v;
    } catch (const std::exception&) {
      fail("expected a number");
    }
  }

  static NodePtr make(Expr::Node::Kind k, Real v = 0, NodePtr l = nullptr, NodePtr r = nullptr) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = k;
    n->value = v;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
  }

  NodePtr expr() {
    NodePtr e = term();
    for (;;) {
      if (eat('+')) e = make(Expr::Node::Add, 0, e, term());
      else if (eat('-')) e = make(Expr::Node::Sub, 0, e, term());
      else return e;
    }
  }

  NodePtr term() {
    NodePtr e = power();
    for (;;) {
      if (eat('*')) e = make(Expr::Node::Mul, 0, e, power());
      else return e;
    }
  }

  NodePtr power() {
    NodePtr base = atom();
    if (!eat('^')) return base;
    skip_ws();
    const Real ex = number();
    if (var_ == ExprVar::Time && (ex < 0 || ex != std::floor(ex)))
      fail("time expressions allow nonnegative integer powers only");
    return make(Expr::Node::Pow, ex, base);
  }

  // trig argument: "t" or "k*t" with integer k
  Real trig_multiplier() {
    skip_ws();
    Real k = 1;
    if (peek() != 't') {
      k = number();
      if (!eat('*')) fail("expected '*' in trig argument");
    }
    if (!eat_word("t")) fail("trig argument must be t or k*t");
    if (k != std::floor(k)) fail("trig multiplier must be an integer to stay band-limited");
    return k;
  }

  NodePtr atom() {
    skip_ws();
    if (eat('(')) {
      NodePtr e = expr();
      if (!eat(')')) fail("missing ')'");
      return e;
    }
    if (eat('-')) return make(Expr::Node::Neg, 0, atom());
    if (eat_word("sin")) {
      if (var_ != ExprVar::Time) fail("sin is only available in time expressions");
      if (!eat('(')) fail("expected '(' after sin");
      Real k = trig_multiplier();
      if (!eat(')')) fail("missing ')'");
      return make(Expr::Node::Sin, k);
    }
    if (eat_word("cos")) {
      if (var_ != ExprVar::Time) fail("cos is only available in time expressions");
      if (!eat('(')) fail("expected '(' after cos");
      Real k = trig_multiplier();
      if (!eat(')')) fail("missing ')'");
      return make(Expr::Node::Cos, k);
    }
    if (eat_word("pi")) return make(Expr::Node::Const, kTwoPi / 2);
    const char c = peek();
    if (var_ == ExprVar::Time && c == 't') {
      fail("bare t is not band-limited; use sin/cos terms");
    }
    if (var_ == ExprVar::Radial && c == 'r') {
      ++pos_;
      return make(Expr::Node::Var);
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return make(Expr::Node::Const, number());
    fail("expected a term");
  }
};

Real eval(const Expr::Node* n, Real v) {
  switch (n->kind) {
    case Expr::Node::Const: return n->value;
    case Expr::Node::Var: return v;
    case Expr::Node::Sin: return std::sin(n->value * v);
    case Expr::Node::Cos: return std::cos(n->value * v);
    case Expr::Node::Add: return eval(n->lhs.get(), v) + eval(n->rhs.get(), v);
    case Expr::Node::Sub: return eval(n->lhs.get(), v) - eval(n->rhs.get(), v);
    case Expr::Node::Mul: return eval(n->lhs.get(), v) * eval(n->rhs.get(), v);
    case Expr::Node::Pow: {
      const Real base = eval(n->lhs.get(), v);
      // r^m at r = 0 with m < 0: the zero frequency carries no scale
      if (base == 0 && n->value < 0) return 0;
      return std::pow(base, n->value);
    }
    case Expr::Node::Neg: return -eval(n->lhs.get(), v);
  }
  return 0;
}

int degree(const Expr::Node* n) {
  switch (n->kind) {
    case Expr::Node::Const:
    case Expr::Node::Var: return 0;
    case Expr::Node::Sin:
    case Expr::Node::Cos: return int(std::abs(n->value));
    case Expr::Node::Add:
    case Expr::Node::Sub: return std::max(degree(n->lhs.get()), degree(n->rhs.get()));
    case Expr::Node::Mul: return degree(n->lhs.get()) + degree(n->rhs.get());
    case Expr::Node::Pow: return int(n->value) * degree(n->lhs.get());
    case Expr::Node::Neg: return degree(n->lhs.get());
  }
  return 0;
}

} // namespace

Real Expr::operator()(Real v) const {
  if (!root_) throw std::logic_error("evaluating an empty expression");
  return eval(root_.get(), v);
}

int Expr::trig_degree() const { return root_ ? degree(root_.get()) : 0; }

Expr Expr::parse(const std::string& text, ExprVar var) {
  Expr e;
  e.root_ = Parser(text, var).run();
  e.text_ = text;
  return e;
}

Expr Expr::constant(Real value) {
  Expr e;
  auto n = std::make_shared<Node>();
  n->kind = Node::Const;
  n->value = value;
  e.root_ = n;
  e.text_ = std::to_string(value);
  return e;
}

} // namespace tubesolv
