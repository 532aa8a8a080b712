#include "blowup/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

#include "blowup/error.hpp"

namespace blowup {

struct Expression::Node {
  enum class Op { Const, X, Y, Neg, Add, Sub, Mul, Div, Pow, Call } op;
  double value = 0.0;
  double (*fn)(double) = nullptr;
  std::shared_ptr<const Node> a, b;

  double eval(const Vec2& p) const {
    switch (op) {
      case Op::Const: return value;
      case Op::X: return p.x();
      case Op::Y: return p.y();
      case Op::Neg: return -a->eval(p);
      case Op::Add: return a->eval(p) + b->eval(p);
      case Op::Sub: return a->eval(p) - b->eval(p);
      case Op::Mul: return a->eval(p) * b->eval(p);
      case Op::Div: return a->eval(p) / b->eval(p);
      case Op::Pow: return std::pow(a->eval(p), b->eval(p));
      case Op::Call: return fn(a->eval(p));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Op = Expression::Node::Op;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_const(double v) {
  auto n = std::make_shared<Expression::Node>();
  n->op = Op::Const;
  n->value = v;
  return n;
}

struct Function {
  const char* name;
  double (*fn)(double);
};

double abs_fn(double v) { return std::fabs(v); }

const Function kFunctions[] = {
    {"exp", [](double v) { return std::exp(v); }},   {"log", [](double v) { return std::log(v); }},
    {"sqrt", [](double v) { return std::sqrt(v); }}, {"sin", [](double v) { return std::sin(v); }},
    {"cos", [](double v) { return std::cos(v); }},   {"tan", [](double v) { return std::tan(v); }},
    {"sinh", [](double v) { return std::sinh(v); }}, {"cosh", [](double v) { return std::cosh(v); }},
    {"tanh", [](double v) { return std::tanh(v); }}, {"abs", abs_fn},
};

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    std::ostringstream os;
    os << why << " at position " << pos_ << " in \"" << s_ << '"';
    throw Error(ErrorKind::ParseError, os.str());
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr n = term();
    for (;;) {
      if (accept('+')) n = make(Op::Add, n, term());
      else if (accept('-')) n = make(Op::Sub, n, term());
      else return n;
    }
  }

  NodePtr term() {
    NodePtr n = unary();
    for (;;) {
      if (accept('*')) n = make(Op::Mul, n, unary());
      else if (accept('/')) n = make(Op::Div, n, unary());
      else return n;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Op::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Op::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    if (accept('(')) {
      NodePtr n = expr();
      if (!accept(')')) fail("missing ')'");
      return n;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("malformed number");
      pos_ += static_cast<std::size_t>(end - begin);
      return make_const(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (name == "x") return make(Op::X);
      if (name == "y") return make(Op::Y);
      if (name == "pi") return make_const(std::numbers::pi);
      if (name == "e") return make_const(std::numbers::e);
      for (const auto& f : kFunctions) {
        if (name != f.name) continue;
        if (!accept('(')) fail("expected '(' after " + name);
        auto n = std::make_shared<Expression::Node>();
        n->op = Op::Call;
        n->fn = f.fn;
        n->a = expr();
        if (!accept(')')) fail("missing ')'");
        return n;
      }
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.text_ = text;
  e.root_ = Parser(text).parse();
  return e;
}

Expression Expression::constant(double value) {
  Expression e;
  std::ostringstream os;
  os.precision(17);
  os << value;
  e.text_ = os.str();
  e.root_ = make_const(value);
  return e;
}

double Expression::operator()(const Vec2& p) const {
  if (!root_) throw Error(ErrorKind::ParseError, "empty expression");
  return root_->eval(p);
}

}  // namespace blowup
