#include "ckam/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <vector>

namespace ckam {

struct ExprNode {
  enum class Op { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp, Abs };
  Op op = Op::Number;
  double number = 0.0;
  std::shared_ptr<const ExprNode> lhs;
  std::shared_ptr<const ExprNode> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;
using Op = ExprNode::Op;

NodePtr make_leaf(Op op, double number = 0.0) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->number = number;
  return n;
}

NodePtr make_node(Op op, NodePtr lhs, NodePtr rhs = nullptr) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

struct Token {
  enum class Kind { Number, Ident, Op, LParen, RParen, Comma, End };
  Kind kind = Kind::End;
  std::size_t pos = 0;
  double number = 0.0;
  std::string text;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Token t;
    t.pos = i;
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(s.data() + i, s.data() + s.size(), v);
      if (ec != std::errc{}) {
        throw ParseError(ParseError::Kind::UnexpectedToken, i, "malformed number");
      }
      t.kind = Token::Kind::Number;
      t.number = v;
      i = static_cast<std::size_t>(ptr - s.data());
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      t.kind = Token::Kind::Ident;
      t.text = std::string(s.substr(i, j - i));
      i = j;
    } else if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^') {
      t.kind = Token::Kind::Op;
      t.text = std::string(1, c);
      ++i;
    } else if (c == '(') {
      t.kind = Token::Kind::LParen;
      ++i;
    } else if (c == ')') {
      t.kind = Token::Kind::RParen;
      ++i;
    } else if (c == ',') {
      t.kind = Token::Kind::Comma;
      ++i;
    } else {
      throw ParseError(ParseError::Kind::UnexpectedToken, i,
                       std::string("unexpected character '") + c + "'");
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Token::Kind::End;
  end.pos = s.size();
  out.push_back(end);
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  NodePtr parse_all() {
    NodePtr root = sum();
    const Token& t = peek();
    if (t.kind == Token::Kind::RParen) {
      throw ParseError(ParseError::Kind::UnbalancedParens, t.pos, "unmatched ')'");
    }
    if (t.kind != Token::Kind::End) {
      throw ParseError(ParseError::Kind::UnexpectedToken, t.pos, "unexpected trailing input");
    }
    return root;
  }

 private:
  const Token& peek() const { return tokens_[cursor_]; }
  const Token& next() { return tokens_[cursor_++]; }

  bool at_op(char c) const {
    const Token& t = peek();
    return t.kind == Token::Kind::Op && t.text[0] == c;
  }

  NodePtr sum() {
    NodePtr lhs = product();
    while (at_op('+') || at_op('-')) {
      const Op op = next().text[0] == '+' ? Op::Add : Op::Sub;
      lhs = make_node(op, lhs, product());
    }
    return lhs;
  }

  NodePtr product() {
    NodePtr lhs = unary();
    while (at_op('*') || at_op('/')) {
      const Op op = next().text[0] == '*' ? Op::Mul : Op::Div;
      lhs = make_node(op, lhs, unary());
    }
    return lhs;
  }

  NodePtr unary() {
    if (at_op('-')) {
      next();
      return make_node(Op::Neg, unary());
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (at_op('^')) {
      next();
      return make_node(Op::Pow, base, unary());
    }
    return base;
  }

  NodePtr primary() {
    const Token& t = next();
    switch (t.kind) {
      case Token::Kind::Number:
        return make_leaf(Op::Number, t.number);
      case Token::Kind::LParen: {
        NodePtr inner = sum();
        expect_close(t.pos);
        return inner;
      }
      case Token::Kind::Ident:
        return identifier(t);
      case Token::Kind::RParen:
        throw ParseError(ParseError::Kind::UnbalancedParens, t.pos, "unmatched ')'");
      case Token::Kind::End:
        throw ParseError(ParseError::Kind::UnexpectedToken, t.pos, "unexpected end of input");
      default:
        throw ParseError(ParseError::Kind::UnexpectedToken, t.pos,
                         "unexpected token '" + t.text + "'");
    }
  }

  NodePtr identifier(const Token& t) {
    if (t.text == "x") return make_leaf(Op::Var);
    if (t.text == "pi") return make_leaf(Op::Number, std::numbers::pi);

    Op fn;
    if (t.text == "sin") {
      fn = Op::Sin;
    } else if (t.text == "cos") {
      fn = Op::Cos;
    } else if (t.text == "exp") {
      fn = Op::Exp;
    } else if (t.text == "abs") {
      fn = Op::Abs;
    } else {
      throw ParseError(ParseError::Kind::UnknownIdentifier, t.pos,
                       "unknown identifier '" + t.text + "'");
    }

    if (peek().kind != Token::Kind::LParen) {
      throw ParseError(ParseError::Kind::ArityMismatch, peek().pos,
                       "function '" + t.text + "' expects 1 argument");
    }
    const std::size_t open = next().pos;
    if (peek().kind == Token::Kind::RParen) {
      throw ParseError(ParseError::Kind::ArityMismatch, peek().pos,
                       "function '" + t.text + "' expects 1 argument, got 0");
    }
    NodePtr arg = sum();
    if (peek().kind == Token::Kind::Comma) {
      std::size_t count = 1;
      const std::size_t where = peek().pos;
      while (peek().kind == Token::Kind::Comma) {
        next();
        sum();
        ++count;
      }
      throw ParseError(ParseError::Kind::ArityMismatch, where,
                       "function '" + t.text + "' expects 1 argument, got " +
                           std::to_string(count));
    }
    expect_close(open);
    return make_node(fn, arg);
  }

  void expect_close(std::size_t open_pos) {
    if (peek().kind != Token::Kind::RParen) {
      if (peek().kind == Token::Kind::End) {
        throw ParseError(ParseError::Kind::UnbalancedParens, open_pos, "unclosed '('");
      }
      throw ParseError(ParseError::Kind::UnexpectedToken, peek().pos, "expected ')'");
    }
    next();
  }

  std::vector<Token> tokens_;
  std::size_t cursor_ = 0;
};

Dual evaluate(const ExprNode& n, double x) {
  switch (n.op) {
    case Op::Number:
      return {n.number, 0.0};
    case Op::Var:
      return {x, 1.0};
    case Op::Neg: {
      const Dual a = evaluate(*n.lhs, x);
      return {-a.value, -a.slope};
    }
    case Op::Add: {
      const Dual a = evaluate(*n.lhs, x), b = evaluate(*n.rhs, x);
      return {a.value + b.value, a.slope + b.slope};
    }
    case Op::Sub: {
      const Dual a = evaluate(*n.lhs, x), b = evaluate(*n.rhs, x);
      return {a.value - b.value, a.slope - b.slope};
    }
    case Op::Mul: {
      const Dual a = evaluate(*n.lhs, x), b = evaluate(*n.rhs, x);
      return {a.value * b.value, a.slope * b.value + a.value * b.slope};
    }
    case Op::Div: {
      const Dual a = evaluate(*n.lhs, x), b = evaluate(*n.rhs, x);
      return {a.value / b.value, (a.slope * b.value - a.value * b.slope) / (b.value * b.value)};
    }
    case Op::Pow: {
      const Dual a = evaluate(*n.lhs, x), b = evaluate(*n.rhs, x);
      const double v = std::pow(a.value, b.value);
      double d = 0.0;
      if (b.slope == 0.0) {
        // constant exponent: avoids log of a negative base
        d = b.value == 0.0 ? 0.0 : b.value * std::pow(a.value, b.value - 1.0) * a.slope;
      } else {
        d = v * (b.slope * std::log(a.value) + b.value * a.slope / a.value);
      }
      return {v, d};
    }
    case Op::Sin: {
      const Dual a = evaluate(*n.lhs, x);
      return {std::sin(a.value), std::cos(a.value) * a.slope};
    }
    case Op::Cos: {
      const Dual a = evaluate(*n.lhs, x);
      return {std::cos(a.value), -std::sin(a.value) * a.slope};
    }
    case Op::Exp: {
      const Dual a = evaluate(*n.lhs, x);
      const double e = std::exp(a.value);
      return {e, e * a.slope};
    }
    case Op::Abs: {
      const Dual a = evaluate(*n.lhs, x);
      const double s = a.value > 0.0 ? 1.0 : (a.value < 0.0 ? -1.0 : 0.0);
      return {std::abs(a.value), s * a.slope};
    }
  }
  return {};
}

}  // namespace

Expression Expression::parse(std::string_view text) {
  Parser parser(tokenize(text));
  return Expression(parser.parse_all(), std::string(text));
}

Expression Expression::constant(double c) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, c);
  return Expression(make_leaf(Op::Number, c), std::string(buf, ptr));
}

Dual Expression::eval(double x) const { return evaluate(*root_, x); }

}  // namespace ckam
