#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

#include "ckam/error.hpp"

namespace ckam {

/// Value and first derivative of a scalar expression in x.
struct Dual {
  double value = 0.0;
  double slope = 0.0;
};

class ParseError : public Error {
 public:
  enum class Kind { UnknownIdentifier, ArityMismatch, UnbalancedParens, UnexpectedToken };

  ParseError(Kind kind, std::size_t position, const std::string& message)
      : Error(message + " at position " + std::to_string(position)),
        kind_(kind),
        position_(position) {}

  Kind kind() const noexcept { return kind_; }
  std::size_t position() const noexcept { return position_; }

 private:
  Kind kind_;
  std::size_t position_;
};

struct ExprNode;

/// Parsed arithmetic expression in the single variable x.
///
/// Grammar (lowest to highest precedence):
///   sum     := product (('+' | '-') product)*
///   product := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' unary)?          right associative
///   primary := number | 'x' | 'pi' | fn '(' sum ')' | '(' sum ')'
/// with fn one of sin, cos, exp, abs.
class Expression {
 public:
  static Expression parse(std::string_view text);
  static Expression constant(double c);

  double operator()(double x) const { return eval(x).value; }
  double derivative(double x) const { return eval(x).slope; }
  Dual eval(double x) const;

  const std::string& source() const noexcept { return source_; }

 private:
  Expression(std::shared_ptr<const ExprNode> root, std::string source)
      : root_(std::move(root)), source_(std::move(source)) {}

  std::shared_ptr<const ExprNode> root_;
  std::string source_;
};

inline Expression parse_expression(std::string_view text) { return Expression::parse(text); }

}  // namespace ckam
