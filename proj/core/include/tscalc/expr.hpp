#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "tscalc/error.hpp"
#include "tscalc/time_scale.hpp"

namespace tsc {

class Expr;
using ExprRef = std::shared_ptr<const Expr>;

enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };
enum class Func { Abs, Sin, Cos, Exp, Ln, Sqrt, Mod };

struct Number { double value; };
struct Var {};
struct Neg { ExprRef arg; };
struct Binary { BinaryOp op; ExprRef lhs, rhs; };
struct Call { Func fn; ExprRef a0, a1; };  // a1 only for mod
struct Conditional { CmpOp cmp; ExprRef cl, cr, then_branch, else_branch; };

// Immutable expression node; trees are shared freely across threads.
class Expr {
 public:
  using Node = std::variant<Number, Var, Neg, Binary, Call, Conditional>;

  explicit Expr(Node node) : node_(std::move(node)) {}
  const Node& node() const noexcept { return node_; }

 private:
  Node node_;
};

// Parse failure with the character offset of the offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t position, const std::string& message)
      : std::runtime_error(message + " (offset " + std::to_string(position) + ")"),
        position_(position),
        message_(message) {}

  std::size_t position() const noexcept { return position_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::size_t position_;
  std::string message_;
};

// Grammar, loosest to tightest binding:
//   expr       := "if" cond "then" expr "else" expr | additive
//   cond       := additive relop additive        relop in == != < <= > >=
//   additive   := multiplicative (("+" | "-") multiplicative)*
//   multiplicative := unary (("*" | "/") unary)*
//   unary      := "-" unary | power
//   power      := atom ("^" unary)?              right-associative
//   atom       := number | "t" | "(" expr ")" | func "(" args ")"
// Functions: abs sin cos exp ln sqrt (unary), mod (binary). Whitespace is
// insignificant.
ExprRef parse(std::string_view text);  // throws ParseError

// IEEE double evaluation at the point t. ==/!= comparisons use the relative
// tolerance eq_tol; the other comparisons are exact. Exactly one conditional
// branch is evaluated. Throws Error(domain_error) for ln/sqrt of a negative,
// division by zero, zero modulus, or a negative base raised to a non-integer
// power, and Error(non_finite) on overflow to inf or NaN.
double evaluate(const Expr& e, double t, double eq_tol = kDefaultTol);

// Canonical text form; parse(to_text(e)) reconstructs an equal tree.
std::string to_text(const Expr& e);

// Structural equality (literals compared exactly).
bool equal(const Expr& a, const Expr& b);

}  // namespace tsc
