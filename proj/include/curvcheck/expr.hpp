#pragma once

/**
 * @file expr.hpp
 * @brief Closed-form scalar expressions over chart coordinates.
 *
 * Expressions are parsed once into an immutable tree and evaluated to
 * second-order jets (value, gradient, Hessian) by forward-mode chain rules.
 *
 * Grammar:
 *   expr  := term (('+'|'-') term)*
 *   term  := unary (('*'|'/') unary)*
 *   unary := '-' unary | power
 *   power := atom ('^' unary)?
 *   atom  := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')'
 */

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace curvcheck {

enum class Func { Sin, Cos, Tan, Exp, Log, Sqrt, Sinh, Cosh, Tanh };

std::string_view func_name(Func f);

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  enum class Kind { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Call };

  Kind kind = Kind::Number;
  double number = 0.0;     // Kind::Number
  std::size_t var = 0;     // Kind::Var, index into the chart coordinates
  Func func = Func::Sin;   // Kind::Call
  NodePtr lhs;             // unary operand / call argument / left operand
  NodePtr rhs;             // right operand of binary nodes
};

class ParseError : public std::runtime_error {
 public:
  enum class Kind { Syntax, UnknownIdentifier, Arity };

  ParseError(Kind kind, std::size_t offset, const std::string& message);

  Kind kind() const noexcept { return kind_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

/// Raised when evaluation leaves the domain of a sub-expression
/// (log/sqrt of a non-positive argument, division by zero, ...).
class DomainError : public std::runtime_error {
 public:
  DomainError(const std::string& subtree, const std::string& message);
  const std::string& subtree() const noexcept { return subtree_; }

 private:
  std::string subtree_;
};

/// Value, gradient and Hessian of a scalar field at a point.
struct Jet2 {
  double value = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;

  static Jet2 constant(double v, std::size_t n);
  static Jet2 variable(double v, std::size_t index, std::size_t n);
  std::size_t dim() const { return static_cast<std::size_t>(grad.size()); }
};

using CoordNames = std::shared_ptr<const std::vector<std::string>>;

/// Immutable parsed expression. Copies share the tree.
class Expr {
 public:
  Expr() = default;
  Expr(NodePtr root, CoordNames coords) : root_(std::move(root)), coords_(std::move(coords)) {}

  static Expr constant(double v, CoordNames coords);

  const Node& root() const { return *root_; }
  const NodePtr& root_ptr() const { return root_; }
  const std::vector<std::string>& coords() const { return *coords_; }
  const CoordNames& coord_names() const { return coords_; }
  std::size_t dim() const { return coords_ ? coords_->size() : 0; }
  bool valid() const { return root_ != nullptr; }

  /// True when the tree is the literal 0.
  bool is_zero_literal() const;

  /// Structural equality of the trees (coordinate lists must match too).
  friend bool operator==(const Expr& a, const Expr& b);

 private:
  NodePtr root_;
  CoordNames coords_;
};

/// Validates a coordinate list and packages it for sharing between expressions.
/// Throws std::invalid_argument on empty, duplicate, or malformed names.
CoordNames make_coords(std::vector<std::string> names);

/// Parses `text` against the declared coordinate names.
Expr parse(std::string_view text, const CoordNames& coords);
Expr parse(std::string_view text, const std::vector<std::string>& coords);

/// Canonical, fully parenthesised rendering; parse(render(e)) == e.
std::string render(const Expr& e);
std::string render(const Node& node, const std::vector<std::string>& coords);

double eval_value(const Expr& e, std::span<const double> point);
Jet2 eval_jet2(const Expr& e, std::span<const double> point);

bool structurally_equal(const Node& a, const Node& b);

}  // namespace curvcheck
