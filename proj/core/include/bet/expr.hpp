#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bet/jet.hpp"

namespace bet {

enum class NodeKind { Constant, NamedConstant, Coordinate, Negate, Binary, Call };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class Function { Sin, Cos, Tan, Sinh, Cosh, Tanh, Exp, Log, Sqrt, Abs };

std::string_view to_string(Function f) noexcept;

struct Node {
  NodeKind kind = NodeKind::Constant;
  double value = 0.0;     // Constant and NamedConstant
  std::string name;       // NamedConstant ("pi", "e")
  int index = 0;          // Coordinate
  BinaryOp op = BinaryOp::Add;
  Function fn = Function::Sin;
  std::shared_ptr<const Node> lhs;  // Negate and Call use lhs only
  std::shared_ptr<const Node> rhs;
  bool depends_on_coordinates = false;
};

using NodePtr = std::shared_ptr<const Node>;

namespace ast {
NodePtr constant(double v);
NodePtr named_constant(std::string_view name);
NodePtr coordinate(int index);
NodePtr negate(NodePtr a);
NodePtr binary(BinaryOp op, NodePtr a, NodePtr b);
NodePtr call(Function fn, NodePtr a);
}  // namespace ast

/// Immutable expression in n chart coordinates.
class Expression {
 public:
  Expression() = default;
  Expression(NodePtr root, std::vector<std::string> coordinate_names);

  static Expression constant(double v, std::vector<std::string> coordinate_names);

  int dimension() const noexcept { return static_cast<int>(names_->size()); }
  const std::vector<std::string>& coordinate_names() const noexcept { return *names_; }
  const Node& root() const noexcept { return *root_; }
  const NodePtr& root_ptr() const noexcept { return root_; }
  bool depends_on_coordinates() const noexcept { return root_->depends_on_coordinates; }
  bool valid() const noexcept { return static_cast<bool>(root_); }

  /// Throws DomainError naming the first subexpression whose value is not finite.
  double evaluate(std::span<const double> point) const;
  double evaluate(const Vec& point) const;
  Jet2 evaluate_jet(const Vec& point) const;

  /// Fully parenthesized text that parses back to the same tree.
  std::string print() const;

 private:
  NodePtr root_;
  std::shared_ptr<const std::vector<std::string>> names_ =
      std::make_shared<const std::vector<std::string>>();
};

bool structurally_equal(const Node& a, const Node& b) noexcept;
inline bool structurally_equal(const Expression& a, const Expression& b) noexcept {
  return structurally_equal(a.root(), b.root());
}

/// Identifiers resolve to coordinates first, then `parameters` (folded to constants),
/// then the named constants pi and e.
Expression parse_expression(std::string_view source, int dimension,
                            const std::vector<std::string>& coordinate_names,
                            const std::map<std::string, double>& parameters = {});

Jet2 evaluate_jet(const Expression& expr, const Vec& point);

std::string print_node(const Node& node, const std::vector<std::string>& names);

}  // namespace bet
