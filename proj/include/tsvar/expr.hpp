#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "tsvar/dual.hpp"
#include "tsvar/errors.hpp"

namespace tsvar {

/// Variable families an expression may reference.
enum class VarKind : unsigned { t = 1, eps = 2, q = 4, qs = 8, qd = 16 };

/// Bit set of allowed VarKind values.
struct VariableSet {
  unsigned bits = 0;

  static constexpr VariableSet all() { return {31u}; }
  /// L(t, q^sigma, q^Delta)
  static constexpr VariableSet lagrangian() { return {1u | 8u | 16u}; }
  /// tau(t, q), xi(t, q)
  static constexpr VariableSet generator() { return {1u | 4u}; }
  /// T_eps(t, q), Q_eps(t, q)
  static constexpr VariableSet family() { return {1u | 2u | 4u}; }

  bool allows(VarKind k) const { return (bits & static_cast<unsigned>(k)) != 0; }
};

/// Slot layout shared by every expression of dimension n:
/// [t, eps, q1..qn, qs1..qsn, qd1..qdn].
struct SlotLayout {
  std::size_t dim = 1;

  std::size_t count() const { return 2 + 3 * dim; }
  static constexpr std::size_t t() { return 0; }
  static constexpr std::size_t eps() { return 1; }
  std::size_t q(std::size_t k) const { return 2 + k; }
  std::size_t qs(std::size_t k) const { return 2 + dim + k; }
  std::size_t qd(std::size_t k) const { return 2 + 2 * dim + k; }

  /// Slot of a variable name such as "qd2"; throws InvalidInput if unknown.
  std::size_t slot_of(std::string_view name) const;
  std::string name_of(std::size_t slot) const;
};

/// Variable name -> value.
using EvalEnvironment = std::map<std::string, double>;

/// Parsed formula over t, eps, q_k, qs_k, qd_k. Immutable after parsing.
///
/// Grammar (see docs/expression_grammar.md):
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' unary)?          right-associative
///   primary := number | variable | func '(' expr ')' | '(' expr ')'
class Expression {
 public:
  enum class Op { constant, variable, add, sub, mul, div, pow, int_pow, neg,
                  sin, cos, exp, ln, sqrt, abs };

  struct Node {
    Op op = Op::constant;
    double value = 0.0;      // constant
    std::size_t slot = 0;    // variable
    long exponent = 0;       // int_pow
    int lhs = -1;
    int rhs = -1;
    std::size_t column = 0;  // 1-based source column
  };

  Expression() = default;

  /// Throws ParseError (with a 1-based column) on syntax errors, unknown
  /// identifiers, disallowed variables, or indices outside 1..dim.
  static Expression parse(std::string_view text, std::size_t dim,
                          VariableSet allowed = VariableSet::all());

  /// Fully parenthesized text; parse(render()) reproduces the same tree.
  std::string render() const;

  std::size_t dim() const { return layout_.dim; }
  const SlotLayout& layout() const { return layout_; }
  std::set<std::string> free_variables() const;
  bool is_constant() const;
  bool operator==(const Expression& other) const;

  /// Evaluate with slot values laid out as in SlotLayout.
  template <class T>
  T evaluate(std::span<const T> slots) const {
    T out = eval_node<T>(root_, slots);
    if (!std::isfinite(primal(out))) {
      throw DomainError("non-finite value of " + render());
    }
    return out;
  }

  double eval(const EvalEnvironment& env) const;

  /// Value and exact directional derivative along `seed` (variables missing
  /// from the seed get a zero tangent).
  std::pair<double, double> diff_eval(const EvalEnvironment& env,
                                      const EvalEnvironment& seed) const;

 private:
  std::string render_node(int i) const;
  bool equal_nodes(const Expression& other, int a, int b) const;
  std::vector<double> bind(const EvalEnvironment& env) const;
  [[noreturn]] void domain_error(int i, const std::string& what) const;

  template <class T>
  T eval_node(int i, std::span<const T> slots) const;

  friend class Parser;

  std::vector<Node> nodes_;
  int root_ = -1;
  SlotLayout layout_;
};

template <class T>
T int_power(const T& base, long k) {
  unsigned long e = static_cast<unsigned long>(k < 0 ? -k : k);
  T result(1.0);
  T b = base;
  while (e != 0) {
    if (e & 1UL) result = result * b;
    e >>= 1;
    if (e != 0) b = b * b;
  }
  return result;
}

template <class T>
T Expression::eval_node(int i, std::span<const T> slots) const {
  using std::abs;
  using std::cos;
  using std::exp;
  using std::log;
  using std::pow;
  using std::sin;
  using std::sqrt;
  const Node& n = nodes_[static_cast<std::size_t>(i)];
  switch (n.op) {
    case Op::constant:
      return T(n.value);
    case Op::variable:
      return slots[n.slot];
    case Op::add:
      return eval_node<T>(n.lhs, slots) + eval_node<T>(n.rhs, slots);
    case Op::sub:
      return eval_node<T>(n.lhs, slots) - eval_node<T>(n.rhs, slots);
    case Op::mul:
      return eval_node<T>(n.lhs, slots) * eval_node<T>(n.rhs, slots);
    case Op::div: {
      T den = eval_node<T>(n.rhs, slots);
      if (primal(den) == 0.0) domain_error(i, "division by zero");
      return eval_node<T>(n.lhs, slots) / den;
    }
    case Op::int_pow: {
      T base = eval_node<T>(n.lhs, slots);
      if (n.exponent < 0) {
        if (primal(base) == 0.0) domain_error(i, "zero raised to a negative power");
        return T(1.0) / int_power(base, n.exponent);
      }
      return int_power(base, n.exponent);
    }
    case Op::pow: {
      T base = eval_node<T>(n.lhs, slots);
      if (!(primal(base) > 0.0)) {
        domain_error(i, "non-integer exponent requires a positive base");
      }
      return pow(base, eval_node<T>(n.rhs, slots));
    }
    case Op::neg:
      return -eval_node<T>(n.lhs, slots);
    case Op::sin:
      return sin(eval_node<T>(n.lhs, slots));
    case Op::cos:
      return cos(eval_node<T>(n.lhs, slots));
    case Op::exp:
      return exp(eval_node<T>(n.lhs, slots));
    case Op::ln: {
      T a = eval_node<T>(n.lhs, slots);
      if (!(primal(a) > 0.0)) domain_error(i, "logarithm of a nonpositive value");
      return log(a);
    }
    case Op::sqrt: {
      T a = eval_node<T>(n.lhs, slots);
      if (primal(a) < 0.0) domain_error(i, "square root of a negative value");
      if constexpr (!std::is_same_v<T, double>) {
        if (primal(a) == 0.0) domain_error(i, "square root is not differentiable at 0");
      }
      return sqrt(a);
    }
    case Op::abs:
      return abs(eval_node<T>(n.lhs, slots));
  }
  domain_error(i, "unknown node");
}

}  // namespace tsvar
