#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "tsvar/expr.hpp"

namespace tsvar {

/// Value and first partials of L at (t, y, v), y standing for q^sigma and v
/// for q^Delta.
struct LagrangianPartials {
  double value = 0.0;
  double d_t = 0.0;             // partial_1 L
  std::vector<double> d_y;      // partial_2 L
  std::vector<double> d_v;      // partial_3 L
};

/// L(t, y, v) over R x R^n x R^n, given as an expression in t, qs_k, qd_k.
/// Accepts any real t, not only grid times.
class Lagrangian {
 public:
  explicit Lagrangian(Expression expr);
  /// Parses `text` with the Lagrangian variable set (t, qs1..qsn, qd1..qdn).
  static Lagrangian parse(std::string_view text, std::size_t dim);

  std::size_t dim() const { return expr_.dim(); }
  const Expression& expression() const { return expr_; }

  template <class T>
  T evaluate(const T& t, std::span<const T> y, std::span<const T> v) const {
    const SlotLayout& layout = expr_.layout();
    std::vector<T> slots(layout.count(), T(0.0));
    slots[SlotLayout::t()] = t;
    for (std::size_t k = 0; k < layout.dim; ++k) {
      slots[layout.qs(k)] = y[k];
      slots[layout.qd(k)] = v[k];
    }
    return expr_.evaluate<T>(slots);
  }

  double value(double t, std::span<const double> y, std::span<const double> v) const {
    return evaluate<double>(t, y, v);
  }

  /// Exact partials by forward-mode propagation (one pass per argument).
  LagrangianPartials partials(double t, std::span<const double> y,
                              std::span<const double> v) const;

 private:
  Expression expr_;
};

}  // namespace tsvar
