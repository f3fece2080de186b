#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "tsvar/timescale.hpp"

namespace tsvar {

/// Values (scalars or n-vectors) attached to the leading `size()` points of a
/// grid. A function on the full grid has size() == grid().size(); one on
/// T^kappa has one value fewer, and so on.
class GridFunction {
 public:
  /// `values` is row-major, dim entries per point. Throws InvalidInput on a
  /// size mismatch or a non-finite value.
  GridFunction(TimeScaleGrid grid, std::size_t dim, std::vector<double> values);

  /// Scalar function sampled at every grid point.
  static GridFunction sample(const TimeScaleGrid& grid,
                             const std::function<double(double)>& f);

  const TimeScaleGrid& grid() const { return grid_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return values_.size() / dim_; }
  double time(std::size_t i) const { return grid_.point(i); }
  std::span<const double> at(std::size_t i) const {
    return std::span<const double>(values_).subspan(i * dim_, dim_);
  }
  /// Scalar access; component 0 for vector-valued functions.
  double operator[](std::size_t i) const { return values_[i * dim_]; }
  std::span<const double> values() const { return values_; }
  /// Single component as a scalar grid function.
  GridFunction component(std::size_t k) const;

 private:
  TimeScaleGrid grid_;
  std::size_t dim_;
  std::vector<double> values_;
};

/// f^Delta(t_i) = (f(t_{i+1}) - f(t_i)) / mu(t_i); one value fewer than f.
GridFunction delta_derivative(const GridFunction& f);

/// f^sigma(t_i) = f(t_{i+1}); one value fewer than f.
GridFunction compose_sigma(const GridFunction& f);

/// Cauchy sum: sum of mu(t_i) f(t_i) over grid points t_i in [r, s).
/// Scalar f only; f must cover every point of [r, s).
double delta_integral(const GridFunction& f, double r, double s);

/// Index form of delta_integral over [t_first, t_last).
double delta_integral_indices(const GridFunction& f, std::size_t first, std::size_t last);

/// F(t_i) = integral from t_0 to t_i; covers one point more than f (capped at
/// the grid size). F^Delta == f on the domain of f.
GridFunction antiderivative(const GridFunction& f);

/// Pointwise product of two scalar functions on their common window.
GridFunction multiply(const GridFunction& f, const GridFunction& g);

struct PushforwardResult {
  TimeScaleGrid image;        // {alpha(t_i)}
  GridFunction transported;   // f on the image grid
  double lhs = 0.0;           // integral_a^b f(alpha(t)) alpha^Delta(t) Delta t
  double rhs = 0.0;           // integral_{alpha(a)}^{alpha(b)} f(tbar) Delta tbar
};

/// Change of variables under a strictly increasing alpha on the full grid.
/// `f_of_alpha` holds f(alpha(t_i)) at every original point.
/// Throws InvalidInput when alpha is not strictly increasing.
PushforwardResult pushforward(const GridFunction& alpha, const GridFunction& f_of_alpha);

/// Same, with f given as a function of the new time.
PushforwardResult pushforward(const GridFunction& alpha,
                              const std::function<double(double)>& f);

}  // namespace tsvar
