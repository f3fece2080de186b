#pragma once

// Cell-wise kernels over a trajectory. Every per-cell loop has a serial
// reference path and an OpenMP path; both write each cell's result into its
// own slot, and sums over cells are always taken serially afterwards, so the
// two paths agree bit for bit.

#include <cstddef>
#include <exception>
#include <limits>
#include <span>
#include <vector>

#include "tsvar/calculus.hpp"
#include "tsvar/lagrangian.hpp"

namespace tsvar {

enum class Exec { serial, parallel };

/// Calls body(i) for i in [0, count). On failure, rethrows the exception of
/// the lowest failing index, whichever path ran.
template <class Body>
void for_each_index(std::size_t count, Exec exec, Body&& body) {
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::size_t error_index = std::numeric_limits<std::size_t>::max();
  const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(tsvar_for_each_index)
      {
        if (static_cast<std::size_t>(i) < error_index) {
          error_index = static_cast<std::size_t>(i);
          error = std::current_exception();
        }
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

/// L and its partials at every cell [t_i, t_{i+1}], evaluated at
/// (t_i, q(t_{i+1}), (q(t_{i+1}) - q(t_i)) / mu(t_i)).
struct CellTable {
  std::size_t cells = 0;
  std::size_t dim = 0;
  std::vector<double> t, mu, value, d_t;
  std::vector<double> y, v, d_y, d_v;  // cells * dim, row-major

  std::span<const double> y_at(std::size_t i) const { return row(y, i); }
  std::span<const double> v_at(std::size_t i) const { return row(v, i); }
  std::span<const double> d_y_at(std::size_t i) const { return row(d_y, i); }
  std::span<const double> d_v_at(std::size_t i) const { return row(d_v, i); }

 private:
  std::span<const double> row(const std::vector<double>& a, std::size_t i) const {
    return std::span<const double>(a).subspan(i * dim, dim);
  }
};

CellTable evaluate_cells(const Lagrangian& lagrangian, const GridFunction& q, Exec exec);

/// Cell actions mu_i * L(t_i, q(t_{i+1}), q^Delta(t_i)), values only.
std::vector<double> cell_values(const Lagrangian& lagrangian, const GridFunction& q, Exec exec);

/// Derivatives of the cell action c_i(a, b) = mu_i L(t_i, b, (b - a) / mu_i)
/// with a = q(t_i), b = q(t_{i+1}): the gradient has 2n entries (a first),
/// the Hessian (2n)^2 entries row-major. Hessian is left empty unless asked.
struct CellDerivatives {
  std::size_t cells = 0;
  std::size_t dim = 0;
  std::vector<double> value;
  std::vector<double> grad;
  std::vector<double> hess;

  std::span<const double> grad_at(std::size_t i) const {
    return std::span<const double>(grad).subspan(i * 2 * dim, 2 * dim);
  }
  std::span<const double> hess_at(std::size_t i) const {
    return std::span<const double>(hess).subspan(i * 4 * dim * dim, 4 * dim * dim);
  }
};

CellDerivatives cell_derivatives(const Lagrangian& lagrangian, const GridFunction& q,
                                 bool with_hessian, Exec exec);

}  // namespace tsvar
