#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "tsvar/calculus.hpp"
#include "tsvar/kernels.hpp"
#include "tsvar/lagrangian.hpp"
#include "tsvar/timescale.hpp"

namespace tsvar {

/// Minimize I[q] = integral_a^b L(t, q^sigma, q^Delta) Delta t subject to
/// q(a) = qa, q(b) = qb, with a and b the grid endpoints.
struct Problem {
  Problem(TimeScaleGrid grid, Lagrangian lagrangian, std::vector<double> qa,
          std::vector<double> qb);

  std::size_t dim() const { return lagrangian.dim(); }

  TimeScaleGrid grid;
  Lagrangian lagrangian;
  std::vector<double> qa;
  std::vector<double> qb;
};

/// n-vector values on every grid point.
using Trajectory = GridFunction;

/// Componentwise linear interpolation (in t) between qa and qb.
Trajectory linear_guess(const Problem& p);

/// Delta integral of the composed integrand: sum_i mu_i L(t_i, q_{i+1}, q^Delta_i).
double action(const Problem& p, const Trajectory& q, Exec exec = Exec::parallel);

/// (P(t_{i+1}) - P(t_i)) / mu(t_i) - partial_2 L at cell i, with
/// P = partial_3 L(t, q^sigma, q^Delta), on the first N-2 points.
GridFunction el_residual(const Problem& p, const Trajectory& q, Exec exec = Exec::parallel);

/// Gradient of action() with respect to the interior values q(t_1)..q(t_{N-2}),
/// assembled cell by cell from the exact derivatives of each cell's action.
struct InteriorGradient {
  std::size_t dim = 0;
  std::vector<double> values;  // row r belongs to grid point r + 1

  std::size_t size() const { return dim == 0 ? 0 : values.size() / dim; }
  std::span<const double> at(std::size_t r) const {
    return std::span<const double>(values).subspan(r * dim, dim);
  }
  double max_abs() const;
};

InteriorGradient stationarity_gradient(const Problem& p, const Trajectory& q,
                                       Exec exec = Exec::parallel);

struct SolverOptions {
  double tol = 1e-12;  // on max|gradient| / (1 + |I|)
  int max_iter = 100;
  int newton_halvings = 8;  // beyond this a Newton step counts as stalled
  int max_halvings = 30;     // backtracking limit of the fallback step
  Exec exec = Exec::parallel;
};

struct SolveResult {
  Trajectory trajectory;
  int iterations = 0;
  double gradient_norm = 0.0;
  double action = 0.0;
};

/// Newton's method on the stationarity conditions with a block-tridiagonal
/// Hessian and backtracking on |gradient|^2. When a Newton step stalls, a
/// shifted (positive definite) Newton step that decreases the action is
/// taken instead; if those iterates run off to infinity the solve fails.
/// Endpoints are fixed to the boundary data. The result is a stationary point,
/// not necessarily a minimizer. Throws SolverError on non-convergence,
/// divergence or a singular pivot.
SolveResult solve_el(const Problem& p, const std::optional<Trajectory>& guess = std::nullopt,
                     const SolverOptions& options = {});

}  // namespace tsvar
