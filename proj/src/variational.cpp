#include "tsvar/variational.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "tsvar/errors.hpp"

namespace tsvar {

Problem::Problem(TimeScaleGrid grid_in, Lagrangian lagrangian_in, std::vector<double> qa_in,
                 std::vector<double> qb_in)
    : grid(std::move(grid_in)),
      lagrangian(std::move(lagrangian_in)),
      qa(std::move(qa_in)),
      qb(std::move(qb_in)) {
  if (qa.size() != dim()) {
    throw InvalidInput("qa has " + std::to_string(qa.size()) + " components, expected " +
                       std::to_string(dim()));
  }
  if (qb.size() != dim()) {
    throw InvalidInput("qb has " + std::to_string(qb.size()) + " components, expected " +
                       std::to_string(dim()));
  }
  for (double x : qa) {
    if (!std::isfinite(x)) throw InvalidInput("qa must be finite");
  }
  for (double x : qb) {
    if (!std::isfinite(x)) throw InvalidInput("qb must be finite");
  }
}

Trajectory linear_guess(const Problem& p) {
  const std::size_t n = p.dim();
  const std::size_t N = p.grid.size();
  const double a = p.grid.front();
  const double span = p.grid.back() - a;
  std::vector<double> v(N * n);
  for (std::size_t i = 0; i < N; ++i) {
    const double s = (p.grid.point(i) - a) / span;
    for (std::size_t k = 0; k < n; ++k) v[i * n + k] = p.qa[k] + s * (p.qb[k] - p.qa[k]);
  }
  for (std::size_t k = 0; k < n; ++k) {
    v[k] = p.qa[k];
    v[(N - 1) * n + k] = p.qb[k];
  }
  return Trajectory(p.grid, n, std::move(v));
}

double action(const Problem& p, const Trajectory& q, Exec exec) {
  double sum = 0.0;
  for (double c : cell_values(p.lagrangian, q, exec)) sum += c;
  return sum;
}

GridFunction el_residual(const Problem& p, const Trajectory& q, Exec exec) {
  if (q.grid().size() < 3) {
    throw InvalidInput("Euler-Lagrange residual needs a grid with at least 3 points");
  }
  const CellTable cells = evaluate_cells(p.lagrangian, q, exec);
  const std::size_t n = cells.dim;
  const std::size_t m = cells.cells - 1;
  std::vector<double> r(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    auto p0 = cells.d_v_at(i);
    auto p1 = cells.d_v_at(i + 1);
    auto dy = cells.d_y_at(i);
    for (std::size_t k = 0; k < n; ++k) r[i * n + k] = (p1[k] - p0[k]) / cells.mu[i] - dy[k];
  }
  return GridFunction(q.grid(), n, std::move(r));
}

double InteriorGradient::max_abs() const {
  double m = 0.0;
  for (double x : values) m = std::max(m, std::abs(x));
  return m;
}

namespace {

InteriorGradient assemble_gradient(const CellDerivatives& d) {
  const std::size_t n = d.dim;
  InteriorGradient g;
  g.dim = n;
  g.values.assign((d.cells - 1) * n, 0.0);
  for (std::size_t r = 0; r + 1 < d.cells; ++r) {
    auto left = d.grad_at(r);       // cell r, derivative w.r.t. its right end
    auto right = d.grad_at(r + 1);  // cell r+1, derivative w.r.t. its left end
    for (std::size_t k = 0; k < n; ++k) g.values[r * n + k] = left[n + k] + right[k];
  }
  return g;
}

double total(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

// Solves A X = B (A is n x n, B is n x k, both row-major) by Gaussian
// elimination with partial pivoting. Returns the failing column on a
// vanishing pivot, or n on success.
std::size_t dense_solve(std::vector<double> A, std::size_t n, std::vector<double>& B,
                        std::size_t k) {
  double scale = 0.0;
  for (double x : A) scale = std::max(scale, std::abs(x));
  const double tiny = scale * 1e-14;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(A[r * n + c]) > std::abs(A[piv * n + c])) piv = r;
    }
    if (!(std::abs(A[piv * n + c]) > tiny)) return c;
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(A[c * n + j], A[piv * n + j]);
      for (std::size_t j = 0; j < k; ++j) std::swap(B[c * k + j], B[piv * k + j]);
    }
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = A[r * n + c] / A[c * n + c];
      if (f == 0.0) continue;
      for (std::size_t j = c; j < n; ++j) A[r * n + j] -= f * A[c * n + j];
      for (std::size_t j = 0; j < k; ++j) B[r * k + j] -= f * B[c * k + j];
    }
  }
  for (std::size_t c = n; c-- > 0;) {
    for (std::size_t j = 0; j < k; ++j) {
      double s = B[c * k + j];
      for (std::size_t r = c + 1; r < n; ++r) s -= A[c * n + r] * B[r * k + j];
      B[c * k + j] = s / A[c * n + c];
    }
  }
  return n;
}

// True when the symmetric part of the n x n matrix A admits a Cholesky factor.
bool cholesky_ok(const std::vector<double>& A, std::size_t n) {
  std::vector<double> L(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = j; i < n; ++i) {
      double s = 0.5 * (A[i * n + j] + A[j * n + i]);
      for (std::size_t k = 0; k < j; ++k) s -= L[i * n + k] * L[j * n + k];
      if (i == j) {
        if (!(s > 0.0)) return false;
        L[j * n + j] = std::sqrt(s);
      } else {
        L[i * n + j] = s / L[j * n + j];
      }
    }
  }
  return true;
}

// Newton step: solves (H + shift I) d = -g for the block-tridiagonal Hessian
// of the action in the interior unknowns.
std::vector<double> newton_direction(const CellDerivatives& d, const InteriorGradient& g,
                                     const TimeScaleGrid& grid, double gnorm,
                                     double shift = 0.0, bool* positive_definite = nullptr) {
  if (positive_definite) *positive_definite = true;
  const std::size_t n = d.dim;
  const std::size_t m2 = 2 * n;
  const std::size_t rows = g.size();
  auto block = [&](std::size_t cell, std::size_t bi, std::size_t bj) {
    // (bi, bj) in {0,1}^2 selects the (left/right end) sub-block.
    std::vector<double> out(n * n);
    auto h = d.hess_at(cell);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) out[a * n + b] = h[(bi * n + a) * m2 + bj * n + b];
    }
    return out;
  };
  auto fail = [&](std::size_t r, std::size_t col) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "singular Jacobian block at interior point %zu (t=%.17g), pivot column %zu",
                  r + 1, grid.point(r + 1), col + 1);
    throw SolverError(buf, gnorm);
  };

  // Forward sweep of block Thomas: C_r = M_r^{-1} U_r, z_r = M_r^{-1}(rhs_r - L_r z_{r-1}).
  std::vector<std::vector<double>> C(rows), z(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<double> M = block(r, 1, 1);
    const std::vector<double> D1 = block(r + 1, 0, 0);
    for (std::size_t j = 0; j < n * n; ++j) M[j] += D1[j];
    for (std::size_t a = 0; a < n; ++a) M[a * n + a] += shift;
    std::vector<double> rhs(n);
    for (std::size_t k = 0; k < n; ++k) rhs[k] = -g.values[r * n + k];
    if (r > 0) {
      const std::vector<double> L = block(r, 1, 0);  // couples point r+1 to point r
      const auto& Cp = C[r - 1];
      const auto& zp = z[r - 1];
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
          double s = 0.0;
          for (std::size_t c = 0; c < n; ++c) s += L[a * n + c] * Cp[c * n + b];
          M[a * n + b] -= s;
        }
        double s = 0.0;
        for (std::size_t c = 0; c < n; ++c) s += L[a * n + c] * zp[c];
        rhs[a] -= s;
      }
    }
    if (positive_definite && *positive_definite) *positive_definite = cholesky_ok(M, n);
    // Solve for [U_r | rhs] together.
    const bool has_upper = r + 1 < rows;
    const std::size_t k = n + 1;
    std::vector<double> B(n * k, 0.0);
    if (has_upper) {
      const std::vector<double> U = block(r + 1, 0, 1);
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) B[a * k + b] = U[a * n + b];
      }
    }
    for (std::size_t a = 0; a < n; ++a) B[a * k + n] = rhs[a];
    if (std::size_t col = dense_solve(M, n, B, k); col != n) fail(r, col);
    C[r].resize(n * n);
    z[r].resize(n);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) C[r][a * n + b] = B[a * k + b];
      z[r][a] = B[a * k + n];
    }
  }
  std::vector<double> x(rows * n);
  for (std::size_t r = rows; r-- > 0;) {
    for (std::size_t a = 0; a < n; ++a) {
      double s = z[r][a];
      if (r + 1 < rows) {
        for (std::size_t b = 0; b < n; ++b) s -= C[r][a * n + b] * x[(r + 1) * n + b];
      }
      x[r * n + a] = s;
    }
  }
  return x;
}

Trajectory with_interior(const Trajectory& q, const std::vector<double>& base,
                         const std::vector<double>& step, double lambda) {
  const std::size_t n = q.dim();
  std::vector<double> v = base;
  for (std::size_t j = 0; j < step.size(); ++j) v[n + j] = base[n + j] + lambda * step[j];
  return Trajectory(q.grid(), n, std::move(v));
}

// Largest |H_ij| and a shift that makes H + shift I diagonally dominant.
std::pair<double, double> hessian_bounds(const CellDerivatives& d) {
  const std::size_t n = d.dim;
  const std::size_t m2 = 2 * n;
  double largest = 0.0;
  double shift = 0.0;
  for (std::size_t r = 0; r + 1 < d.cells; ++r) {
    auto left = d.hess_at(r);       // point r+1 is the right end (index n + a)
    auto right = d.hess_at(r + 1);  // point r+1 is the left end (index a)
    for (std::size_t a = 0; a < n; ++a) {
      const double diag = left[(n + a) * m2 + n + a] + right[a * m2 + a];
      double off = 0.0;
      for (std::size_t b = 0; b < m2; ++b) {
        if (b != n + a) off += std::abs(left[(n + a) * m2 + b]);
        if (b != a) off += std::abs(right[a * m2 + b]);
        largest = std::max({largest, std::abs(left[(n + a) * m2 + b]), std::abs(right[a * m2 + b])});
      }
      shift = std::max(shift, off - diag);
    }
  }
  return {largest, shift};
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double sum_squares(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

}  // namespace

InteriorGradient stationarity_gradient(const Problem& p, const Trajectory& q, Exec exec) {
  if (q.grid().size() < 3) {
    throw InvalidInput("stationarity gradient needs a grid with at least 3 points");
  }
  return assemble_gradient(cell_derivatives(p.lagrangian, q, false, exec));
}

SolveResult solve_el(const Problem& p, const std::optional<Trajectory>& guess,
                     const SolverOptions& options) {
  const std::size_t N = p.grid.size();
  const std::size_t n = p.dim();
  if (N < 3) throw InvalidInput("solve_el needs a grid with at least 3 points");

  std::vector<double> values;
  if (guess) {
    if (!(guess->grid() == p.grid) || guess->dim() != n || guess->size() != N) {
      throw InvalidInput("initial guess does not match the problem grid and dimension");
    }
    values.assign(guess->values().begin(), guess->values().end());
  } else {
    const Trajectory lin = linear_guess(p);
    values.assign(lin.values().begin(), lin.values().end());
  }
  for (std::size_t k = 0; k < n; ++k) {
    values[k] = p.qa[k];
    values[(N - 1) * n + k] = p.qb[k];
  }
  Trajectory q(p.grid, n, values);

  // Plain Newton on |g|^2 first, since extremals can be saddle points of the
  // action. After the first stalled step the solve switches for good to
  // modified Newton on the action, which cannot cycle back toward a saddle.
  bool minimizing = false;
  double switch_size = 0.0;  // max |q| when minimization started
  for (int iter = 0;; ++iter) {
    const CellDerivatives d = cell_derivatives(p.lagrangian, q, true, options.exec);
    const InteriorGradient g = assemble_gradient(d);
    const double I = total(d.value);
    const double gnorm = g.max_abs();
    if (gnorm <= options.tol * (1.0 + std::abs(I))) {
      return SolveResult{q, iter, gnorm, I};
    }
    if (iter >= options.max_iter) {
      char buf[128];
      std::snprintf(buf, sizeof buf,
                    "Newton did not converge in %d iterations (last gradient norm %.6e)",
                    options.max_iter, gnorm);
      throw SolverError(buf, gnorm);
    }

    const double merit = sum_squares(g.values);
    const std::vector<double> base(q.values().begin(), q.values().end());
    struct Trial {
      bool ok = false;
      double norm = 0.0, merit = 0.0, action = 0.0;
    };
    auto evaluate = [&](const Trajectory& trial) {
      Trial t;
      try {
        const CellDerivatives td = cell_derivatives(p.lagrangian, trial, false, options.exec);
        const InteriorGradient tg = assemble_gradient(td);
        t = {true, tg.max_abs(), sum_squares(tg.values), total(td.value)};
      } catch (const DomainError&) {
        // step left the domain of L; shrink it
      }
      return t;
    };
    auto converged = [&](const Trial& t) { return t.norm <= options.tol * (1.0 + std::abs(t.action)); };

    bool accepted = false;
    if (!minimizing) {
      const std::vector<double> step = newton_direction(d, g, p.grid, gnorm);
      double lambda = 1.0;
      for (int h = 0; h <= options.newton_halvings; ++h, lambda *= 0.5) {
        Trajectory trial = with_interior(q, base, step, lambda);
        const Trial t = evaluate(trial);
        if (t.ok && (t.merit < merit || converged(t))) {
          q = std::move(trial);
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        minimizing = true;
        for (double x : q.values()) switch_size = std::max(switch_size, std::abs(x));
      }
    } else {
      // Actions unbounded below send the minimization off to infinity.
      double size = 0.0;
      for (double x : q.values()) size = std::max(size, std::abs(x));
      if (size > 1e6 * (1.0 + switch_size)) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "iterates diverge after Newton stalled; the action may be unbounded "
                      "below (last gradient norm %.6e)",
                      gnorm);
        throw SolverError(buf, gnorm);
      }
    }
    if (!accepted) {
      // Smallest tried shift that makes H + shift I positive definite.
      std::vector<double> dir;
      double used_shift = 0.0;
      bool pd = false;
      try {
        dir = newton_direction(d, g, p.grid, gnorm, 0.0, &pd);
      } catch (const SolverError&) {
        pd = false;
      }
      if (!pd || !(dot(g.values, dir) < 0.0)) {
        dir.clear();
        const auto [largest, gershgorin] = hessian_bounds(d);
        const double floor = std::max(largest, 1e-300) * 1e-8;
        for (double shift = gershgorin * 1.01 + floor;; shift *= 0.25) {
          std::vector<double> trial_dir;
          try {
            trial_dir = newton_direction(d, g, p.grid, gnorm, shift, &pd);
          } catch (const SolverError&) {
            pd = false;
          }
          if (!pd || !(dot(g.values, trial_dir) < 0.0)) break;
          dir = std::move(trial_dir);
          used_shift = shift;
          if (shift < floor) break;
        }
      }
      const double slope = dir.empty() ? 0.0 : dot(g.values, dir);
      double alpha = 1.0;
      for (int h = 0; slope < 0.0 && h <= options.max_halvings; ++h, alpha *= 0.5) {
        Trajectory trial = with_interior(q, base, dir, alpha);
        const Trial t = evaluate(trial);
        if (!t.ok) continue;
        const bool armijo = t.action <= I + 1e-4 * alpha * slope && t.action < I;
        // Near a minimizer the decrease of I drops below rounding; a full
        // unshifted step that reduces |g| is then taken as is.
        const bool newton_like = used_shift == 0.0 && t.merit < merit &&
                                 t.action <= I + 1e-12 * (1.0 + std::abs(I));
        if (armijo || newton_like || converged(t)) {
          q = std::move(trial);
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      char buf[128];
      std::snprintf(buf, sizeof buf,
                    "line search failed after %d halvings (last gradient norm %.6e)",
                    options.max_halvings, gnorm);
      throw SolverError(buf, gnorm);
    }
  }
}

}  // namespace tsvar
