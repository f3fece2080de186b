#include "tsvar/kernels.hpp"

#include <cstdio>

#include "tsvar/errors.hpp"

namespace tsvar {

namespace {

[[noreturn]] void rethrow_in_cell(const DomainError& e, std::size_t i, double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "cell %zu (t=%.17g): ", i, t);
  throw DomainError(buf + std::string(e.what()));
}

void require_full(const Lagrangian& lagrangian, const GridFunction& q) {
  if (q.dim() != lagrangian.dim()) {
    throw InvalidInput("trajectory dimension " + std::to_string(q.dim()) +
                       " does not match the Lagrangian dimension " +
                       std::to_string(lagrangian.dim()));
  }
  if (q.size() != q.grid().size() || q.size() < 2) {
    throw InvalidInput("trajectory must be defined on the full grid");
  }
}

template <class T>
T cell_action(const Lagrangian& lagrangian, double t, double mu, std::span<const T> a,
              std::span<const T> b) {
  const std::size_t n = a.size();
  std::vector<T> v(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = (b[k] - a[k]) / T(mu);
  return T(mu) * lagrangian.evaluate<T>(T(t), b, std::span<const T>(v));
}

}  // namespace

CellTable evaluate_cells(const Lagrangian& lagrangian, const GridFunction& q, Exec exec) {
  require_full(lagrangian, q);
  const TimeScaleGrid& grid = q.grid();
  const std::size_t n = q.dim();
  CellTable table;
  table.cells = grid.size() - 1;
  table.dim = n;
  table.t.resize(table.cells);
  table.mu.resize(table.cells);
  table.value.resize(table.cells);
  table.d_t.resize(table.cells);
  table.y.resize(table.cells * n);
  table.v.resize(table.cells * n);
  table.d_y.resize(table.cells * n);
  table.d_v.resize(table.cells * n);

  for_each_index(table.cells, exec, [&](std::size_t i) {
    const double t = grid.point(i);
    const double mu = grid.mu_at(i);
    auto qa = q.at(i);
    auto qb = q.at(i + 1);
    double* y = table.y.data() + i * n;
    double* v = table.v.data() + i * n;
    for (std::size_t k = 0; k < n; ++k) {
      y[k] = qb[k];
      v[k] = (qb[k] - qa[k]) / mu;
    }
    LagrangianPartials p;
    try {
      p = lagrangian.partials(t, std::span<const double>(y, n), std::span<const double>(v, n));
    } catch (const DomainError& e) {
      rethrow_in_cell(e, i, t);
    }
    table.t[i] = t;
    table.mu[i] = mu;
    table.value[i] = p.value;
    table.d_t[i] = p.d_t;
    for (std::size_t k = 0; k < n; ++k) {
      table.d_y[i * n + k] = p.d_y[k];
      table.d_v[i * n + k] = p.d_v[k];
    }
  });
  return table;
}

std::vector<double> cell_values(const Lagrangian& lagrangian, const GridFunction& q, Exec exec) {
  require_full(lagrangian, q);
  const TimeScaleGrid& grid = q.grid();
  const std::size_t n = q.dim();
  std::vector<double> out(grid.size() - 1);
  for_each_index(out.size(), exec, [&](std::size_t i) {
    const double t = grid.point(i);
    const double mu = grid.mu_at(i);
    auto qa = q.at(i);
    auto qb = q.at(i + 1);
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = (qb[k] - qa[k]) / mu;
    try {
      out[i] = mu * lagrangian.value(t, qb, v);
    } catch (const DomainError& e) {
      rethrow_in_cell(e, i, t);
    }
  });
  return out;
}

CellDerivatives cell_derivatives(const Lagrangian& lagrangian, const GridFunction& q,
                                 bool with_hessian, Exec exec) {
  require_full(lagrangian, q);
  using D = Dual<double>;
  using DD = Dual<D>;
  const TimeScaleGrid& grid = q.grid();
  const std::size_t n = q.dim();
  const std::size_t m = 2 * n;
  CellDerivatives out;
  out.cells = grid.size() - 1;
  out.dim = n;
  out.value.resize(out.cells);
  out.grad.resize(out.cells * m);
  if (with_hessian) out.hess.resize(out.cells * m * m);

  for_each_index(out.cells, exec, [&](std::size_t i) {
    const double t = grid.point(i);
    const double mu = grid.mu_at(i);
    std::vector<double> x(m);
    for (std::size_t k = 0; k < n; ++k) {
      x[k] = q.at(i)[k];
      x[n + k] = q.at(i + 1)[k];
    }
    double* g = out.grad.data() + i * m;
    try {
      if (!with_hessian) {
        std::vector<D> xd(m);
        for (std::size_t j = 0; j < m; ++j) xd[j] = D(x[j], 0.0);
        for (std::size_t a = 0; a < m; ++a) {
          xd[a].d = 1.0;
          std::span<const D> all(xd);
          const D r = cell_action<D>(lagrangian, t, mu, all.first(n), all.subspan(n));
          xd[a].d = 0.0;
          g[a] = r.d;
          out.value[i] = r.v;
        }
        return;
      }
      double* h = out.hess.data() + i * m * m;
      std::vector<DD> xdd(m);
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a; b < m; ++b) {
          for (std::size_t j = 0; j < m; ++j) {
            xdd[j] = DD(D(x[j], j == b ? 1.0 : 0.0), D(j == a ? 1.0 : 0.0, 0.0));
          }
          std::span<const DD> all(xdd);
          const DD r = cell_action<DD>(lagrangian, t, mu, all.first(n), all.subspan(n));
          h[a * m + b] = r.d.d;
          h[b * m + a] = r.d.d;
          if (a == b) g[a] = r.d.v;
          out.value[i] = r.v.v;
        }
      }
    } catch (const DomainError& e) {
      rethrow_in_cell(e, i, t);
    }
  });
  return out;
}

}  // namespace tsvar
