#include "tsvar/noether.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "tsvar/errors.hpp"

namespace tsvar {

namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

constexpr double kDerivativeStep = 1e-5;

}  // namespace

// --- SymmetryGenerator -------------------------------------------------------

SymmetryGenerator::SymmetryGenerator(std::size_t dim, Expression tau, std::vector<Expression> xi,
                                     std::optional<TransformationFamily> family)
    : tau_(std::move(tau)), xi_(std::move(xi)), family_(std::move(family)) {
  if (dim == 0 || xi_.size() != dim) {
    throw InvalidInput("symmetry: xi needs " + std::to_string(dim) + " components, got " +
                       std::to_string(xi_.size()));
  }
  auto check = [&](const Expression& e, VariableSet allowed, const char* what) {
    if (e.dim() != dim) throw InvalidInput(std::string("symmetry: ") + what + " has wrong dimension");
    for (const auto& name : e.free_variables()) {
      const std::size_t slot = e.layout().slot_of(name);
      const bool ok = slot == SlotLayout::t() ? allowed.allows(VarKind::t)
                      : slot == SlotLayout::eps() ? allowed.allows(VarKind::eps)
                      : slot < e.layout().qs(0) ? allowed.allows(VarKind::q)
                                                : false;
      if (!ok) {
        throw InvalidInput(std::string("symmetry: ") + what + " may not use '" + name + "'");
      }
    }
  };
  check(tau_, VariableSet::generator(), "tau");
  for (const auto& e : xi_) check(e, VariableSet::generator(), "xi");
  if (family_) {
    if (family_->qbar.size() != dim) {
      throw InvalidInput("symmetry: qbar needs " + std::to_string(dim) + " components, got " +
                         std::to_string(family_->qbar.size()));
    }
    check(family_->tbar, VariableSet::family(), "tbar");
    for (const auto& e : family_->qbar) check(e, VariableSet::family(), "qbar");
  }
}

SymmetryGenerator SymmetryGenerator::parse(std::size_t dim, std::string_view tau,
                                           const std::vector<std::string>& xi,
                                           const std::optional<std::string>& tbar,
                                           const std::vector<std::string>& qbar) {
  std::vector<Expression> xi_e;
  for (const auto& s : xi) xi_e.push_back(Expression::parse(s, dim, VariableSet::generator()));
  std::optional<TransformationFamily> family;
  if (tbar || !qbar.empty()) {
    if (!tbar || qbar.empty()) {
      throw InvalidInput("symmetry: an exact family needs both tbar and qbar");
    }
    TransformationFamily f;
    f.tbar = Expression::parse(*tbar, dim, VariableSet::family());
    for (const auto& s : qbar) f.qbar.push_back(Expression::parse(s, dim, VariableSet::family()));
    family = std::move(f);
  }
  return SymmetryGenerator(dim, Expression::parse(tau, dim, VariableSet::generator()),
                           std::move(xi_e), std::move(family));
}

bool SymmetryGenerator::tau_is_zero() const {
  if (!tau_.is_constant()) return false;
  std::vector<double> s(tau_.layout().count(), 0.0);
  return tau_.evaluate<double>(s) == 0.0;
}

std::vector<double> SymmetryGenerator::slots(double t, std::span<const double> q,
                                              double eps) const {
  const SlotLayout& layout = tau_.layout();
  std::vector<double> s(layout.count(), 0.0);
  s[SlotLayout::t()] = t;
  s[SlotLayout::eps()] = eps;
  for (std::size_t k = 0; k < layout.dim; ++k) s[layout.q(k)] = q[k];
  return s;
}

double SymmetryGenerator::tau(double t, std::span<const double> q) const {
  const auto s = slots(t, q, 0.0);
  return tau_.evaluate<double>(s);
}

std::vector<double> SymmetryGenerator::xi(double t, std::span<const double> q) const {
  const auto s = slots(t, q, 0.0);
  std::vector<double> out(xi_.size());
  for (std::size_t k = 0; k < xi_.size(); ++k) out[k] = xi_[k].evaluate<double>(s);
  return out;
}

double SymmetryGenerator::tbar(double t, std::span<const double> q, double eps) const {
  if (family_) return family_->tbar.evaluate<double>(slots(t, q, eps));
  return t + eps * tau(t, q);
}

std::vector<double> SymmetryGenerator::qbar(double t, std::span<const double> q,
                                            double eps) const {
  if (family_) {
    const auto s = slots(t, q, eps);
    std::vector<double> out(family_->qbar.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = family_->qbar[k].evaluate<double>(s);
    return out;
  }
  std::vector<double> out = xi(t, q);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = q[k] + eps * out[k];
  return out;
}

FamilyCheck check_family(const SymmetryGenerator& gen, std::span<const FamilySample> samples) {
  FamilyCheck c;
  const double h = kDerivativeStep;
  for (const FamilySample& s : samples) {
    c.identity_error = std::max(c.identity_error, rel_err(gen.tbar(s.t, s.q, 0.0), s.t));
    const auto q0 = gen.qbar(s.t, s.q, 0.0);
    for (std::size_t k = 0; k < q0.size(); ++k) {
      c.identity_error = std::max(c.identity_error, rel_err(q0[k], s.q[k]));
    }
    const double dt = (gen.tbar(s.t, s.q, h) - gen.tbar(s.t, s.q, -h)) / (2 * h);
    c.generator_error = std::max(c.generator_error, rel_err(dt, gen.tau(s.t, s.q)));
    const auto qp = gen.qbar(s.t, s.q, h);
    const auto qm = gen.qbar(s.t, s.q, -h);
    const auto xi = gen.xi(s.t, s.q);
    for (std::size_t k = 0; k < xi.size(); ++k) {
      c.generator_error = std::max(c.generator_error, rel_err((qp[k] - qm[k]) / (2 * h), xi[k]));
    }
  }
  c.ok = c.identity_error <= 1e-12 && c.generator_error <= 1e-6;
  return c;
}

// --- Pointwise invariance residual ------------------------------------------

namespace {

// t -> xi(t, q(t)) on every grid point.
GridFunction sampled_xi(const Trajectory& q, const SymmetryGenerator& gen, Exec exec) {
  const std::size_t n = q.dim();
  std::vector<double> v(q.size() * n);
  for_each_index(q.size(), exec, [&](std::size_t i) {
    const auto x = gen.xi(q.time(i), q.at(i));
    std::copy(x.begin(), x.end(), v.begin() + static_cast<std::ptrdiff_t>(i * n));
  });
  return GridFunction(q.grid(), n, std::move(v));
}

void require_match(const Problem& p, const Trajectory& q, const SymmetryGenerator& gen) {
  if (gen.dim() != p.dim()) throw InvalidInput("symmetry dimension does not match the problem");
  if (!(q.grid() == p.grid) || q.dim() != p.dim() || q.size() != p.grid.size()) {
    throw InvalidInput("trajectory does not match the problem grid and dimension");
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

}  // namespace

GridFunction invariance_residual_pointwise(const Problem& p, const Trajectory& q,
                                           const SymmetryGenerator& gen, Exec exec) {
  require_match(p, q, gen);
  const CellTable cells = evaluate_cells(p.lagrangian, q, exec);
  const GridFunction xi = sampled_xi(q, gen, exec);
  const GridFunction xi_sigma = compose_sigma(xi);
  const GridFunction xi_delta = delta_derivative(xi);
  std::vector<double> r(cells.cells);
  for (std::size_t i = 0; i < cells.cells; ++i) {
    r[i] = dot(cells.d_y_at(i), xi_sigma.at(i)) + dot(cells.d_v_at(i), xi_delta.at(i));
  }
  return GridFunction(q.grid(), 1, std::move(r));
}

// --- Invariance checks ---------------------------------------------------------

namespace {

std::vector<double> transformed_cells(const Problem& p, const Trajectory& q,
                                      const SymmetryGenerator& gen, double eps,
                                      bool transform_time, Exec exec) {
  const std::size_t N = q.size();
  const std::size_t n = q.dim();
  std::vector<double> tbar(N);
  std::vector<double> qbar(N * n);
  for_each_index(N, exec, [&](std::size_t i) {
    const double t = q.time(i);
    tbar[i] = transform_time ? gen.tbar(t, q.at(i), eps) : t;
    const auto qb = gen.qbar(t, q.at(i), eps);
    std::copy(qb.begin(), qb.end(), qbar.begin() + static_cast<std::ptrdiff_t>(i * n));
  });
  for (std::size_t i = 0; i < N; ++i) {
    if (!std::isfinite(tbar[i]) || (i > 0 && !(tbar[i] > tbar[i - 1]))) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "transformed time map is not strictly increasing at index %zu for eps=%.17g",
                    i, eps);
      throw NonMonotoneMap(buf, eps);
    }
  }
  TimeScaleGrid image = transform_time ? TimeScaleGrid(std::move(tbar), p.grid.segments())
                                       : p.grid;
  return cell_values(p.lagrangian, Trajectory(image, n, std::move(qbar)), exec);
}

InvarianceReport check_invariance(const Problem& p, const Trajectory& q,
                                  const SymmetryGenerator& gen, std::span<const double> eps_list,
                                  bool transform_time, Exec exec) {
  require_match(p, q, gen);
  InvarianceReport report;
  const std::vector<double> base = cell_values(p.lagrangian, q, exec);
  report.times.assign(q.grid().points().begin(), q.grid().points().end() - 1);
  report.eps.assign(eps_list.begin(), eps_list.end());
  for (double c : base) report.action += c;

  for (double eps : eps_list) {
    const std::vector<double> cells = transformed_cells(p, q, gen, eps, transform_time, exec);
    std::vector<double> disc(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      disc[i] = rel_err(cells[i], base[i]);
      report.max_discrepancy = std::max(report.max_discrepancy, disc[i]);
    }
    report.discrepancy.push_back(std::move(disc));
  }

  auto total = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  };
  const double plus = total(transformed_cells(p, q, gen, kDerivativeStep, transform_time, exec));
  const double minus = total(transformed_cells(p, q, gen, -kDerivativeStep, transform_time, exec));
  report.action_derivative = (plus - minus) / (2 * kDerivativeStep);
  report.derivative_vanishes =
      std::abs(report.action_derivative) <= 1e-7 * (1.0 + std::abs(report.action));
  return report;
}

}  // namespace

InvarianceReport check_invariance_fixed_time(const Problem& p, const Trajectory& q,
                                             const SymmetryGenerator& gen,
                                             std::span<const double> eps_list, Exec exec) {
  return check_invariance(p, q, gen, eps_list, false, exec);
}

InvarianceReport check_invariance_time_transform(const Problem& p, const Trajectory& q,
                                                 const SymmetryGenerator& gen,
                                                 std::span<const double> eps_list, Exec exec) {
  return check_invariance(p, q, gen, eps_list, true, exec);
}

// --- Conserved quantities ------------------------------------------------------

ConservationSummary conservation_residual(const GridFunction& c) {
  if (c.dim() != 1 || c.size() < 2) {
    throw InvalidInput("conservation residual needs at least 2 scalar samples");
  }
  ConservationSummary s;
  const GridFunction d = delta_derivative(c);
  s.residuals.assign(d.values().begin(), d.values().end());
  for (double r : s.residuals) s.max_abs = std::max(s.max_abs, std::abs(r));
  return s;
}

ConservationSummary conservation_residual(const ConservationReport& report) {
  return conservation_residual(GridFunction(report.grid, 1, report.values));
}

namespace {

ConservationReport make_report(const TimeScaleGrid& grid, std::vector<double> values) {
  ConservationReport r{grid, std::move(values), {}, 0.0};
  if (r.values.size() >= 2) {
    ConservationSummary s = conservation_residual(r);
    r.residuals = std::move(s.residuals);
    r.max_abs = s.max_abs;
  }
  return r;
}

// partial_3 L . xi at every cell, shared by both quantities so that tau == 0
// reproduces the fixed-time quantity exactly.
std::vector<double> momentum_term(const CellTable& cells, const GridFunction& xi) {
  std::vector<double> c(cells.cells);
  for (std::size_t i = 0; i < cells.cells; ++i) c[i] = dot(cells.d_v_at(i), xi.at(i));
  return c;
}

}  // namespace

ConservationReport noether_quantity_fixed_time(const Problem& p, const Trajectory& q,
                                               const SymmetryGenerator& gen, Exec exec) {
  require_match(p, q, gen);
  const CellTable cells = evaluate_cells(p.lagrangian, q, exec);
  return make_report(q.grid(), momentum_term(cells, sampled_xi(q, gen, exec)));
}

ConservationReport noether_quantity(const Problem& p, const Trajectory& q,
                                    const SymmetryGenerator& gen, NoetherOptions options,
                                    Exec exec) {
  require_match(p, q, gen);
  const CellTable cells = evaluate_cells(p.lagrangian, q, exec);
  std::vector<double> c = momentum_term(cells, sampled_xi(q, gen, exec));
  for (std::size_t i = 0; i < cells.cells; ++i) {
    const double tau = gen.tau(q.time(i), q.at(i));
    const double mu = options.continuum_mu ? 0.0 : cells.mu[i];
    const double energy = cells.value[i] - dot(cells.d_v_at(i), cells.v_at(i)) - cells.d_t[i] * mu;
    c[i] = c[i] + energy * tau;
  }
  return make_report(q.grid(), std::move(c));
}

// --- Extended Lagrangian -----------------------------------------------------

ExtendedLagrangian::Partials ExtendedLagrangian::partials(double mu, double s,
                                                          std::span<const double> q, double r,
                                                          std::span<const double> v) const {
  using D = Dual<double>;
  const std::size_t n = q.size();
  Partials out;
  out.d_q.resize(n);
  out.d_v.resize(n);
  std::vector<D> qd(n), vd(n);
  for (std::size_t k = 0; k < n; ++k) {
    qd[k] = D(q[k], 0.0);
    vd[k] = D(v[k], 0.0);
  }
  const D ds = evaluate<D>(mu, D(s, 1.0), qd, D(r, 0.0), vd);
  out.value = ds.v;
  out.d_s = ds.d;
  out.d_r = evaluate<D>(mu, D(s, 0.0), qd, D(r, 1.0), vd).d;
  for (std::size_t k = 0; k < n; ++k) {
    qd[k].d = 1.0;
    out.d_q[k] = evaluate<D>(mu, D(s, 0.0), qd, D(r, 0.0), vd).d;
    qd[k].d = 0.0;
    vd[k].d = 1.0;
    out.d_v[k] = evaluate<D>(mu, D(s, 0.0), qd, D(r, 0.0), vd).d;
    vd[k].d = 0.0;
  }
  return out;
}

ExtendedIdentityReport extended_lagrangian_partials(const Problem& p, const Trajectory& q) {
  if (!(q.grid() == p.grid) || q.dim() != p.dim() || q.size() != p.grid.size()) {
    throw InvalidInput("trajectory does not match the problem grid and dimension");
  }
  const CellTable cells = evaluate_cells(p.lagrangian, q, Exec::serial);
  const ExtendedLagrangian ext(p.lagrangian);
  const std::size_t n = p.dim();
  const double h = 1e-6;
  ExtendedIdentityReport rep;
  for (std::size_t i = 0; i < cells.cells; ++i) {
    const double t = cells.t[i];
    const double mu = cells.mu[i];
    const double s_sigma = p.grid.point(i + 1);  // s = identity, so s^sigma = sigma(t), s^Delta = 1
    auto y = cells.y_at(i);
    auto v = cells.v_at(i);
    const auto part = ext.partials(mu, s_sigma, y, 1.0, v);

    const double energy = cells.value[i] - dot(cells.d_v_at(i), v) - cells.d_t[i] * mu;
    const double ev = rel_err(part.value, cells.value[i]);
    const double er = rel_err(part.d_r, energy);
    double eq = 0.0;
    for (std::size_t k = 0; k < n; ++k) eq = std::max(eq, rel_err(part.d_v[k], cells.d_v_at(i)[k]));

    const double fr = (ext.value(mu, s_sigma, y, 1.0 + h, v) - ext.value(mu, s_sigma, y, 1.0 - h, v)) /
                      (2 * h);
    const double fd_r = rel_err(fr, part.d_r);
    double fd_v = 0.0;
    std::vector<double> vp(v.begin(), v.end()), vm(v.begin(), v.end());
    for (std::size_t k = 0; k < n; ++k) {
      vp[k] += h;
      vm[k] -= h;
      const double fv = (ext.value(mu, s_sigma, y, 1.0, vp) - ext.value(mu, s_sigma, y, 1.0, vm)) /
                        (2 * h);
      vp[k] = v[k];
      vm[k] = v[k];
      fd_v = std::max(fd_v, rel_err(fv, part.d_v[k]));
    }

    rep.times.push_back(t);
    rep.value_error.push_back(ev);
    rep.d_r_error.push_back(er);
    rep.d_v_error.push_back(eq);
    rep.d_r_fd_error.push_back(fd_r);
    rep.d_v_fd_error.push_back(fd_v);
    rep.max_value_error = std::max(rep.max_value_error, ev);
    rep.max_forward_error = std::max({rep.max_forward_error, er, eq});
    rep.max_fd_error = std::max({rep.max_fd_error, fd_r, fd_v});
  }
  return rep;
}

}  // namespace tsvar
