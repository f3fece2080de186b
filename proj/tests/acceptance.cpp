// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "oracles.hpp"
#include "tsvar/calculus.hpp"
#include "tsvar/csv.hpp"
#include "tsvar/errors.hpp"
#include "tsvar/noether.hpp"
#include "tsvar/timescale.hpp"
#include "tsvar/variational.hpp"

namespace fs = std::filesystem;
using namespace tsvar;
using oracle::Path;
using oracle::Vec;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const Outcome& o) {
  std::printf("criterion %2d: %s  %s  [%s]\n", id, o.pass ? "PASS" : "FAIL", title.c_str(),
              o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

template <class F>
void run_criterion(int id, const std::string& title, F&& f) {
  Outcome o;
  try {
    o = f();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  report(id, title, o);
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

Vec points_of(const TimeScaleGrid& g) { return Vec(g.points().begin(), g.points().end()); }

Path path_of(const GridFunction& q) {
  Path out;
  for (std::size_t i = 0; i < q.size(); ++i) out.emplace_back(q.at(i).begin(), q.at(i).end());
  return out;
}

Trajectory trajectory_of(const TimeScaleGrid& g, const Path& q) {
  std::vector<double> flat;
  for (const Vec& row : q) flat.insert(flat.end(), row.begin(), row.end());
  return Trajectory(g, q[0].size(), flat);
}

// Random grid of at most max_points points from one of the five constructors.
TimeScaleGrid random_grid(std::mt19937_64& rng, std::size_t max_points, bool positive,
                          int kind = -1) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto count = [&](std::size_t lo) {
    return std::uniform_int_distribution<std::size_t>(lo, max_points)(rng);
  };
  if (kind < 0) kind = std::uniform_int_distribution<int>(0, 4)(rng);
  const double lo = positive ? 0.5 : -3.0;
  switch (kind) {
    case 0: {
      const long a = positive ? std::uniform_int_distribution<long>(1, 5)(rng)
                              : std::uniform_int_distribution<long>(-10, 10)(rng);
      return make_timescale(IntegersSpec{a, a + static_cast<long>(count(3)) - 1});
    }
    case 1: {
      const double hs[] = {0.5, 0.25, 0.1, 0.2, 0.05};
      const double h = hs[std::uniform_int_distribution<int>(0, 4)(rng)];
      const double a = lo + std::floor(u(rng) * 4.0);
      return make_timescale(UniformSpec{a, a + h * static_cast<double>(count(3) - 1), h});
    }
    case 2: {
      const int n0 = std::uniform_int_distribution<int>(-6, 0)(rng);
      const int n1 = n0 + static_cast<int>(std::min<std::size_t>(count(3), 12)) - 1;
      return make_timescale(Power2Spec{n0, n1});
    }
    case 3: {
      const std::size_t n = count(3);
      Vec pts{lo + u(rng)};
      while (pts.size() < n) pts.push_back(pts.back() + 0.05 + u(rng));
      return make_timescale(ExplicitSpec{pts});
    }
    default: {
      const double a = lo + u(rng);
      const double h = 0.02 + 0.2 * u(rng);
      const double len = h * (static_cast<double>(count(4)) - 2.0 + u(rng) * 0.9);
      return make_timescale(SampledSpec{a, a + len, h});
    }
  }
}

Path random_path(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Path q(n, Vec(dim));
  for (auto& row : q)
    for (double& x : row) x = u(rng);
  return q;
}

// ---------------------------------------------------------------------------

Outcome calculus_identities() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst_product = 0.0, worst_sigma = 0.0, worst_cov = 0.0;
  for (int inst = 0; inst < 200; ++inst) {
    const TimeScaleGrid g = random_grid(rng, 50, false, inst % 5);
    const std::size_t n = g.size();
    std::vector<double> fv(n), gv(n), av(n);
    for (std::size_t i = 0; i < n; ++i) {
      fv[i] = u(rng);
      gv[i] = u(rng);
    }
    const GridFunction f(g, 1, fv), h(g, 1, gv);
    const GridFunction fg = multiply(f, h);
    const GridFunction d_fg = delta_derivative(fg);
    const GridFunction df = delta_derivative(f), dh = delta_derivative(h);
    const GridFunction hs = compose_sigma(h), fs = compose_sigma(f);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double mu = g.mu_at(i);
      const double t1 = df[i] * hs[i], t2 = f[i] * dh[i];
      const double scale = std::max({std::abs(d_fg[i]), std::abs(t1) + std::abs(t2),
                                     (std::abs(fg[i + 1]) + std::abs(fg[i])) / mu});
      worst_product = std::max(worst_product, std::abs(d_fg[i] - (t1 + t2)) / scale);
      const double rhs = f[i] + mu * df[i];
      const double s2 = std::max({std::abs(fs[i]), std::abs(f[i]), std::abs(mu * df[i])});
      worst_sigma = std::max(worst_sigma, std::abs(fs[i] - rhs) / s2);
    }
    // Change of variables with a random strictly increasing alpha.
    double a = u(rng);
    for (std::size_t i = 0; i < n; ++i) {
      av[i] = a;
      a += 0.01 + std::abs(u(rng));
    }
    const double c1 = u(rng), c2 = u(rng);
    auto fn = [&](double x) { return std::sin(c1 * x) + c2 * x * x / 10.0; };
    const PushforwardResult pf = pushforward(GridFunction(g, 1, av), fn);
    double lhs = 0.0, scale = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double term = (av[i + 1] - av[i]) * fn(av[i]);
      lhs += term;
      scale += std::abs(term);
    }
    scale = std::max(scale, 1e-300);
    worst_cov = std::max({worst_cov, std::abs(pf.lhs - pf.rhs) / scale,
                          std::abs(pf.lhs - lhs) / scale, std::abs(pf.rhs - lhs) / scale});
  }
  const bool pass = worst_product <= 1e-12 && worst_sigma <= 1e-12 && worst_cov <= 1e-12;
  return {pass, "200 instances; product " + sci(worst_product) + ", sigma " + sci(worst_sigma) +
                    ", change of variables " + sci(worst_cov) + " (limit 1e-12)"};
}

Outcome el_equivalence() {
  std::mt19937_64 rng(202);
  double worst_identity = 0.0, worst_fd = 0.0, worst_action = 0.0, worst_residual = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    const bool positive = inst % 2 == 0;
    const TimeScaleGrid g = random_grid(rng, 30, positive, inst % 5);
    const oracle::HandLagrangian hl = oracle::random_lagrangian(rng, positive);
    const std::size_t n = hl.dim;
    const Path qp = random_path(rng, g.size(), n);
    const Problem p(g, Lagrangian::parse(hl.text, n), qp.front(), qp.back());
    const Trajectory q = trajectory_of(g, qp);
    const Vec t = points_of(g);

    const double I = action(p, q);
    const double I_ref = oracle::action(hl, t, qp);
    worst_action = std::max(worst_action, std::abs(I - I_ref) / std::max(1.0, std::abs(I_ref)));

    const GridFunction res = el_residual(p, q);
    const Path res_ref = oracle::el_residual(hl, t, qp);
    const InteriorGradient grad = stationarity_gradient(p, q);
    for (std::size_t j = 1; j + 1 < g.size(); ++j) {
      const oracle::Cell a = oracle::cell(t, qp, j - 1), b = oracle::cell(t, qp, j);
      const Vec pa = hl.d_v(a.t, a.y, a.v), pb = hl.d_v(b.t, b.y, b.v), gy = hl.d_y(a.t, a.y, a.v);
      for (std::size_t k = 0; k < n; ++k) {
        const double mu = g.mu_at(j - 1);
        const double scale = std::max(1e-300, std::abs(pa[k]) + std::abs(pb[k]) + mu * std::abs(gy[k]));
        const double identity = grad.at(j - 1)[k] + mu * res.at(j - 1)[k];
        worst_identity = std::max(worst_identity, std::abs(identity) / scale);
        worst_residual = std::max(worst_residual,
                                  mu * std::abs(res.at(j - 1)[k] - res_ref[j - 1][k]) / scale);
        // Central difference of the oracle action in q_j.
        Path plus = qp, minus = qp;
        const double step = 1e-6 * std::max(1.0, std::abs(qp[j][k]));
        plus[j][k] += step;
        minus[j][k] -= step;
        const double fd = (oracle::action(hl, t, plus) - oracle::action(hl, t, minus)) / (2 * step);
        worst_fd = std::max(worst_fd, std::abs(grad.at(j - 1)[k] - fd) /
                                          std::max(1.0, std::abs(grad.at(j - 1)[k])));
      }
    }
  }
  const bool pass = worst_identity <= 1e-12 && worst_fd <= 1e-5 && worst_action <= 1e-12 &&
                    worst_residual <= 1e-12;
  return {pass, "100 instances; g = -mu res " + sci(worst_identity) + " (1e-12), FD " +
                    sci(worst_fd) + " (1e-5), action vs oracle " + sci(worst_action) +
                    ", residual vs oracle " + sci(worst_residual)};
}

Outcome power2_extremal() {
  const TimeScaleGrid g = make_timescale(Power2Spec{0, 4});
  const Problem p(g, Lagrangian::parse("qs1^2 / t + t * qd1^2", 1), {1.0}, {13.0});
  const SolveResult r = solve_el(p);
  const Vec ref = oracle::shoot_linear(5, 1.0, 13.0,
                                       [](std::size_t, double a, double b) { return 3 * b - a; });
  double err = 0.0;
  for (std::size_t i = 0; i < 5; ++i) err = std::max(err, std::abs(r.trajectory[i] - ref[i]));
  const Path res = oracle::el_residual(oracle::power2_example(), points_of(g), path_of(r.trajectory));
  double res_max = 0.0;
  for (const Vec& x : res) res_max = std::max(res_max, std::abs(x[0]));
  const bool pass = err <= 1e-10 && r.iterations == 1 && res_max <= 1e-10;
  return {pass, "interior (" + oracle::num(r.trajectory[1]) + ", " + oracle::num(r.trajectory[2]) +
                    ", " + oracle::num(r.trajectory[3]) + "), oracle error " + sci(err) +
                    ", iterations " + std::to_string(r.iterations) + ", oracle EL residual " +
                    sci(res_max)};
}

Outcome power2_invariance() {
  const TimeScaleGrid g = make_timescale(Power2Spec{0, 10});
  const Problem p(g, Lagrangian::parse("qs1^2 / t + t * qd1^2", 1), {1.0}, {3.0});
  const SymmetryGenerator gen = SymmetryGenerator::parse(1, "t", {"0"}, "t * exp(eps)", {"q1"});
  const std::vector<double> eps{-0.5, -0.1, 0.1, 0.5};
  std::mt19937_64 rng(404);
  const std::vector<Trajectory> paths{solve_el(p).trajectory,
                                      trajectory_of(g, random_path(rng, g.size(), 1))};
  double worst = 0.0;
  for (const Trajectory& q : paths) {
    worst = std::max(worst, check_invariance_time_transform(p, q, gen, eps).max_discrepancy);
  }
  return {worst <= 1e-12, "max cell discrepancy " + sci(worst) + " (limit 1e-12)"};
}

Outcome fixed_time_conservation() {
  const std::vector<std::pair<std::string, TimeScaleGrid>> grids{
      {"Z", make_timescale(IntegersSpec{0, 10})},
      {"0.2Z", make_timescale(UniformSpec{0.0, 2.0, 0.2})},
      {"power2", make_timescale(Power2Spec{0, 6})}};
  double worst_free = 0.0, worst_rot = 0.0;
  for (const auto& [name, g] : grids) {
    const Problem free(g, Lagrangian::parse("qd1^2", 1), {1.0}, {5.0});
    const SymmetryGenerator trans = SymmetryGenerator::parse(1, "0", {"1"});
    worst_free = std::max(
        worst_free, noether_quantity_fixed_time(free, solve_el(free).trajectory, trans).max_abs);
    const Problem rot(g, Lagrangian::parse("qd1^2 + qd2^2", 2), {1.0, 0.0}, {0.0, 2.0});
    const SymmetryGenerator rotation = SymmetryGenerator::parse(2, "0", {"-q2", "q1"});
    worst_rot = std::max(
        worst_rot, noether_quantity_fixed_time(rot, solve_el(rot).trajectory, rotation).max_abs);
  }
  const bool pass = worst_free <= 1e-10 && worst_rot <= 1e-10;
  return {pass, "Z, 0.2Z, power2; momentum " + sci(worst_free) + ", rotation " + sci(worst_rot) +
                    " (limit 1e-10)"};
}

Outcome product_rule_ledger() {
  std::mt19937_64 rng(606);
  const char* xi1[] = {"1", "q1", "t * q1", "sin(q1)", "q1^2 + t"};
  double worst = 0.0;
  int symmetric = 0;
  for (int inst = 0; inst < 100; ++inst) {
    const bool positive = inst % 2 == 0;
    TimeScaleGrid g = random_grid(rng, 25, positive, inst % 5);
    if (inst % 5 == 2) g = make_timescale(Power2Spec{-5, -5 + static_cast<int>(inst % 6) + 2});
    const oracle::HandLagrangian hl = oracle::random_lagrangian(rng, positive);
    const std::size_t n = hl.dim;
    const Path ends = random_path(rng, 2, n);
    const Problem p(g, Lagrangian::parse(hl.text, n), ends[0], ends[1]);
    std::vector<std::string> xi;
    if (n == 1) {
      xi = {xi1[inst % 5]};
    } else {
      xi = inst % 2 ? std::vector<std::string>{"-q2", "q1"} : std::vector<std::string>{"q1", "t"};
    }
    if (xi[0] == "1") ++symmetric;
    const SymmetryGenerator gen = SymmetryGenerator::parse(n, "0", xi);
    std::optional<Trajectory> solved;
    try {
      solved = solve_el(p).trajectory;
    } catch (const SolverError& e) {
      throw SolverError("instance " + std::to_string(inst) + " (L = " + hl.text + ", " +
                            std::to_string(g.size()) + " points on [" + oracle::num(g.front()) +
                            ", " + oracle::num(g.back()) + "]): " + e.what(),
                        e.last_norm());
    }
    const Trajectory& q = *solved;
    const ConservationReport c = noether_quantity_fixed_time(p, q, gen);
    const GridFunction r = invariance_residual_pointwise(p, q, gen);
    for (std::size_t i = 0; i < c.residuals.size(); ++i) {
      const double a = c.residuals[i], b = r[i];
      worst = std::max(worst, std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}));
    }
  }
  return {worst <= 1e-10, "100 solved instances (" + std::to_string(symmetric) +
                              " with a true symmetry); max |dC/dt - r| " + sci(worst) +
                              " (limit 1e-10)"};
}

Outcome classical_limit() {
  const oracle::HandLagrangian hl = oracle::gravity();
  const SymmetryGenerator gen = SymmetryGenerator::parse(1, "1", {"0"});
  const std::vector<double> hs{1e-1, 1e-2, 1e-3};
  std::vector<double> res;
  double worst_rel = 0.0, worst_oracle = 0.0;
  for (double h : hs) {
    const TimeScaleGrid g = make_timescale(SampledSpec{0.0, 1.0, h});
    const Problem p(g, Lagrangian::parse(hl.text, 1), {0.0}, {0.0});
    const Trajectory q = solve_el(p).trajectory;
    const ConservationReport rep = noether_quantity(p, q, gen);
    res.push_back(rep.max_abs);
    worst_rel = std::max(worst_rel, std::abs(rep.max_abs - h / 2) / (h / 2));
    // Closed-form extremal: v_i = v_0 - i h with q_N = 0.
    const std::size_t steps = g.size() - 1;
    Path qref(g.size(), Vec(1));
    const double v0 = h * static_cast<double>(steps - 1) / 2.0;
    for (std::size_t i = 1; i < g.size(); ++i) {
      qref[i][0] = qref[i - 1][0] + h * (v0 - static_cast<double>(i - 1) * h);
    }
    const Vec t = points_of(g);
    const Vec dc = oracle::forward_difference(
        t, oracle::noether_values(hl, t, qref, [](double, const Vec&) { return 1.0; },
                                  [](double, const Vec&) { return Vec{0.0}; }));
    for (std::size_t i = 0; i < dc.size(); ++i) {
      worst_oracle = std::max(worst_oracle, std::abs(dc[i] - rep.residuals[i]));
    }
  }
  double worst_order = 0.0;
  std::string orders;
  for (std::size_t k = 1; k < hs.size(); ++k) {
    const double order = std::log(res[k - 1] / res[k]) / std::log(hs[k - 1] / hs[k]);
    worst_order = std::max(worst_order, std::abs(order - 1.0));
    orders += (k > 1 ? ", " : "") + oracle::num(order).substr(0, 8);
  }
  const bool pass = worst_rel <= 1e-6 && worst_order <= 0.2 && worst_oracle <= 1e-9;
  return {pass, "residuals " + sci(res[0]) + ", " + sci(res[1]) + ", " + sci(res[2]) +
                    "; max rel. deviation from h/2 " + sci(worst_rel) + " (1e-6); orders " +
                    orders + "; vs closed form " + sci(worst_oracle)};
}

Outcome formula_fidelity() {
  const TimeScaleGrid g = make_timescale(Power2Spec{0, 4});
  const Problem p(g, Lagrangian::parse("qs1^2 / t + t * qd1^2", 1), {1.0}, {13.0});
  const SymmetryGenerator gen = SymmetryGenerator::parse(1, "t", {"0"}, "t * exp(eps)", {"q1"});
  std::mt19937_64 rng(808);
  const std::vector<Trajectory> paths{solve_el(p).trajectory,
                                      trajectory_of(g, random_path(rng, g.size(), 1))};
  double worst_c = 0.0, worst_fwd = 0.0, worst_fd = 0.0;
  for (const Trajectory& q : paths) {
    const ConservationReport rep = noether_quantity(p, q, gen);
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
      const double t = g.point(i), mu = g.mu_at(i);
      const double y = q[i + 1], v = (q[i + 1] - q[i]) / mu;
      const double displayed = 2.0 * (y * y / t - t * v * v) * t;
      worst_c = std::max(worst_c, std::abs(rep.values[i] - displayed) /
                                      std::max(std::abs(displayed), 1e-300));
    }
    const ExtendedIdentityReport ext = extended_lagrangian_partials(p, q);
    worst_fwd = std::max({worst_fwd, ext.max_forward_error, ext.max_value_error});
    worst_fd = std::max(worst_fd, ext.max_fd_error);
  }
  const bool pass = worst_c <= 1e-12 && worst_fwd <= 1e-10 && worst_fd <= 1e-5;
  return {pass, "C vs displayed formula " + sci(worst_c) + " (1e-12); extended partials forward " +
                    sci(worst_fwd) + " (1e-10), finite differences " + sci(worst_fd) + " (1e-5)"};
}

Outcome discrete_residuals_reported() {
  double worst = 0.0;
  std::string profile;
  // Power2 example along the recurrence extremal.
  {
    const oracle::HandLagrangian hl = oracle::power2_example();
    const TimeScaleGrid g = make_timescale(Power2Spec{0, 4});
    const Problem p(g, Lagrangian::parse(hl.text, 1), {1.0}, {13.0});
    const Vec qs = oracle::shoot_linear(5, 1.0, 13.0,
                                        [](std::size_t, double a, double b) { return 3 * b - a; });
    Path qref;
    for (double x : qs) qref.push_back({x});
    const SymmetryGenerator gen = SymmetryGenerator::parse(1, "t", {"0"});
    const ConservationReport rep = noether_quantity(p, trajectory_of(g, qref), gen);
    const Vec t = points_of(g);
    const Vec c = oracle::noether_values(hl, t, qref, [](double s, const Vec&) { return s; },
                                         [](double, const Vec&) { return Vec{0.0}; });
    const Vec dc = oracle::forward_difference(t, c);
    for (std::size_t i = 0; i < c.size(); ++i) {
      worst = std::max(worst, std::abs(rep.values[i] - c[i]) / std::max(1.0, std::abs(c[i])));
    }
    for (std::size_t i = 0; i < dc.size(); ++i) {
      worst = std::max(worst, std::abs(rep.residuals[i] - dc[i]) / std::max(1.0, std::abs(dc[i])));
    }
    profile = "power2 C = (";
    for (std::size_t i = 0; i < rep.values.size(); ++i) {
      profile += (i ? ", " : "") + oracle::num(rep.values[i]);
    }
    profile += ")";
  }
  // Autonomous oscillators on Z under time translation.
  for (double w2 : {0.25, 0.5, 1.5}) {
    const oracle::HandLagrangian hl = oracle::oscillator(w2);
    const TimeScaleGrid g = make_timescale(IntegersSpec{0, 12});
    const double qa = 1.0, qb = 0.5;
    const Problem p(g, Lagrangian::parse(hl.text, 1), {qa}, {qb});
    const SymmetryGenerator gen = SymmetryGenerator::parse(1, "1", {"0"});
    const Trajectory q = solve_el(p).trajectory;
    // EL on Z: v_{i+1} - v_i = -w2 q_{i+1}, so q_{i+2} = (2 - w2) q_{i+1} - q_i.
    const Vec qs = oracle::shoot_linear(g.size(), qa, qb, [w2](std::size_t, double a, double b) {
      return (2.0 - w2) * b - a;
    });
    Path qref;
    for (double x : qs) qref.push_back({x});
    const Vec t = points_of(g);
    const Vec c = oracle::noether_values(hl, t, qref, [](double, const Vec&) { return 1.0; },
                                         [](double, const Vec&) { return Vec{0.0}; });
    const Vec dc = oracle::forward_difference(t, c);
    const ConservationReport rep = noether_quantity(p, q, gen);
    for (std::size_t i = 0; i < c.size(); ++i) {
      worst = std::max(worst, std::abs(rep.values[i] - c[i]) / std::max(1.0, std::abs(c[i])));
    }
    for (std::size_t i = 0; i < dc.size(); ++i) {
      worst = std::max(worst, std::abs(rep.residuals[i] - dc[i]) / std::max(1.0, std::abs(dc[i])));
    }
  }
  return {worst <= 1e-9, profile + "; library vs independent oracle " + sci(worst) +
                             " (limit 1e-9); nonzero residuals reported, not asserted zero"};
}

// ---------------------------------------------------------------------------

struct Run {
  int code = -1;
  std::string csv;
  std::string summary;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run tsvarlab(const std::string& args, const fs::path& work, const std::string& tag) {
  const fs::path out = work / (tag + ".csv");
  const fs::path summary = work / (tag + ".txt");
  fs::remove(out);
  const std::string cmd = std::string("\"") + TSVARLAB_BIN + "\" " + args + " --out \"" +
                          out.string() + "\" > \"" + summary.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  if (fs::exists(out)) r.csv = slurp(out);
  r.summary = slurp(summary);
  return r;
}

Outcome cli_contract() {
  const fs::path dir = SCENARIO_DIR;
  const fs::path work = fs::temp_directory_path() / ("tsvar_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(work);
  struct Case {
    std::string args;
    int expected;
    std::string must_contain;
  };
  const std::string fp = "\"" + (dir / "free_particle.tsvar").string() + "\"";
  const std::string gr = "\"" + (dir / "gravity.tsvar").string() + "\"";
  const std::string pe = "\"" + (dir / "power2_example.tsvar").string() + "\"";
  const std::vector<Case> cases{
      {"solve " + fp, 0, "4,4,\n"},
      {"check " + fp + " el", 0, ""},
      {"check " + fp + " invariance", 0, ""},
      {"check " + fp + " conservation", 0, ""},
      {"sweep " + fp, 0, "exact"},
      {"solve " + gr, 0, ""},
      {"check " + gr + " el", 0, ""},
      {"check " + gr + " invariance", 0, ""},
      {"check " + gr + " conservation --report-only", 0, ""},
      {"check " + gr + " conservation", 4, ""},
      {"sweep " + gr, 0, ""},
      {"solve " + pe, 0, "\n2,1,0.5\n4,2,0.75\n8,5,1\n16,13,\n"},
      {"check " + pe + " el", 0, ""},
      {"check " + pe + " invariance --eps 0.3", 0, ""},
      {"check " + pe + " conservation --report-only", 0, "210"},
      {"check " + pe + " conservation", 4, ""},
      {"sweep " + pe, 3, ""},
  };
  std::vector<std::string> problems;
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const Run a = tsvarlab(cases[k].args, work, "a" + std::to_string(k));
    const Run b = tsvarlab(cases[k].args, work, "b" + std::to_string(k));
    if (a.code != cases[k].expected || b.code != cases[k].expected) {
      problems.push_back("'" + cases[k].args + "' exit " + std::to_string(a.code));
    }
    if (a.csv != b.csv || a.summary != b.summary) problems.push_back("'" + cases[k].args + "' unstable");
    if (cases[k].expected == 0 && a.csv.empty()) problems.push_back("'" + cases[k].args + "' no CSV");
    if (!cases[k].must_contain.empty() && a.csv.find(cases[k].must_contain) == std::string::npos) {
      problems.push_back("'" + cases[k].args + "' unexpected CSV");
    }
  }
  // Gravity conservation report: h/2.
  const Run g = tsvarlab("check " + gr + " conservation --report-only", work, "g");
  const auto pos = g.summary.find("max_abs=");
  const double max_abs = pos == std::string::npos ? -1.0 : std::atof(g.summary.c_str() + pos + 8);
  if (std::abs(max_abs - 0.05) > 0.05 * 1e-6) problems.push_back("gravity max_abs " + sci(max_abs));
  fs::remove_all(work);
  std::string detail = std::to_string(cases.size()) + " invocations run twice each";
  for (const auto& s : problems) detail += "; " + s;
  return {problems.empty(), detail};
}

}  // namespace

int main() {
  run_criterion(1, "calculus identities", calculus_identities);
  run_criterion(2, "EL gradient identity and finite differences", el_equivalence);
  run_criterion(3, "power2 example extremal", power2_extremal);
  run_criterion(4, "power2 example time-transform invariance", power2_invariance);
  run_criterion(5, "fixed-time conservation on Z, hZ, power2", fixed_time_conservation);
  run_criterion(6, "product-rule ledger along extremals", product_rule_ledger);
  run_criterion(7, "gravity classical limit h/2 and order 1", classical_limit);
  run_criterion(8, "Noether quantity formula and extended partials", formula_fidelity);
  run_criterion(9, "discrete residuals match independent oracle", discrete_residuals_reported);
  run_criterion(10, "CLI contract on shipped scenarios", cli_contract);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
