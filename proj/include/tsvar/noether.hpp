#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsvar/calculus.hpp"
#include "tsvar/expr.hpp"
#include "tsvar/kernels.hpp"
#include "tsvar/variational.hpp"

namespace tsvar {

/// Exact finite transformation family tbar = T_eps(t, q), qbar = Q_eps(t, q).
struct TransformationFamily {
  Expression tbar;
  std::vector<Expression> qbar;
};

/// Infinitesimal generator (tau, xi) of a one-parameter family of
/// transformations. Without an exact family the first-order family
/// tbar = t + eps tau, qbar = q + eps xi stands in (its o(eps) terms are zero).
class SymmetryGenerator {
 public:
  SymmetryGenerator(std::size_t dim, Expression tau, std::vector<Expression> xi,
                    std::optional<TransformationFamily> family = std::nullopt);

  /// tau and xi may use t, q1..qn; tbar and qbar may also use eps.
  static SymmetryGenerator parse(std::size_t dim, std::string_view tau,
                                 const std::vector<std::string>& xi,
                                 const std::optional<std::string>& tbar = std::nullopt,
                                 const std::vector<std::string>& qbar = {});

  std::size_t dim() const { return xi_.size(); }
  bool has_family() const { return family_.has_value(); }
  /// True when tau is a constant expression with value 0.
  bool tau_is_zero() const;

  double tau(double t, std::span<const double> q) const;
  std::vector<double> xi(double t, std::span<const double> q) const;
  double tbar(double t, std::span<const double> q, double eps) const;
  std::vector<double> qbar(double t, std::span<const double> q, double eps) const;

 private:
  std::vector<double> slots(double t, std::span<const double> q, double eps) const;

  Expression tau_;
  std::vector<Expression> xi_;
  std::optional<TransformationFamily> family_;
};

/// Consistency of an exact family with its generator on sample points.
struct FamilyCheck {
  double identity_error = 0.0;    // max |T_0 - t|, |Q_0 - q| (relative to max(1, |.|))
  double generator_error = 0.0;   // max |d/deps T at 0 - tau|, same for Q and xi
  bool ok = false;                // identity_error <= 1e-12 && generator_error <= 1e-6
};

struct FamilySample {
  double t = 0.0;
  std::vector<double> q;
};

FamilyCheck check_family(const SymmetryGenerator& gen, std::span<const FamilySample> samples);

/// r(t) = partial_2 L . xi^sigma + partial_3 L . xi^Delta on T^kappa, where
/// xi^sigma and xi^Delta are grid operations on t -> xi(t, q(t)).
GridFunction invariance_residual_pointwise(const Problem& p, const Trajectory& q,
                                           const SymmetryGenerator& gen,
                                           Exec exec = Exec::parallel);

/// Cell-by-cell comparison of the action before and after a transformation.
struct InvarianceReport {
  std::vector<double> times;                     // left endpoint of each cell
  std::vector<double> eps;
  std::vector<std::vector<double>> discrepancy;  // [eps][cell], |cbar - c| / max(1, |c|)
  double max_discrepancy = 0.0;
  double action = 0.0;             // I[q]
  double action_derivative = 0.0;  // central difference of I[qbar] in eps at 0, step 1e-5
  bool derivative_vanishes = false;  // |derivative| <= 1e-7 (1 + |I|)
};

/// Same time scale, qbar = Q_eps(t, q) (or q + eps xi).
InvarianceReport check_invariance_fixed_time(const Problem& p, const Trajectory& q,
                                             const SymmetryGenerator& gen,
                                             std::span<const double> eps_list,
                                             Exec exec = Exec::parallel);

/// Time changes too: the image grid {T_eps(t_i, q(t_i))} carries
/// qbar(tbar_i) = Q_eps(t_i, q(t_i)). Throws NonMonotoneMap when the image
/// points are not strictly increasing.
InvarianceReport check_invariance_time_transform(const Problem& p, const Trajectory& q,
                                                 const SymmetryGenerator& gen,
                                                 std::span<const double> eps_list,
                                                 Exec exec = Exec::parallel);

/// Sampled conserved-quantity candidate C on T^kappa and its delta
/// derivative on T^kappa^2, obtained by forward differencing the samples.
struct ConservationReport {
  TimeScaleGrid grid;
  std::vector<double> values;     // C(t_i), i = 0..N-2
  std::vector<double> residuals;  // (C(t_{i+1}) - C(t_i)) / mu(t_i), i = 0..N-3
  double max_abs = 0.0;

  std::span<const double> times() const { return grid.points().first(values.size()); }
};

struct ConservationSummary {
  std::vector<double> residuals;
  double max_abs = 0.0;
};

/// Forward differences of C samples; needs at least 2 values.
ConservationSummary conservation_residual(const GridFunction& c);
ConservationSummary conservation_residual(const ConservationReport& report);

/// C = partial_3 L . xi.
ConservationReport noether_quantity_fixed_time(const Problem& p, const Trajectory& q,
                                               const SymmetryGenerator& gen,
                                               Exec exec = Exec::parallel);

struct NoetherOptions {
  /// Evaluate the mu(t) factor as 0, the continuum-limit form of the quantity.
  bool continuum_mu = false;
};

/// C = partial_3 L . xi + [L - partial_3 L . q^Delta - partial_1 L mu(t)] tau,
/// L-arguments at (t, q^sigma, q^Delta), tau and xi at (t, q).
ConservationReport noether_quantity(const Problem& p, const Trajectory& q,
                                    const SymmetryGenerator& gen, NoetherOptions options = {},
                                    Exec exec = Exec::parallel);

/// Ltilde(t; s, q; r, v) = L(s - mu(t) r, q, v / r) r, the Lagrangian of the
/// time-reparameterized problem with state (s, q).
class ExtendedLagrangian {
 public:
  explicit ExtendedLagrangian(Lagrangian lagrangian) : lagrangian_(std::move(lagrangian)) {}

  struct Partials {
    double value = 0.0;
    double d_s = 0.0;
    std::vector<double> d_q;
    double d_r = 0.0;
    std::vector<double> d_v;
  };

  /// Throws DomainError when r == 0.
  template <class T>
  T evaluate(double mu, const T& s, std::span<const T> q, const T& r,
             std::span<const T> v) const {
    if (primal(r) == 0.0) throw DomainError("extended Lagrangian requires r != 0");
    std::vector<T> w(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) w[k] = v[k] / r;
    return lagrangian_.evaluate<T>(s - T(mu) * r, q, std::span<const T>(w)) * r;
  }

  double value(double mu, double s, std::span<const double> q, double r,
               std::span<const double> v) const {
    return evaluate<double>(mu, s, q, r, v);
  }

  Partials partials(double mu, double s, std::span<const double> q, double r,
                    std::span<const double> v) const;

 private:
  Lagrangian lagrangian_;
};

/// Along s(t) = t: compares Ltilde and its r- and v-partials at
/// (t; sigma(t), q^sigma; 1, q^Delta) with L, L - partial_3 L . q^Delta -
/// partial_1 L mu, and partial_3 L. Errors are |a - b| / max(1, |b|).
struct ExtendedIdentityReport {
  std::vector<double> times;       // T^kappa
  std::vector<double> value_error;
  std::vector<double> d_r_error;   // forward mode vs formula
  std::vector<double> d_v_error;   // max over components
  std::vector<double> d_r_fd_error;  // central differences (step 1e-6) vs forward mode
  std::vector<double> d_v_fd_error;
  double max_value_error = 0.0;
  double max_forward_error = 0.0;
  double max_fd_error = 0.0;
};

ExtendedIdentityReport extended_lagrangian_partials(const Problem& p, const Trajectory& q);

}  // namespace tsvar
