#include "tsvar/lagrangian.hpp"

namespace tsvar {

Lagrangian::Lagrangian(Expression expr) : expr_(std::move(expr)) {
  for (const auto& name : expr_.free_variables()) {
    if (name == "eps" || (name[0] == 'q' && name[1] != 's' && name[1] != 'd')) {
      throw InvalidInput("a Lagrangian may only use t, qs1..qsn and qd1..qdn, found '" +
                         name + "'");
    }
  }
}

Lagrangian Lagrangian::parse(std::string_view text, std::size_t dim) {
  return Lagrangian(Expression::parse(text, dim, VariableSet::lagrangian()));
}

LagrangianPartials Lagrangian::partials(double t, std::span<const double> y,
                                        std::span<const double> v) const {
  using D = Dual<double>;
  const std::size_t n = dim();
  LagrangianPartials out;
  out.d_y.resize(n);
  out.d_v.resize(n);

  std::vector<D> yd(n), vd(n);
  for (std::size_t k = 0; k < n; ++k) {
    yd[k] = D(y[k], 0.0);
    vd[k] = D(v[k], 0.0);
  }
  const D td = evaluate<D>(D(t, 1.0), yd, vd);
  out.value = td.v;
  out.d_t = td.d;
  for (std::size_t k = 0; k < n; ++k) {
    yd[k].d = 1.0;
    out.d_y[k] = evaluate<D>(D(t, 0.0), yd, vd).d;
    yd[k].d = 0.0;
    vd[k].d = 1.0;
    out.d_v[k] = evaluate<D>(D(t, 0.0), yd, vd).d;
    vd[k].d = 0.0;
  }
  return out;
}

}  // namespace tsvar
