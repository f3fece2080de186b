#include "tsvar/calculus.hpp"

#include <cmath>

#include "tsvar/errors.hpp"

namespace tsvar {

GridFunction::GridFunction(TimeScaleGrid grid, std::size_t dim, std::vector<double> values)
    : grid_(std::move(grid)), dim_(dim), values_(std::move(values)) {
  if (dim_ == 0) throw InvalidInput("grid function dimension must be positive");
  if (values_.empty() || values_.size() % dim_ != 0) {
    throw InvalidInput("grid function needs a positive multiple of " +
                       std::to_string(dim_) + " values");
  }
  if (size() > grid_.size()) {
    throw InvalidInput("grid function has " + std::to_string(size()) +
                       " points but the grid has " + std::to_string(grid_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw InvalidInput("grid function value at point " + std::to_string(i / dim_) +
                         " is not finite");
    }
  }
}

GridFunction GridFunction::sample(const TimeScaleGrid& grid,
                                  const std::function<double(double)>& f) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = f(grid.point(i));
  return GridFunction(grid, 1, std::move(v));
}

GridFunction GridFunction::component(std::size_t k) const {
  if (k >= dim_) throw InvalidInput("component index out of range");
  std::vector<double> v(size());
  for (std::size_t i = 0; i < size(); ++i) v[i] = values_[i * dim_ + k];
  return GridFunction(grid_, 1, std::move(v));
}

namespace {

void require_two(const GridFunction& f, const char* op) {
  if (f.size() < 2) {
    throw InvalidInput(std::string(op) + " needs a function on at least 2 points");
  }
}

}  // namespace

GridFunction delta_derivative(const GridFunction& f) {
  require_two(f, "delta_derivative");
  const std::size_t n = f.dim();
  const std::size_t m = f.size() - 1;
  std::vector<double> out(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    const double mu = f.grid().mu_at(i);
    auto a = f.at(i);
    auto b = f.at(i + 1);
    for (std::size_t k = 0; k < n; ++k) out[i * n + k] = (b[k] - a[k]) / mu;
  }
  return GridFunction(f.grid(), n, std::move(out));
}

GridFunction compose_sigma(const GridFunction& f) {
  require_two(f, "compose_sigma");
  auto shifted = f.values().subspan(f.dim());
  return GridFunction(f.grid(), f.dim(), std::vector<double>(shifted.begin(), shifted.end()));
}

double delta_integral_indices(const GridFunction& f, std::size_t first, std::size_t last) {
  if (f.dim() != 1) throw InvalidInput("delta_integral expects a scalar function");
  if (first > last) throw InvalidInput("delta_integral requires r <= s");
  if (last > f.size()) {
    throw InvalidInput("delta_integral: function is not defined on the whole window");
  }
  double sum = 0.0;
  for (std::size_t i = first; i < last; ++i) sum += f.grid().mu_at(i) * f[i];
  return sum;
}

double delta_integral(const GridFunction& f, double r, double s) {
  if (r > s) throw InvalidInput("delta_integral requires r <= s");
  return delta_integral_indices(f, f.grid().index_of(r), f.grid().index_of(s));
}

GridFunction antiderivative(const GridFunction& f) {
  if (f.dim() != 1) throw InvalidInput("antiderivative expects a scalar function");
  const std::size_t m = std::min(f.size() + 1, f.grid().size());
  std::vector<double> out(m, 0.0);
  for (std::size_t i = 1; i < m; ++i) out[i] = out[i - 1] + f.grid().mu_at(i - 1) * f[i - 1];
  return GridFunction(f.grid(), 1, std::move(out));
}

GridFunction multiply(const GridFunction& f, const GridFunction& g) {
  if (f.dim() != 1 || g.dim() != 1) throw InvalidInput("multiply expects scalar functions");
  if (!(f.grid() == g.grid())) throw InvalidInput("multiply: functions live on different grids");
  const std::size_t m = std::min(f.size(), g.size());
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = f[i] * g[i];
  return GridFunction(f.grid(), 1, std::move(out));
}

PushforwardResult pushforward(const GridFunction& alpha, const GridFunction& f_of_alpha) {
  const TimeScaleGrid& grid = alpha.grid();
  if (alpha.dim() != 1 || f_of_alpha.dim() != 1) {
    throw InvalidInput("pushforward expects scalar alpha and f");
  }
  if (alpha.size() != grid.size() || f_of_alpha.size() != grid.size()) {
    throw InvalidInput("pushforward needs alpha and f on the full grid");
  }
  std::vector<double> image(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    image[i] = alpha[i];
    if (i > 0 && !(image[i] > image[i - 1])) {
      throw InvalidInput("pushforward: alpha is not strictly increasing at index " +
                         std::to_string(i));
    }
  }
  TimeScaleGrid image_grid(std::move(image), grid.segments());
  GridFunction transported(image_grid, 1,
                           std::vector<double>(f_of_alpha.values().begin(),
                                               f_of_alpha.values().end()));

  const GridFunction alpha_delta = delta_derivative(alpha);
  double lhs = 0.0;
  double rhs = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    lhs += grid.mu_at(i) * (f_of_alpha[i] * alpha_delta[i]);
    rhs += image_grid.mu_at(i) * transported[i];
  }
  return PushforwardResult{std::move(image_grid), std::move(transported), lhs, rhs};
}

PushforwardResult pushforward(const GridFunction& alpha,
                              const std::function<double(double)>& f) {
  std::vector<double> v(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) v[i] = f(alpha[i]);
  return pushforward(alpha, GridFunction(alpha.grid(), 1, std::move(v)));
}

}  // namespace tsvar
