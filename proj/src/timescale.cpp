#include "tsvar/timescale.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tsvar/errors.hpp"

namespace tsvar {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void validate_points(const std::vector<double>& points) {
  if (points.size() < 2) {
    throw InvalidInput("time scale needs at least 2 points, got " +
                       std::to_string(points.size()));
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i])) {
      throw InvalidInput("time scale point " + std::to_string(i) + " is not finite");
    }
    if (i > 0 && !(points[i] > points[i - 1])) {
      throw InvalidInput("time scale points must be strictly increasing: t[" +
                         std::to_string(i - 1) + "]=" + fmt(points[i - 1]) + ", t[" +
                         std::to_string(i) + "]=" + fmt(points[i]));
    }
  }
}

void require_positive_step(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw InvalidInput("step h must be positive, got " + fmt(h));
  }
}

TimeScaleGrid build(const IntegersSpec& s) {
  if (s.b < s.a) throw InvalidInput("integers(a,b) requires a <= b");
  std::vector<double> pts;
  for (long k = s.a; k <= s.b; ++k) pts.push_back(static_cast<double>(k));
  return TimeScaleGrid(std::move(pts), Intent::exact_discrete, 1.0);
}

TimeScaleGrid build(const UniformSpec& s) {
  require_positive_step(s.h);
  const double steps = (s.b - s.a) / s.h;
  const double k_max = std::round(steps);
  if (k_max < 1.0 || std::abs(steps - k_max) > 1e-9 * std::max(1.0, k_max)) {
    throw InvalidInput("uniform(a,b,h) requires (b-a)/h to be a positive integer, got " +
                       fmt(steps));
  }
  const auto count = static_cast<std::size_t>(k_max);
  std::vector<double> pts(count + 1);
  for (std::size_t k = 0; k < count; ++k) pts[k] = s.a + static_cast<double>(k) * s.h;
  pts[count] = s.b;
  return TimeScaleGrid(std::move(pts), Intent::exact_discrete, s.h);
}

TimeScaleGrid build(const Power2Spec& s) {
  if (s.n1 < s.n0) throw InvalidInput("power2(n0,n1) requires n0 <= n1");
  std::vector<double> pts;
  for (int n = s.n0; n <= s.n1; ++n) pts.push_back(std::ldexp(1.0, n));
  return TimeScaleGrid(std::move(pts));
}

TimeScaleGrid build(const ExplicitSpec& s) { return TimeScaleGrid(s.points); }

TimeScaleGrid build(const SampledSpec& s) {
  require_positive_step(s.h);
  if (!(s.b > s.a)) throw InvalidInput("sampled(a,b,h) requires a < b");
  // Last step is clipped so b is included; a remainder below 1e-9 h is
  // treated as roundoff rather than a sliver cell.
  const double steps = (s.b - s.a) / s.h;
  auto full = static_cast<std::size_t>(std::ceil(steps - 1e-9));
  full = std::max<std::size_t>(full, 1);
  std::vector<double> pts(full + 1);
  for (std::size_t k = 0; k < full; ++k) pts[k] = s.a + static_cast<double>(k) * s.h;
  pts[full] = s.b;
  return TimeScaleGrid(std::move(pts), Intent::sampled_continuum, s.h);
}

}  // namespace

std::string to_string(Intent intent) {
  return intent == Intent::exact_discrete ? "exact-discrete" : "sampled-continuum";
}

TimeScaleGrid::TimeScaleGrid(std::vector<double> points, Intent intent, double h) {
  validate_points(points);
  Segment seg{0, points.size() - 1, intent, h};
  points_ = std::make_shared<const std::vector<double>>(std::move(points));
  segments_ = std::make_shared<const std::vector<Segment>>(std::vector<Segment>{seg});
}

TimeScaleGrid::TimeScaleGrid(std::vector<double> points, std::vector<Segment> segments) {
  validate_points(points);
  std::size_t next = 0;
  for (const Segment& s : segments) {
    if (s.first != next || s.last < s.first || s.last >= points.size()) {
      throw InvalidInput("segments must tile the grid in order");
    }
    next = s.last + 1;
  }
  if (next != points.size()) throw InvalidInput("segments must cover every grid point");
  points_ = std::make_shared<const std::vector<double>>(std::move(points));
  segments_ = std::make_shared<const std::vector<Segment>>(std::move(segments));
}

std::size_t TimeScaleGrid::index_of(double t) const {
  const auto& pts = *points_;
  auto it = std::lower_bound(pts.begin(), pts.end(), t);
  if (it == pts.end() || *it != t) {
    throw InvalidInput("time " + fmt(t) + " is not a grid point");
  }
  return static_cast<std::size_t>(it - pts.begin());
}

bool TimeScaleGrid::contains(double t) const {
  return std::binary_search(points_->begin(), points_->end(), t);
}

Intent TimeScaleGrid::intent_at(std::size_t i) const {
  for (const Segment& s : *segments_) {
    if (i >= s.first && i <= s.last) return s.intent;
  }
  return Intent::exact_discrete;
}

Classification TimeScaleGrid::classify_at(std::size_t i) const {
  Classification c;
  c.right_scattered = sigma_index(i) != i;
  c.right_dense = !c.right_scattered;
  c.left_scattered = rho_index(i) != i;
  c.left_dense = !c.left_scattered;
  c.isolated = c.left_scattered && c.right_scattered;
  c.dense = c.left_dense && c.right_dense;
  c.intent = intent_at(i);
  return c;
}

bool TimeScaleGrid::operator==(const TimeScaleGrid& other) const {
  return points_ == other.points_ || *points_ == *other.points_;
}

TimeScaleGrid make_timescale(const TimescaleSpec& spec) {
  return std::visit([](const auto& s) { return build(s); }, spec);
}

GridWindow::GridWindow(TimeScaleGrid grid, std::size_t count)
    : grid_(std::move(grid)), count_(count) {
  if (count_ == 0 || count_ > grid_.size()) {
    throw InvalidInput("grid window must hold between 1 and " +
                       std::to_string(grid_.size()) + " points");
  }
}

GridWindow kappa(const TimeScaleGrid& grid) { return GridWindow(grid, grid.size() - 1); }

GridWindow kappa(const GridWindow& window) {
  if (window.size() <= 1) throw InvalidInput("kappa: result would be empty");
  return GridWindow(window.grid(), window.size() - 1);
}

}  // namespace tsvar
