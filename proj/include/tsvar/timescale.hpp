#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace tsvar {

/// What a run of grid points stands for: a genuinely discrete time scale, or
/// samples of a continuum with nominal step h.
enum class Intent { exact_discrete, sampled_continuum };

std::string to_string(Intent intent);

/// Points [first, last] (inclusive indices) share one intent tag.
struct Segment {
  std::size_t first = 0;
  std::size_t last = 0;
  Intent intent = Intent::exact_discrete;
  double h = 0.0;  // nominal step, 0 when not applicable
};

// Constructor descriptors.
struct IntegersSpec {
  long a = 0;
  long b = 0;
};
struct UniformSpec {
  double a = 0.0;
  double b = 0.0;
  double h = 1.0;
};
struct Power2Spec {
  int n0 = 0;
  int n1 = 0;
};
struct ExplicitSpec {
  std::vector<double> points;
};
struct SampledSpec {
  double a = 0.0;
  double b = 0.0;
  double h = 0.0;
};

using TimescaleSpec =
    std::variant<IntegersSpec, UniformSpec, Power2Spec, ExplicitSpec, SampledSpec>;

/// Point classification in the sense of jump operators on the literal grid.
struct Classification {
  bool right_scattered = false;
  bool right_dense = false;
  bool left_scattered = false;
  bool left_dense = false;
  bool isolated = false;
  bool dense = false;
  Intent intent = Intent::exact_discrete;
};

/// A finite time scale: strictly increasing points t_0 < ... < t_{N-1}, N >= 2.
///
/// The grid is an immutable handle; copies share storage. Lookups by time use
/// exact equality with the stored values, so callers pass stored points (or
/// work with indices directly through the *_at accessors).
class TimeScaleGrid {
 public:
  /// Throws InvalidInput when fewer than 2 points or not strictly increasing.
  explicit TimeScaleGrid(std::vector<double> points,
                         Intent intent = Intent::exact_discrete, double h = 0.0);
  TimeScaleGrid(std::vector<double> points, std::vector<Segment> segments);

  std::size_t size() const { return points_->size(); }
  std::span<const double> points() const { return *points_; }
  double point(std::size_t i) const { return (*points_)[i]; }
  double front() const { return points_->front(); }
  double back() const { return points_->back(); }
  const std::vector<Segment>& segments() const { return *segments_; }

  /// Index of a stored point; throws InvalidInput if t is not a grid point.
  std::size_t index_of(double t) const;
  bool contains(double t) const;

  double sigma(double t) const { return point(sigma_index(index_of(t))); }
  double rho(double t) const { return point(rho_index(index_of(t))); }
  double mu(double t) const { return mu_at(index_of(t)); }
  Classification classify(double t) const { return classify_at(index_of(t)); }

  std::size_t sigma_index(std::size_t i) const { return i + 1 < size() ? i + 1 : i; }
  std::size_t rho_index(std::size_t i) const { return i > 0 ? i - 1 : i; }
  /// Graininess: t_{i+1} - t_i, and 0 at the final point.
  double mu_at(std::size_t i) const {
    return i + 1 < size() ? point(i + 1) - point(i) : 0.0;
  }
  Classification classify_at(std::size_t i) const;
  Intent intent_at(std::size_t i) const;

  bool operator==(const TimeScaleGrid& other) const;

 private:
  std::shared_ptr<const std::vector<double>> points_;
  std::shared_ptr<const std::vector<Segment>> segments_;
};

TimeScaleGrid make_timescale(const TimescaleSpec& spec);

/// A leading window t_0..t_{count-1} of a grid. kappa() drops the final
/// point; applying it twice gives the domain of Euler-Lagrange residuals.
class GridWindow {
 public:
  GridWindow(TimeScaleGrid grid, std::size_t count);

  const TimeScaleGrid& grid() const { return grid_; }
  std::size_t size() const { return count_; }
  std::span<const double> points() const { return grid_.points().first(count_); }
  double point(std::size_t i) const { return grid_.point(i); }

 private:
  TimeScaleGrid grid_;
  std::size_t count_;
};

/// T^kappa: throws InvalidInput if the result would be empty.
GridWindow kappa(const TimeScaleGrid& grid);
GridWindow kappa(const GridWindow& window);

}  // namespace tsvar
