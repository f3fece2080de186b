// Serial vs OpenMP timing of the cell kernels on a long sampled grid.
//
//   bench_kernels [--n POINTS] [--reps R]

#include <CLI11.hpp>
#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "tsvar/kernels.hpp"
#include "tsvar/lagrangian.hpp"
#include "tsvar/timescale.hpp"

namespace {

template <class F>
double best_seconds(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark of serial and parallel cell kernels", "bench_kernels"};
  long n = 200000;
  int reps = 3;
  app.add_option("--n", n, "Grid points")->check(CLI::Range(3L, 100000000L));
  app.add_option("--reps", reps, "Repetitions (best time is reported)")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  using namespace tsvar;
  const TimeScaleGrid grid = make_timescale(UniformSpec{1.0, 2.0, 1.0 / static_cast<double>(n - 1)});
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = std::sin(3.0 * grid.point(i)) + 2.0;
  const GridFunction q(grid, 1, values);
  const Lagrangian lag = Lagrangian::parse("qs1^2 / t + t * qd1^2", 1);

  std::printf("points=%zu threads=%d\n", grid.size(), omp_get_max_threads());
  std::printf("%-24s %12s %12s %9s %s\n", "kernel", "serial_s", "parallel_s", "speedup", "identical");

  int mismatches = 0;
  auto report = [&](const char* name, auto&& run) {
    decltype(run(Exec::serial)) a, b;
    const double ts = best_seconds(reps, [&] { a = run(Exec::serial); });
    const double tp = best_seconds(reps, [&] { b = run(Exec::parallel); });
    const bool same = a == b;
    if (!same) ++mismatches;
    std::printf("%-24s %12.6f %12.6f %9.2f %s\n", name, ts, tp, ts / tp, same ? "yes" : "NO");
  };

  report("cell_values", [&](Exec e) { return cell_values(lag, q, e); });
  report("evaluate_cells", [&](Exec e) {
    const CellTable c = evaluate_cells(lag, q, e);
    std::vector<double> all = c.value;
    all.insert(all.end(), c.d_t.begin(), c.d_t.end());
    all.insert(all.end(), c.d_y.begin(), c.d_y.end());
    all.insert(all.end(), c.d_v.begin(), c.d_v.end());
    return all;
  });
  report("cell_derivatives+hess", [&](Exec e) {
    const CellDerivatives d = cell_derivatives(lag, q, true, e);
    std::vector<double> all = d.grad;
    all.insert(all.end(), d.hess.begin(), d.hess.end());
    return all;
  });
  return mismatches == 0 ? 0 : 1;
}
