#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tsvar/noether.hpp"
#include "tsvar/timescale.hpp"
#include "tsvar/variational.hpp"

namespace tsvar {

struct SymmetrySection {
  std::string tau = "0";
  std::vector<std::string> xi;
  std::optional<std::string> tbar;
  std::vector<std::string> qbar;
};

struct SolverSection {
  double tol = 1e-12;
  int max_iter = 100;
};

/// Sections-and-key=value problem description:
///
///   [timescale]  kind = integers|uniform|power2|explicit|sampled, plus
///                a, b (integers) | a, b, h (uniform, sampled) | n0, n1
///                (power2) | points = [...] (explicit)
///   [problem]    dim, lagrangian = "...", qa = [...], qb = [...]
///   [symmetry]   tau = "...", xi = ["...", ...], optional tbar, qbar
///   [solver]     optional tol, max_iter
///   [sweep]      optional h = [...]
///
/// '#' starts a comment. Errors are InvalidInput with a field path such as
/// "problem.qa (line 7): ...".
struct ProblemFile {
  std::string timescale_kind;
  TimescaleSpec timescale;
  std::size_t dim = 1;
  std::string lagrangian;
  std::vector<double> qa;
  std::vector<double> qb;
  std::optional<SymmetrySection> symmetry;
  SolverSection solver;
  std::vector<double> sweep_h;
};

ProblemFile parse_problem_file(std::string_view text);
ProblemFile load_problem_file(const std::string& path);

Problem build_problem(const ProblemFile& file);
Problem build_problem(const ProblemFile& file, const TimescaleSpec& timescale);
/// Throws InvalidInput when the file has no [symmetry] section.
SymmetryGenerator build_symmetry(const ProblemFile& file);

/// Same uniform/sampled descriptor with step h; InvalidInput for other kinds.
TimescaleSpec with_step(const TimescaleSpec& spec, double h);

}  // namespace tsvar
