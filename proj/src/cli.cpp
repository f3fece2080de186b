#include "tsvar/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "tsvar/csv.hpp"
#include "tsvar/errors.hpp"
#include "tsvar/noether.hpp"
#include "tsvar/problem_file.hpp"
#include "tsvar/variational.hpp"

namespace tsvar::cli {

namespace {

struct Options {
  std::string file;
  std::string which;
  std::string out_path;
  std::string guess_path;
  std::string trajectory_path;
  std::string eps_text = "-0.5,-0.1,0.1,0.5";
  std::string h_text;
  double tol = 1e-8;
  bool report_only = false;
  bool quiet = false;
};

// Where CSV and summary lines go for one invocation.
class Output {
 public:
  Output(const Options& opt, std::ostream& out, std::ostream& err)
      : opt_(opt), out_(out), err_(err) {}

  void summary(const std::string& key, const std::string& value) {
    if (opt_.quiet) return;
    (opt_.out_path.empty() ? err_ : out_) << key << '=' << value << '\n';
  }

  void csv(const CsvTable& table) {
    if (opt_.out_path.empty()) {
      out_ << table.str();
    } else {
      write_file_atomic(opt_.out_path, table.str());
    }
  }

 private:
  const Options& opt_;
  std::ostream& out_;
  std::ostream& err_;
};

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double x = std::strtod(item.c_str(), &end);
    if (item.empty() || end != item.c_str() + item.size() || !std::isfinite(x)) {
      throw InvalidInput(what + ": cannot parse '" + item + "' as a number");
    }
    out.push_back(x);
  }
  if (out.empty()) throw InvalidInput(what + ": empty list");
  return out;
}

// Short form of an eps value for column names.
std::string eps_label(double e) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", e);
  return buf;
}

// Reads the t, q_1..q_n columns written by `solve`.
Trajectory read_trajectory(const std::string& path, const Problem& p) {
  const CsvData data = read_csv_file(path);
  const std::size_t n = p.dim();
  if (data.header.size() < n + 1 || data.header[0] != "t") {
    throw InvalidInput(path + ": expected columns t, q_1..q_" + std::to_string(n));
  }
  if (data.rows.size() != p.grid.size()) {
    throw InvalidInput(path + ": expected " + std::to_string(p.grid.size()) + " rows, got " +
                       std::to_string(data.rows.size()));
  }
  std::vector<double> values(p.grid.size() * n);
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    const auto& row = data.rows[i];
    if (row.size() < n + 1) throw InvalidInput(path + ": short row " + std::to_string(i + 2));
    const double t = std::strtod(row[0].c_str(), nullptr);
    if (t != p.grid.point(i)) {
      throw InvalidInput(path + ": row " + std::to_string(i + 2) + " time " + row[0] +
                         " is not grid point " + format_number(p.grid.point(i)));
    }
    for (std::size_t k = 0; k < n; ++k) {
      char* end = nullptr;
      values[i * n + k] = std::strtod(row[k + 1].c_str(), &end);
      if (row[k + 1].empty() || *end != '\0') {
        throw InvalidInput(path + ": bad value in row " + std::to_string(i + 2));
      }
    }
  }
  return Trajectory(p.grid, n, std::move(values));
}

SolverOptions solver_options(const ProblemFile& f) {
  SolverOptions o;
  o.tol = f.solver.tol;
  o.max_iter = f.solver.max_iter;
  return o;
}

// Trajectory under test: --trajectory if given, otherwise the solved extremal.
Trajectory trajectory_for_check(const Options& opt, const ProblemFile& f, const Problem& p) {
  if (!opt.trajectory_path.empty()) return read_trajectory(opt.trajectory_path, p);
  return solve_el(p, std::nullopt, solver_options(f)).trajectory;
}

int cmd_solve(const Options& opt, Output& io) {
  const ProblemFile f = load_problem_file(opt.file);
  const Problem p = build_problem(f);
  std::optional<Trajectory> guess;
  if (!opt.guess_path.empty()) guess = read_trajectory(opt.guess_path, p);
  const SolveResult res = solve_el(p, guess, solver_options(f));

  const std::size_t n = p.dim();
  std::vector<std::string> header{"t"};
  for (std::size_t k = 1; k <= n; ++k) header.push_back("q_" + std::to_string(k));
  for (std::size_t k = 1; k <= n; ++k) header.push_back("qd_" + std::to_string(k));
  CsvTable table(header);
  const GridFunction qd = delta_derivative(res.trajectory);
  for (std::size_t i = 0; i < p.grid.size(); ++i) {
    std::vector<std::string> row{format_number(p.grid.point(i))};
    for (std::size_t k = 0; k < n; ++k) row.push_back(format_number(res.trajectory.at(i)[k]));
    for (std::size_t k = 0; k < n; ++k) {
      row.push_back(i < qd.size() ? format_number(qd.at(i)[k]) : "");
    }
    table.add_row(std::move(row));
  }
  io.csv(table);
  io.summary("action", format_number(res.action));
  io.summary("gradient_norm", format_number(res.gradient_norm));
  io.summary("iterations", std::to_string(res.iterations));
  return kOk;
}

int finish_check(const Options& opt, Output& io, double max_abs, bool report_only) {
  io.summary("max_abs", format_number(max_abs));
  if (report_only) return kOk;
  return max_abs <= opt.tol ? kOk : kToleranceExceeded;
}

int check_el(const Options& opt, Output& io, const ProblemFile& f, const Problem& p) {
  const Trajectory q = trajectory_for_check(opt, f, p);
  const GridFunction r = el_residual(p, q);
  std::vector<std::string> header{"t"};
  for (std::size_t k = 1; k <= p.dim(); ++k) header.push_back("residual_" + std::to_string(k));
  CsvTable table(header);
  double max_abs = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    std::vector<std::string> row{format_number(r.time(i))};
    for (double x : r.at(i)) {
      row.push_back(format_number(x));
      max_abs = std::max(max_abs, std::abs(x));
    }
    table.add_row(std::move(row));
  }
  io.csv(table);
  return finish_check(opt, io, max_abs, opt.report_only);
}

int check_invariance(const Options& opt, Output& io, const ProblemFile& f, const Problem& p) {
  const SymmetryGenerator gen = build_symmetry(f);
  const std::vector<double> eps = parse_list(opt.eps_text, "--eps");
  const Trajectory q = trajectory_for_check(opt, f, p);
  const bool transform_time = gen.has_family() || !gen.tau_is_zero();
  const InvarianceReport rep = transform_time ? check_invariance_time_transform(p, q, gen, eps)
                                              : check_invariance_fixed_time(p, q, gen, eps);
  const GridFunction pointwise = invariance_residual_pointwise(p, q, gen);

  std::vector<std::string> header{"t"};
  for (double e : eps) header.push_back("discrepancy_eps_" + eps_label(e));
  header.push_back("pointwise_residual");
  CsvTable table(header);
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    std::vector<std::string> row{format_number(rep.times[i])};
    for (const auto& d : rep.discrepancy) row.push_back(format_number(d[i]));
    row.push_back(i < pointwise.size() ? format_number(pointwise[i]) : "");
    table.add_row(std::move(row));
  }
  io.csv(table);
  io.summary("definition", transform_time ? "time-transform" : "fixed-time");
  io.summary("d_action_deps", format_number(rep.action_derivative));
  return finish_check(opt, io, rep.max_discrepancy, opt.report_only);
}

int check_conservation(const Options& opt, Output& io, const ProblemFile& f, const Problem& p) {
  const SymmetryGenerator gen = build_symmetry(f);
  const Trajectory q = trajectory_for_check(opt, f, p);
  const ConservationReport rep = noether_quantity(p, q, gen);
  CsvTable table({"t", "C", "dC_dt"});
  for (std::size_t i = 0; i < rep.values.size(); ++i) {
    table.add_row({format_number(rep.grid.point(i)), format_number(rep.values[i]),
                   i < rep.residuals.size() ? format_number(rep.residuals[i]) : ""});
  }
  io.csv(table);
  return finish_check(opt, io, rep.max_abs, opt.report_only);
}

int cmd_check(const Options& opt, Output& io) {
  const ProblemFile f = load_problem_file(opt.file);
  const Problem p = build_problem(f);
  if (opt.which == "el") return check_el(opt, io, f, p);
  if (opt.which == "invariance") return check_invariance(opt, io, f, p);
  if (opt.which == "conservation") return check_conservation(opt, io, f, p);
  throw InvalidInput("check: unknown kind '" + opt.which +
                     "' (expected el, invariance or conservation)");
}

struct SweepRow {
  double h = 0.0;
  std::size_t points = 0;
  double action = 0.0;
  double max_residual = 0.0;
};

int cmd_sweep(const Options& opt, Output& io) {
  const ProblemFile f = load_problem_file(opt.file);
  if (f.timescale_kind != "uniform" && f.timescale_kind != "sampled") {
    throw InvalidInput("timescale.kind: sweep needs a uniform or sampled time scale, got '" +
                       f.timescale_kind + "'");
  }
  const std::vector<double> hs = opt.h_text.empty() ? f.sweep_h : parse_list(opt.h_text, "--steps");
  if (hs.empty()) throw InvalidInput("sweep: no step list (use --steps or [sweep] h = [...])");
  for (std::size_t k = 0; k < hs.size(); ++k) {
    if (!(hs[k] > 0.0) || (k > 0 && !(hs[k] < hs[k - 1]))) {
      throw InvalidInput("sweep: step list must be positive and strictly decreasing");
    }
  }
  const SymmetryGenerator gen = build_symmetry(f);

  std::vector<SweepRow> rows(hs.size());
  SolverOptions so = solver_options(f);
  so.exec = Exec::serial;
  for_each_index(hs.size(), Exec::parallel, [&](std::size_t k) {
    const Problem p = build_problem(f, with_step(f.timescale, hs[k]));
    const SolveResult res = solve_el(p, std::nullopt, so);
    const ConservationReport rep = noether_quantity(p, res.trajectory, gen, {}, Exec::serial);
    rows[k] = SweepRow{hs[k], p.grid.size(), res.action, rep.max_abs};
  });

  CsvTable table({"h", "points", "action", "max_residual", "order"});
  std::string last_order;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    std::string order;
    if (k > 0) {
      const double r0 = rows[k - 1].max_residual;
      const double r1 = rows[k].max_residual;
      if (r0 <= 1e-12 && r1 <= 1e-12) {
        order = "exact";
      } else if (r0 > 0.0 && r1 > 0.0) {
        order = format_number(std::log(r0 / r1) / std::log(rows[k - 1].h / rows[k].h));
      }
      last_order = order;
    }
    table.add_row({format_number(rows[k].h), std::to_string(rows[k].points),
                   format_number(rows[k].action), format_number(rows[k].max_residual), order});
  }
  io.csv(table);
  if (!last_order.empty()) io.summary("order", last_order);
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Calculus of variations and Noether conservation laws on time scales",
               "tsvarlab"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("file", opt.file, "Problem file")->required();
    sub->add_option("--out", opt.out_path, "Write CSV here (atomically) instead of stdout");
    sub->add_flag("--quiet", opt.quiet, "Suppress summary lines");
  };

  CLI::App* solve = app.add_subcommand("solve", "Solve the Euler-Lagrange boundary-value problem");
  add_common(solve);
  solve->add_option("--guess", opt.guess_path, "Initial guess: CSV written by solve");

  CLI::App* check = app.add_subcommand("check", "Check el | invariance | conservation");
  add_common(check);
  check->add_option("which", opt.which, "el, invariance or conservation")
      ->required()
      ->check(CLI::IsMember({"el", "invariance", "conservation"}));
  check->add_option("--tol", opt.tol, "Pass threshold on max_abs (default 1e-8)");
  check->add_option("--eps", opt.eps_text, "Comma-separated eps values, e.g. --eps=-0.5,0.5");
  check->add_flag("--report-only", opt.report_only, "Measure only; always exit 0");
  check->add_option("--trajectory", opt.trajectory_path,
                    "Check this trajectory (CSV written by solve) instead of the solved extremal");

  CLI::App* sweep = app.add_subcommand("sweep", "Grid-refinement study of the conserved quantity");
  add_common(sweep);
  sweep->add_option("--steps", opt.h_text, "Comma-separated decreasing steps (overrides [sweep] h)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }

  Output io(opt, out, err);
  try {
    if (solve->parsed()) return cmd_solve(opt, io);
    if (check->parsed()) return cmd_check(opt, io);
    return cmd_sweep(opt, io);
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << " (last residual norm "
        << format_number(e.last_norm()) << ")\n";
    return kSolverFailure;
  } catch (const NonMonotoneMap& e) {
    err << "invalid input: " << e.what() << " (eps=" << format_number(e.eps()) << ")\n";
    return kInvalidInput;
  } catch (const Error& e) {
    err << "invalid input: " << e.what() << '\n';
    return kInvalidInput;
  }
}

}  // namespace tsvar::cli
