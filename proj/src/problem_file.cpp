#include "tsvar/problem_file.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "tsvar/errors.hpp"

namespace tsvar {

namespace {

// One right-hand side, kept as text until a typed getter asks for it.
struct RawValue {
  enum class Kind { scalar, string, list } kind = Kind::scalar;
  std::string text;               // scalar or string contents
  std::vector<RawValue> items;    // list elements
  std::size_t line = 0;
};

using Section = std::map<std::string, RawValue>;

std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

[[noreturn]] void fail(const std::string& path, std::size_t line, const std::string& msg) {
  std::string where = path;
  if (line > 0) where += " (line " + std::to_string(line) + ")";
  throw InvalidInput(where + ": " + msg);
}

// Strips a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

RawValue parse_item(const std::string& text, const std::string& path, std::size_t line) {
  RawValue v;
  v.line = line;
  const std::string s = trim(text);
  if (s.empty()) fail(path, line, "empty value");
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"') fail(path, line, "unterminated string");
    v.kind = RawValue::Kind::string;
    v.text = s.substr(1, s.size() - 2);
    return v;
  }
  v.kind = RawValue::Kind::scalar;
  v.text = s;
  return v;
}

RawValue parse_value(const std::string& text, const std::string& path, std::size_t line) {
  const std::string s = trim(text);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') fail(path, line, "unterminated list");
    RawValue v;
    v.kind = RawValue::Kind::list;
    v.line = line;
    const std::string inner = trim(std::string_view(s).substr(1, s.size() - 2));
    if (inner.empty()) return v;
    std::string item;
    bool quoted = false;
    for (char c : inner) {
      if (c == '"') quoted = !quoted;
      if (c == ',' && !quoted) {
        v.items.push_back(parse_item(item, path, line));
        item.clear();
      } else {
        item += c;
      }
    }
    if (quoted) fail(path, line, "unterminated string");
    v.items.push_back(parse_item(item, path, line));
    return v;
  }
  return parse_item(s, path, line);
}

double to_number(const RawValue& v, const std::string& path) {
  if (v.kind != RawValue::Kind::scalar) fail(path, v.line, "expected a number");
  char* end = nullptr;
  const double x = std::strtod(v.text.c_str(), &end);
  if (end != v.text.c_str() + v.text.size() || v.text.empty() || !std::isfinite(x)) {
    fail(path, v.line, "expected a number, got '" + v.text + "'");
  }
  return x;
}

long to_integer(const RawValue& v, const std::string& path) {
  const double x = to_number(v, path);
  if (x != std::floor(x) || std::abs(x) > 1e15) fail(path, v.line, "expected an integer");
  return static_cast<long>(x);
}

class Reader {
 public:
  explicit Reader(std::map<std::string, Section> sections) : sections_(std::move(sections)) {}

  bool has_section(const std::string& s) const { return sections_.count(s) != 0; }

  const RawValue* find(const std::string& section, const std::string& key) {
    used_.insert(section + "." + key);
    auto it = sections_.find(section);
    if (it == sections_.end()) return nullptr;
    auto jt = it->second.find(key);
    return jt == it->second.end() ? nullptr : &jt->second;
  }

  const RawValue& require(const std::string& section, const std::string& key) {
    const RawValue* v = find(section, key);
    if (!v) fail(section + "." + key, 0, "missing required field");
    return *v;
  }

  double number(const std::string& section, const std::string& key) {
    return to_number(require(section, key), section + "." + key);
  }

  long integer(const std::string& section, const std::string& key) {
    return to_integer(require(section, key), section + "." + key);
  }

  std::string string(const std::string& section, const std::string& key) {
    const RawValue& v = require(section, key);
    if (v.kind != RawValue::Kind::string) fail(section + "." + key, v.line, "expected a quoted string");
    return v.text;
  }

  std::string word(const std::string& section, const std::string& key) {
    const RawValue& v = require(section, key);
    if (v.kind == RawValue::Kind::list) fail(section + "." + key, v.line, "expected a word");
    return v.text;
  }

  std::vector<double> numbers(const std::string& section, const std::string& key) {
    const std::string path = section + "." + key;
    const RawValue& v = require(section, key);
    if (v.kind != RawValue::Kind::list) fail(path, v.line, "expected a bracketed list");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.items.size(); ++i) {
      out.push_back(to_number(v.items[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
  }

  std::vector<std::string> strings(const std::string& section, const std::string& key) {
    const std::string path = section + "." + key;
    const RawValue& v = require(section, key);
    if (v.kind != RawValue::Kind::list) fail(path, v.line, "expected a bracketed list");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.items.size(); ++i) {
      if (v.items[i].kind != RawValue::Kind::string) {
        fail(path + "[" + std::to_string(i) + "]", v.line, "expected a quoted string");
      }
      out.push_back(v.items[i].text);
    }
    return out;
  }

  // Every key present must have been consumed.
  void reject_unknown() const {
    for (const auto& [name, section] : sections_) {
      for (const auto& [key, value] : section) {
        if (!used_.count(name + "." + key)) fail(name + "." + key, value.line, "unknown field");
      }
    }
  }

 private:
  std::map<std::string, Section> sections_;
  std::set<std::string> used_;
};

const std::set<std::string> kSections = {"timescale", "problem", "symmetry", "solver", "sweep"};

void check_expression(const std::string& text, std::size_t dim, VariableSet allowed,
                      const std::string& path, std::size_t line) {
  try {
    (void)Expression::parse(text, dim, allowed);
  } catch (const InvalidInput& e) {
    fail(path, line, e.what());
  }
}

}  // namespace

ProblemFile parse_problem_file(std::string_view text) {
  std::map<std::string, Section> sections;
  std::string current;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("file", line_no, "malformed section header");
      current = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!kSections.count(current)) fail(current, line_no, "unknown section");
      if (sections.count(current)) fail(current, line_no, "duplicate section");
      sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(current.empty() ? "file" : current, line_no, "expected key = value");
    if (current.empty()) fail("file", line_no, "field outside of any section");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string path = current + "." + key;
    if (sections[current].count(key)) fail(path, line_no, "duplicate field");
    sections[current][key] = parse_value(line.substr(eq + 1), path, line_no);
  }

  Reader r(std::move(sections));
  ProblemFile f;

  f.timescale_kind = r.word("timescale", "kind");
  const std::string& kind = f.timescale_kind;
  if (kind == "integers") {
    f.timescale = IntegersSpec{r.integer("timescale", "a"), r.integer("timescale", "b")};
  } else if (kind == "uniform") {
    f.timescale = UniformSpec{r.number("timescale", "a"), r.number("timescale", "b"),
                              r.number("timescale", "h")};
  } else if (kind == "sampled") {
    f.timescale = SampledSpec{r.number("timescale", "a"), r.number("timescale", "b"),
                              r.number("timescale", "h")};
  } else if (kind == "power2") {
    f.timescale = Power2Spec{static_cast<int>(r.integer("timescale", "n0")),
                             static_cast<int>(r.integer("timescale", "n1"))};
  } else if (kind == "explicit") {
    f.timescale = ExplicitSpec{r.numbers("timescale", "points")};
  } else {
    fail("timescale.kind", r.require("timescale", "kind").line, "unknown kind '" + kind + "'");
  }
  try {
    (void)make_timescale(f.timescale);
  } catch (const InvalidInput& e) {
    fail("timescale", 0, e.what());
  }

  const long dim = r.integer("problem", "dim");
  if (dim < 1) fail("problem.dim", r.require("problem", "dim").line, "dimension must be >= 1");
  f.dim = static_cast<std::size_t>(dim);
  f.lagrangian = r.string("problem", "lagrangian");
  check_expression(f.lagrangian, f.dim, VariableSet::lagrangian(), "problem.lagrangian",
                   r.require("problem", "lagrangian").line);
  f.qa = r.numbers("problem", "qa");
  f.qb = r.numbers("problem", "qb");
  if (f.qa.size() != f.dim) {
    fail("problem.qa", r.require("problem", "qa").line,
         "expected " + std::to_string(f.dim) + " values, got " + std::to_string(f.qa.size()));
  }
  if (f.qb.size() != f.dim) {
    fail("problem.qb", r.require("problem", "qb").line,
         "expected " + std::to_string(f.dim) + " values, got " + std::to_string(f.qb.size()));
  }

  if (r.has_section("symmetry")) {
    SymmetrySection s;
    if (r.find("symmetry", "tau")) {
      s.tau = r.string("symmetry", "tau");
      check_expression(s.tau, f.dim, VariableSet::generator(), "symmetry.tau",
                       r.require("symmetry", "tau").line);
    }
    s.xi = r.strings("symmetry", "xi");
    const std::size_t xi_line = r.require("symmetry", "xi").line;
    if (s.xi.size() != f.dim) {
      fail("symmetry.xi", xi_line,
           "expected " + std::to_string(f.dim) + " expressions, got " + std::to_string(s.xi.size()));
    }
    for (std::size_t k = 0; k < s.xi.size(); ++k) {
      check_expression(s.xi[k], f.dim, VariableSet::generator(),
                       "symmetry.xi[" + std::to_string(k) + "]", xi_line);
    }
    const bool has_tbar = r.find("symmetry", "tbar") != nullptr;
    const bool has_qbar = r.find("symmetry", "qbar") != nullptr;
    if (has_tbar != has_qbar) fail("symmetry", 0, "tbar and qbar must be given together");
    if (has_tbar) {
      s.tbar = r.string("symmetry", "tbar");
      check_expression(*s.tbar, f.dim, VariableSet::family(), "symmetry.tbar",
                       r.require("symmetry", "tbar").line);
      s.qbar = r.strings("symmetry", "qbar");
      const std::size_t qbar_line = r.require("symmetry", "qbar").line;
      if (s.qbar.size() != f.dim) {
        fail("symmetry.qbar", qbar_line,
             "expected " + std::to_string(f.dim) + " expressions, got " +
                 std::to_string(s.qbar.size()));
      }
      for (std::size_t k = 0; k < s.qbar.size(); ++k) {
        check_expression(s.qbar[k], f.dim, VariableSet::family(),
                         "symmetry.qbar[" + std::to_string(k) + "]", qbar_line);
      }
    }
    f.symmetry = std::move(s);
  }

  if (r.find("solver", "tol")) {
    f.solver.tol = r.number("solver", "tol");
    if (!(f.solver.tol > 0.0)) fail("solver.tol", r.require("solver", "tol").line, "must be positive");
  }
  if (r.find("solver", "max_iter")) {
    const long it = r.integer("solver", "max_iter");
    if (it < 1) fail("solver.max_iter", r.require("solver", "max_iter").line, "must be >= 1");
    f.solver.max_iter = static_cast<int>(it);
  }
  if (r.find("sweep", "h")) f.sweep_h = r.numbers("sweep", "h");

  r.reject_unknown();
  return f;
}

ProblemFile load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open problem file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem_file(ss.str());
}

Problem build_problem(const ProblemFile& file, const TimescaleSpec& timescale) {
  return Problem(make_timescale(timescale), Lagrangian::parse(file.lagrangian, file.dim), file.qa,
                 file.qb);
}

Problem build_problem(const ProblemFile& file) { return build_problem(file, file.timescale); }

SymmetryGenerator build_symmetry(const ProblemFile& file) {
  if (!file.symmetry) throw InvalidInput("symmetry: section is required for this command");
  const SymmetrySection& s = *file.symmetry;
  return SymmetryGenerator::parse(file.dim, s.tau, s.xi, s.tbar, s.qbar);
}

TimescaleSpec with_step(const TimescaleSpec& spec, double h) {
  if (const auto* u = std::get_if<UniformSpec>(&spec)) return UniformSpec{u->a, u->b, h};
  if (const auto* s = std::get_if<SampledSpec>(&spec)) return SampledSpec{s->a, s->b, h};
  throw InvalidInput("timescale.kind: only uniform and sampled time scales can be refined");
}

}  // namespace tsvar
