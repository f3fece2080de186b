#include "tsvar/expr.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <functional>

namespace tsvar {

std::size_t SlotLayout::slot_of(std::string_view name) const {
  if (name == "t") return t();
  if (name == "eps") return eps();
  auto indexed = [&](std::string_view prefix) -> long {
    if (name.size() <= prefix.size() || name.substr(0, prefix.size()) != prefix) return -1;
    long k = 0;
    auto digits = name.substr(prefix.size());
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (ec != std::errc() || ptr != digits.data() + digits.size()) return -1;
    return k;
  };
  auto check = [&](long k) {
    if (k < 1 || static_cast<std::size_t>(k) > dim) {
      throw InvalidInput("variable '" + std::string(name) + "': index out of range 1.." +
                         std::to_string(dim));
    }
    return static_cast<std::size_t>(k - 1);
  };
  if (long k = indexed("qs"); k >= 0) return qs(check(k));
  if (long k = indexed("qd"); k >= 0) return qd(check(k));
  if (long k = indexed("q"); k >= 0) return q(check(k));
  throw InvalidInput("unknown variable '" + std::string(name) + "'");
}

std::string SlotLayout::name_of(std::size_t slot) const {
  if (slot == t()) return "t";
  if (slot == eps()) return "eps";
  std::size_t k = slot - 2;
  if (k < dim) return "q" + std::to_string(k + 1);
  if (k < 2 * dim) return "qs" + std::to_string(k - dim + 1);
  return "qd" + std::to_string(k - 2 * dim + 1);
}

namespace {

VarKind kind_of_slot(const SlotLayout& layout, std::size_t slot) {
  if (slot == SlotLayout::t()) return VarKind::t;
  if (slot == SlotLayout::eps()) return VarKind::eps;
  std::size_t k = slot - 2;
  if (k < layout.dim) return VarKind::q;
  if (k < 2 * layout.dim) return VarKind::qs;
  return VarKind::qd;
}

struct FunctionName {
  const char* name;
  Expression::Op op;
};

constexpr FunctionName kFunctions[] = {
    {"sin", Expression::Op::sin},   {"cos", Expression::Op::cos},
    {"exp", Expression::Op::exp},   {"ln", Expression::Op::ln},
    {"sqrt", Expression::Op::sqrt}, {"abs", Expression::Op::abs},
};

}  // namespace

// Recursive-descent parser producing the node arena of an Expression.
class Parser {
 public:
  Parser(std::string_view text, std::size_t dim, VariableSet allowed)
      : text_(text), allowed_(allowed) {
    out_.layout_.dim = dim;
  }

  Expression run() {
    if (out_.layout_.dim == 0) throw InvalidInput("expression dimension must be positive");
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("empty expression", 1);
    out_.root_ = parse_expr();
    skip_space();
    if (pos_ < text_.size()) {
      throw ParseError("unexpected '" + std::string(1, text_[pos_]) + "'", pos_ + 1);
    }
    return std::move(out_);
  }

 private:
  using Op = Expression::Op;

  int add(Expression::Node n) {
    out_.nodes_.push_back(n);
    return static_cast<int>(out_.nodes_.size() - 1);
  }

  int binary(Op op, int lhs, int rhs, std::size_t column) {
    Expression::Node n;
    n.op = op;
    n.lhs = lhs;
    n.rhs = rhs;
    n.column = column;
    return add(n);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  int parse_expr() {
    int lhs = parse_term();
    for (;;) {
      skip_space();
      std::size_t col = pos_ + 1;
      if (accept('+')) {
        lhs = binary(Op::add, lhs, parse_term(), col);
      } else if (accept('-')) {
        lhs = binary(Op::sub, lhs, parse_term(), col);
      } else {
        return lhs;
      }
    }
  }

  int parse_term() {
    int lhs = parse_unary();
    for (;;) {
      skip_space();
      std::size_t col = pos_ + 1;
      if (accept('*')) {
        lhs = binary(Op::mul, lhs, parse_unary(), col);
      } else if (accept('/')) {
        lhs = binary(Op::div, lhs, parse_unary(), col);
      } else {
        return lhs;
      }
    }
  }

  int parse_unary() {
    skip_space();
    std::size_t col = pos_ + 1;
    if (accept('-')) {
      Expression::Node n;
      n.op = Op::neg;
      n.lhs = parse_unary();
      n.column = col;
      return add(n);
    }
    return parse_power();
  }

  // Exponent that is an integer literal, possibly negated.
  bool integer_exponent(int i, long& k) const {
    const auto& n = out_.nodes_[static_cast<std::size_t>(i)];
    if (n.op == Op::neg) {
      if (!integer_exponent(n.lhs, k)) return false;
      k = -k;
      return true;
    }
    if (n.op != Op::constant) return false;
    if (n.value != std::floor(n.value) || n.value > 1e9) return false;
    k = static_cast<long>(n.value);
    return true;
  }

  int parse_power() {
    int base = parse_primary();
    skip_space();
    std::size_t col = pos_ + 1;
    if (!accept('^')) return base;
    int exponent = parse_unary();
    long k = 0;
    if (integer_exponent(exponent, k)) {
      Expression::Node n;
      n.op = Op::int_pow;
      n.lhs = base;
      n.exponent = k;
      n.column = col;
      return add(n);
    }
    return binary(Op::pow, base, exponent, col);
  }

  int parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_ + 1);
    const std::size_t col = pos_ + 1;
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      int inner = parse_expr();
      if (!accept(')')) throw ParseError("expected ')'", pos_ + 1);
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      std::string_view ident = text_.substr(start, pos_ - start);
      for (const auto& f : kFunctions) {
        if (ident == f.name) {
          if (!accept('(')) throw ParseError("expected '(' after " + std::string(ident), pos_ + 1);
          Expression::Node n;
          n.op = f.op;
          n.lhs = parse_expr();
          n.column = col;
          if (!accept(')')) throw ParseError("expected ')'", pos_ + 1);
          return add(n);
        }
      }
      std::size_t slot = 0;
      try {
        slot = out_.layout_.slot_of(ident);
      } catch (const InvalidInput& e) {
        throw ParseError(e.what(), col);
      }
      if (!allowed_.allows(kind_of_slot(out_.layout_, slot))) {
        throw ParseError("variable '" + std::string(ident) + "' is not allowed here", col);
      }
      Expression::Node n;
      n.op = Op::variable;
      n.slot = slot;
      n.column = col;
      return add(n);
    }
    throw ParseError("unexpected '" + std::string(1, c) + "'", col);
  }

  int parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        digits();
      } else {
        pos_ = save;
      }
    }
    const std::string literal(text_.substr(start, pos_ - start));
    char* end = nullptr;
    const double value = std::strtod(literal.c_str(), &end);
    if (literal == "." || end != literal.c_str() + literal.size() || !std::isfinite(value)) {
      throw ParseError("malformed number '" + literal + "'", start + 1);
    }
    Expression::Node n;
    n.op = Op::constant;
    n.value = value;
    n.column = start + 1;
    return add(n);
  }

  std::string_view text_;
  VariableSet allowed_;
  std::size_t pos_ = 0;
  Expression out_;
};

Expression Expression::parse(std::string_view text, std::size_t dim, VariableSet allowed) {
  return Parser(text, dim, allowed).run();
}

std::string Expression::render_node(int i) const {
  const Node& n = nodes_[static_cast<std::size_t>(i)];
  auto bin = [&](const char* op) {
    return "(" + render_node(n.lhs) + " " + op + " " + render_node(n.rhs) + ")";
  };
  switch (n.op) {
    case Op::constant: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      return buf;
    }
    case Op::variable:
      return layout_.name_of(n.slot);
    case Op::add:
      return bin("+");
    case Op::sub:
      return bin("-");
    case Op::mul:
      return bin("*");
    case Op::div:
      return bin("/");
    case Op::pow:
      return bin("^");
    case Op::int_pow: {
      std::string k = std::to_string(n.exponent < 0 ? -n.exponent : n.exponent);
      if (n.exponent < 0) k = "(-" + k + ")";
      return "(" + render_node(n.lhs) + " ^ " + k + ")";
    }
    case Op::neg:
      return "(-" + render_node(n.lhs) + ")";
    default:
      break;
  }
  for (const auto& f : kFunctions) {
    if (f.op == n.op) return std::string(f.name) + "(" + render_node(n.lhs) + ")";
  }
  return "?";
}

std::string Expression::render() const { return root_ < 0 ? "" : render_node(root_); }

bool Expression::equal_nodes(const Expression& other, int a, int b) const {
  const Node& x = nodes_[static_cast<std::size_t>(a)];
  const Node& y = other.nodes_[static_cast<std::size_t>(b)];
  if (x.op != y.op) return false;
  switch (x.op) {
    case Op::constant:
      return x.value == y.value;
    case Op::variable:
      return x.slot == y.slot;
    case Op::int_pow:
      return x.exponent == y.exponent && equal_nodes(other, x.lhs, y.lhs);
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::div:
    case Op::pow:
      return equal_nodes(other, x.lhs, y.lhs) && equal_nodes(other, x.rhs, y.rhs);
    default:
      return equal_nodes(other, x.lhs, y.lhs);
  }
}

bool Expression::operator==(const Expression& other) const {
  if (layout_.dim != other.layout_.dim) return false;
  if (root_ < 0 || other.root_ < 0) return root_ == other.root_;
  return equal_nodes(other, root_, other.root_);
}

std::set<std::string> Expression::free_variables() const {
  std::set<std::string> out;
  std::function<void(int)> walk = [&](int i) {
    if (i < 0) return;
    const Node& n = nodes_[static_cast<std::size_t>(i)];
    if (n.op == Op::variable) out.insert(layout_.name_of(n.slot));
    walk(n.lhs);
    walk(n.rhs);
  };
  walk(root_);
  return out;
}

bool Expression::is_constant() const { return free_variables().empty(); }

std::vector<double> Expression::bind(const EvalEnvironment& env) const {
  std::vector<double> slots(layout_.count(), 0.0);
  for (const auto& [name, value] : env) slots[layout_.slot_of(name)] = value;
  for (const auto& name : free_variables()) {
    if (!env.count(name)) throw InvalidInput("variable '" + name + "' is not bound");
  }
  return slots;
}

double Expression::eval(const EvalEnvironment& env) const {
  const std::vector<double> slots = bind(env);
  return evaluate<double>(slots);
}

std::pair<double, double> Expression::diff_eval(const EvalEnvironment& env,
                                                 const EvalEnvironment& seed) const {
  const std::vector<double> values = bind(env);
  std::vector<Dual<double>> slots(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) slots[i] = Dual<double>(values[i], 0.0);
  for (const auto& [name, tangent] : seed) slots[layout_.slot_of(name)].d = tangent;
  const Dual<double> out = evaluate<Dual<double>>(slots);
  return {out.v, out.d};
}

void Expression::domain_error(int i, const std::string& what) const {
  const Node& n = nodes_[static_cast<std::size_t>(i)];
  throw DomainError(what + " in '" + render_node(i) + "' (column " +
                    std::to_string(n.column) + ")");
}

}  // namespace tsvar
