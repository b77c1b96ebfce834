#include "bfgp/model_io.hpp"

#include <algorithm>
#include <sstream>

#include "bfgp/error.hpp"
#include "lexer.hpp"

namespace bfgp {

using detail::Tok;
using detail::TokenStream;

namespace {

// Names that may appear as bare variables, with their types.
struct Scope {
  std::vector<std::string> names;
  std::vector<TypeId> types;

  std::optional<std::uint32_t> find(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return static_cast<std::uint32_t>(i);
    return std::nullopt;
  }
};

class ExprParser {
 public:
  ExprParser(TokenStream& ts, const Domain& domain, const Scope& scope) : ts_(ts), domain_(domain), scope_(scope) {}

  FluentTerm term() {
    auto name = ts_.expect_ident("function name");
    auto f = domain_.find_function(name);
    if (!f) ts_.fail("unknown function '" + name + "'");
    return term_args(*f);
  }

  FluentTerm term_args(FunctionId f) {
    const auto& fn = domain_.functions[f];
    FluentTerm t{f, {}};
    ts_.expect("(");
    if (!ts_.accept(")")) {
      do {
        if (t.args.size() >= fn.arity()) ts_.fail("too many arguments for " + fn.name);
        const TypeId expected = fn.parameter_types[t.args.size()];
        if (ts_.peek().kind == Tok::integer) {
          auto v = ts_.expect_integer("object index");
          if (v < 0) ts_.fail("negative object index");
          t.args.push_back(Argument::object(static_cast<std::uint32_t>(v)));
        } else {
          auto name = ts_.expect_ident("argument");
          auto var = scope_.find(name);
          if (!var) ts_.fail("unknown variable '" + name + "'");
          if (scope_.types[*var] != expected) ts_.fail("argument '" + name + "' has the wrong type for " + fn.name);
          t.args.push_back(Argument::variable(*var));
        }
      } while (ts_.accept(","));
      ts_.expect(")");
    }
    if (t.args.size() != fn.arity()) ts_.fail("wrong number of arguments for " + fn.name);
    return t;
  }

  Operand operand() {
    if (ts_.peek().kind == Tok::integer) return ts_.expect_integer("integer");
    auto name = ts_.expect_ident("operand");
    if (ts_.peek().kind == Tok::punct && ts_.peek().text == "(") {
      auto f = domain_.find_function(name);
      if (!f) ts_.fail("unknown function '" + name + "'");
      return term_args(*f);
    }
    auto var = scope_.find(name);
    if (!var) ts_.fail("unknown variable '" + name + "'");
    return VariableRef{*var};
  }

  Expression expression() {
    Expression e;
    int sign = ts_.accept("-") ? -1 : 1;
    while (true) {
      e.terms.push_back({sign, operand()});
      if (ts_.accept("+"))
        sign = 1;
      else if (ts_.accept("-"))
        sign = -1;
      else
        break;
    }
    return e;
  }

  std::optional<Comparison> comparison() {
    static const std::pair<const char*, Comparison> ops[] = {
        {"=", Comparison::eq}, {"!=", Comparison::ne}, {"<", Comparison::lt},
        {"<=", Comparison::le}, {">", Comparison::gt}, {">=", Comparison::ge}};
    for (const auto& [text, op] : ops)
      if (ts_.accept(text)) return op;
    return std::nullopt;
  }

  Atom atom() {
    Atom a;
    a.lhs = expression();
    auto op = comparison();
    if (!op) ts_.fail("expected comparison operator");
    a.op = *op;
    a.rhs = expression();
    return a;
  }

  Condition disjunction() {
    Condition first = conjunction();
    if (!(ts_.peek().kind == Tok::punct && ts_.peek().text == "|")) return first;
    Condition c{Condition::Kind::disjunction};
    c.children.push_back(std::move(first));
    while (ts_.accept("|")) c.children.push_back(conjunction());
    return c;
  }

  Condition conjunction() {
    Condition first = unary();
    if (!(ts_.peek().kind == Tok::punct && ts_.peek().text == "&")) return first;
    Condition c{Condition::Kind::conjunction};
    c.children.push_back(std::move(first));
    while (ts_.accept("&")) c.children.push_back(unary());
    return c;
  }

  Condition unary() {
    if (ts_.accept("!")) {
      Condition c{Condition::Kind::negation};
      c.children.push_back(unary());
      return c;
    }
    if (ts_.accept("(")) {
      Condition c = disjunction();
      ts_.expect(")");
      return c;
    }
    if (ts_.peek().kind == Tok::ident && (ts_.peek().text == "true" || ts_.peek().text == "false") &&
        ts_.peek(1).kind == Tok::end) {
      Condition c{Condition::Kind::truth};
      c.truth = ts_.next().text == "true";
      return c;
    }
    Condition c{Condition::Kind::atom};
    c.atom = atom();
    return c;
  }

 private:
  TokenStream& ts_;
  const Domain& domain_;
  const Scope& scope_;
};

std::pair<std::string, std::string> split_keyword(const detail::SourceLine& line) {
  auto start = line.text.find_first_not_of(" \t");
  auto stop = line.text.find_first_of(" \t", start);
  if (stop == std::string::npos) return {line.text.substr(start), std::string()};
  return {line.text.substr(start, stop - start), line.text.substr(stop)};
}

// Re-tokenize the remainder so reported columns match the original line.
TokenStream rest_stream(const detail::SourceLine& line) {
  auto start = line.text.find_first_not_of(" \t");
  auto stop = line.text.find_first_of(" \t", start);
  std::string masked = line.text;
  std::fill(masked.begin(), masked.begin() + static_cast<std::ptrdiff_t>(stop == std::string::npos ? masked.size() : stop), ' ');
  return detail::stream_for(masked, line.number);
}

// Names are single words and may hold characters the tokenizer splits on.
std::string name_word(const detail::SourceLine& line, const std::string& rest, const char* what) {
  const auto start = rest.find_first_not_of(" \t");
  if (start == std::string::npos) throw SyntaxError(line.number, line.text.size() + 1, std::string("expected ") + what);
  const auto stop = rest.find_first_of(" \t", start);
  if (stop != std::string::npos)
    throw SyntaxError(line.number, line.text.size() - rest.size() + stop + 1, std::string("unexpected text after ") + what);
  return rest.substr(start);
}

void expect_end(TokenStream& ts) {
  if (!ts.at_end()) ts.fail("unexpected trailing input");
}

std::optional<TypeId> type_or_fail(TokenStream& ts, const Domain& d) {
  auto name = ts.expect_ident("type name");
  auto t = d.find_type(name);
  if (!t) ts.fail("unknown type '" + name + "'");
  return t;
}

}  // namespace

Domain parse_domain(std::string_view text) {
  Domain d;
  ActionSchema* current = nullptr;
  Scope scope;
  bool named = false;
  for (const auto& line : detail::source_lines(text)) {
    auto [keyword, rest] = split_keyword(line);
    auto ts = rest_stream(line);
    if (keyword == "DOMAIN") {
      d.name = name_word(line, rest, "domain name");
      named = true;
    } else if (keyword == "TYPES") {
      while (!ts.at_end()) {
        auto name = ts.expect_ident("type name");
        if (d.find_type(name)) ts.fail("duplicate type '" + name + "'");
        d.types.push_back(name);
      }
    } else if (keyword == "FUNCTION") {
      FunctionSymbol f;
      auto kind = ts.expect_ident("bool or num");
      if (kind == "bool")
        f.kind = FunctionKind::boolean;
      else if (kind == "num")
        f.kind = FunctionKind::numeric;
      else
        throw SyntaxError(line.number, 1, "function kind must be bool or num");
      f.name = ts.expect_ident("function name");
      if (d.find_function(f.name)) ts.fail("duplicate function '" + f.name + "'");
      ts.expect("(");
      if (!ts.accept(")")) {
        do f.parameter_types.push_back(*type_or_fail(ts, d));
        while (ts.accept(","));
        ts.expect(")");
      }
      expect_end(ts);
      d.functions.push_back(std::move(f));
    } else if (keyword == "POINTERS") {
      while (!ts.at_end()) {
        Parameter p;
        p.name = ts.expect_ident("pointer name");
        ts.expect(":");
        p.type = *type_or_fail(ts, d);
        d.default_pointers.push_back(std::move(p));
        ts.accept(",");
      }
    } else if (keyword == "SCHEMA") {
      ActionSchema s;
      s.name = ts.expect_ident("schema name");
      if (d.find_schema(s.name)) ts.fail("duplicate schema '" + s.name + "'");
      ts.expect("(");
      scope = {};
      if (!ts.accept(")")) {
        do {
          Parameter p;
          p.name = ts.expect_ident("parameter name");
          if (scope.find(p.name)) ts.fail("duplicate parameter '" + p.name + "'");
          ts.expect(":");
          p.type = *type_or_fail(ts, d);
          scope.names.push_back(p.name);
          scope.types.push_back(p.type);
          s.parameters.push_back(std::move(p));
        } while (ts.accept(","));
        ts.expect(")");
      }
      expect_end(ts);
      d.schemas.push_back(std::move(s));
      current = &d.schemas.back();
    } else if (keyword == "PRE") {
      if (!current) throw SyntaxError(line.number, 1, "PRE outside a schema");
      ExprParser p(ts, d, scope);
      if (ts.at_end()) continue;
      do current->preconditions.push_back(p.atom());
      while (ts.accept("&"));
      expect_end(ts);
    } else if (keyword == "EFF") {
      if (!current) throw SyntaxError(line.number, 1, "EFF outside a schema");
      ExprParser p(ts, d, scope);
      if (ts.at_end()) continue;
      do {
        Assignment a;
        a.target = p.term();
        ts.expect(":=");
        a.value = p.expression();
        for (const auto& other : current->effects)
          if (other.target == a.target) ts.fail("effect target assigned twice");
        current->effects.push_back(std::move(a));
      } while (ts.accept(";"));
      expect_end(ts);
    } else {
      throw SyntaxError(line.number, 1, "unknown declaration '" + keyword + "'");
    }
  }
  if (!named) throw SyntaxError(1, 1, "missing DOMAIN line");
  return d;
}

namespace {

std::string expression_to_string(const Domain& d, const Expression& e, std::span<const std::string> names) {
  if (e.terms.empty()) return "0";
  std::string s;
  for (std::size_t k = 0; k < e.terms.size(); ++k) {
    const auto& t = e.terms[k];
    if (k) s += t.sign < 0 ? " - " : " + ";
    else if (t.sign < 0) s += "-";
    if (const auto* c = std::get_if<Value>(&t.operand))
      s += std::to_string(*c);
    else if (const auto* v = std::get_if<VariableRef>(&t.operand))
      s += names[v->index];
    else
      s += term_to_string(d, std::get<FluentTerm>(t.operand), names);
  }
  return s;
}

std::string atom_to_string(const Domain& d, const Atom& a, std::span<const std::string> names) {
  return expression_to_string(d, a.lhs, names) + " " + to_string(a.op) + " " + expression_to_string(d, a.rhs, names);
}

std::string condition_to_string(const Domain& d, const Condition& c, std::span<const std::string> names) {
  auto join = [&](const char* sep) {
    std::string s = "(";
    for (std::size_t k = 0; k < c.children.size(); ++k) {
      if (k) s += sep;
      s += condition_to_string(d, c.children[k], names);
    }
    return s + ")";
  };
  switch (c.kind) {
    case Condition::Kind::truth: return c.truth ? "true" : "false";
    case Condition::Kind::atom: return "(" + atom_to_string(d, c.atom, names) + ")";
    case Condition::Kind::negation: return "!" + condition_to_string(d, c.children.at(0), names);
    case Condition::Kind::conjunction: return join(" & ");
    case Condition::Kind::disjunction: return join(" | ");
  }
  return {};
}

}  // namespace

std::string print_domain(const Domain& d) {
  std::ostringstream out;
  out << "DOMAIN " << d.name << "\n";
  out << "TYPES";
  for (const auto& t : d.types) out << ' ' << t;
  out << "\n";
  for (const auto& f : d.functions) {
    out << "FUNCTION " << (f.kind == FunctionKind::boolean ? "bool " : "num ") << f.name << "(";
    for (std::size_t k = 0; k < f.parameter_types.size(); ++k) out << (k ? "," : "") << d.types[f.parameter_types[k]];
    out << ")\n";
  }
  if (!d.default_pointers.empty()) {
    out << "POINTERS";
    for (const auto& p : d.default_pointers) out << ' ' << p.name << ':' << d.types[p.type];
    out << "\n";
  }
  for (const auto& s : d.schemas) {
    std::vector<std::string> names;
    out << "SCHEMA " << s.name << "(";
    for (std::size_t k = 0; k < s.parameters.size(); ++k) {
      out << (k ? "," : "") << s.parameters[k].name << ':' << d.types[s.parameters[k].type];
      names.push_back(s.parameters[k].name);
    }
    out << ")\n";
    if (!s.preconditions.empty()) {
      out << "PRE ";
      for (std::size_t k = 0; k < s.preconditions.size(); ++k)
        out << (k ? " & " : "") << atom_to_string(d, s.preconditions[k], names);
      out << "\n";
    }
    if (!s.effects.empty()) {
      out << "EFF ";
      for (std::size_t k = 0; k < s.effects.size(); ++k)
        out << (k ? " ; " : "") << term_to_string(d, s.effects[k].target, names)
            << " := " << expression_to_string(d, s.effects[k].value, names);
      out << "\n";
    }
  }
  return out.str();
}

Instance parse_instance(std::string_view text, const Domain& domain, std::span<const Pointer> pointers) {
  Instance inst;
  inst.object_counts.assign(domain.types.size(), 0);
  Scope scope;
  for (const auto& p : pointers) {
    scope.names.push_back(p.name);
    scope.types.push_back(p.type);
  }
  // `Scope` for init terms is empty: initial values are ground.
  const Scope ground;
  bool named = false;
  bool has_goal = false;
  PartialGoal partial;
  for (const auto& line : detail::source_lines(text)) {
    auto [keyword, rest] = split_keyword(line);
    auto ts = rest_stream(line);
    if (keyword == "INSTANCE") {
      inst.name = name_word(line, rest, "instance name");
      named = true;
    } else if (keyword == "OBJECTS") {
      while (!ts.at_end()) {
        auto t = *type_or_fail(ts, domain);
        ts.expect(":");
        auto count = ts.expect_integer("object count");
        if (count <= 0) ts.fail("object count must be positive");
        inst.object_counts[t] = static_cast<std::size_t>(count);
        ts.accept(",");
      }
    } else if (keyword == "INIT") {
      ExprParser p(ts, domain, ground);
      while (!ts.at_end()) {
        auto term = p.term();
        ts.expect("=");
        InitialAssignment a;
        a.function = term.function;
        for (const auto& arg : term.args) a.objects.push_back(arg.index);
        a.value = ts.expect_integer("value");
        inst.init.push_back(std::move(a));
      }
    } else if (keyword == "GOAL") {
      if (has_goal && !std::holds_alternative<PartialGoal>(inst.goal))
        throw SyntaxError(line.number, 1, "GOAL and GOALEXPR are exclusive");
      has_goal = true;
      ExprParser p(ts, domain, scope);
      while (!ts.at_end()) {
        GoalAssignment g;
        g.term = p.term();
        ts.expect("=");
        g.value = ts.expect_integer("value");
        partial.assignments.push_back(std::move(g));
      }
      inst.goal = partial;
    } else if (keyword == "GOALEXPR") {
      if (has_goal) throw SyntaxError(line.number, 1, "goal given twice");
      has_goal = true;
      ExprParser p(ts, domain, scope);
      ConstraintGoal g;
      g.condition = p.disjunction();
      expect_end(ts);
      inst.goal = std::move(g);
    } else {
      throw SyntaxError(line.number, 1, "unknown declaration '" + keyword + "'");
    }
  }
  if (!named) throw SyntaxError(1, 1, "missing INSTANCE line");
  for (std::size_t t = 0; t < domain.types.size(); ++t)
    if (inst.object_counts[t] == 0)
      throw Error(ErrorKind::missing_assignment, "no OBJECTS count for type " + domain.types[t]);
  check_instance(domain, inst);
  return inst;
}

std::string print_instance(const Instance& inst, const Domain& domain, std::span<const Pointer> pointers) {
  std::vector<std::string> names;
  for (const auto& p : pointers) names.push_back(p.name);
  std::ostringstream out;
  out << "INSTANCE " << inst.name << "\n";
  out << "OBJECTS";
  for (std::size_t t = 0; t < domain.types.size(); ++t)
    out << (t ? ", " : " ") << domain.types[t] << ": " << inst.object_counts[t];
  out << "\n";
  // Zero values are implied; long lines are split to keep files readable.
  std::size_t on_line = 0;
  for (const auto& a : inst.init) {
    if (a.value == 0) continue;
    if (on_line == 0) out << "INIT";
    FluentTerm t{a.function, {}};
    for (auto o : a.objects) t.args.push_back(Argument::object(o));
    out << ' ' << term_to_string(domain, t, names) << '=' << a.value;
    if (++on_line == 16) {
      out << "\n";
      on_line = 0;
    }
  }
  if (on_line) out << "\n";
  if (const auto* g = std::get_if<PartialGoal>(&inst.goal)) {
    on_line = 0;
    if (g->assignments.empty()) out << "GOAL\n";
    for (const auto& a : g->assignments) {
      if (on_line == 0) out << "GOAL";
      out << ' ' << term_to_string(domain, a.term, names) << '=' << a.value;
      if (++on_line == 16) {
        out << "\n";
        on_line = 0;
      }
    }
    if (on_line) out << "\n";
  } else {
    out << "GOALEXPR " << condition_to_string(domain, std::get<ConstraintGoal>(inst.goal).condition, names) << "\n";
  }
  return out.str();
}

std::vector<Pointer> default_pointers(const Domain& domain) {
  std::vector<Pointer> out;
  for (const auto& p : domain.default_pointers) out.push_back({p.name, p.type});
  return out;
}

std::vector<Pointer> parse_pointer_declaration(std::string_view text, const Domain& domain) {
  std::vector<Pointer> out;
  auto take = [&](TypeId type, std::size_t count) {
    std::size_t made = 0;
    for (const auto& p : domain.default_pointers) {
      if (made == count) break;
      if (p.type != type) continue;
      out.push_back({p.name, type});
      ++made;
    }
    for (std::size_t k = 1; made < count; ++k) {
      auto name = domain.types[type] + std::to_string(k);
      if (std::any_of(out.begin(), out.end(), [&](const Pointer& q) { return q.name == name; })) continue;
      out.push_back({name, type});
      ++made;
    }
  };
  auto ts = detail::stream_for(text, 1);
  if (ts.peek().kind == Tok::integer) {
    auto count = ts.expect_integer("pointer count");
    expect_end(ts);
    if (domain.types.size() != 1) throw Error(ErrorKind::invalid_argument, "a bare pointer count needs a one-type domain");
    take(0, static_cast<std::size_t>(count));
    return out;
  }
  while (!ts.at_end()) {
    auto first = ts.expect_ident("pointer name or type");
    ts.expect(":");
    if (ts.peek().kind == Tok::integer) {
      auto t = domain.find_type(first);
      if (!t) ts.fail("unknown type '" + first + "'");
      take(*t, static_cast<std::size_t>(ts.expect_integer("count")));
    } else {
      auto t = *type_or_fail(ts, domain);
      if (std::any_of(out.begin(), out.end(), [&](const Pointer& q) { return q.name == first; }))
        ts.fail("duplicate pointer '" + first + "'");
      out.push_back({first, t});
    }
    if (!ts.accept(",")) break;
  }
  expect_end(ts);
  return out;
}

}  // namespace bfgp
