#include "bfgp/pddl.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "bfgp/error.hpp"

namespace bfgp::pddl {

namespace {

struct SExpr {
  bool is_list = false;
  std::string atom;
  std::vector<SExpr> items;
  std::size_t line = 0;
  std::size_t column = 0;
};

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  SExpr read_top() {
    skip();
    SExpr e = read();
    skip();
    if (pos_ < text_.size()) fail("trailing input after the definition");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(line_, column_, msg); }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip() {
    while (pos_ < text_.size()) {
      if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        advance();
      } else if (text_[pos_] == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  SExpr read() {
    skip();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    SExpr e;
    e.line = line_;
    e.column = column_;
    if (text_[pos_] == '(') {
      e.is_list = true;
      advance();
      while (true) {
        skip();
        if (pos_ >= text_.size()) fail("unbalanced parenthesis");
        if (text_[pos_] == ')') {
          advance();
          break;
        }
        e.items.push_back(read());
      }
      return e;
    }
    if (text_[pos_] == ')') fail("unexpected ')'");
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
           text_[pos_] != ')' && text_[pos_] != ';') {
      e.atom += static_cast<char>(std::tolower(static_cast<unsigned char>(text_[pos_])));
      advance();
    }
    return e;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

[[noreturn]] void fail_at(const SExpr& e, const std::string& msg) { throw SyntaxError(e.line, e.column, msg); }

const std::string& atom_of(const SExpr& e, const char* what) {
  if (e.is_list || e.atom.empty()) fail_at(e, std::string("expected ") + what);
  return e.atom;
}

bool head_is(const SExpr& e, std::string_view head) {
  return e.is_list && !e.items.empty() && !e.items[0].is_list && e.items[0].atom == head;
}

// `a b - t c - u d` with untyped names defaulting to "object".
std::vector<TypedName> typed_list(const std::vector<SExpr>& items, std::size_t from) {
  std::vector<TypedName> out;
  std::size_t pending = 0;
  for (std::size_t k = from; k < items.size(); ++k) {
    const auto& tok = atom_of(items[k], "a name");
    if (tok == "-") {
      if (k + 1 >= items.size()) fail_at(items[k], "missing type after '-'");
      if (items[k + 1].is_list) throw Error(ErrorKind::unsupported_requirement, "either-types are not supported");
      const auto& type = items[k + 1].atom;
      for (std::size_t p = out.size() - pending; p < out.size(); ++p) out[p].type = type;
      pending = 0;
      ++k;
      continue;
    }
    out.push_back({tok, "object"});
    ++pending;
  }
  return out;
}

AtomSchema atom_schema(const SExpr& e) {
  if (!e.is_list || e.items.empty()) fail_at(e, "expected an atom");
  const auto& head = atom_of(e.items[0], "a predicate");
  if (head == "not") throw Error(ErrorKind::unsupported_requirement, "negative literals are outside STRIPS");
  if (head == "=") throw Error(ErrorKind::unsupported_requirement, "equality is outside STRIPS");
  if (head == "or" || head == "imply" || head == "forall" || head == "exists" || head == "when")
    throw Error(ErrorKind::unsupported_requirement, "'" + head + "' is outside STRIPS");
  AtomSchema a{head, {}};
  for (std::size_t k = 1; k < e.items.size(); ++k) a.args.push_back(atom_of(e.items[k], "an argument"));
  return a;
}

std::vector<AtomSchema> conjunction(const SExpr& e) {
  std::vector<AtomSchema> out;
  if (e.is_list && e.items.empty()) return out;
  if (head_is(e, "and")) {
    for (std::size_t k = 1; k < e.items.size(); ++k) {
      auto sub = conjunction(e.items[k]);
      out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
  }
  out.push_back(atom_schema(e));
  return out;
}

void effects(const SExpr& e, Operator& op) {
  if (e.is_list && e.items.empty()) return;
  if (head_is(e, "and")) {
    for (std::size_t k = 1; k < e.items.size(); ++k) effects(e.items[k], op);
    return;
  }
  if (head_is(e, "not")) {
    if (e.items.size() != 2) fail_at(e, "'not' takes one atom");
    op.deletes.push_back(atom_schema(e.items[1]));
    return;
  }
  if (head_is(e, "when")) throw Error(ErrorKind::unsupported_requirement, "conditional effects are not supported");
  if (head_is(e, "increase") || head_is(e, "decrease") || head_is(e, "assign"))
    throw Error(ErrorKind::unsupported_requirement, "numeric effects are not supported");
  op.adds.push_back(atom_schema(e));
}

const char* kSupported[] = {":strips", ":typing"};

void check_variables(const Operator& op, const std::vector<AtomSchema>& atoms) {
  for (const auto& a : atoms)
    for (const auto& arg : a.args) {
      if (arg.empty() || arg[0] != '?')
        throw Error(ErrorKind::unsupported_requirement, "constant '" + arg + "' in operator " + op.name);
      bool known = std::any_of(op.parameters.begin(), op.parameters.end(), [&](const TypedName& p) { return p.name == arg; });
      if (!known) throw Error(ErrorKind::invalid_argument, "unknown variable " + arg + " in operator " + op.name);
    }
}

const SExpr& expect_define(const SExpr& top, const char* kind) {
  if (!head_is(top, "define") || top.items.size() < 2 || !head_is(top.items[1], kind))
    fail_at(top, std::string("expected (define (") + kind + " ...)");
  return top.items[1];
}

}  // namespace

DomainModel parse_domain(std::string_view text) {
  const SExpr top = Reader(text).read_top();
  const SExpr& header = expect_define(top, "domain");
  DomainModel d;
  if (header.items.size() != 2) fail_at(header, "domain header needs a name");
  d.name = atom_of(header.items[1], "a domain name");
  bool typed = false;
  for (std::size_t k = 2; k < top.items.size(); ++k) {
    const SExpr& sec = top.items[k];
    if (!sec.is_list || sec.items.empty()) fail_at(sec, "expected a section");
    const std::string& head = atom_of(sec.items[0], "a section keyword");
    if (head == ":requirements") {
      for (std::size_t r = 1; r < sec.items.size(); ++r) {
        const auto& req = atom_of(sec.items[r], "a requirement");
        if (std::find(std::begin(kSupported), std::end(kSupported), req) == std::end(kSupported))
          throw Error(ErrorKind::unsupported_requirement, "requirement " + req + " is not supported");
        d.requirements.push_back(req);
      }
    } else if (head == ":types") {
      typed = true;
      for (const auto& t : typed_list(sec.items, 1)) {
        if (t.type != "object")
          throw Error(ErrorKind::unsupported_requirement, "type hierarchies are not supported (" + t.name + ")");
        if (t.name == "object") continue;
        d.types.push_back(t.name);
      }
    } else if (head == ":predicates") {
      for (std::size_t p = 1; p < sec.items.size(); ++p) {
        const SExpr& pe = sec.items[p];
        if (!pe.is_list || pe.items.empty()) fail_at(pe, "expected a predicate declaration");
        d.predicates.push_back({atom_of(pe.items[0], "a predicate name"), typed_list(pe.items, 1)});
      }
    } else if (head == ":action") {
      Operator op;
      if (sec.items.size() < 2) fail_at(sec, "action needs a name");
      op.name = atom_of(sec.items[1], "an action name");
      for (std::size_t f = 2; f + 1 < sec.items.size(); f += 2) {
        const auto& key = atom_of(sec.items[f], "an action field");
        const SExpr& val = sec.items[f + 1];
        if (key == ":parameters") {
          if (!val.is_list) fail_at(val, "parameters must be a list");
          op.parameters = typed_list(val.items, 0);
        } else if (key == ":precondition") {
          op.preconditions = conjunction(val);
        } else if (key == ":effect") {
          effects(val, op);
        } else {
          fail_at(sec.items[f], "unknown action field " + key);
        }
      }
      if ((sec.items.size() - 2) % 2 != 0) fail_at(sec, "action fields come in key/value pairs");
      check_variables(op, op.preconditions);
      check_variables(op, op.deletes);
      check_variables(op, op.adds);
      d.operators.push_back(std::move(op));
    } else if (head == ":constants") {
      throw Error(ErrorKind::unsupported_requirement, "domain constants are not supported");
    } else if (head == ":functions" || head == ":derived" || head == ":axiom") {
      throw Error(ErrorKind::unsupported_requirement, head + " is not supported");
    } else {
      fail_at(sec, "unknown domain section " + head);
    }
  }
  if (!typed) d.types = {"object"};
  auto check_type = [&](const std::string& t) {
    if (std::find(d.types.begin(), d.types.end(), t) == d.types.end())
      throw Error(ErrorKind::unsupported_requirement, "type '" + t + "' is not a declared flat type");
  };
  for (const auto& p : d.predicates)
    for (const auto& a : p.parameters) check_type(a.type);
  for (const auto& op : d.operators)
    for (const auto& a : op.parameters) check_type(a.type);
  return d;
}

ProblemModel parse_problem(std::string_view text, const DomainModel& domain) {
  const SExpr top = Reader(text).read_top();
  const SExpr& header = expect_define(top, "problem");
  ProblemModel p;
  if (header.items.size() != 2) fail_at(header, "problem header needs a name");
  p.name = atom_of(header.items[1], "a problem name");
  for (std::size_t k = 2; k < top.items.size(); ++k) {
    const SExpr& sec = top.items[k];
    if (!sec.is_list || sec.items.empty()) fail_at(sec, "expected a section");
    const std::string& head = atom_of(sec.items[0], "a section keyword");
    if (head == ":domain") {
      if (sec.items.size() != 2) fail_at(sec, ":domain takes a name");
      p.domain = atom_of(sec.items[1], "a domain name");
    } else if (head == ":requirements") {
      for (std::size_t r = 1; r < sec.items.size(); ++r) {
        const auto& req = atom_of(sec.items[r], "a requirement");
        if (std::find(std::begin(kSupported), std::end(kSupported), req) == std::end(kSupported))
          throw Error(ErrorKind::unsupported_requirement, "requirement " + req + " is not supported");
      }
    } else if (head == ":objects") {
      p.objects = typed_list(sec.items, 1);
    } else if (head == ":init") {
      for (std::size_t a = 1; a < sec.items.size(); ++a) p.init.push_back(atom_schema(sec.items[a]));
    } else if (head == ":goal") {
      if (sec.items.size() != 2) fail_at(sec, ":goal takes one formula");
      p.goal = conjunction(sec.items[1]);
    } else {
      fail_at(sec, "unknown problem section " + head);
    }
  }
  if (!p.domain.empty() && p.domain != domain.name)
    throw Error(ErrorKind::invalid_argument, "problem " + p.name + " is for domain " + p.domain);
  for (const auto& o : p.objects)
    if (std::find(domain.types.begin(), domain.types.end(), o.type) == domain.types.end())
      throw Error(ErrorKind::unsupported_requirement, "object " + o.name + " has undeclared type " + o.type);
  auto check_ground = [&](const AtomSchema& a) {
    const auto pred = std::find_if(domain.predicates.begin(), domain.predicates.end(),
                                   [&](const Predicate& q) { return q.name == a.predicate; });
    if (pred == domain.predicates.end()) throw Error(ErrorKind::invalid_argument, "unknown predicate " + a.predicate);
    if (pred->parameters.size() != a.args.size())
      throw Error(ErrorKind::invalid_argument, "wrong argument count for " + a.predicate);
    for (std::size_t k = 0; k < a.args.size(); ++k) {
      const auto obj = std::find_if(p.objects.begin(), p.objects.end(), [&](const TypedName& o) { return o.name == a.args[k]; });
      if (obj == p.objects.end()) throw Error(ErrorKind::invalid_argument, "unknown object " + a.args[k]);
      if (obj->type != pred->parameters[k].type)
        throw Error(ErrorKind::invalid_argument, "object " + obj->name + " has the wrong type for " + a.predicate);
    }
  };
  for (const auto& a : p.init) check_ground(a);
  for (const auto& a : p.goal) check_ground(a);
  return p;
}

StripsModel parse_pddl(std::string_view domain_text, std::string_view problem_text) {
  StripsModel m;
  m.domain = parse_domain(domain_text);
  m.problems.push_back(parse_problem(problem_text, m.domain));
  return m;
}

namespace {

std::string identifier(std::string_view name) {
  std::string s;
  for (char c : name) {
    if (c == '?') continue;
    s += (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') ? c : '_';
  }
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) s = "p" + s;
  while (!s.empty() && s.back() == '-') s.back() = '_';
  return s;
}

std::vector<std::size_t> per_type_counts(const std::vector<TypedName>& params, const Domain& d) {
  std::vector<std::size_t> c(d.types.size(), 0);
  for (const auto& p : params) ++c[*d.find_type(p.type)];
  return c;
}

}  // namespace

Translation translate(const StripsModel& model, std::optional<std::vector<Pointer>> pointers) {
  const DomainModel& dm = model.domain;
  Translation tr;
  Domain& d = tr.domain;
  d.name = identifier(dm.name);
  d.types = dm.types;
  for (auto& t : d.types) t = identifier(t);

  auto type_of = [&](const std::string& t) { return *d.find_type(identifier(t)); };
  std::map<std::string, FunctionId> function_ids;
  for (const auto& p : dm.predicates) {
    FunctionSymbol f;
    f.name = identifier(p.name);
    f.kind = FunctionKind::boolean;
    for (const auto& a : p.parameters) f.parameter_types.push_back(type_of(a.type));
    if (function_ids.count(p.name)) throw Error(ErrorKind::invalid_argument, "duplicate predicate " + p.name);
    function_ids[p.name] = static_cast<FunctionId>(d.functions.size());
    d.functions.push_back(std::move(f));
  }
  auto function_of = [&](const AtomSchema& a) {
    auto it = function_ids.find(a.predicate);
    if (it == function_ids.end()) throw Error(ErrorKind::invalid_argument, "undeclared predicate " + a.predicate);
    if (d.functions[it->second].arity() != a.args.size())
      throw Error(ErrorKind::invalid_argument, "wrong arity for predicate " + a.predicate);
    return it->second;
  };

  for (const auto& op : dm.operators) {
    ActionSchema s;
    s.name = identifier(op.name);
    for (const auto& p : op.parameters) s.parameters.push_back({identifier(p.name), type_of(p.type)});
    auto term = [&](const AtomSchema& a) {
      FluentTerm t{function_of(a), {}};
      for (std::size_t k = 0; k < a.args.size(); ++k) {
        auto it = std::find_if(op.parameters.begin(), op.parameters.end(),
                               [&](const TypedName& p) { return p.name == a.args[k]; });
        const auto idx = static_cast<std::uint32_t>(it - op.parameters.begin());
        if (s.parameters[idx].type != d.functions[t.function].parameter_types[k])
          throw Error(ErrorKind::invalid_argument, "type mismatch in operator " + op.name);
        t.args.push_back(Argument::variable(idx));
      }
      return t;
    };
    for (const auto& a : op.preconditions) s.preconditions.push_back({Expression::of(term(a)), Comparison::eq, Expression::constant(1)});
    // Deletes first, then adds; an atom both deleted and added ends up true.
    for (const auto& a : op.deletes) {
      if (std::find(op.adds.begin(), op.adds.end(), a) != op.adds.end()) continue;
      auto t = term(a);
      if (std::none_of(s.effects.begin(), s.effects.end(), [&](const Assignment& e) { return e.target == t; }))
        s.effects.push_back({std::move(t), Expression::constant(0)});
    }
    for (const auto& a : op.adds) {
      auto t = term(a);
      if (std::none_of(s.effects.begin(), s.effects.end(), [&](const Assignment& e) { return e.target == t; }))
        s.effects.push_back({std::move(t), Expression::constant(1)});
    }
    d.schemas.push_back(std::move(s));
  }

  std::vector<std::size_t> needed(d.types.size(), 0);
  for (const auto& p : dm.predicates) {
    auto c = per_type_counts(p.parameters, d);
    for (std::size_t t = 0; t < c.size(); ++t) needed[t] = std::max(needed[t], c[t]);
  }
  for (const auto& op : dm.operators) {
    auto c = per_type_counts(op.parameters, d);
    for (std::size_t t = 0; t < c.size(); ++t) needed[t] = std::max(needed[t], c[t]);
  }
  if (pointers) {
    std::vector<std::size_t> have(d.types.size(), 0);
    for (const auto& p : *pointers) ++have.at(p.type);
    for (const auto& op : dm.operators) {
      auto c = per_type_counts(op.parameters, d);
      for (std::size_t t = 0; t < c.size(); ++t)
        if (c[t] > have[t])
          throw Error(ErrorKind::arity_overflow, "operator " + op.name + " needs " + std::to_string(c[t]) +
                                                     " pointers of type " + d.types[t]);
    }
    tr.pointers = *pointers;
  } else {
    for (std::size_t t = 0; t < d.types.size(); ++t)
      for (std::size_t k = 1; k <= needed[t]; ++k)
        tr.pointers.push_back({d.types[t] + std::to_string(k), static_cast<TypeId>(t)});
  }
  for (const auto& p : tr.pointers) d.default_pointers.push_back({p.name, p.type});

  for (const auto& prob : model.problems) {
    Instance inst;
    inst.name = identifier(prob.name);
    inst.object_counts.assign(d.types.size(), 0);
    std::map<std::string, std::pair<TypeId, std::uint32_t>> objects;
    for (const auto& o : prob.objects) {
      const TypeId t = type_of(o.type);
      if (objects.count(o.name)) throw Error(ErrorKind::invalid_argument, "duplicate object " + o.name);
      objects[o.name] = {t, static_cast<std::uint32_t>(inst.object_counts[t]++)};
    }
    auto ground = [&](const AtomSchema& a) {
      const FunctionId f = function_of(a);
      std::vector<std::uint32_t> idx;
      for (std::size_t k = 0; k < a.args.size(); ++k) {
        auto it = objects.find(a.args[k]);
        if (it == objects.end()) throw Error(ErrorKind::invalid_argument, "unknown object " + a.args[k]);
        if (it->second.first != d.functions[f].parameter_types[k])
          throw Error(ErrorKind::invalid_argument, "object " + a.args[k] + " has the wrong type for " + a.predicate);
        idx.push_back(it->second.second);
      }
      return std::make_pair(f, idx);
    };
    for (const auto& a : prob.init) {
      auto [f, idx] = ground(a);
      inst.init.push_back({f, std::move(idx), 1});
    }
    PartialGoal goal;
    for (const auto& a : prob.goal) {
      auto [f, idx] = ground(a);
      FluentTerm t{f, {}};
      for (auto o : idx) t.args.push_back(Argument::object(o));
      goal.assignments.push_back({std::move(t), 1});
    }
    inst.goal = std::move(goal);
    check_instance(d, inst);
    tr.instances.push_back(std::move(inst));
  }
  return tr;
}

}  // namespace bfgp::pddl
