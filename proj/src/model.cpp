#include "bfgp/model.hpp"

#include <algorithm>
#include <numeric>

#include "bfgp/error.hpp"

namespace bfgp {

Expression Expression::constant(Value v) {
  Expression e;
  if (v != 0) e.terms.push_back({1, v});
  return e;
}

Expression Expression::of(FluentTerm term) {
  Expression e;
  e.terms.push_back({1, std::move(term)});
  return e;
}

bool compare(Value lhs, Comparison op, Value rhs) {
  switch (op) {
    case Comparison::eq: return lhs == rhs;
    case Comparison::ne: return lhs != rhs;
    case Comparison::lt: return lhs < rhs;
    case Comparison::le: return lhs <= rhs;
    case Comparison::gt: return lhs > rhs;
    case Comparison::ge: return lhs >= rhs;
  }
  return false;
}

const char* to_string(Comparison op) {
  switch (op) {
    case Comparison::eq: return "=";
    case Comparison::ne: return "!=";
    case Comparison::lt: return "<";
    case Comparison::le: return "<=";
    case Comparison::gt: return ">";
    case Comparison::ge: return ">=";
  }
  return "?";
}

namespace {

template <typename T>
std::optional<std::uint32_t> find_named(const std::vector<T>& items, std::string_view name) {
  for (std::size_t i = 0; i < items.size(); ++i)
    if (items[i].name == name) return static_cast<std::uint32_t>(i);
  return std::nullopt;
}

}  // namespace

std::optional<TypeId> Domain::find_type(std::string_view name) const {
  for (std::size_t i = 0; i < types.size(); ++i)
    if (types[i] == name) return static_cast<TypeId>(i);
  return std::nullopt;
}

std::optional<FunctionId> Domain::find_function(std::string_view name) const {
  return find_named(functions, name);
}

std::optional<std::size_t> Domain::find_schema(std::string_view name) const {
  return find_named(schemas, name);
}

VariableRegistry::VariableRegistry(const Domain& domain, std::span<const std::size_t> object_counts) {
  if (object_counts.size() != domain.types.size())
    throw Error(ErrorKind::missing_assignment, "object counts do not cover every type");
  for (const auto& f : domain.functions) {
    std::vector<std::size_t> dims;
    for (TypeId t : f.parameter_types) dims.push_back(object_counts[t]);
    std::vector<std::size_t> strides(dims.size(), 1);
    for (std::size_t k = dims.size(); k-- > 1;) strides[k - 1] = strides[k] * dims[k];
    std::size_t count = 1;
    for (auto d : dims) count *= d;
    offsets_.push_back(size_);
    counts_.push_back(count);
    strides_.push_back(std::move(strides));
    dims_.push_back(std::move(dims));
    size_ += count;
  }
}

std::size_t VariableRegistry::index(FunctionId f, std::span<const std::uint32_t> objects) const {
  const auto& dims = dims_[f];
  if (objects.size() != dims.size())
    throw Error(ErrorKind::invalid_argument, "wrong number of arguments for function");
  std::size_t idx = offsets_[f];
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (objects[k] >= dims[k]) throw Error(ErrorKind::invalid_argument, "object index out of range");
    idx += objects[k] * strides_[f][k];
  }
  return idx;
}

FunctionId VariableRegistry::function_of(std::size_t index) const {
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), index);
  // Skip zero-sized functions that share an offset with the owner.
  auto f = static_cast<FunctionId>(std::distance(offsets_.begin(), it) - 1);
  while (counts_[f] == 0) --f;
  return f;
}

std::vector<std::uint32_t> VariableRegistry::objects_of(std::size_t index) const {
  FunctionId f = function_of(index);
  std::size_t rest = index - offsets_[f];
  std::vector<std::uint32_t> objects(dims_[f].size());
  for (std::size_t k = 0; k < objects.size(); ++k) {
    objects[k] = static_cast<std::uint32_t>(rest / strides_[f][k]);
    rest %= strides_[f][k];
  }
  return objects;
}

namespace {

std::vector<std::vector<PointerId>> pointers_by_type(const Domain& domain, std::span<const Pointer> pointers) {
  std::vector<std::vector<PointerId>> by_type(domain.types.size());
  for (std::size_t i = 0; i < pointers.size(); ++i) by_type[pointers[i].type].push_back(static_cast<PointerId>(i));
  return by_type;
}

// Lexicographic product over per-slot candidate lists.
template <typename Visit>
void for_each_tuple(const std::vector<const std::vector<PointerId>*>& slots, Visit&& visit) {
  for (const auto* s : slots)
    if (s->empty()) return;
  std::vector<std::size_t> pos(slots.size(), 0);
  std::vector<PointerId> tuple(slots.size());
  while (true) {
    for (std::size_t k = 0; k < slots.size(); ++k) tuple[k] = (*slots[k])[pos[k]];
    visit(tuple);
    std::size_t k = slots.size();
    while (k > 0) {
      --k;
      if (++pos[k] < slots[k]->size()) break;
      pos[k] = 0;
      if (k == 0) return;
    }
    if (slots.empty()) return;
  }
}

FluentTerm pointer_term(FunctionId f, const std::vector<PointerId>& tuple) {
  FluentTerm t{f, {}};
  for (auto p : tuple) t.args.push_back(Argument::variable(p));
  return t;
}

std::string join_pointers(std::span<const Pointer> pointers, const std::vector<PointerId>& ids) {
  std::string s;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (k) s += ',';
    s += pointers[ids[k]].name;
  }
  return s;
}

std::string instruction_text(const Domain& domain, std::span<const Pointer> pointers, const Instruction& ins) {
  std::vector<std::string> names;
  for (const auto& p : pointers) names.push_back(p.name);
  switch (ins.op) {
    case Opcode::inc: return "inc(" + pointers[ins.first].name + ")";
    case Opcode::dec: return "dec(" + pointers[ins.first].name + ")";
    case Opcode::compare_pointers:
      return "cmp(" + pointers[ins.first].name + "," + pointers[ins.second].name + ")";
    case Opcode::set: return "set(" + pointers[ins.first].name + "," + pointers[ins.second].name + ")";
    case Opcode::test: return "test(" + term_to_string(domain, ins.lhs, names) + ")";
    case Opcode::compare_functions:
      return "cmp(" + term_to_string(domain, ins.lhs, names) + "," + term_to_string(domain, ins.rhs, names) + ")";
    case Opcode::action:
      return domain.schemas[ins.schema].name + "(" + join_pointers(pointers, ins.binding) + ")";
  }
  return {};
}

bool distinct_within_type(const std::vector<PointerId>& tuple) {
  for (std::size_t a = 0; a < tuple.size(); ++a)
    for (std::size_t b = a + 1; b < tuple.size(); ++b)
      if (tuple[a] == tuple[b]) return false;
  return true;
}

}  // namespace

ExtendedDomain::ExtendedDomain(Domain domain, std::vector<Pointer> pointers)
    : domain_(std::move(domain)), pointers_(std::move(pointers)) {
  for (const auto& p : pointers_) {
    if (p.type >= domain_.types.size()) throw Error(ErrorKind::invalid_argument, "pointer " + p.name + " has unknown type");
    if (std::count_if(pointers_.begin(), pointers_.end(), [&](const Pointer& q) { return q.name == p.name; }) > 1)
      throw Error(ErrorKind::invalid_argument, "duplicate pointer " + p.name);
  }
  const auto by_type = pointers_by_type(domain_, pointers_);
  const auto n = static_cast<PointerId>(pointers_.size());

  auto add = [&](Instruction ins) { instructions_.push_back(std::move(ins)); };
  for (PointerId p = 0; p < n; ++p) add({Opcode::inc, p});
  for (PointerId p = 0; p < n; ++p) add({Opcode::dec, p});
  for (PointerId p = 0; p < n; ++p)
    for (PointerId q = p + 1; q < n; ++q)
      if (pointers_[p].type == pointers_[q].type) add({Opcode::compare_pointers, p, q});
  for (PointerId p = 0; p < n; ++p)
    for (PointerId q = 0; q < n; ++q)
      if (p != q && pointers_[p].type == pointers_[q].type) add({Opcode::set, p, q});

  auto tuples_for = [&](const FunctionSymbol& f) {
    std::vector<const std::vector<PointerId>*> slots;
    for (TypeId t : f.parameter_types) slots.push_back(&by_type[t]);
    std::vector<std::vector<PointerId>> out;
    for_each_tuple(slots, [&](const std::vector<PointerId>& tuple) { out.push_back(tuple); });
    return out;
  };
  for (FunctionId f = 0; f < domain_.functions.size(); ++f)
    for (const auto& tuple : tuples_for(domain_.functions[f])) {
      Instruction ins{Opcode::test};
      ins.lhs = pointer_term(f, tuple);
      add(std::move(ins));
    }
  for (FunctionId f = 0; f < domain_.functions.size(); ++f) {
    const auto& fn = domain_.functions[f];
    if (fn.kind != FunctionKind::numeric || fn.arity() == 0) continue;
    const auto tuples = tuples_for(fn);
    for (std::size_t a = 0; a < tuples.size(); ++a)
      for (std::size_t b = a + 1; b < tuples.size(); ++b) {
        Instruction ins{Opcode::compare_functions};
        ins.lhs = pointer_term(f, tuples[a]);
        ins.rhs = pointer_term(f, tuples[b]);
        add(std::move(ins));
      }
  }
  for (std::uint32_t s = 0; s < domain_.schemas.size(); ++s) {
    const auto& schema = domain_.schemas[s];
    std::vector<const std::vector<PointerId>*> slots;
    for (const auto& param : schema.parameters) slots.push_back(&by_type[param.type]);
    std::size_t made = 0;
    for_each_tuple(slots, [&](const std::vector<PointerId>& tuple) {
      if (!distinct_within_type(tuple)) return;
      Instruction ins{Opcode::action};
      ins.schema = s;
      ins.binding = tuple;
      add(std::move(ins));
      ++made;
    });
    if (made == 0)
      throw Error(ErrorKind::unsatisfiable_arity,
                  "schema " + schema.name + " cannot be instantiated with the declared pointers");
  }

  for (InstructionId id = 0; id < instructions_.size(); ++id) {
    names_.push_back(instruction_text(domain_, pointers_, instructions_[id]));
    by_name_.emplace(names_.back(), id);
  }
}

std::optional<PointerId> ExtendedDomain::find_pointer(std::string_view name) const {
  return find_named(pointers_, name);
}

std::optional<InstructionId> ExtendedDomain::find_instruction(std::string_view text) const {
  auto it = by_name_.find(std::string(text));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

ExtendedDomain build_extended_domain(Domain domain, std::vector<Pointer> pointers) {
  return ExtendedDomain(std::move(domain), std::move(pointers));
}

std::size_t instruction_count_closed_form(const Domain& domain, std::span<const Pointer> pointers) {
  std::vector<std::size_t> k(domain.types.size(), 0);
  for (const auto& p : pointers) ++k[p.type];
  std::size_t total = 2 * pointers.size();
  for (auto c : k) total += c * (c - (c > 0)) / 2 + c * (c - (c > 0));
  for (const auto& f : domain.functions) {
    std::size_t tuples = 1;
    for (TypeId t : f.parameter_types) tuples *= k[t];
    total += tuples;
    if (f.kind == FunctionKind::numeric && f.arity() > 0) total += tuples * (tuples - (tuples > 0)) / 2;
  }
  for (const auto& s : domain.schemas) {
    std::vector<std::size_t> used(domain.types.size(), 0);
    std::size_t ways = 1;
    for (const auto& param : s.parameters) {
      auto& u = used[param.type];
      ways *= (k[param.type] > u) ? k[param.type] - u : 0;
      ++u;
    }
    total += ways;
  }
  return total;
}

std::size_t instruction_count_upper_bound(const Domain& domain, std::span<const Pointer> pointers) {
  const std::size_t z = pointers.size();
  auto power = [](std::size_t b, std::size_t e) {
    std::size_t r = 1;
    while (e--) r *= b;
    return r;
  };
  std::size_t total = 2 * z * z;
  for (const auto& f : domain.functions) total += power(z, 2 * f.arity());
  for (const auto& s : domain.schemas) total += power(z, s.parameters.size());
  return total;
}

std::optional<std::size_t> resolve(const VariableRegistry& registry, const FluentTerm& term,
                                   std::span<const Value> pointers) {
  const auto dims = registry.dimensions(term.function);
  const auto strides = registry.strides(term.function);
  if (term.args.size() != dims.size()) return std::nullopt;
  std::size_t idx = registry.offset(term.function);
  for (std::size_t k = 0; k < dims.size(); ++k) {
    const auto& a = term.args[k];
    Value o = a.kind == Argument::Kind::object ? static_cast<Value>(a.index)
                                               : (a.index < pointers.size() ? pointers[a.index] : -1);
    if (o < 0 || static_cast<std::size_t>(o) >= dims[k]) return std::nullopt;
    idx += static_cast<std::size_t>(o) * strides[k];
  }
  return idx;
}

Value evaluate(const Expression& expr, const VariableRegistry& registry, const State& state) {
  Value total = 0;
  for (const auto& s : expr.terms) {
    Value v = 0;
    if (const auto* c = std::get_if<Value>(&s.operand)) {
      v = *c;
    } else if (const auto* p = std::get_if<VariableRef>(&s.operand)) {
      v = state.pointers.at(p->index);
    } else {
      auto idx = resolve(registry, std::get<FluentTerm>(s.operand), state.pointers);
      if (!idx) throw Error(ErrorKind::invalid_argument, "term argument out of range");
      v = state.values[*idx];
    }
    total += s.sign * v;
  }
  return total;
}

bool evaluate(const Condition& condition, const VariableRegistry& registry, const State& state) {
  switch (condition.kind) {
    case Condition::Kind::truth: return condition.truth;
    case Condition::Kind::atom:
      return compare(evaluate(condition.atom.lhs, registry, state), condition.atom.op,
                     evaluate(condition.atom.rhs, registry, state));
    case Condition::Kind::negation: return !evaluate(condition.children.at(0), registry, state);
    case Condition::Kind::conjunction:
      return std::all_of(condition.children.begin(), condition.children.end(),
                         [&](const Condition& c) { return evaluate(c, registry, state); });
    case Condition::Kind::disjunction:
      return std::any_of(condition.children.begin(), condition.children.end(),
                         [&](const Condition& c) { return evaluate(c, registry, state); });
  }
  return false;
}

void check_instance(const Domain& domain, const Instance& instance) {
  if (instance.object_counts.size() != domain.types.size())
    throw Error(ErrorKind::missing_assignment, "instance " + instance.name + " lacks object counts for some type");
  for (std::size_t t = 0; t < domain.types.size(); ++t)
    if (instance.object_counts[t] == 0)
      throw Error(ErrorKind::invalid_argument, "type " + domain.types[t] + " has no objects");
  VariableRegistry registry(domain, instance.object_counts);
  for (const auto& a : instance.init) {
    if (a.function >= domain.functions.size()) throw Error(ErrorKind::invalid_argument, "unknown function in init");
    registry.index(a.function, a.objects);
    if (a.value < 0) throw Error(ErrorKind::invalid_argument, "negative initial value");
    if (domain.functions[a.function].kind == FunctionKind::boolean && a.value > 1)
      throw Error(ErrorKind::invalid_argument, "boolean variable assigned " + std::to_string(a.value));
  }
}

State make_initial_state(const ExtendedDomain& domain, const Instance& instance) {
  check_instance(domain.domain(), instance);
  VariableRegistry registry(domain.domain(), instance.object_counts);
  State state;
  state.values.assign(registry.size(), 0);
  for (const auto& a : instance.init) state.values[registry.index(a.function, a.objects)] = a.value;
  state.pointers.assign(domain.pointers().size(), 0);
  return state;
}

bool goal_satisfied(const ExtendedDomain& domain, const Instance& instance, const State& state) {
  VariableRegistry registry(domain.domain(), instance.object_counts);
  if (const auto* partial = std::get_if<PartialGoal>(&instance.goal)) {
    for (const auto& g : partial->assignments) {
      auto idx = resolve(registry, g.term, state.pointers);
      if (!idx || state.values[*idx] != g.value) return false;
    }
    return true;
  }
  return evaluate(std::get<ConstraintGoal>(instance.goal).condition, registry, state);
}

std::string term_to_string(const Domain& domain, const FluentTerm& term,
                           std::span<const std::string> variable_names) {
  std::string s = domain.functions.at(term.function).name + "(";
  for (std::size_t k = 0; k < term.args.size(); ++k) {
    if (k) s += ',';
    const auto& a = term.args[k];
    if (a.kind == Argument::Kind::object)
      s += std::to_string(a.index);
    else
      s += a.index < variable_names.size() ? variable_names[a.index] : "?" + std::to_string(a.index);
  }
  return s + ")";
}

}  // namespace bfgp
