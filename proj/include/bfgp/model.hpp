#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace bfgp {

using Value = std::int64_t;
using TypeId = std::uint32_t;
using FunctionId = std::uint32_t;
using PointerId = std::uint32_t;
using InstructionId = std::uint32_t;

enum class FunctionKind : std::uint8_t { boolean, numeric };

struct FunctionSymbol {
  std::string name;
  FunctionKind kind = FunctionKind::numeric;
  std::vector<TypeId> parameter_types;

  std::size_t arity() const { return parameter_types.size(); }
};

// An argument slot of a fluent term. Inside a schema a variable is a schema
// parameter; inside instructions and goals it is a pointer of the extended
// domain. Objects are indices within the slot's type.
struct Argument {
  enum class Kind : std::uint8_t { variable, object };
  Kind kind = Kind::variable;
  std::uint32_t index = 0;

  static Argument variable(std::uint32_t i) { return {Kind::variable, i}; }
  static Argument object(std::uint32_t i) { return {Kind::object, i}; }
  friend bool operator==(const Argument&, const Argument&) = default;
};

struct FluentTerm {
  FunctionId function = 0;
  std::vector<Argument> args;
  friend bool operator==(const FluentTerm&, const FluentTerm&) = default;
};

// A bare variable used as a value (a pointer's current object index).
struct VariableRef {
  std::uint32_t index = 0;
  friend bool operator==(const VariableRef&, const VariableRef&) = default;
};

using Operand = std::variant<Value, VariableRef, FluentTerm>;

struct Summand {
  int sign = 1;
  Operand operand;
  friend bool operator==(const Summand&, const Summand&) = default;
};

// Signed sum of operands; the empty sum is zero.
struct Expression {
  std::vector<Summand> terms;

  static Expression constant(Value v);
  static Expression of(FluentTerm term);
  friend bool operator==(const Expression&, const Expression&) = default;
};

enum class Comparison : std::uint8_t { eq, ne, lt, le, gt, ge };

bool compare(Value lhs, Comparison op, Value rhs);
const char* to_string(Comparison op);

struct Atom {
  Expression lhs;
  Comparison op = Comparison::eq;
  Expression rhs;
  friend bool operator==(const Atom&, const Atom&) = default;
};

struct Assignment {
  FluentTerm target;
  Expression value;
  friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct Parameter {
  std::string name;
  TypeId type = 0;
  friend bool operator==(const Parameter&, const Parameter&) = default;
};

struct ActionSchema {
  std::string name;
  std::vector<Parameter> parameters;
  std::vector<Atom> preconditions;
  std::vector<Assignment> effects;
};

struct Domain {
  std::string name;
  std::vector<std::string> types;
  std::vector<FunctionSymbol> functions;
  std::vector<ActionSchema> schemas;
  // Default pointer names from an optional POINTERS line.
  std::vector<Parameter> default_pointers;

  std::optional<TypeId> find_type(std::string_view name) const;
  std::optional<FunctionId> find_function(std::string_view name) const;
  std::optional<std::size_t> find_schema(std::string_view name) const;
};

// Boolean combination of atoms, used for constraint goals.
struct Condition {
  enum class Kind : std::uint8_t { atom, conjunction, disjunction, negation, truth };
  Kind kind = Kind::truth;
  bool truth = true;
  Atom atom;
  std::vector<Condition> children;
};

struct GoalAssignment {
  FluentTerm term;
  Value value = 0;
};

struct PartialGoal {
  std::vector<GoalAssignment> assignments;
};

struct ConstraintGoal {
  Condition condition;
};

using Goal = std::variant<PartialGoal, ConstraintGoal>;

struct InitialAssignment {
  FunctionId function = 0;
  std::vector<std::uint32_t> objects;
  Value value = 0;
};

struct Instance {
  std::string name;
  std::vector<std::size_t> object_counts;  // one per type
  std::vector<InitialAssignment> init;     // omitted variables are 0
  Goal goal;
};

// Maps ground fluents to dense indices: per function, row-major over its
// argument tuple, functions laid out in declaration order.
class VariableRegistry {
 public:
  VariableRegistry() = default;
  VariableRegistry(const Domain& domain, std::span<const std::size_t> object_counts);

  std::size_t size() const { return size_; }
  std::size_t offset(FunctionId f) const { return offsets_[f]; }
  std::size_t count(FunctionId f) const { return counts_[f]; }
  std::span<const std::size_t> strides(FunctionId f) const { return strides_[f]; }
  std::span<const std::size_t> dimensions(FunctionId f) const { return dims_[f]; }
  std::size_t index(FunctionId f, std::span<const std::uint32_t> objects) const;
  FunctionId function_of(std::size_t index) const;
  std::vector<std::uint32_t> objects_of(std::size_t index) const;

 private:
  std::size_t size_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> counts_;
  std::vector<std::vector<std::size_t>> strides_;
  std::vector<std::vector<std::size_t>> dims_;
};

struct Pointer {
  std::string name;
  TypeId type = 0;
  friend bool operator==(const Pointer&, const Pointer&) = default;
};

enum class Opcode : std::uint8_t {
  inc,
  dec,
  compare_pointers,
  set,
  test,
  compare_functions,
  action,
};

struct Instruction {
  Opcode op = Opcode::inc;
  PointerId first = 0;                 // inc, dec, compare_pointers, set
  PointerId second = 0;                // compare_pointers, set
  FluentTerm lhs;                      // test, compare_functions
  FluentTerm rhs;                      // compare_functions
  std::uint32_t schema = 0;            // action
  std::vector<PointerId> binding;      // action

  bool is_ram() const { return op != Opcode::action; }
};

// A domain extended with typed pointers and the RAM instruction set. The
// instruction list is in canonical order: inc and dec per pointer, pointer
// comparisons over unordered same-type pairs, assignments over ordered
// distinct same-type pairs, tests over every type-correct pointer tuple,
// numeric comparisons over unordered pairs of distinct same-function tuples,
// then schema instantiations binding same-type parameters to distinct pointers.
class ExtendedDomain {
 public:
  ExtendedDomain() = default;
  ExtendedDomain(Domain domain, std::vector<Pointer> pointers);

  const Domain& domain() const { return domain_; }
  std::span<const Pointer> pointers() const { return pointers_; }
  std::span<const Instruction> instructions() const { return instructions_; }
  const Instruction& instruction(InstructionId id) const { return instructions_[id]; }
  std::size_t instruction_count() const { return instructions_.size(); }
  std::optional<PointerId> find_pointer(std::string_view name) const;
  std::optional<InstructionId> find_instruction(std::string_view text) const;
  const std::string& instruction_name(InstructionId id) const { return names_[id]; }

 private:
  Domain domain_;
  std::vector<Pointer> pointers_;
  std::vector<Instruction> instructions_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, InstructionId> by_name_;
};

ExtendedDomain build_extended_domain(Domain domain, std::vector<Pointer> pointers);

// Size of the canonical instruction set, computed without enumerating it.
std::size_t instruction_count_closed_form(const Domain& domain, std::span<const Pointer> pointers);

// Upper bound on the instruction set size from the argument-count formula.
std::size_t instruction_count_upper_bound(const Domain& domain, std::span<const Pointer> pointers);

struct State {
  std::vector<Value> values;      // indexed by VariableRegistry
  std::vector<Value> pointers;    // indexed by PointerId
  bool zero = false;
  bool carry = false;

  friend bool operator==(const State&, const State&) = default;
};

// Resolve a term whose variables are pointers of `pointers` in `state`.
// Returns nullopt when an argument falls outside its type's object range.
std::optional<std::size_t> resolve(const VariableRegistry& registry, const FluentTerm& term,
                                   std::span<const Value> pointers);
Value evaluate(const Expression& expr, const VariableRegistry& registry, const State& state);
bool evaluate(const Condition& condition, const VariableRegistry& registry, const State& state);

State make_initial_state(const ExtendedDomain& domain, const Instance& instance);
bool goal_satisfied(const ExtendedDomain& domain, const Instance& instance, const State& state);

// Validates an instance against a domain (type counts, assignment ranges).
void check_instance(const Domain& domain, const Instance& instance);

std::string term_to_string(const Domain& domain, const FluentTerm& term,
                           std::span<const std::string> variable_names);

}  // namespace bfgp
