#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bfgp/model.hpp"
#include "bfgp/program.hpp"

namespace bfgp {

enum class OutcomeKind : std::uint8_t { solved, failed, reached_undefined };
enum class FailureReason : std::uint8_t { none, incorrect, infinite_loop, bound_exceeded, step_limit };

const char* to_string(OutcomeKind kind);
const char* to_string(FailureReason reason);

struct ExecutionConfig {
  Value value_bound = 100;
  bool infinite_detection = true;
  std::uint64_t step_limit = 10'000'000;
  bool record_plan = false;
};

struct ExecutionOutcome {
  OutcomeKind kind = OutcomeKind::failed;
  FailureReason reason = FailureReason::none;
  std::size_t line = 0;           // line where execution stopped
  State state;                    // state when execution stopped
  std::uint64_t steps = 0;        // executed lines, gotos included
  std::uint64_t plan_length = 0;  // executed actions and RAM instructions
  std::vector<InstructionId> plan;

  bool solved() const { return kind == OutcomeKind::solved; }
  bool failed() const { return kind == OutcomeKind::failed; }
};

enum class StepResult : std::uint8_t { advanced, end, undefined, bound_exceeded };

struct Cursor {
  State state;
  std::size_t line = 0;
};

// One instance compiled against an extended domain: fluent terms become
// offset/stride arithmetic over the instance's variable registry.
class Machine {
 public:
  static constexpr std::size_t kMaxArity = 6;

  Machine(const ExtendedDomain& domain, const Instance& instance);

  const ExtendedDomain& domain() const { return *domain_; }
  const Instance& instance() const { return *instance_; }
  const VariableRegistry& registry() const { return registry_; }
  const State& initial_state() const { return initial_; }
  std::span<const Value> pointer_limits() const { return pointer_limits_; }

  ExecutionOutcome run(const Program& program, const ExecutionConfig& config) const;
  // Continue a run that stopped at an undefined line which `program` now defines.
  ExecutionOutcome resume(const Program& program, const ExecutionOutcome& from, const ExecutionConfig& config) const;

  StepResult step(const Program& program, Cursor& cursor, Value value_bound) const;
  // Applies one instruction; nullopt if an effect leaves [0, bound].
  std::optional<State> apply(const State& state, InstructionId id, Value value_bound) const;

  bool goal_satisfied(const State& state) const;
  bool goal_is_partial_state() const { return partial_goal_; }
  // Sum of squared differences to the goal values; partial goals only.
  std::int64_t goal_deviation(const State& state) const;

 private:
  struct Address {
    std::uint32_t base = 0;
    std::uint8_t arity = 0;
    std::array<std::uint8_t, kMaxArity> pointer{};
    std::array<std::uint32_t, kMaxArity> stride{};
  };
  struct Operand {
    enum class Kind : std::uint8_t { constant, pointer, fluent };
    Kind kind = Kind::constant;
    std::int8_t sign = 1;
    std::uint8_t pointer = 0;
    Value constant = 0;
    Address address;
  };
  struct Range {
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
  };
  struct CompiledAtom {
    Range lhs, rhs;
    Comparison op = Comparison::eq;
  };
  struct CompiledEffect {
    Address target;
    Range value;
  };
  struct CompiledInstruction {
    Opcode op = Opcode::inc;
    std::uint8_t first = 0;
    std::uint8_t second = 0;
    Address lhs, rhs;
    Range pre, eff;
  };
  struct Run;

  static std::size_t at(const Address& a, const Value* pointers) {
    std::size_t idx = a.base;
    for (std::uint8_t k = 0; k < a.arity; ++k) idx += static_cast<std::size_t>(pointers[a.pointer[k]]) * a.stride[k];
    return idx;
  }
  Address compile_term(const FluentTerm& term, std::span<const PointerId> binding) const;
  Range compile_expression(const Expression& expr, std::span<const PointerId> binding);
  Value eval(Range r, const State& s) const;
  bool applicable(const CompiledInstruction& ins, const State& s) const;

  template <bool Detect, bool Record>
  ExecutionOutcome execute(const Program& program, ExecutionOutcome cursor, const ExecutionConfig& config) const;

  const ExtendedDomain* domain_;
  const Instance* instance_;
  VariableRegistry registry_;
  State initial_;
  std::vector<Value> pointer_limits_;
  std::vector<Operand> operands_;
  std::vector<CompiledAtom> atoms_;
  std::vector<CompiledEffect> effects_;
  std::vector<CompiledInstruction> instructions_;
  std::size_t max_effects_ = 0;

  bool partial_goal_ = true;
  std::size_t goal_begin_ = 0;  // dense goal window within the value array
  std::vector<Value> goal_values_;
  std::vector<Value> goal_mask_;
  std::vector<std::pair<Address, Value>> pointer_goals_;
};

// Convenience wrapper over Machine for one-off runs.
ExecutionOutcome run(const Program& program, const ExtendedDomain& domain, const Instance& instance,
                     const ExecutionConfig& config = {});

std::vector<Machine> compile_instances(const ExtendedDomain& domain, std::span<const Instance> instances);

// Runs every instance in order; with `stop_at_failure` the list ends at the
// first failed outcome.
std::vector<ExecutionOutcome> run_all(const Program& program, std::span<const Machine> machines,
                                      const ExecutionConfig& config, bool stop_at_failure = false);

// Replays a plan from the initial state; nullopt if an effect leaves the bound.
std::optional<State> replay(const Machine& machine, std::span<const InstructionId> plan, Value value_bound);

}  // namespace bfgp
