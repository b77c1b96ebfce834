#include "bfgp/interpreter.hpp"

#include <algorithm>
#include <limits>

#include "bfgp/error.hpp"
#include "bfgp/kernels.hpp"

namespace bfgp {

const char* to_string(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::solved: return "solved";
    case OutcomeKind::failed: return "failed";
    case OutcomeKind::reached_undefined: return "reached_undefined";
  }
  return "?";
}

const char* to_string(FailureReason reason) {
  switch (reason) {
    case FailureReason::none: return "none";
    case FailureReason::incorrect: return "incorrect";
    case FailureReason::infinite_loop: return "infinite_loop";
    case FailureReason::bound_exceeded: return "bound_exceeded";
    case FailureReason::step_limit: return "step_limit";
  }
  return "?";
}

namespace {

inline std::uint64_t mix(std::size_t index, Value v) {
  std::uint64_t x = static_cast<std::uint64_t>(index) * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(v);
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

std::uint64_t full_hash(const State& s) {
  std::uint64_t h = 0;
  for (std::size_t i = 0; i < s.values.size(); ++i) h += mix(i, s.values[i]);
  for (std::size_t p = 0; p < s.pointers.size(); ++p) h += mix(s.values.size() + p, s.pointers[p]);
  return h;
}

}  // namespace

Machine::Machine(const ExtendedDomain& domain, const Instance& instance)
    : domain_(&domain), instance_(&instance), registry_(domain.domain(), instance.object_counts) {
  initial_ = make_initial_state(domain, instance);
  if (domain.pointers().size() > std::numeric_limits<std::uint8_t>::max())
    throw Error(ErrorKind::invalid_argument, "too many pointers");
  for (const auto& p : domain.pointers()) pointer_limits_.push_back(static_cast<Value>(instance.object_counts[p.type]));
  for (const auto& f : domain.domain().functions)
    if (f.arity() > kMaxArity) throw Error(ErrorKind::invalid_argument, "function " + f.name + " has too many parameters");

  for (const auto& ins : domain.instructions()) {
    CompiledInstruction c;
    c.op = ins.op;
    c.first = static_cast<std::uint8_t>(ins.first);
    c.second = static_cast<std::uint8_t>(ins.second);
    if (ins.op == Opcode::test || ins.op == Opcode::compare_functions) c.lhs = compile_term(ins.lhs, {});
    if (ins.op == Opcode::compare_functions) c.rhs = compile_term(ins.rhs, {});
    if (ins.op == Opcode::action) {
      const auto& schema = domain.domain().schemas[ins.schema];
      c.pre.begin = static_cast<std::uint32_t>(atoms_.size());
      for (const auto& atom : schema.preconditions) {
        CompiledAtom a;
        a.lhs = compile_expression(atom.lhs, ins.binding);
        a.rhs = compile_expression(atom.rhs, ins.binding);
        a.op = atom.op;
        atoms_.push_back(a);
      }
      c.pre.end = static_cast<std::uint32_t>(atoms_.size());
      c.eff.begin = static_cast<std::uint32_t>(effects_.size());
      for (const auto& eff : schema.effects)
        effects_.push_back({compile_term(eff.target, ins.binding), compile_expression(eff.value, ins.binding)});
      c.eff.end = static_cast<std::uint32_t>(effects_.size());
      max_effects_ = std::max(max_effects_, schema.effects.size());
    }
    instructions_.push_back(c);
  }

  if (const auto* partial = std::get_if<PartialGoal>(&instance.goal)) {
    std::vector<std::pair<std::size_t, Value>> fixed;
    for (const auto& g : partial->assignments) {
      bool ground = std::all_of(g.term.args.begin(), g.term.args.end(),
                                [](const Argument& a) { return a.kind == Argument::Kind::object; });
      if (ground) {
        std::vector<std::uint32_t> objects;
        for (const auto& a : g.term.args) objects.push_back(a.index);
        fixed.emplace_back(registry_.index(g.term.function, objects), g.value);
      } else {
        pointer_goals_.emplace_back(compile_term(g.term, {}), g.value);
      }
    }
    if (!fixed.empty()) {
      auto [lo, hi] = std::minmax_element(fixed.begin(), fixed.end());
      goal_begin_ = lo->first;
      goal_values_.assign(hi->first - lo->first + 1, 0);
      goal_mask_.assign(goal_values_.size(), 0);
      for (const auto& [idx, v] : fixed) {
        const std::size_t k = idx - goal_begin_;
        if (goal_mask_[k] && goal_values_[k] != v) {
          Address a;
          a.base = static_cast<std::uint32_t>(idx);
          pointer_goals_.emplace_back(a, v);
          continue;
        }
        goal_values_[k] = v;
        goal_mask_[k] = -1;
      }
    }
  } else {
    partial_goal_ = false;
  }
}

Machine::Address Machine::compile_term(const FluentTerm& term, std::span<const PointerId> binding) const {
  Address a;
  const auto dims = registry_.dimensions(term.function);
  const auto strides = registry_.strides(term.function);
  std::size_t base = registry_.offset(term.function);
  for (std::size_t k = 0; k < term.args.size(); ++k) {
    const auto& arg = term.args[k];
    if (arg.kind == Argument::Kind::object) {
      if (arg.index >= dims[k]) throw Error(ErrorKind::invalid_argument, "object index out of range in a term");
      base += arg.index * strides[k];
    } else {
      PointerId p = binding.empty() ? arg.index : binding[arg.index];
      a.pointer[a.arity] = static_cast<std::uint8_t>(p);
      a.stride[a.arity] = static_cast<std::uint32_t>(strides[k]);
      ++a.arity;
    }
  }
  a.base = static_cast<std::uint32_t>(base);
  return a;
}

Machine::Range Machine::compile_expression(const Expression& expr, std::span<const PointerId> binding) {
  Range r{static_cast<std::uint32_t>(operands_.size()), 0};
  for (const auto& s : expr.terms) {
    Operand o;
    o.sign = static_cast<std::int8_t>(s.sign);
    if (const auto* c = std::get_if<Value>(&s.operand)) {
      o.kind = Operand::Kind::constant;
      o.constant = *c;
    } else if (const auto* v = std::get_if<VariableRef>(&s.operand)) {
      o.kind = Operand::Kind::pointer;
      o.pointer = static_cast<std::uint8_t>(binding.empty() ? v->index : binding[v->index]);
    } else {
      o.kind = Operand::Kind::fluent;
      o.address = compile_term(std::get<FluentTerm>(s.operand), binding);
    }
    operands_.push_back(o);
  }
  r.end = static_cast<std::uint32_t>(operands_.size());
  return r;
}

Value Machine::eval(Range r, const State& s) const {
  Value total = 0;
  for (std::uint32_t k = r.begin; k < r.end; ++k) {
    const Operand& o = operands_[k];
    Value v;
    switch (o.kind) {
      case Operand::Kind::constant: v = o.constant; break;
      case Operand::Kind::pointer: v = s.pointers[o.pointer]; break;
      default: v = s.values[at(o.address, s.pointers.data())]; break;
    }
    total += o.sign * v;
  }
  return total;
}

bool Machine::applicable(const CompiledInstruction& ins, const State& s) const {
  for (std::uint32_t k = ins.pre.begin; k < ins.pre.end; ++k) {
    const auto& a = atoms_[k];
    if (!compare(eval(a.lhs, s), a.op, eval(a.rhs, s))) return false;
  }
  return true;
}

bool Machine::goal_satisfied(const State& state) const {
  if (!partial_goal_) return evaluate(std::get<ConstraintGoal>(instance_->goal).condition, registry_, state);
  if (!goal_mask_.empty()) {
    std::span<const Value> window(state.values.data() + goal_begin_, goal_mask_.size());
    if (kernels::masked_mismatches(window, goal_values_, goal_mask_) != 0) return false;
  }
  for (const auto& [addr, v] : pointer_goals_)
    if (state.values[at(addr, state.pointers.data())] != v) return false;
  return true;
}

std::int64_t Machine::goal_deviation(const State& state) const {
  if (!partial_goal_) throw Error(ErrorKind::goal_not_partial_state, "instance " + instance_->name + " has a constraint goal");
  std::int64_t total = 0;
  if (!goal_mask_.empty()) {
    std::span<const Value> window(state.values.data() + goal_begin_, goal_mask_.size());
    total = kernels::masked_squared_deviation(window, goal_values_, goal_mask_);
  }
  for (const auto& [addr, v] : pointer_goals_) {
    const Value d = state.values[at(addr, state.pointers.data())] - v;
    total += d * d;
  }
  return total;
}

template <bool Detect, bool Record>
ExecutionOutcome Machine::execute(const Program& program, ExecutionOutcome cur, const ExecutionConfig& config) const {
  State& s = cur.state;
  const Line* lines = program.lines().data();
  const std::size_t nvalues = s.values.size();
  const Value bound = config.value_bound;
  const std::uint64_t step_limit = config.step_limit;
  std::size_t line = cur.line;
  std::uint64_t steps = cur.steps;
  std::uint64_t plan_length = cur.plan_length;
  std::vector<Value> scratch(max_effects_);

  // Brent cycle detection over the configurations seen right after a backward
  // jump; every non-terminating run takes backward jumps forever, and the
  // sequence of such configurations is itself deterministic.
  std::uint64_t hash = 0;
  State snapshot;
  std::size_t snapshot_line = 0;
  std::uint64_t snapshot_hash = 0;
  bool have_snapshot = false;
  std::uint64_t power = 1, lam = 0;
  if constexpr (Detect) hash = full_hash(s);

  auto finish = [&](OutcomeKind kind, FailureReason reason) {
    cur.kind = kind;
    cur.reason = reason;
    cur.line = line;
    cur.steps = steps;
    cur.plan_length = plan_length;
    return std::move(cur);
  };
  auto set_pointer = [&](std::uint8_t p, Value v) {
    if constexpr (Detect) hash += mix(nvalues + p, v) - mix(nvalues + p, s.pointers[p]);
    s.pointers[p] = v;
  };
  auto set_flags = [&](Value res) {
    s.zero = res == 0;
    s.carry = res > 0;
  };

  while (true) {
    const Line l = lines[line];
    switch (l.kind()) {
      case Line::Kind::undefined: return finish(OutcomeKind::reached_undefined, FailureReason::none);
      case Line::Kind::end:
        if (goal_satisfied(s)) return finish(OutcomeKind::solved, FailureReason::none);
        return finish(OutcomeKind::failed, FailureReason::incorrect);
      case Line::Kind::jump: {
        if (steps >= step_limit) return finish(OutcomeKind::failed, FailureReason::step_limit);
        ++steps;
        if (feature_of(s.zero, s.carry) == l.feature()) {
          ++line;
          break;
        }
        const std::size_t target = l.target();
        const bool backward = target < line;
        line = target;
        if constexpr (Detect) {
          if (!backward) break;
          if (have_snapshot && snapshot_hash == hash && snapshot_line == line && snapshot.zero == s.zero &&
              snapshot.carry == s.carry && snapshot.values == s.values && snapshot.pointers == s.pointers)
            return finish(OutcomeKind::failed, FailureReason::infinite_loop);
          if (!have_snapshot || ++lam == power) {
            if (have_snapshot) power *= 2;
            lam = 0;
            have_snapshot = true;
            snapshot.values = s.values;
            snapshot.pointers = s.pointers;
            snapshot.zero = s.zero;
            snapshot.carry = s.carry;
            snapshot_line = line;
            snapshot_hash = hash;
          }
        } else {
          (void)backward;
        }
        break;
      }
      case Line::Kind::action: {
        if (steps >= step_limit) return finish(OutcomeKind::failed, FailureReason::step_limit);
        const InstructionId id = l.instruction();
        const CompiledInstruction& ins = instructions_[id];
        switch (ins.op) {
          case Opcode::inc: {
            const Value next = s.pointers[ins.first] + 1;
            if (next < pointer_limits_[ins.first]) {
              set_pointer(ins.first, next);
              set_flags(next);
            } else {
              set_flags(0);
            }
            break;
          }
          case Opcode::dec: {
            const Value next = s.pointers[ins.first] - 1;
            if (next >= 0) {
              set_pointer(ins.first, next);
              set_flags(next);
            } else {
              set_flags(0);
            }
            break;
          }
          case Opcode::compare_pointers: set_flags(s.pointers[ins.first] - s.pointers[ins.second]); break;
          case Opcode::set: {
            const Value v = s.pointers[ins.second];
            set_pointer(ins.first, v);
            set_flags(v);
            break;
          }
          case Opcode::test: set_flags(s.values[at(ins.lhs, s.pointers.data())]); break;
          case Opcode::compare_functions:
            set_flags(s.values[at(ins.lhs, s.pointers.data())] - s.values[at(ins.rhs, s.pointers.data())]);
            break;
          case Opcode::action: {
            if (!applicable(ins, s)) break;
            const std::uint32_t count = ins.eff.end - ins.eff.begin;
            for (std::uint32_t k = 0; k < count; ++k) {
              const Value v = eval(effects_[ins.eff.begin + k].value, s);
              if (v < 0 || v > bound) return finish(OutcomeKind::failed, FailureReason::bound_exceeded);
              scratch[k] = v;
            }
            for (std::uint32_t k = 0; k < count; ++k) {
              const std::size_t idx = at(effects_[ins.eff.begin + k].target, s.pointers.data());
              if constexpr (Detect) hash += mix(idx, scratch[k]) - mix(idx, s.values[idx]);
              s.values[idx] = scratch[k];
            }
            break;
          }
        }
        ++steps;
        ++plan_length;
        if constexpr (Record) cur.plan.push_back(id);
        ++line;
        break;
      }
    }
  }
}

ExecutionOutcome Machine::run(const Program& program, const ExecutionConfig& config) const {
  ExecutionOutcome start;
  start.state = initial_;
  return resume(program, start, config);
}

ExecutionOutcome Machine::resume(const Program& program, const ExecutionOutcome& from,
                                 const ExecutionConfig& config) const {
  if (from.line >= program.size()) throw Error(ErrorKind::invalid_argument, "resume line outside the program");
  if (config.infinite_detection)
    return config.record_plan ? execute<true, true>(program, from, config) : execute<true, false>(program, from, config);
  return config.record_plan ? execute<false, true>(program, from, config) : execute<false, false>(program, from, config);
}

StepResult Machine::step(const Program& program, Cursor& cursor, Value value_bound) const {
  const Line l = program.line(cursor.line);
  if (l.kind() == Line::Kind::undefined) return StepResult::undefined;
  if (l.kind() == Line::Kind::end) return StepResult::end;
  // A step limit of one stops the run as soon as the next line is due.
  ExecutionConfig config;
  config.value_bound = value_bound;
  config.infinite_detection = false;
  config.step_limit = 1;
  ExecutionOutcome from;
  from.state = std::move(cursor.state);
  from.line = cursor.line;
  ExecutionOutcome out = execute<false, false>(program, std::move(from), config);
  cursor.state = std::move(out.state);
  if (out.reason == FailureReason::bound_exceeded) return StepResult::bound_exceeded;
  cursor.line = out.line;
  return StepResult::advanced;
}

std::optional<State> Machine::apply(const State& state, InstructionId id, Value value_bound) const {
  const Program p(std::vector<Line>{Line::action(id), Line::end()}, instructions_.size());
  Cursor c{state, 0};
  if (step(p, c, value_bound) == StepResult::bound_exceeded) return std::nullopt;
  return std::move(c.state);
}

ExecutionOutcome run(const Program& program, const ExtendedDomain& domain, const Instance& instance,
                     const ExecutionConfig& config) {
  return Machine(domain, instance).run(program, config);
}

std::vector<Machine> compile_instances(const ExtendedDomain& domain, std::span<const Instance> instances) {
  std::vector<Machine> machines;
  machines.reserve(instances.size());
  for (const auto& inst : instances) machines.emplace_back(domain, inst);
  return machines;
}

std::vector<ExecutionOutcome> run_all(const Program& program, std::span<const Machine> machines,
                                      const ExecutionConfig& config, bool stop_at_failure) {
  std::vector<ExecutionOutcome> out;
  out.reserve(machines.size());
  for (const auto& m : machines) {
    out.push_back(m.run(program, config));
    if (stop_at_failure && out.back().failed()) break;
  }
  return out;
}

std::optional<State> replay(const Machine& machine, std::span<const InstructionId> plan, Value value_bound) {
  State s = machine.initial_state();
  for (auto id : plan) {
    auto next = machine.apply(s, id, value_bound);
    if (!next) return std::nullopt;
    s = std::move(*next);
  }
  return s;
}

}  // namespace bfgp
