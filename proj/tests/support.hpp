#pragma once

// Random generators shared by the property tests.

#include <algorithm>
#include <string>
#include <vector>

#include "bfgp/interpreter.hpp"
#include "bfgp/model.hpp"
#include "bfgp/program.hpp"
#include "bfgp/rng.hpp"

namespace bfgp::test {

inline Domain random_domain(Rng& rng) {
  Domain d;
  d.name = "random";
  const auto types = 1 + rng.below(3);
  for (std::uint64_t t = 0; t < types; ++t) d.types.push_back("t" + std::to_string(t));
  const auto functions = 1 + rng.below(4);
  for (std::uint64_t f = 0; f < functions; ++f) {
    FunctionSymbol s;
    s.name = "f" + std::to_string(f);
    s.kind = rng.below(2) ? FunctionKind::numeric : FunctionKind::boolean;
    const auto arity = rng.below(3);
    for (std::uint64_t a = 0; a < arity; ++a) s.parameter_types.push_back(static_cast<TypeId>(rng.below(types)));
    d.functions.push_back(s);
  }
  const auto schemas = rng.below(3);
  for (std::uint64_t k = 0; k < schemas; ++k) {
    ActionSchema s;
    s.name = "a" + std::to_string(k);
    const auto params = rng.below(3);
    for (std::uint64_t p = 0; p < params; ++p)
      s.parameters.push_back({"x" + std::to_string(p), static_cast<TypeId>(rng.below(types))});
    // One precondition and one effect on a compatible function when possible.
    for (FunctionId f = 0; f < d.functions.size(); ++f) {
      const auto& fs = d.functions[f];
      FluentTerm term{f, {}};
      bool ok = true;
      for (TypeId pt : fs.parameter_types) {
        auto it = std::find_if(s.parameters.begin(), s.parameters.end(), [&](const Parameter& p) { return p.type == pt; });
        if (it == s.parameters.end()) {
          ok = false;
          break;
        }
        term.args.push_back(Argument::variable(static_cast<std::uint32_t>(it - s.parameters.begin())));
      }
      if (!ok) continue;
      if (s.preconditions.empty())
        s.preconditions.push_back({Expression::of(term), Comparison::lt, Expression::constant(5)});
      else if (s.effects.empty())
        s.effects.push_back({term, Expression::constant(static_cast<Value>(rng.below(2)))});
    }
    d.schemas.push_back(s);
  }
  return d;
}

inline std::vector<Pointer> random_pointers(const Domain& d, Rng& rng) {
  std::vector<Pointer> ptrs;
  for (TypeId t = 0; t < d.types.size(); ++t) {
    const auto count = rng.below(3);
    for (std::uint64_t k = 0; k < count; ++k)
      ptrs.push_back({d.types[t] + "_" + std::to_string(k), t});
  }
  if (ptrs.empty()) ptrs.push_back({d.types[0] + "_0", 0});
  return ptrs;
}

// Random total init and a random partial goal over ground fluents.
inline Instance random_instance(const Domain& d, Rng& rng, Value bound, std::size_t max_objects = 4) {
  Instance inst;
  inst.name = "random";
  for (std::size_t t = 0; t < d.types.size(); ++t) inst.object_counts.push_back(1 + rng.below(max_objects));
  VariableRegistry reg(d, inst.object_counts);
  PartialGoal goal;
  for (std::size_t x = 0; x < reg.size(); ++x) {
    const FunctionId f = reg.function_of(x);
    const Value limit = d.functions[f].kind == FunctionKind::boolean ? 1 : std::min<Value>(bound, 9);
    const auto objects = reg.objects_of(x);
    if (rng.below(2)) inst.init.push_back({f, objects, static_cast<Value>(rng.below(static_cast<std::uint64_t>(limit) + 1))});
    if (rng.below(3) == 0) {
      FluentTerm term{f, {}};
      for (auto o : objects) term.args.push_back(Argument::object(o));
      goal.assignments.push_back({term, static_cast<Value>(rng.below(static_cast<std::uint64_t>(limit) + 1))});
    }
  }
  inst.goal = goal;
  return inst;
}

// Each line independently undefined, an instruction, or a valid goto.
inline Program random_program(std::size_t n, std::size_t instruction_count, Rng& rng, bool complete = false) {
  std::vector<Line> lines(n);
  lines[n - 1] = Line::end();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto pick = rng.below(complete ? 4 : 5);
    if (pick == 4) {
      lines[i] = Line::undefined();
    } else if (pick == 3 && n >= 3) {
      const std::size_t target = transition_target(i, rng.below(n - 2));
      lines[i] = Line::jump(static_cast<std::uint32_t>(target), static_cast<Feature>(rng.below(4)));
    } else {
      lines[i] = Line::action(static_cast<InstructionId>(rng.below(instruction_count)));
    }
  }
  return Program(std::move(lines), instruction_count);
}

inline FluentTerm bind_term(const FluentTerm& t, const std::vector<PointerId>& binding) {
  FluentTerm out{t.function, {}};
  for (const auto& a : t.args)
    out.args.push_back(a.kind == Argument::Kind::variable ? Argument::variable(binding[a.index]) : a);
  return out;
}

inline Expression bind_expr(const Expression& e, const std::vector<PointerId>& binding) {
  Expression out;
  for (const auto& s : e.terms) {
    Operand op = s.operand;
    if (auto* t = std::get_if<FluentTerm>(&op)) op = bind_term(*t, binding);
    if (auto* v = std::get_if<VariableRef>(&op)) op = VariableRef{binding[v->index]};
    out.terms.push_back({s.sign, op});
  }
  return out;
}

struct OracleStep {
  bool exceeded = false;
  State state;
};

// One instruction applied through the model-level evaluator.
inline OracleStep oracle_apply(const ExtendedDomain& ext, const Machine& m, const State& s, InstructionId id, Value bound) {
  const Instruction& ins = ext.instruction(id);
  const auto& reg = m.registry();
  const auto limits = m.pointer_limits();
  OracleStep out{false, s};
  State& n = out.state;
  auto set_flags = [&](Value res) {
    n.zero = res == 0;
    n.carry = res > 0;
  };
  auto value_of = [&](const FluentTerm& t) { return s.values[*resolve(reg, t, s.pointers)]; };
  switch (ins.op) {
    case Opcode::inc:
    case Opcode::dec: {
      const Value moved = s.pointers[ins.first] + (ins.op == Opcode::inc ? 1 : -1);
      if (moved >= 0 && moved < limits[ins.first]) {
        n.pointers[ins.first] = moved;
        set_flags(moved);
      } else {
        set_flags(0);
      }
      break;
    }
    case Opcode::compare_pointers: set_flags(s.pointers[ins.first] - s.pointers[ins.second]); break;
    case Opcode::set:
      n.pointers[ins.first] = s.pointers[ins.second];
      set_flags(s.pointers[ins.second]);
      break;
    case Opcode::test: set_flags(value_of(ins.lhs)); break;
    case Opcode::compare_functions: set_flags(value_of(ins.lhs) - value_of(ins.rhs)); break;
    case Opcode::action: {
      const auto& schema = ext.domain().schemas[ins.schema];
      for (const auto& pre : schema.preconditions) {
        Condition c{Condition::Kind::atom};
        c.atom = {bind_expr(pre.lhs, ins.binding), pre.op, bind_expr(pre.rhs, ins.binding)};
        if (!evaluate(c, reg, s)) return out;
      }
      for (const auto& eff : schema.effects) {
        const Value v = evaluate(bind_expr(eff.value, ins.binding), reg, s);
        if (v < 0 || v > bound) {
          out.exceeded = true;
          return out;
        }
        n.values[*resolve(reg, bind_term(eff.target, ins.binding), s.pointers)] = v;
      }
      break;
    }
  }
  return out;
}

}  // namespace bfgp::test
