#include "bfgp/evaluation.hpp"

#include <algorithm>
#include <charconv>

#include "bfgp/error.hpp"

namespace bfgp {

EvalFunction parse_eval_function(std::string_view name) {
  if (name.size() == 2 && (name[0] == 'f' || name[0] == 'F') && name[1] >= '1' && name[1] <= '9')
    return static_cast<EvalFunction>(name[1] - '0');
  throw Error(ErrorKind::invalid_argument, "unknown evaluation function '" + std::string(name) + "'");
}

std::vector<EvalFunction> parse_eval_key(std::string_view text) {
  std::vector<EvalFunction> key;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto stop = text.find(',', start);
    if (stop == std::string_view::npos) stop = text.size();
    key.push_back(parse_eval_function(text.substr(start, stop - start)));
    start = stop + 1;
  }
  if (key.empty()) throw Error(ErrorKind::invalid_argument, "empty evaluation key");
  return key;
}

std::string to_string(EvalFunction f) { return "f" + std::to_string(static_cast<int>(f)); }

bool is_structural(EvalFunction f) {
  return f == EvalFunction::f1 || f == EvalFunction::f2 || f == EvalFunction::f3 || f == EvalFunction::f7;
}

StructuralEvaluation eval_structural(const Program& program) {
  StructuralEvaluation e;
  const std::size_t n = program.size();
  std::vector<std::int64_t> cover(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const Line l = program.line(i);
    switch (l.kind()) {
      case Line::Kind::undefined: ++e.undefined; break;
      case Line::Kind::action:
        for (std::size_t j = 0; j < i; ++j)
          if (program.line(j) == l) {
            ++e.repeated;
            break;
          }
        break;
      case Line::Kind::jump: {
        ++e.gotos;
        const std::size_t lo = std::min<std::size_t>(i, l.target());
        const std::size_t hi = std::max<std::size_t>(i, l.target());
        if (hi > lo + 1) {
          cover[lo + 1] += 1;
          cover[hi] -= 1;
        }
        break;
      }
      case Line::Kind::end: break;
    }
  }
  std::int64_t running = 0;
  for (std::size_t i = 0; i < n; ++i) {
    running += cover[i];
    if (program.line(i).kind() == Line::Kind::jump) e.nesting = std::max(e.nesting, 1 + running);
  }
  return e;
}

void accumulate(PerformanceEvaluation& eval, const Program& program, const Machine& machine,
                const ExecutionOutcome& outcome, bool need_f5) {
  const auto last = static_cast<std::int64_t>(program.size()) - 1;
  std::int64_t reached = outcome.kind == OutcomeKind::solved ? last : static_cast<std::int64_t>(outcome.line);
  eval.f4 = std::min(eval.f4, last - reached);
  eval.f6 += static_cast<std::int64_t>(outcome.plan_length);
  if (need_f5 && outcome.kind != OutcomeKind::solved) eval.f5 += machine.goal_deviation(outcome.state);
}

PerformanceEvaluation eval_performance(const Program& program, std::span<const Machine> machines,
                                       const ExecutionConfig& config, bool need_f5) {
  if (need_f5)
    for (const auto& m : machines)
      if (!m.goal_is_partial_state())
        throw Error(ErrorKind::goal_not_partial_state, "f5 needs partial-state goals (" + m.instance().name + ")");
  PerformanceEvaluation eval;
  eval.f4 = static_cast<std::int64_t>(program.size()) - 1;
  eval.outcomes.reserve(machines.size());
  bool all = true;
  for (const auto& m : machines) {
    eval.outcomes.push_back(m.run(program, config));
    const auto& out = eval.outcomes.back();
    if (out.failed()) {
      eval.dead_end = true;
      return eval;
    }
    all = all && out.solved();
    accumulate(eval, program, m, out, need_f5);
  }
  eval.solved_all = all;
  return eval;
}

EvaluationVector combine(const StructuralEvaluation& s, const PerformanceEvaluation& p, std::int64_t f9_weight) {
  EvaluationVector v;
  v.f = {s.gotos, s.undefined, s.repeated, p.f4, p.f5, p.f6, s.nesting, p.f5 + p.f6, f9_weight * p.f5 + p.f6};
  return v;
}

}  // namespace bfgp
