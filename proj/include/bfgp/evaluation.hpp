#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bfgp/interpreter.hpp"
#include "bfgp/program.hpp"

namespace bfgp {

enum class EvalFunction : std::uint8_t { f1 = 1, f2, f3, f4, f5, f6, f7, f8, f9 };

EvalFunction parse_eval_function(std::string_view name);
// Comma-separated key such as "f5,f7".
std::vector<EvalFunction> parse_eval_key(std::string_view text);
std::string to_string(EvalFunction f);
bool is_structural(EvalFunction f);

struct StructuralEvaluation {
  std::int64_t gotos = 0;         // f1
  std::int64_t undefined = 0;     // f2
  std::int64_t repeated = 0;      // f3
  std::int64_t nesting = 0;       // f7
};

// One pass over the lines; nesting uses a difference array over goto spans.
StructuralEvaluation eval_structural(const Program& program);

struct PerformanceEvaluation {
  bool dead_end = false;        // some instance failed
  bool solved_all = false;
  std::int64_t f4 = 0;
  std::int64_t f5 = 0;
  std::int64_t f6 = 0;
  std::vector<ExecutionOutcome> outcomes;  // ends at the first failure
};

// Runs the program on every instance. f5 requires partial-state goals and
// raises GoalNotPartialState otherwise when `need_f5` is set.
PerformanceEvaluation eval_performance(const Program& program, std::span<const Machine> machines,
                                       const ExecutionConfig& config, bool need_f5 = true);

// Aggregates per-instance outcomes that did not fail.
void accumulate(PerformanceEvaluation& eval, const Program& program, const Machine& machine,
                const ExecutionOutcome& outcome, bool need_f5);

struct EvaluationVector {
  std::array<std::int64_t, 9> f{};
  std::int64_t operator[](EvalFunction fn) const { return f[static_cast<std::size_t>(fn) - 1]; }
};

EvaluationVector combine(const StructuralEvaluation& s, const PerformanceEvaluation& p, std::int64_t f9_weight = 5);

}  // namespace bfgp
