#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "bfgp/evaluation.hpp"
#include "bfgp/interpreter.hpp"
#include "bfgp/program.hpp"

namespace bfgp {

struct SearchLimits {
  double timeout_seconds = 3600.0;
  std::size_t max_nodes = 50'000'000;  // open-list watermark standing in for a memory cap
};

struct SearchConfig {
  std::size_t lines = 0;
  std::vector<EvalFunction> key{EvalFunction::f5, EvalFunction::f7};
  ExecutionConfig execution;
  SearchLimits limits;
  std::int64_t f9_weight = 5;
  // Called with every generated child, dead ends included (testing hook).
  std::function<void(const Program&)> on_generate;
};

enum class Termination : std::uint8_t { solved, exhausted, time_limit, node_limit };
const char* to_string(Termination t);

struct SearchStats {
  std::uint64_t expanded = 0;
  std::uint64_t generated = 0;
  std::uint64_t dead_ends = 0;
  std::uint64_t peak_open = 0;
  double seconds = 0.0;
  Termination termination = Termination::exhausted;
};

struct SearchResult {
  std::optional<Program> solution;
  SearchStats stats;
};

inline constexpr std::size_t kMaxKeyLength = 4;

struct SearchNode {
  Program program;
  std::array<std::int64_t, kMaxKeyLength> key{};
  std::uint64_t sequence = 0;
};

// Candidate programs for line `line` in canonical order: every instruction,
// then gotos by (target, feature) if the previous line is a RAM instruction.
std::vector<Program> successors(const Program& program, std::size_t line, const ExtendedDomain& domain);

struct NodeEvaluation {
  bool dead_end = false;
  bool solved = false;
  std::size_t programmable_line = 0;  // max undefined line reached
  std::array<std::int64_t, kMaxKeyLength> key{};
};

class Search {
 public:
  Search(const ExtendedDomain& domain, std::span<const Instance> instances, SearchConfig config);

  NodeEvaluation evaluate(const Program& program) const;

  struct Expansion {
    std::vector<SearchNode> children;  // dead ends removed, keys filled
    std::size_t generated = 0;
    std::optional<Program> solution;
  };
  // Children of `program` with sequence numbers starting at `next_sequence`.
  Expansion expand(const Program& program, std::uint64_t next_sequence) const;

  SearchResult run();

 private:
  std::array<std::int64_t, kMaxKeyLength> make_key(const Program& program, const PerformanceEvaluation& perf) const;

  const ExtendedDomain& domain_;
  std::vector<Machine> machines_;
  SearchConfig config_;
  bool need_f5_ = false;
  bool need_performance_ = false;
};

SearchResult synthesize(const ExtendedDomain& domain, std::span<const Instance> instances, const SearchConfig& config);

}  // namespace bfgp
