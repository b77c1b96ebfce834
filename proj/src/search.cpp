#include "bfgp/search.hpp"

#include <algorithm>
#include <chrono>
#include <deque>

#include "bfgp/error.hpp"

namespace bfgp {

const char* to_string(Termination t) {
  switch (t) {
    case Termination::solved: return "solved";
    case Termination::exhausted: return "exhausted";
    case Termination::time_limit: return "time_limit";
    case Termination::node_limit: return "node_limit";
  }
  return "?";
}

std::vector<Program> successors(const Program& program, std::size_t line, const ExtendedDomain& domain) {
  std::vector<Program> out;
  const std::size_t n = program.size();
  for (InstructionId a = 0; a < domain.instruction_count(); ++a) out.push_back(program.with_action(line, a));
  if (line == 0) return out;
  const Line prev = program.line(line - 1);
  if (prev.kind() != Line::Kind::action || !domain.instruction(prev.instruction()).is_ram()) return out;
  for (std::size_t t = 0; t < n; ++t) {
    if (!goto_target_valid(line, t, n)) continue;
    for (int f = 0; f < 4; ++f) out.push_back(program.with_goto(line, t, static_cast<Feature>(f)));
  }
  return out;
}

Search::Search(const ExtendedDomain& domain, std::span<const Instance> instances, SearchConfig config)
    : domain_(domain), machines_(compile_instances(domain, instances)), config_(std::move(config)) {
  if (config_.lines == 0) throw Error(ErrorKind::invalid_argument, "the program needs at least one line");
  if (config_.key.empty() || config_.key.size() > kMaxKeyLength)
    throw Error(ErrorKind::invalid_argument, "evaluation key must list 1 to 4 functions");
  for (auto f : config_.key) {
    if (f == EvalFunction::f5 || f == EvalFunction::f8 || f == EvalFunction::f9) need_f5_ = true;
    if (!is_structural(f)) need_performance_ = true;
  }
  if (need_f5_)
    for (const auto& m : machines_)
      if (!m.goal_is_partial_state())
        throw Error(ErrorKind::goal_not_partial_state, "instance " + m.instance().name + " has a constraint goal");
}

std::array<std::int64_t, kMaxKeyLength> Search::make_key(const Program& program,
                                                         const PerformanceEvaluation& perf) const {
  const EvaluationVector v = combine(eval_structural(program), perf, config_.f9_weight);
  std::array<std::int64_t, kMaxKeyLength> key{};
  for (std::size_t k = 0; k < config_.key.size(); ++k) key[k] = v[config_.key[k]];
  return key;
}

NodeEvaluation Search::evaluate(const Program& program) const {
  NodeEvaluation out;
  const PerformanceEvaluation perf = eval_performance(program, machines_, config_.execution, need_f5_);
  out.dead_end = perf.dead_end;
  if (perf.dead_end) return out;
  out.solved = perf.solved_all;
  for (const auto& o : perf.outcomes)
    if (o.kind == OutcomeKind::reached_undefined) out.programmable_line = std::max(out.programmable_line, o.line);
  out.key = make_key(program, perf);
  return out;
}

Search::Expansion Search::expand(const Program& program, std::uint64_t next_sequence) const {
  Expansion ex;
  const auto& exec = config_.execution;
  std::vector<ExecutionOutcome> parent;
  parent.reserve(machines_.size());
  std::size_t line = 0;
  bool any_open = false;
  for (const auto& m : machines_) {
    parent.push_back(m.run(program, exec));
    const auto& o = parent.back();
    if (o.failed()) throw Error(ErrorKind::invalid_argument, "expanding a dead-end program");
    if (o.kind == OutcomeKind::reached_undefined) {
      line = std::max(line, o.line);
      any_open = true;
    }
  }
  if (!any_open) return ex;

  // Outcomes of instances that did not stop at `line` carry over unchanged.
  PerformanceEvaluation base;
  base.f4 = static_cast<std::int64_t>(program.size()) - 1;
  bool base_solved = true;
  std::vector<std::size_t> resumed;
  for (std::size_t t = 0; t < machines_.size(); ++t) {
    const auto& o = parent[t];
    if (o.kind == OutcomeKind::reached_undefined && o.line == line) {
      resumed.push_back(t);
      continue;
    }
    base_solved = base_solved && o.solved();
    accumulate(base, program, machines_[t], o, need_f5_);
  }

  for (Program& child : successors(program, line, domain_)) {
    ++ex.generated;
    if (config_.on_generate) config_.on_generate(child);
    PerformanceEvaluation perf = base;
    bool dead = false;
    bool solved = base_solved;
    for (std::size_t t : resumed) {
      const ExecutionOutcome o = machines_[t].resume(child, parent[t], exec);
      if (o.failed()) {
        dead = true;
        break;
      }
      solved = solved && o.solved();
      if (need_performance_) accumulate(perf, child, machines_[t], o, need_f5_);
    }
    if (dead) continue;
    if (solved) {
      ex.solution = std::move(child);
      return ex;
    }
    SearchNode node{std::move(child), {}, next_sequence++};
    node.key = make_key(node.program, perf);
    ex.children.push_back(std::move(node));
  }
  return ex;
}

namespace {

// Open list without per-node allocations: keys and lines sit in chunked
// arenas indexed by slot, popped slots are recycled, and the heap holds
// slot indices only.
class OpenList {
 public:
  OpenList(std::size_t key_length, std::size_t lines) : k_(key_length), n_(lines) {}

  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

  void push(const Program& program, const std::array<std::int64_t, kMaxKeyLength>& key) {
    std::uint32_t id;
    if (!free_.empty()) {
      // Reuse a popped slot so the arenas track the open list, not the generated total.
      id = free_.back();
      free_.pop_back();
      std::copy(key.begin(), key.begin() + static_cast<std::ptrdiff_t>(k_), keys_.begin() + id * k_);
      std::size_t i = id * n_;
      for (Line l : program.lines()) lines_[i++] = l.code();
      order_[id] = sequence_++;
    } else {
      id = static_cast<std::uint32_t>(order_.size());
      keys_.insert(keys_.end(), key.begin(), key.begin() + static_cast<std::ptrdiff_t>(k_));
      for (Line l : program.lines()) lines_.push_back(l.code());
      order_.push_back(sequence_++);
    }
    heap_.push_back(id);
    std::push_heap(heap_.begin(), heap_.end(), Worse{this});
  }

  Program pop(std::size_t instruction_count) {
    std::pop_heap(heap_.begin(), heap_.end(), Worse{this});
    const std::uint32_t id = heap_.back();
    heap_.pop_back();
    free_.push_back(id);
    std::vector<Line> lines(n_);
    for (std::size_t i = 0; i < n_; ++i) lines[i] = Line::from_code(lines_[id * n_ + i]);
    return Program(std::move(lines), instruction_count);
  }

 private:
  // Smallest key first, then first generated.
  struct Worse {
    const OpenList* self;
    bool operator()(std::uint32_t a, std::uint32_t b) const {
      for (std::size_t k = 0; k < self->k_; ++k) {
        const auto ka = self->keys_[a * self->k_ + k];
        const auto kb = self->keys_[b * self->k_ + k];
        if (ka != kb) return ka > kb;
      }
      return self->order_[a] > self->order_[b];
    }
  };

  std::size_t k_, n_;
  std::uint64_t sequence_ = 0;
  std::deque<std::int64_t> keys_;
  std::deque<std::uint32_t> lines_;
  std::deque<std::uint64_t> order_;  // generation sequence per slot
  std::vector<std::uint32_t> heap_;
  std::vector<std::uint32_t> free_;
};

}  // namespace

SearchResult Search::run() {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  SearchResult result;
  auto& stats = result.stats;
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };
  auto finish = [&](Termination t) {
    stats.termination = t;
    stats.seconds = elapsed();
    return result;
  };

  Program root(config_.lines);
  const NodeEvaluation root_eval = evaluate(root);
  stats.generated = 1;
  if (root_eval.solved) {
    result.solution = root;
    return finish(Termination::solved);
  }
  if (root_eval.dead_end) return finish(Termination::exhausted);

  OpenList open(config_.key.size(), config_.lines);
  open.push(root, root_eval.key);
  std::uint64_t sequence = 1;
  while (!open.empty()) {
    if (elapsed() > config_.limits.timeout_seconds) return finish(Termination::time_limit);
    const Program program = open.pop(domain_.instruction_count());
    ++stats.expanded;
    Expansion ex = expand(program, sequence);
    stats.generated += ex.generated;
    if (ex.solution) {
      result.solution = std::move(ex.solution);
      return finish(Termination::solved);
    }
    stats.dead_ends += ex.generated - ex.children.size();
    sequence += ex.children.size();
    for (const auto& child : ex.children) open.push(child.program, child.key);
    stats.peak_open = std::max<std::uint64_t>(stats.peak_open, open.size());
    if (open.size() > config_.limits.max_nodes) return finish(Termination::node_limit);
  }
  return finish(Termination::exhausted);
}

SearchResult synthesize(const ExtendedDomain& domain, std::span<const Instance> instances, const SearchConfig& config) {
  Search search(domain, instances, config);
  return search.run();
}

}  // namespace bfgp
