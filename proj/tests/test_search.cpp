#include <doctest.h>

#include <set>

#include "bfgp/domains.hpp"
#include "bfgp/error.hpp"
#include "bfgp/model_io.hpp"
#include "bfgp/search.hpp"

using namespace bfgp;

namespace {

const char* kToyDomain = "DOMAIN toy\nTYPES pos\nFUNCTION bool mark(pos)\nSCHEMA paint(x:pos)\nEFF mark(x) := 1\n";

std::vector<Instance> toy_instances(const Domain& d, std::initializer_list<int> sizes) {
  std::vector<Instance> out;
  for (int n : sizes) {
    std::string text = "INSTANCE t" + std::to_string(n) + "\nOBJECTS pos: " + std::to_string(n) + "\nINIT\nGOAL";
    for (int k = 0; k < n; ++k) text += " mark(" + std::to_string(k) + ")=1";
    out.push_back(parse_instance(text + "\n", d));
  }
  return out;
}

bool solves_all(const Program& p, std::span<const Machine> machines) {
  for (const auto& m : machines)
    if (!m.run(p, {}).solved()) return false;
  return true;
}

// Every complete program whose gotos follow RAM instructions.
void enumerate(std::vector<Line>& lines, std::size_t i, const ExtendedDomain& ext, std::vector<Program>& out) {
  const std::size_t n = lines.size();
  if (i + 1 == n) {
    out.emplace_back(lines, ext.instruction_count());
    return;
  }
  for (InstructionId a = 0; a < ext.instruction_count(); ++a) {
    lines[i] = Line::action(a);
    enumerate(lines, i + 1, ext, out);
  }
  if (i > 0 && lines[i - 1].kind() == Line::Kind::action && ext.instruction(lines[i - 1].instruction()).is_ram()) {
    for (std::size_t t = 0; t < n; ++t) {
      if (t == i || t == i + 1) continue;
      for (int f = 0; f < 4; ++f) {
        lines[i] = Line::jump(static_cast<std::uint32_t>(t), static_cast<Feature>(f));
        enumerate(lines, i + 1, ext, out);
      }
    }
  }
  lines[i] = Line::undefined();
}

}  // namespace

TEST_CASE("successors of the worked node: no goto after a goto") {
  const auto ext = builtin_extended_domain("sorting");
  const Program p =
      parse_program("0. swap(i,j)\n1. inc(i)\n2. dec(j)\n3. goto(2,!(Yz&!Yc))\n4. --\n5. end\n", ext);
  const auto kids = successors(p, 4, ext);
  CHECK(kids.size() == 12);
  for (std::size_t a = 0; a < kids.size(); ++a) {
    CHECK(kids[a].line(4) == Line::action(static_cast<InstructionId>(a)));
    CHECK(kids[a].line(3) == p.line(3));
  }
  const Program q = parse_program("0. swap(i,j)\n1. inc(i)\n2. dec(j)\n3. cmp(i,j)\n4. --\n5. end\n", ext);
  const auto more = successors(q, 4, ext);
  CHECK(more.size() == 12 + 4 * 4);
  const Program r = parse_program("0. swap(i,j)\n1. inc(i)\n2. dec(j)\n3. swap(j,i)\n4. --\n5. end\n", ext);
  CHECK(successors(r, 4, ext).size() == 12);
  CHECK(successors(Program(6), 0, ext).size() == 12);
}

TEST_CASE("search on a small domain agrees with exhaustive enumeration") {
  const Domain d = parse_domain(kToyDomain);
  const ExtendedDomain ext(d, parse_pointer_declaration("1", d));
  REQUIRE(ext.instruction_count() == 4);
  const auto insts = toy_instances(d, {1, 2, 3});
  const auto machines = compile_instances(ext, insts);
  for (std::size_t n : {3u, 4u}) {
    std::vector<Line> lines(n, Line::undefined());
    lines[n - 1] = Line::end();
    std::vector<Program> all;
    enumerate(lines, 0, ext, all);
    std::size_t solvers = 0;
    for (const auto& p : all) solvers += solves_all(p, machines);

    std::set<std::string> seen;
    bool duplicate = false;
    SearchConfig cfg;
    cfg.lines = n;
    cfg.on_generate = [&](const Program& p) {
      duplicate = duplicate || !seen.insert(encode(p, ext.instruction_count()).to_hex()).second;
    };
    const auto result = synthesize(ext, insts, cfg);
    CHECK_FALSE(duplicate);
    CHECK(result.solution.has_value() == (solvers > 0));
    CHECK(result.stats.termination == (solvers > 0 ? Termination::solved : Termination::exhausted));
    // Children of one node never exceed |A| + 4(n-2).
    CHECK(result.stats.generated <= result.stats.expanded * (ext.instruction_count() + 4 * (n - 2)));
    if (result.solution) CHECK(solves_all(*result.solution, machines));
    MESSAGE("n=" << n << " complete programs " << all.size() << ", solvers " << solvers);
  }
}

TEST_CASE("exhausting the space reports no solution") {
  const Domain d = parse_domain(kToyDomain);
  const ExtendedDomain ext(d, parse_pointer_declaration("1", d));
  const auto insts = toy_instances(d, {2});
  SearchConfig cfg;
  cfg.lines = 3;
  const auto result = synthesize(ext, insts, cfg);
  CHECK_FALSE(result.solution);
  CHECK(result.stats.termination == Termination::exhausted);
  CHECK(result.stats.expanded > 0);
}

TEST_CASE("expansion keys match full evaluation and programming is monotone") {
  const auto ext = builtin_extended_domain("reverse");
  const auto insts = generate_instances("reverse", InstanceSet::synthesis, std::nullopt, 1);
  for (const char* key : {"f5,f7", "f1,f2,f3,f4", "f6", "f9,f8"}) {
    SearchConfig cfg;
    cfg.lines = 6;
    cfg.key = parse_eval_key(key);
    const Search search(ext, insts, cfg);
    std::vector<Program> frontier{Program(6)};
    for (int depth = 0; depth < 3 && !frontier.empty(); ++depth) {
      std::vector<Program> next;
      for (const auto& p : frontier) {
        const auto ex = search.expand(p, 0);
        const auto f2 = eval_structural(p).undefined;
        for (const auto& child : ex.children) {
          CHECK(eval_structural(child.program).undefined == f2 - 1);
          const auto full = search.evaluate(child.program);
          CHECK_FALSE(full.dead_end);
          CHECK(full.key == child.key);
          if (next.size() < 40) next.push_back(child.program);
        }
      }
      frontier = std::move(next);
    }
  }
}

TEST_CASE("synthesized programs revalidate on their instances") {
  for (const char* name : {"triangular-sum", "select", "gripper"}) {
    const auto ext = builtin_extended_domain(name);
    const auto insts = generate_instances(name, InstanceSet::synthesis, std::nullopt, 1);
    SearchConfig cfg;
    cfg.lines = builtin_domain(name).synthesis_lines;
    cfg.key = {EvalFunction::f5};
    cfg.limits.timeout_seconds = 120;
    const auto result = synthesize(ext, insts, cfg);
    REQUIRE_MESSAGE(result.solution, name);
    CHECK(result.solution->size() == cfg.lines);
    const auto machines = compile_instances(ext, insts);
    CHECK(solves_all(*result.solution, machines));
    CHECK(result.stats.generated >= result.stats.expanded);
  }
}

TEST_CASE("limits end the search") {
  const auto ext = builtin_extended_domain("sorting");
  const auto insts = generate_instances("sorting", InstanceSet::synthesis, std::nullopt, 1);
  SearchConfig cfg;
  cfg.lines = 12;
  cfg.limits.timeout_seconds = 0.2;
  const auto timed = synthesize(ext, insts, cfg);
  CHECK_FALSE(timed.solution);
  CHECK(timed.stats.termination == Termination::time_limit);
  CHECK(timed.stats.seconds < 5.0);

  cfg.limits.timeout_seconds = 3600;
  cfg.limits.max_nodes = 50;
  const auto capped = synthesize(ext, insts, cfg);
  CHECK_FALSE(capped.solution);
  CHECK(capped.stats.termination == Termination::node_limit);
  CHECK(capped.stats.peak_open > 50);
}

TEST_CASE("search configuration errors") {
  const auto ext = builtin_extended_domain("sorting");
  const auto insts = generate_instances("sorting", InstanceSet::synthesis, 2, 1);
  SearchConfig cfg;
  cfg.lines = 0;
  CHECK_THROWS_AS(Search(ext, insts, cfg), Error);
  cfg.lines = 4;
  cfg.key = parse_eval_key("f1,f2,f3,f4,f5");
  CHECK_THROWS_AS(Search(ext, insts, cfg), Error);

  const Instance constraint =
      parse_instance("INSTANCE s\nOBJECTS pos: 2\nINIT vector(0)=2\nGOALEXPR vector(0) <= vector(1)\n", ext.domain());
  const std::vector<Instance> cs{constraint};
  cfg.key = {EvalFunction::f5};
  try {
    Search s(ext, cs, cfg);
    FAIL("expected GoalNotPartialState");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::goal_not_partial_state);
  }
  cfg.key = {EvalFunction::f4, EvalFunction::f7};
  CHECK_NOTHROW(Search(ext, cs, cfg));
}
