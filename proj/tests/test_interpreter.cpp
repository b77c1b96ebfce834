#include <doctest.h>

#include "bfgp/domains.hpp"
#include "bfgp/error.hpp"
#include "bfgp/interpreter.hpp"
#include "bfgp/model_io.hpp"
#include "support.hpp"

using namespace bfgp;

namespace {

struct Fixture {
  ExtendedDomain ext;
  Instance instance;
};

std::vector<Fixture> fixtures(Rng& rng) {
  std::vector<Fixture> out;
  for (const auto& name : builtin_domain_names()) {
    auto ext = builtin_extended_domain(name);
    for (int k = 0; k < 3; ++k) out.push_back({ext, test::random_instance(ext.domain(), rng, 100)});
  }
  int made = 0;
  while (made < 30) {
    const Domain d = test::random_domain(rng);
    try {
      ExtendedDomain ext(d, test::random_pointers(d, rng));
      out.push_back({ext, test::random_instance(d, rng, 100)});
      ++made;
    } catch (const Error&) {
    }
  }
  return out;
}

}  // namespace

TEST_CASE("flags and effects agree with the step oracle over 1e5 random steps") {
  Rng rng(17);
  const auto fx = fixtures(rng);
  const Value bound = 100;
  std::size_t steps = 0, noops = 0;
  while (steps < 100000) {
    for (const auto& f : fx) {
      const Machine m(f.ext, f.instance);
      State s = m.initial_state();
      for (std::size_t z = 0; z < s.pointers.size(); ++z)
        s.pointers[z] = static_cast<Value>(rng.below(static_cast<std::uint64_t>(m.pointer_limits()[z])));
      for (int k = 0; k < 100; ++k, ++steps) {
        const auto id = static_cast<InstructionId>(rng.below(f.ext.instruction_count()));
        const auto expected = test::oracle_apply(f.ext, m, s, id, bound);
        const auto got = m.apply(s, id, bound);
        REQUIRE(got.has_value() == !expected.exceeded);
        if (!got) {
          s = m.initial_state();
          continue;
        }
        REQUIRE(*got == expected.state);
        if (f.ext.instruction(id).is_ram()) {
          // Flag soundness restated on the result register.
          CHECK_FALSE((got->zero && got->carry));
        } else {
          CHECK(got->zero == s.zero);
          CHECK(got->carry == s.carry);
          if (*got == s) ++noops;
        }
        s = *got;
      }
    }
  }
  CHECK(noops > 0);
}

TEST_CASE("inapplicable actions leave the state bit-identical") {
  const auto ext = builtin_extended_domain("corridor");
  const Instance inst = parse_instance("INSTANCE c\nOBJECTS pos: 3\nINIT vector(1)=2\nGOAL vector(0)=2\n", ext.domain());
  const Machine m(ext, inst);
  State s = m.initial_state();
  s.zero = true;
  const auto left = *ext.find_instruction("vector-left(i)");
  const auto after = m.apply(s, left, 100);
  REQUIRE(after.has_value());
  CHECK(*after == s);

  const auto grip = builtin_extended_domain("gripper");
  const auto insts = generate_instances("gripper", InstanceSet::synthesis, 1, 1);
  const Machine g(grip, insts[0]);
  const auto drop = *grip.find_instruction("drop(b1,r1,g1)");
  CHECK(*g.apply(g.initial_state(), drop, 100) == g.initial_state());
}

TEST_CASE("effects read the pre-state and may exceed the bound") {
  const auto ext = builtin_extended_domain("reverse");
  const Instance inst = parse_instance("INSTANCE r\nOBJECTS pos: 2\nINIT vector(0)=4 vector(1)=9\nGOAL vector(0)=9\n", ext.domain());
  const Machine m(ext, inst);
  State s = m.initial_state();
  s.pointers[1] = 1;
  const auto swapped = m.apply(s, *ext.find_instruction("swap(i,j)"), 100);
  REQUIRE(swapped);
  CHECK(swapped->values == std::vector<Value>{9, 4});

  const auto tsum = builtin_extended_domain("triangular-sum");
  const Instance t = parse_instance("INSTANCE t\nOBJECTS pos: 2\nINIT vector(0)=3\nGOAL vector(0)=4\n", tsum.domain());
  const Machine mt(tsum, t);
  const auto inc = *tsum.find_instruction("vector-inc(a)");
  CHECK(mt.apply(mt.initial_state(), inc, 3) == std::nullopt);
  CHECK(mt.apply(mt.initial_state(), inc, 4).has_value());
  const auto program = parse_program("0. vector-inc(a)\n1. goto(0,!(Yz&Yc))\n2. end\n", tsum);
  ExecutionConfig cfg;
  cfg.value_bound = 10;
  const auto o = mt.run(program, cfg);
  CHECK(o.failed());
  CHECK(o.reason == FailureReason::bound_exceeded);
}

TEST_CASE("pointer moves off the object range are no-ops with a zero result") {
  const auto ext = builtin_extended_domain("sorting");
  const Instance inst = parse_instance("INSTANCE s\nOBJECTS pos: 2\nINIT vector(0)=1\nGOAL vector(0)=1\n", ext.domain());
  const Machine m(ext, inst);
  const State s0 = m.initial_state();
  const auto dec = m.apply(s0, *ext.find_instruction("dec(i)"), 100);
  CHECK(dec->pointers == s0.pointers);
  CHECK(dec->zero);
  CHECK_FALSE(dec->carry);
  const auto inc = m.apply(s0, *ext.find_instruction("inc(i)"), 100);
  CHECK(inc->pointers[0] == 1);
  CHECK(inc->carry);
  const auto inc2 = m.apply(*inc, *ext.find_instruction("inc(i)"), 100);
  CHECK(inc2->pointers[0] == 1);
  CHECK(inc2->zero);
  const auto back = m.apply(*inc, *ext.find_instruction("dec(i)"), 100);
  CHECK(back->pointers[0] == 0);
  CHECK(back->zero);
}

TEST_CASE("infinite programs: detection and step limits") {
  const auto ext = builtin_extended_domain("sorting");
  const Instance inst = parse_instance("INSTANCE s\nOBJECTS pos: 3\nINIT vector(0)=1\nGOAL vector(0)=2\n", ext.domain());
  const Machine m(ext, inst);
  const auto program = parse_program("0. inc(i)\n1. goto(0,!(Yz&Yc))\n2. end\n", ext);
  ExecutionConfig on;
  on.step_limit = UINT64_MAX;
  const auto a = m.run(program, on);
  CHECK(a.failed());
  CHECK(a.reason == FailureReason::infinite_loop);
  ExecutionConfig off;
  off.infinite_detection = false;
  off.step_limit = 1000;
  const auto b = m.run(program, off);
  CHECK(b.failed());
  CHECK(b.reason == FailureReason::step_limit);
  CHECK(b.steps == 1000);
}

TEST_CASE("End with an unmet goal is a failure; undefined lines stop execution") {
  const auto ext = builtin_extended_domain("sorting");
  const Instance inst = parse_instance("INSTANCE s\nOBJECTS pos: 2\nINIT vector(0)=2 vector(1)=1\nGOAL vector(0)=1 vector(1)=2\n", ext.domain());
  const Machine m(ext, inst);
  const auto incorrect = m.run(parse_program("0. inc(i)\n1. end\n", ext), {});
  CHECK(incorrect.failed());
  CHECK(incorrect.reason == FailureReason::incorrect);
  const auto partial = m.run(parse_program("0. inc(j)\n1. --\n2. end\n", ext), {});
  CHECK(partial.kind == OutcomeKind::reached_undefined);
  CHECK(partial.line == 1);
  CHECK(partial.plan_length == 1);
  const auto solved = m.run(parse_program("0. inc(j)\n1. swap(i,j)\n2. end\n", ext), {});
  CHECK(solved.solved());
  CHECK(solved.steps == 2);
}

TEST_CASE("detection-on runs terminate and agree with long detection-off runs") {
  Rng rng(23);
  const auto fx = fixtures(rng);
  int loops = 0, solved = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    const auto& f = fx[rng.below(fx.size())];
    const Machine m(f.ext, f.instance);
    const Program p = test::random_program(2 + rng.below(8), f.ext.instruction_count(), rng, true);
    ExecutionConfig on;
    on.step_limit = UINT64_MAX;
    const auto a = m.run(p, on);
    REQUIRE(a.reason != FailureReason::step_limit);
    ExecutionConfig off;
    off.infinite_detection = false;
    off.step_limit = 200000;
    const auto b = m.run(p, off);
    if (a.reason == FailureReason::infinite_loop) {
      ++loops;
      CHECK(b.reason == FailureReason::step_limit);
    } else {
      CHECK(b.kind == a.kind);
      CHECK(b.reason == a.reason);
      CHECK(b.state == a.state);
      CHECK(b.steps == a.steps);
      solved += a.solved();
    }
  }
  CHECK(loops > 0);
  MESSAGE("infinite: " << loops << ", solved: " << solved);
}

TEST_CASE("solved runs replay to a goal state") {
  int replayed = 0;
  for (const auto& name : builtin_domain_names()) {
    const auto ext = builtin_extended_domain(name);
    const Program p = corpus_program(name, ext);
    for (const auto& inst : generate_instances(name, InstanceSet::synthesis, std::nullopt, 3)) {
      const Machine m(ext, inst);
      ExecutionConfig cfg;
      cfg.record_plan = true;
      const auto o = m.run(p, cfg);
      REQUIRE(o.solved());
      CHECK(o.plan.size() == o.plan_length);
      const auto end = replay(m, o.plan, cfg.value_bound);
      REQUIRE(end.has_value());
      CHECK(m.goal_satisfied(*end));
      CHECK(end->values == o.state.values);
      ++replayed;
    }
  }
  CHECK(replayed == 110);
}

TEST_CASE("resuming a partial run equals running the completed program") {
  Rng rng(31);
  const auto fx = fixtures(rng);
  int resumed = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    const auto& f = fx[rng.below(fx.size())];
    const Machine m(f.ext, f.instance);
    const std::size_t n = 3 + rng.below(7);
    const Program full = test::random_program(n, f.ext.instruction_count(), rng, true);
    const std::size_t hole = rng.below(n - 1);
    std::vector<Line> lines(full.lines().begin(), full.lines().end());
    lines[hole] = Line::undefined();
    const Program partial(lines, f.ext.instruction_count());
    ExecutionConfig cfg;
    cfg.record_plan = true;
    const auto first = m.run(partial, cfg);
    if (first.kind != OutcomeKind::reached_undefined) continue;
    const auto cont = m.resume(full, first, cfg);
    const auto direct = m.run(full, cfg);
    CHECK(cont.kind == direct.kind);
    CHECK(cont.reason == direct.reason);
    ++resumed;
    // Loop detection may fire at a different step when started mid-run.
    if (direct.reason == FailureReason::infinite_loop) continue;
    CHECK(cont.state == direct.state);
    CHECK(cont.steps == direct.steps);
    CHECK(cont.plan_length == direct.plan_length);
    CHECK(cont.plan == direct.plan);
  }
  CHECK(resumed > 500);
}

TEST_CASE("single steps reproduce a run") {
  const auto ext = builtin_extended_domain("reverse");
  const Program p = corpus_program("reverse", ext);
  for (const auto& inst : generate_instances("reverse", InstanceSet::synthesis, std::nullopt, 5)) {
    const Machine m(ext, inst);
    Cursor c{m.initial_state(), 0};
    StepResult r;
    std::size_t guard = 0;
    while ((r = m.step(p, c, 100)) == StepResult::advanced) REQUIRE(++guard < 100000);
    CHECK(r == StepResult::end);
    CHECK(m.goal_satisfied(c.state));
    CHECK(c.state == m.run(p, {}).state);
  }
}

TEST_CASE("goal deviation is a squared distance on partial goals") {
  const auto ext = builtin_extended_domain("sorting");
  const Instance inst = parse_instance("INSTANCE s\nOBJECTS pos: 3\nINIT vector(0)=5 vector(1)=1\nGOAL vector(0)=1 vector(2)=4\n", ext.domain());
  const Machine m(ext, inst);
  CHECK(m.goal_is_partial_state());
  CHECK(m.goal_deviation(m.initial_state()) == 16 + 16);

  const auto sel = builtin_extended_domain("select");
  const auto insts = generate_instances("select", InstanceSet::synthesis, 3, 1);
  const Machine ms(sel, insts[2]);
  State s = ms.initial_state();
  const auto values = s.values;
  const Value minimum = *std::min_element(values.begin(), values.end());
  for (Value b = 0; b < static_cast<Value>(values.size()); ++b) {
    s.pointers[1] = b;
    const Value d = values[static_cast<std::size_t>(b)] - minimum;
    CHECK(ms.goal_deviation(s) == d * d);
    CHECK(ms.goal_satisfied(s) == (d == 0));
  }
}
