#include <doctest.h>

#include <map>

#include "bfgp/domains.hpp"
#include "bfgp/error.hpp"
#include "bfgp/model.hpp"
#include "bfgp/model_io.hpp"
#include "support.hpp"

using namespace bfgp;

namespace {

// Falling factorial k·(k-1)···(k-m+1).
std::size_t injections(std::size_t k, std::size_t m) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < m; ++i) r *= (k > i) ? k - i : 0;
  return r;
}

// Instruction count straight from the enumeration rules.
std::optional<std::size_t> count_by_rules(const Domain& d, const std::vector<Pointer>& ptrs) {
  std::vector<std::size_t> per_type(d.types.size(), 0);
  for (const auto& p : ptrs) ++per_type[p.type];
  std::size_t total = 2 * ptrs.size();
  for (auto k : per_type)
    if (k) total += k * (k - 1) / 2 + k * (k - 1);
  for (const auto& f : d.functions) {
    std::size_t tuples = 1;
    for (TypeId t : f.parameter_types) tuples *= per_type[t];
    total += tuples;
    if (f.kind == FunctionKind::numeric && f.arity() >= 1) total += tuples * (tuples ? tuples - 1 : 0) / 2;
  }
  for (const auto& s : d.schemas) {
    std::map<TypeId, std::size_t> need;
    for (const auto& p : s.parameters) ++need[p.type];
    std::size_t b = 1;
    for (auto [t, m] : need) b *= injections(per_type[t], m);
    if (b == 0) return std::nullopt;
    total += b;
  }
  return total;
}

}  // namespace

TEST_CASE("sorting extended domain lists the twelve instructions in canonical order") {
  const auto ext = builtin_extended_domain("sorting");
  const std::vector<std::string> expected = {"inc(i)",  "inc(j)",  "dec(i)",       "dec(j)",
                                             "cmp(i,j)", "set(i,j)", "set(j,i)",     "test(vector(i))",
                                             "test(vector(j))", "cmp(vector(i),vector(j))", "swap(i,j)", "swap(j,i)"};
  REQUIRE(ext.instruction_count() == expected.size());
  for (InstructionId id = 0; id < expected.size(); ++id) {
    CHECK(ext.instruction_name(id) == expected[id]);
    CHECK(ext.find_instruction(expected[id]) == id);
  }
  CHECK(instruction_count_closed_form(ext.domain(), ext.pointers()) == 12);
}

TEST_CASE("select is RAM-only and gripper uses typed pointers") {
  const auto sel = builtin_extended_domain("select");
  CHECK(sel.domain().schemas.empty());
  for (const auto& ins : sel.instructions()) CHECK(ins.is_ram());

  const auto grip = builtin_extended_domain("gripper");
  std::vector<std::pair<std::string, std::string>> names;
  for (const auto& p : grip.pointers()) names.emplace_back(p.name, grip.domain().types[p.type]);
  CHECK(names == std::vector<std::pair<std::string, std::string>>{
                     {"b1", "ball"}, {"r1", "room"}, {"r2", "room"}, {"g1", "gripper"}});
}

TEST_CASE("instruction count: closed form and enumeration agree, argument-count formula bounds them") {
  Rng rng(11);
  int checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const Domain d = test::random_domain(rng);
    const auto ptrs = test::random_pointers(d, rng);
    const auto expected = count_by_rules(d, ptrs);
    if (!expected) {
      CHECK_THROWS_AS(ExtendedDomain(d, ptrs), Error);
      try {
        ExtendedDomain(d, ptrs);
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::unsatisfiable_arity);
      }
      continue;
    }
    const ExtendedDomain ext(d, ptrs);
    CHECK(ext.instruction_count() == *expected);
    CHECK(instruction_count_closed_form(d, ptrs) == *expected);
    CHECK(instruction_count_upper_bound(d, ptrs) >= *expected);
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("single-type domains meet the argument-count formula when every pair is counted") {
  // With one type and unary functions the formula gives 2|Z|^2 + |Z|^2 per function.
  const auto ext = builtin_extended_domain("select");
  const std::size_t z = ext.pointers().size();
  CHECK(instruction_count_upper_bound(ext.domain(), ext.pointers()) == 2 * z * z + z * z);
}

TEST_CASE("a schema needing more distinct pointers than declared is unsatisfiable") {
  Domain d = parse_domain(builtin_domain_text("sorting"));
  const std::vector<Pointer> one{{"i", 0}};
  try {
    ExtendedDomain ext(d, one);
    FAIL("expected UnsatisfiableArity");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::unsatisfiable_arity);
  }
}

TEST_CASE("domain text round-trips for every builtin") {
  for (const auto& name : builtin_domain_names()) {
    const Domain d = parse_domain(builtin_domain_text(name));
    const std::string printed = print_domain(d);
    CHECK_MESSAGE(print_domain(parse_domain(printed)) == printed, name);
  }
}

TEST_CASE("domain parser reports positions") {
  try {
    parse_domain("DOMAIN x\nTYPES pos\nFUNCTION num v(nope)\n");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 3);
    CHECK(e.kind() == ErrorKind::syntax_error);
  }
}

TEST_CASE("instances: parse, print and validation errors") {
  const Domain d = parse_domain(builtin_domain_text("sorting"));
  const Instance inst = parse_instance("INSTANCE s\nOBJECTS pos: 3\nINIT vector(0)=5 vector(2)=1\nGOAL vector(0)=1 vector(2)=5\n", d);
  CHECK(inst.object_counts == std::vector<std::size_t>{3});
  CHECK(print_instance(parse_instance(print_instance(inst, d), d), d) == print_instance(inst, d));

  try {
    parse_instance("INSTANCE s\nINIT vector(0)=5\nGOAL vector(0)=1\n", d);
    FAIL("expected MissingAssignment");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::missing_assignment);
  }
  CHECK_THROWS_AS(parse_instance("INSTANCE s\nOBJECTS pos: 2\nINIT vector(5)=1\nGOAL vector(0)=1\n", d), Error);
  CHECK(parse_instance("INSTANCE sorting-synthesis-7\nOBJECTS pos: 1\nGOAL vector(0)=0\n", d).name == "sorting-synthesis-7");
  CHECK_THROWS_AS(parse_instance("INSTANCE two words\nOBJECTS pos: 1\nGOAL vector(0)=0\n", d), SyntaxError);
}

TEST_CASE("constraint goals parse and evaluate") {
  const Domain d = parse_domain(builtin_domain_text("sorting"));
  const Instance inst = parse_instance(
      "INSTANCE s\nOBJECTS pos: 2\nINIT vector(0)=3 vector(1)=4\nGOALEXPR vector(0) <= vector(1) & !(vector(0) = 0)\n", d);
  const ExtendedDomain ext(d, default_pointers(d));
  CHECK(std::holds_alternative<ConstraintGoal>(inst.goal));
  State s = make_initial_state(ext, inst);
  CHECK(goal_satisfied(ext, inst, s));
  s.values[0] = 9;
  CHECK_FALSE(goal_satisfied(ext, inst, s));
}

TEST_CASE("pointer declarations") {
  const Domain grip = builtin_domain("gripper").domain;
  auto named = parse_pointer_declaration("x:ball,y:room", grip);
  REQUIRE(named.size() == 2);
  CHECK(named[0] == Pointer{"x", *grip.find_type("ball")});
  auto counted = parse_pointer_declaration("ball:1,room:2,gripper:1", grip);
  std::vector<std::string> names;
  for (const auto& p : counted) names.push_back(p.name);
  CHECK(names == std::vector<std::string>{"b1", "r1", "r2", "g1"});
  auto more = parse_pointer_declaration("room:3", grip);
  CHECK(more.size() == 3);
  CHECK(more[0].name == "r1");
  CHECK(more[2].name == "room1");  // declared names first, then generated ones
  CHECK_THROWS_AS(parse_pointer_declaration("2", grip), Error);  // several types

  const Domain tsum = builtin_domain("triangular-sum").domain;
  auto two = parse_pointer_declaration("2", tsum);
  REQUIRE(two.size() == 2);
  CHECK(two[0].name == "a");
}

TEST_CASE("variable registry is row-major per function") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Domain d = test::random_domain(rng);
    std::vector<std::size_t> counts;
    for (std::size_t t = 0; t < d.types.size(); ++t) counts.push_back(1 + rng.below(4));
    const VariableRegistry reg(d, counts);
    std::size_t expected = 0;
    for (const auto& f : d.functions) {
      std::size_t c = 1;
      for (TypeId t : f.parameter_types) c *= counts[t];
      expected += c;
    }
    REQUIRE(reg.size() == expected);
    for (std::size_t x = 0; x < reg.size(); ++x) {
      const auto f = reg.function_of(x);
      const auto objs = reg.objects_of(x);
      CHECK(reg.index(f, objs) == x);
    }
  }
}

TEST_CASE("initial states are total with omitted variables zero") {
  const auto ext = builtin_extended_domain("sorting");
  const Instance inst = parse_instance("INSTANCE s\nOBJECTS pos: 4\nINIT vector(1)=7\nGOAL vector(0)=7\n", ext.domain());
  const State s = make_initial_state(ext, inst);
  CHECK(s.values == std::vector<Value>{0, 7, 0, 0});
  CHECK(s.pointers == std::vector<Value>{0, 0});
  CHECK_FALSE(s.zero);
  CHECK_FALSE(s.carry);
}
