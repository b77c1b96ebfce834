#include "bfgp/domains.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "bfgp/error.hpp"
#include "bfgp/model_io.hpp"
#include "bfgp/rng.hpp"

namespace bfgp {

namespace {

struct DomainEntry {
  const char* text;
  std::size_t lines;
  std::size_t synthesis_count;
  std::size_t validation_count;
  const char* program;
};

const std::map<std::string, DomainEntry, std::less<>>& registry() {
  static const std::map<std::string, DomainEntry, std::less<>> entries = {
      {"sorting",
       {R"(DOMAIN sorting
TYPES pos
FUNCTION num vector(pos)
POINTERS i:pos j:pos
SCHEMA swap(x:pos,y:pos)
EFF vector(x) := vector(y) ; vector(y) := vector(x)
)",
        11, 10, 100,
        R"(0. swap(i,j)
1. inc(i)
2. goto(0,!(Yz&!Yc))
3. cmp(vector(i),vector(j))
4. goto(7,!(!Yz&Yc))
5. dec(i)
6. goto(0,!(Yz&Yc))
7. swap(i,j)
8. dec(i)
9. goto(3,!(Yz&!Yc))
10. end
)"}},
      {"reverse",
       {R"(DOMAIN reverse
TYPES pos
FUNCTION num vector(pos)
POINTERS i:pos j:pos
SCHEMA swap(x:pos,y:pos)
EFF vector(x) := vector(y) ; vector(y) := vector(x)
)",
        7, 10, 102,
        R"(0. set(i,j)
1. swap(i,j)
2. inc(i)
3. goto(1,!(Yz&!Yc))
4. inc(j)
5. goto(0,!(Yz&!Yc))
6. end
)"}},
      {"select",
       {R"(DOMAIN select
TYPES pos
FUNCTION num vector(pos)
POINTERS a:pos b:pos
)",
        7, 10, 102,
        R"(0. inc(b)
1. cmp(vector(a),vector(b))
2. goto(4,!(!Yz&!Yc))
3. set(b,a)
4. inc(a)
5. goto(1,!(Yz&!Yc))
6. end
)"}},
      {"find",
       {R"(DOMAIN find
TYPES pos acc
FUNCTION num vector(pos)
FUNCTION num counter(acc)
POINTERS i:pos t:pos a:acc
SCHEMA accumulate(x:acc)
EFF counter(x) := counter(x) + 1
)",
        6, 10, 102,
        R"(0. cmp(vector(i),vector(t))
1. goto(3,!(Yz&!Yc))
2. accumulate(a)
3. inc(i)
4. goto(0,!(Yz&!Yc))
5. end
)"}},
      {"triangular-sum",
       {R"(DOMAIN triangular-sum
TYPES pos
FUNCTION num vector(pos)
POINTERS a:pos b:pos
SCHEMA vector-inc(x:pos)
EFF vector(x) := vector(x) + 1
SCHEMA vector-dec(x:pos)
PRE vector(x) > 0
EFF vector(x) := vector(x) - 1
SCHEMA vector-add(x:pos,y:pos)
EFF vector(x) := vector(x) + vector(y)
)",
        6, 10, 44709,
        R"(0. inc(a)
1. vector-add(b,a)
2. vector-dec(a)
3. test(vector(a))
4. goto(0,!(Yz&!Yc))
5. end
)"}},
      {"fibonacci",
       {R"(DOMAIN fibonacci
TYPES pos
FUNCTION num vector(pos)
POINTERS a:pos b:pos
SCHEMA vector-inc(x:pos)
EFF vector(x) := vector(x) + 1
SCHEMA vector-dec(x:pos)
PRE vector(x) > 0
EFF vector(x) := vector(x) - 1
SCHEMA vector-add(x:pos,y:pos)
EFF vector(x) := vector(x) + vector(y)
)",
        7, 10, 33,
        R"(0. vector-add(a,b)
1. dec(b)
2. vector-add(a,b)
3. set(b,a)
4. inc(a)
5. goto(0,!(Yz&!Yc))
6. end
)"}},
      {"corridor",
       {R"(DOMAIN corridor
TYPES pos
FUNCTION num vector(pos)
POINTERS i:pos j:pos
SCHEMA vector-left(x:pos)
PRE vector(x) > 0
EFF vector(x) := vector(x) - 1
SCHEMA vector-right(x:pos)
EFF vector(x) := vector(x) + 1
)",
        8, 10, 1000,
        R"(0. vector-right(i)
1. inc(j)
2. cmp(vector(i),vector(j))
3. goto(0,!(!Yz&Yc))
4. vector-left(i)
5. cmp(vector(i),vector(j))
6. goto(1,!(Yz&!Yc))
7. end
)"}},
      {"gripper",
       {R"(DOMAIN gripper
TYPES ball room gripper
FUNCTION bool at-robby(room)
FUNCTION bool at(ball,room)
FUNCTION bool free(gripper)
FUNCTION bool carry(ball,gripper)
POINTERS b1:ball r1:room r2:room g1:gripper
SCHEMA move(from:room,to:room)
PRE at-robby(from) = 1
EFF at-robby(from) := 0 ; at-robby(to) := 1
SCHEMA pick(b:ball,r:room,g:gripper)
PRE at(b,r) = 1 & at-robby(r) = 1 & free(g) = 1
EFF carry(b,g) := 1 ; at(b,r) := 0 ; free(g) := 0
SCHEMA drop(b:ball,r:room,g:gripper)
PRE carry(b,g) = 1 & at-robby(r) = 1
EFF at(b,r) := 1 ; carry(b,g) := 0 ; free(g) := 1
)",
        8, 10, 1000,
        R"(0. pick(b1,r1,g1)
1. inc(r2)
2. move(r1,r2)
3. drop(b1,r2,g1)
4. move(r2,r1)
5. inc(b1)
6. goto(0,!(Yz&!Yc))
7. end
)"}},
      {"visitall",
       {R"(DOMAIN visitall
TYPES row col
FUNCTION bool visited(row,col)
POINTERS i:row j:col
SCHEMA visit(x:row,y:col)
EFF visited(x,y) := 1
)",
        8, 10, 50,
        R"(0. visit(i,j)
1. inc(i)
2. goto(0,!(Yz&!Yc))
3. dec(i)
4. goto(3,!(Yz&!Yc))
5. inc(j)
6. goto(0,!(Yz&!Yc))
7. end
)"}},
      {"blocks-ontable",
       {R"(DOMAIN blocks-ontable
TYPES block
FUNCTION bool clear(block)
FUNCTION bool on(block,block)
FUNCTION bool ontable(block)
FUNCTION bool holding(block)
FUNCTION bool handempty()
POINTERS o1:block o2:block o3:block
SCHEMA unstack(x:block,y:block)
PRE clear(x) = 1 & handempty() = 1 & on(x,y) = 1
EFF clear(x) := 0 ; handempty() := 0 ; on(x,y) := 0 ; holding(x) := 1 ; clear(y) := 1
SCHEMA put-down(x:block)
PRE holding(x) = 1
EFF holding(x) := 0 ; clear(x) := 1 ; handempty() := 1 ; ontable(x) := 1
)",
        13, 10, 20,
        R"(0. dec(o2)
1. goto(0,!(Yz&!Yc))
2. dec(o1)
3. goto(2,!(Yz&!Yc))
4. unstack(o1,o2)
5. put-down(o1)
6. inc(o1)
7. goto(4,!(Yz&!Yc))
8. inc(o2)
9. goto(2,!(Yz&!Yc))
10. inc(o3)
11. goto(0,!(Yz&!Yc))
12. end
)"}},
      {"sieve",
       {R"(DOMAIN sieve
TYPES num
FUNCTION bool prime(num)
POINTERS i:num j:num k:num
SCHEMA set-no-prime(x:num)
EFF prime(x) := 0
)",
        16, 10, 100,
        R"(0. inc(i)
1. inc(i)
2. set(k,i)
3. dec(j)
4. goto(3,!(Yz&!Yc))
5. inc(k)
6. goto(13,!(!Yz&Yc))
7. inc(j)
8. cmp(i,j)
9. goto(5,!(Yz&!Yc))
10. set-no-prime(k)
11. cmp(i,j)
12. goto(3,!(!Yz&Yc))
13. inc(i)
14. goto(2,!(Yz&!Yc))
15. end
)"}},
  };
  return entries;
}

const DomainEntry& entry(std::string_view name) {
  const auto& r = registry();
  auto it = r.find(name);
  if (it == r.end()) throw Error(ErrorKind::unknown_domain, "no builtin domain named '" + std::string(name) + "'");
  return it->second;
}

constexpr Value kSynthesisValues = 100;
constexpr Value kValidationValues = 1'000'000'000;

// Builds instances against the parsed domain by function name.
class Builder {
 public:
  Builder(const Domain& d, std::string name) : d_(d) {
    inst_.name = std::move(name);
    inst_.object_counts.assign(d.types.size(), 0);
  }
  Builder& objects(std::string_view type, std::size_t count) {
    inst_.object_counts[*d_.find_type(type)] = count;
    return *this;
  }
  Builder& init(std::string_view f, std::vector<std::uint32_t> objects, Value v) {
    if (v != 0) inst_.init.push_back({*d_.find_function(f), std::move(objects), v});
    return *this;
  }
  Builder& goal(std::string_view f, std::vector<std::uint32_t> objects, Value v) {
    FluentTerm t{*d_.find_function(f), {}};
    for (auto o : objects) t.args.push_back(Argument::object(o));
    goal_.assignments.push_back({std::move(t), v});
    return *this;
  }
  Builder& pointer_goal(std::string_view f, std::uint32_t pointer, Value v) {
    FluentTerm t{*d_.find_function(f), {Argument::variable(pointer)}};
    goal_.assignments.push_back({std::move(t), v});
    return *this;
  }
  Instance build() {
    inst_.goal = goal_;
    return std::move(inst_);
  }

 private:
  const Domain& d_;
  Instance inst_;
  PartialGoal goal_;
};

std::vector<Value> random_vector(Rng& rng, std::size_t n, Value range) {
  std::vector<Value> v(n);
  for (auto& x : v) x = static_cast<Value>(rng.below(static_cast<std::uint64_t>(range)));
  return v;
}

std::uint32_t u32(std::size_t x) { return static_cast<std::uint32_t>(x); }

Instance vector_instance(const Domain& d, const std::string& name, const std::vector<Value>& init,
                         const std::vector<Value>& goal) {
  Builder b(d, name);
  b.objects("pos", init.size());
  for (std::size_t k = 0; k < init.size(); ++k) b.init("vector", {u32(k)}, init[k]);
  for (std::size_t k = 0; k < goal.size(); ++k) b.goal("vector", {u32(k)}, goal[k]);
  return b.build();
}

std::size_t size_for(std::string_view domain, InstanceSet set, std::size_t k) {
  if (set == InstanceSet::synthesis) return (domain == "corridor" ? 3 : 2) + k;
  if (domain == "reverse" || domain == "select" || domain == "find") return 1000 + 100 * k;
  return 12 + k;
}

Value fibonacci_number(std::size_t n) {
  Value a = 0, b = 1;
  for (std::size_t k = 0; k < n; ++k) {
    Value c = a + b;
    a = b;
    b = c;
  }
  return a;
}

bool is_prime(std::size_t x) {
  if (x < 2) return false;
  for (std::size_t d = 2; d * d <= x; ++d)
    if (x % d == 0) return false;
  return true;
}

Instance make_instance(const Domain& d, std::string_view domain, const std::string& name, std::size_t size,
                       Value range, Rng& rng, std::size_t k) {
  if (domain == "sorting") {
    auto v = random_vector(rng, size, range);
    auto goal = v;
    std::sort(goal.begin(), goal.end());
    return vector_instance(d, name, v, goal);
  }
  if (domain == "reverse") {
    auto v = random_vector(rng, size, range);
    return vector_instance(d, name, v, std::vector<Value>(v.rbegin(), v.rend()));
  }
  if (domain == "select") {
    auto v = random_vector(rng, size, range);
    Builder b(d, name);
    b.objects("pos", size);
    for (std::size_t i = 0; i < size; ++i) b.init("vector", {u32(i)}, v[i]);
    b.pointer_goal("vector", 1, *std::min_element(v.begin(), v.end()));
    return b.build();
  }
  if (domain == "find") {
    // The target is vector(0); plant it a random number of times.
    const Value target = static_cast<Value>(rng.below(static_cast<std::uint64_t>(range)));
    std::vector<Value> v(size);
    for (auto& x : v) {
      do x = static_cast<Value>(rng.below(static_cast<std::uint64_t>(range)));
      while (x == target);
    }
    std::vector<std::size_t> order(size - 1);
    std::iota(order.begin(), order.end(), 1);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    const std::size_t copies = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(size)));
    v[0] = target;
    for (std::size_t c = 0; c + 1 < copies; ++c) v[order[c]] = target;
    Builder b(d, name);
    b.objects("pos", size).objects("acc", 1);
    for (std::size_t i = 0; i < size; ++i) b.init("vector", {u32(i)}, v[i]);
    b.goal("counter", {0}, static_cast<Value>(copies));
    return b.build();
  }
  if (domain == "triangular-sum") {
    const auto n = static_cast<Value>(size);
    return vector_instance(d, name, {0, n}, {n * (n + 1) / 2});
  }
  if (domain == "fibonacci") {
    Builder b(d, name);
    b.objects("pos", size + 1).init("vector", {1}, 1).goal("vector", {u32(size)}, fibonacci_number(size));
    return b.build();
  }
  if (domain == "corridor") {
    // Alternate directions so both walking loops are exercised.
    Value agent, target;
    do {
      agent = static_cast<Value>(rng.below(size));
      target = static_cast<Value>(rng.below(size));
    } while (agent == target || ((k % 2 == 0) != (agent < target)));
    Builder b(d, name);
    b.objects("pos", 2).init("vector", {0}, agent).init("vector", {1}, target);
    b.goal("vector", {0}, target);
    return b.build();
  }
  if (domain == "gripper") {
    Builder b(d, name);
    b.objects("ball", size).objects("room", 2).objects("gripper", 2);
    b.init("at-robby", {0}, 1).init("free", {0}, 1).init("free", {1}, 1);
    for (std::size_t i = 0; i < size; ++i) b.init("at", {u32(i), 0}, 1);
    for (std::size_t i = 0; i < size; ++i) b.goal("at", {u32(i), 1}, 1);
    return b.build();
  }
  if (domain == "visitall") {
    Builder b(d, name);
    b.objects("row", size).objects("col", size).init("visited", {0, 0}, 1);
    for (std::size_t r = 0; r < size; ++r)
      for (std::size_t c = 0; c < size; ++c) b.goal("visited", {u32(r), u32(c)}, 1);
    return b.build();
  }
  if (domain == "blocks-ontable") {
    std::vector<std::uint32_t> perm(size);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = size; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    Builder b(d, name);
    b.objects("block", size).init("handempty", {}, 1);
    for (std::size_t start = 0; start < size;) {
      const std::size_t height = 1 + rng.below(size - start);
      b.init("ontable", {perm[start]}, 1);
      b.init("clear", {perm[start + height - 1]}, 1);
      for (std::size_t h = 1; h < height; ++h) b.init("on", {perm[start + h], perm[start + h - 1]}, 1);
      start += height;
    }
    for (std::size_t i = 0; i < size; ++i) b.goal("ontable", {u32(i)}, 1);
    return b.build();
  }
  if (domain == "sieve") {
    Builder b(d, name);
    b.objects("num", size);
    for (std::size_t x = 0; x < size; ++x) b.init("prime", {u32(x)}, 1);
    for (std::size_t x = 2; x < size; ++x) b.goal("prime", {u32(x)}, is_prime(x) ? 1 : 0);
    return b.build();
  }
  throw Error(ErrorKind::unknown_domain, std::string(domain));
}

}  // namespace

InstanceSet parse_instance_set(std::string_view text) {
  if (text == "synthesis") return InstanceSet::synthesis;
  if (text == "validation") return InstanceSet::validation;
  throw Error(ErrorKind::invalid_argument, "instance set must be synthesis or validation");
}

std::vector<std::string> builtin_domain_names() {
  std::vector<std::string> names;
  for (const auto& [name, e] : registry()) names.push_back(name);
  return names;
}

std::string builtin_domain_text(std::string_view name) { return entry(name).text; }

BuiltinDomain builtin_domain(std::string_view name) {
  const auto& e = entry(name);
  return {std::string(name), parse_domain(e.text), e.lines, e.synthesis_count, e.validation_count};
}

ExtendedDomain builtin_extended_domain(std::string_view name) {
  Domain d = parse_domain(entry(name).text);
  auto pointers = default_pointers(d);
  return build_extended_domain(std::move(d), std::move(pointers));
}

std::vector<Instance> generate_instances(std::string_view name, InstanceSet set, std::optional<std::size_t> count,
                                         std::uint64_t seed) {
  const auto& e = entry(name);
  const Domain d = parse_domain(e.text);
  const std::size_t total = count.value_or(set == InstanceSet::synthesis ? e.synthesis_count : e.validation_count);
  const Value range = set == InstanceSet::synthesis ? kSynthesisValues : kValidationValues;
  const std::string label = std::string(name) + (set == InstanceSet::synthesis ? "-synthesis" : "-validation");
  std::vector<Instance> out;
  out.reserve(total);
  for (std::size_t k = 0; k < total; ++k) {
    Rng rng(derive_seed(seed, label, k));
    out.push_back(make_instance(d, name, label + "-" + std::to_string(k), size_for(name, set, k), range, rng, k));
  }
  return out;
}

std::string corpus_program_text(std::string_view name) {
  const auto& r = registry();
  auto it = r.find(name);
  if (it == r.end()) throw Error(ErrorKind::unknown_program, "no reference program for '" + std::string(name) + "'");
  return it->second.program;
}

Program corpus_program(std::string_view name, const ExtendedDomain& domain) {
  return parse_program(corpus_program_text(name), domain);
}

}  // namespace bfgp
