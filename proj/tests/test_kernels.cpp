#include <doctest.h>

#include <limits>
#include <vector>

#include "bfgp/kernels.hpp"
#include "bfgp/rng.hpp"

using namespace bfgp;

namespace {

struct Data {
  std::vector<std::int64_t> values, goal, mask;
};

Data make_data(Rng& rng, std::size_t n, bool extreme) {
  Data d;
  for (std::size_t i = 0; i < n; ++i) {
    std::int64_t v, g;
    if (extreme) {
      v = static_cast<std::int64_t>(rng.next());
      g = static_cast<std::int64_t>(rng.next());
    } else {
      v = rng.between(-1000, 1000);
      g = rng.between(-1000, 1000);
    }
    d.values.push_back(v);
    d.goal.push_back(g);
    d.mask.push_back(rng.below(3) ? -1 : 0);
  }
  return d;
}

// Reference with explicit unsigned wrap-around.
std::int64_t reference_deviation(const Data& d) {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < d.values.size(); ++i) {
    if (!d.mask[i]) continue;
    const std::uint64_t diff = static_cast<std::uint64_t>(d.values[i]) - static_cast<std::uint64_t>(d.goal[i]);
    s += diff * diff;
  }
  return static_cast<std::int64_t>(s);
}

std::size_t reference_mismatches(const Data& d) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < d.values.size(); ++i) c += d.mask[i] && d.values[i] != d.goal[i];
  return c;
}

}  // namespace

TEST_CASE("scalar kernels match the reference") {
  Rng rng(1);
  for (std::size_t n = 0; n < 70; ++n)
    for (bool extreme : {false, true}) {
      const Data d = make_data(rng, n, extreme);
      CHECK(kernels::scalar::masked_squared_deviation(d.values.data(), d.goal.data(), d.mask.data(), n) ==
            reference_deviation(d));
      CHECK(kernels::scalar::masked_mismatches(d.values.data(), d.goal.data(), d.mask.data(), n) ==
            reference_mismatches(d));
    }
}

TEST_CASE("avx2 kernels equal scalar kernels") {
  if (!kernels::avx2_available()) {
    MESSAGE("AVX2 not available on this machine; equivalence not exercised");
    return;
  }
  Rng rng(2);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = trial < 70 ? static_cast<std::size_t>(trial) : rng.below(300);
    const Data d = make_data(rng, n, trial % 2 == 1);
    CHECK(kernels::avx2::masked_squared_deviation(d.values.data(), d.goal.data(), d.mask.data(), n) ==
          kernels::scalar::masked_squared_deviation(d.values.data(), d.goal.data(), d.mask.data(), n));
    CHECK(kernels::avx2::masked_mismatches(d.values.data(), d.goal.data(), d.mask.data(), n) ==
          kernels::scalar::masked_mismatches(d.values.data(), d.goal.data(), d.mask.data(), n));
  }
}

TEST_CASE("avx2 squares handle high halves") {
  if (!kernels::avx2_available()) return;
  const std::int64_t big = std::numeric_limits<std::int64_t>::max();
  std::vector<std::int64_t> v{big, -big, 1LL << 40, 3, big, 0, -7, 1LL << 33};
  std::vector<std::int64_t> g{0, 0, 0, 0, -1, big, 7, -(1LL << 33)};
  std::vector<std::int64_t> m(v.size(), -1);
  CHECK(kernels::avx2::masked_squared_deviation(v.data(), g.data(), m.data(), v.size()) ==
        kernels::scalar::masked_squared_deviation(v.data(), g.data(), m.data(), v.size()));
}

TEST_CASE("dispatch honours the selected ISA") {
  const auto saved = kernels::active_isa();
  std::vector<std::int64_t> v{1, 2, 3, 4, 5}, g{0, 2, 0, 4, 0}, m{-1, -1, -1, 0, -1};
  kernels::set_active_isa(kernels::Isa::scalar);
  CHECK(kernels::active_isa() == kernels::Isa::scalar);
  CHECK(kernels::masked_squared_deviation(v, g, m) == 1 + 9 + 25);
  CHECK(kernels::masked_mismatches(v, g, m) == 3);
  if (kernels::avx2_available()) {
    kernels::set_active_isa(kernels::Isa::avx2);
    CHECK(kernels::active_isa() == kernels::Isa::avx2);
    CHECK(kernels::masked_squared_deviation(v, g, m) == 35);
    CHECK(kernels::masked_mismatches(v, g, m) == 3);
  }
  kernels::set_active_isa(saved);
  CHECK(std::string(kernels::to_string(kernels::Isa::avx2)) == "avx2");
}
