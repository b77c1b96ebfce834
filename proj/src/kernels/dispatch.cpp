#include <atomic>
#include <cstdlib>
#include <string_view>

#include "bfgp/kernels.hpp"

namespace bfgp::kernels {

const char* to_string(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

namespace {

Isa initial_isa() {
  Isa best = avx2_available() ? Isa::avx2 : Isa::scalar;
  if (const char* env = std::getenv("BFGP_ISA")) {
    std::string_view v(env);
    if (v == "scalar") return Isa::scalar;
    if (v == "avx2" && best == Isa::avx2) return Isa::avx2;
  }
  return best;
}

std::atomic<Isa>& isa_slot() {
  static std::atomic<Isa> slot{initial_isa()};
  return slot;
}

}  // namespace

Isa active_isa() { return isa_slot().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (isa == Isa::avx2 && !avx2_available()) isa = Isa::scalar;
  isa_slot().store(isa, std::memory_order_relaxed);
}

std::int64_t masked_squared_deviation(std::span<const std::int64_t> values, std::span<const std::int64_t> goal,
                                      std::span<const std::int64_t> mask) {
  const std::size_t n = mask.size();
  if (active_isa() == Isa::avx2) return avx2::masked_squared_deviation(values.data(), goal.data(), mask.data(), n);
  return scalar::masked_squared_deviation(values.data(), goal.data(), mask.data(), n);
}

std::size_t masked_mismatches(std::span<const std::int64_t> values, std::span<const std::int64_t> goal,
                              std::span<const std::int64_t> mask) {
  const std::size_t n = mask.size();
  if (active_isa() == Isa::avx2) return avx2::masked_mismatches(values.data(), goal.data(), mask.data(), n);
  return scalar::masked_mismatches(values.data(), goal.data(), mask.data(), n);
}

}  // namespace bfgp::kernels
