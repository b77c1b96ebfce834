#include "bfgp/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define BFGP_HAVE_X86 1
#endif

namespace bfgp::kernels::avx2 {

#if BFGP_HAVE_X86

namespace {

// Low 64 bits of a 64x64 product: lo*lo + ((lo*hi + hi*lo) << 32). For a
// square the cross terms are equal, hence the single shift by 33.
__attribute__((target("avx2"))) inline __m256i square_lo64(__m256i d) {
  const __m256i hi = _mm256_srli_epi64(d, 32);
  const __m256i lolo = _mm256_mul_epu32(d, d);
  const __m256i lohi = _mm256_mul_epu32(d, hi);
  return _mm256_add_epi64(lolo, _mm256_slli_epi64(lohi, 33));
}

__attribute__((target("avx2"))) inline std::uint64_t horizontal_sum(__m256i v) {
  alignas(32) std::uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), v);
  return lanes[0] + lanes[1] + lanes[2] + lanes[3];
}

}  // namespace

__attribute__((target("avx2"))) std::int64_t masked_squared_deviation(const std::int64_t* values,
                                                                      const std::int64_t* goal,
                                                                      const std::int64_t* mask, std::size_t n) {
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(values + i));
    const __m256i g = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(goal + i));
    const __m256i m = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(mask + i));
    const __m256i d = _mm256_and_si256(_mm256_sub_epi64(v, g), m);
    acc = _mm256_add_epi64(acc, square_lo64(d));
  }
  std::uint64_t sum = horizontal_sum(acc);
  sum += static_cast<std::uint64_t>(scalar::masked_squared_deviation(values + i, goal + i, mask + i, n - i));
  return static_cast<std::int64_t>(sum);
}

__attribute__((target("avx2"))) std::size_t masked_mismatches(const std::int64_t* values, const std::int64_t* goal,
                                                              const std::int64_t* mask, std::size_t n) {
  std::size_t count = 0;
  std::size_t i = 0;
  const __m256i zero = _mm256_setzero_si256();
  const __m256i ones = _mm256_set1_epi64x(-1);
  for (; i + 4 <= n; i += 4) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(values + i));
    const __m256i g = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(goal + i));
    const __m256i m = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(mask + i));
    const __m256i active = _mm256_xor_si256(_mm256_cmpeq_epi64(m, zero), ones);
    const __m256i differ = _mm256_andnot_si256(_mm256_cmpeq_epi64(v, g), active);
    const int bits = _mm256_movemask_pd(_mm256_castsi256_pd(differ));
    count += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(bits)));
  }
  return count + scalar::masked_mismatches(values + i, goal + i, mask + i, n - i);
}

#else

std::int64_t masked_squared_deviation(const std::int64_t* values, const std::int64_t* goal, const std::int64_t* mask,
                                      std::size_t n) {
  return scalar::masked_squared_deviation(values, goal, mask, n);
}

std::size_t masked_mismatches(const std::int64_t* values, const std::int64_t* goal, const std::int64_t* mask,
                              std::size_t n) {
  return scalar::masked_mismatches(values, goal, mask, n);
}

#endif

}  // namespace bfgp::kernels::avx2
