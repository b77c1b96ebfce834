#include "bfgp/kernels.hpp"

namespace bfgp::kernels::scalar {

std::int64_t masked_squared_deviation(const std::int64_t* values, const std::int64_t* goal,
                                      const std::int64_t* mask, std::size_t n) {
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t d = (static_cast<std::uint64_t>(values[i]) - static_cast<std::uint64_t>(goal[i])) &
                            static_cast<std::uint64_t>(mask[i]);
    sum += d * d;
  }
  return static_cast<std::int64_t>(sum);
}

std::size_t masked_mismatches(const std::int64_t* values, const std::int64_t* goal, const std::int64_t* mask,
                              std::size_t n) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) count += (mask[i] != 0) & (values[i] != goal[i]);
  return count;
}

}  // namespace bfgp::kernels::scalar
