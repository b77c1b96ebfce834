#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace bfgp::kernels {

enum class Isa : std::uint8_t { scalar, avx2 };

const char* to_string(Isa isa);
bool avx2_available();

// Kernel set in use. Defaults to the best supported ISA; the BFGP_ISA
// environment variable (`scalar` or `avx2`) overrides it at start-up.
Isa active_isa();
void set_active_isa(Isa isa);

// Sum over i of mask[i] ? (values[i] - goal[i])^2 : 0, with wrap-around
// arithmetic modulo 2^64. Masks are 0 or all-ones.
std::int64_t masked_squared_deviation(std::span<const std::int64_t> values, std::span<const std::int64_t> goal,
                                      std::span<const std::int64_t> mask);

// Number of masked positions where values and goal differ.
std::size_t masked_mismatches(std::span<const std::int64_t> values, std::span<const std::int64_t> goal,
                              std::span<const std::int64_t> mask);

namespace scalar {
std::int64_t masked_squared_deviation(const std::int64_t* values, const std::int64_t* goal,
                                      const std::int64_t* mask, std::size_t n);
std::size_t masked_mismatches(const std::int64_t* values, const std::int64_t* goal, const std::int64_t* mask,
                              std::size_t n);
}  // namespace scalar

namespace avx2 {
std::int64_t masked_squared_deviation(const std::int64_t* values, const std::int64_t* goal,
                                      const std::int64_t* mask, std::size_t n);
std::size_t masked_mismatches(const std::int64_t* values, const std::int64_t* goal, const std::int64_t* mask,
                              std::size_t n);
}  // namespace avx2

}  // namespace bfgp::kernels
