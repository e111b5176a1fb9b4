#pragma once

#include <cstdint>
#include <random>

namespace scarma {

using Rng = std::mt19937_64;

// Engine for stream `stream` of a master seed. Distinct streams are
// decorrelated through seed_seq mixing (fed in 32-bit halves, because
// seed_seq truncates its inputs to 32 bits), so parallel consumers can
// draw independently from one user-facing seed.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32)};
    return Rng(seq);
}

}  // namespace scarma
