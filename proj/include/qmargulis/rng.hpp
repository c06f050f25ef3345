#pragma once

// Portable random streams. std::mt19937_64 and std::seed_seq have fully specified output, so
// sequences are identical across standard libraries as long as no std:: distribution is involved.

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace qmargulis {

inline constexpr std::string_view kRngAlgorithm = "mt19937_64/seed_seq(seed,stream)";

struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    std::mt19937_64 engine() const {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
        return std::mt19937_64(seq);
    }
};

/// Uniform double in [0,1) from the top 53 bits.
inline double uniform01(std::mt19937_64& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

/// Uniform integer in [0, bound) by rejection, bound > 0.
inline std::uint64_t uniform_below(std::mt19937_64& eng, std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x = eng();
    while (x >= limit) x = eng();
    return x % bound;
}

/// Fisher-Yates with a portable index draw (std::shuffle is implementation-defined).
template <typename T>
void portable_shuffle(std::vector<T>& v, std::mt19937_64& eng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_below(eng, i));
        std::swap(v[i - 1], v[j]);
    }
}

} // namespace qmargulis
