#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace jsonslots::rng {

using Engine = std::mt19937_64;

// Unbiased integer in [0, n); n must be positive. Uses rejection sampling
// on the raw engine output so results are identical across platforms and
// standard library implementations (std::uniform_int_distribution is not
// portable).
inline std::uint64_t uniform_below(Engine& engine, std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_below: n must be positive");
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % n;
    std::uint64_t draw = engine();
    while (draw >= limit) draw = engine();
    return draw % n;
}

// Uniform double in [0, 1) built from the top 53 bits of one draw.
inline double uniform01(Engine& engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

// Fisher-Yates shuffle over a portable uniform source.
template <typename T>
void shuffle(Engine& engine, std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(uniform_below(engine, i));
        std::swap(items[i - 1], items[j]);
    }
}

// k distinct indices from [0, n), in draw order.
inline std::vector<std::size_t> sample_indices(Engine& engine, std::size_t n, std::size_t k) {
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k && i < n; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(uniform_below(engine, n - i));
        std::swap(pool[i], pool[j]);
        out.push_back(pool[i]);
    }
    return out;
}

}  // namespace jsonslots::rng
