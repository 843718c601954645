// Four-lane LCS kernel: one 64-bit state word per lane, four patterns per
// 256-bit register, one shared text stream. Compiled with -mavx2 and only
// ever called after a runtime cpuid check.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <array>
#include <bit>
#include <cstdint>
#include <unordered_map>

#include "jsonslots/similarity.hpp"

namespace jsonslots::sim::detail {

void lcs_avx2_batch4(std::span<const std::u32string_view> patterns,
                     std::u32string_view text,
                     std::span<std::size_t> out) {
    const std::size_t lanes = patterns.size();

    // Per-character match masks across all four lanes.
    std::unordered_map<char32_t, std::array<std::uint64_t, 4>> masks;
    for (std::size_t lane = 0; lane < lanes; ++lane) {
        const std::u32string_view p = patterns[lane];
        for (std::size_t i = 0; i < p.size(); ++i) {
            auto& row = masks.try_emplace(p[i], std::array<std::uint64_t, 4>{}).first->second;
            row[lane] |= std::uint64_t{1} << i;
        }
    }

    __m256i state = _mm256_set1_epi64x(-1);
    for (char32_t c : text) {
        const auto it = masks.find(c);
        __m256i match;
        if (it == masks.end()) {
            match = _mm256_setzero_si256();
        } else {
            match = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(it->second.data()));
        }
        const __m256i u = _mm256_and_si256(state, match);
        const __m256i sum = _mm256_add_epi64(state, u);
        const __m256i diff = _mm256_sub_epi64(state, u);
        state = _mm256_or_si256(sum, diff);
    }

    alignas(32) std::uint64_t lanes_out[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes_out), state);
    for (std::size_t lane = 0; lane < lanes; ++lane) {
        const std::size_t m = patterns[lane].size();
        const std::uint64_t low =
            m >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << m) - 1;
        out[lane] = static_cast<std::size_t>(std::popcount(~lanes_out[lane] & low));
    }
}

}  // namespace jsonslots::sim::detail

#endif
