#include "jsonslots/similarity.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <unordered_map>

#include "jsonslots/unicode.hpp"

namespace jsonslots::sim {

namespace detail {

std::size_t lcs_scalar(std::u32string_view a, std::u32string_view b) {
    if (a.empty() || b.empty()) return 0;
    std::vector<std::uint32_t> prev(b.size() + 1, 0);
    std::vector<std::uint32_t> cur(b.size() + 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (a[i] == b[j]) {
                cur[j + 1] = prev[j] + 1;
            } else {
                cur[j + 1] = std::max(prev[j + 1], cur[j]);
            }
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

namespace {

std::size_t lcs_bitparallel_word(std::u32string_view pattern, std::u32string_view text) {
    // Hyyro's word-parallel LCS. Zero bits of S mark pattern positions
    // covered by the subsequence so far.
    std::unordered_map<char32_t, std::uint64_t> masks;
    masks.reserve(pattern.size());
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        masks[pattern[i]] |= std::uint64_t{1} << i;
    }
    std::uint64_t s = ~std::uint64_t{0};
    for (char32_t c : text) {
        const auto it = masks.find(c);
        const std::uint64_t m = it == masks.end() ? 0 : it->second;
        const std::uint64_t u = s & m;
        s = (s + u) | (s - u);
    }
    const std::uint64_t low = pattern.size() == 64
                                  ? ~std::uint64_t{0}
                                  : (std::uint64_t{1} << pattern.size()) - 1;
    return static_cast<std::size_t>(std::popcount(~s & low));
}

std::size_t lcs_bitparallel_blocked(std::u32string_view pattern, std::u32string_view text) {
    const std::size_t words = (pattern.size() + 63) / 64;
    std::unordered_map<char32_t, std::uint32_t> slot;
    std::vector<std::uint64_t> masks;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        auto [it, inserted] = slot.try_emplace(pattern[i],
                                               static_cast<std::uint32_t>(slot.size()));
        if (inserted) masks.resize(masks.size() + words, 0);
        masks[static_cast<std::size_t>(it->second) * words + i / 64] |=
            std::uint64_t{1} << (i % 64);
    }
    std::vector<std::uint64_t> zero_row(words, 0);

    std::vector<std::uint64_t> s(words, ~std::uint64_t{0});
    for (char32_t c : text) {
        const auto it = slot.find(c);
        const std::uint64_t* m =
            it == slot.end() ? zero_row.data()
                             : masks.data() + static_cast<std::size_t>(it->second) * words;
        // Only the addition carries across words; the subtraction cannot
        // borrow because u is a submask of s.
        std::uint64_t carry = 0;
        for (std::size_t w = 0; w < words; ++w) {
            const std::uint64_t sw = s[w];
            const std::uint64_t u = sw & m[w];
            const std::uint64_t sum1 = sw + u;
            const std::uint64_t carry1 = sum1 < sw ? 1 : 0;
            const std::uint64_t sum2 = sum1 + carry;
            const std::uint64_t carry2 = sum2 < sum1 ? 1 : 0;
            s[w] = sum2 | (sw - u);
            carry = carry1 | carry2;
        }
    }
    std::size_t lcs = 0;
    for (std::size_t w = 0; w < words; ++w) {
        std::uint64_t low = ~std::uint64_t{0};
        if (w == words - 1 && pattern.size() % 64 != 0) {
            low = (std::uint64_t{1} << (pattern.size() % 64)) - 1;
        }
        lcs += static_cast<std::size_t>(std::popcount(~s[w] & low));
    }
    return lcs;
}

}  // namespace

std::size_t lcs_bitparallel(std::u32string_view pattern, std::u32string_view text) {
    if (pattern.empty() || text.empty()) return 0;
    if (pattern.size() <= 64) return lcs_bitparallel_word(pattern, text);
    return lcs_bitparallel_blocked(pattern, text);
}

}  // namespace detail

bool backend_available(Backend backend) {
    switch (backend) {
        case Backend::scalar:
        case Backend::bitparallel:
            return true;
        case Backend::avx2:
#if defined(__x86_64__) || defined(_M_X64)
            return __builtin_cpu_supports("avx2") != 0;
#else
            return false;
#endif
    }
    return false;
}

Backend preferred_backend() {
    static const Backend chosen =
        backend_available(Backend::avx2) ? Backend::avx2 : Backend::bitparallel;
    return chosen;
}

const char* backend_name(Backend backend) {
    switch (backend) {
        case Backend::scalar: return "scalar";
        case Backend::bitparallel: return "bitparallel";
        case Backend::avx2: return "avx2";
    }
    return "?";
}

std::size_t lcs_length(std::u32string_view a, std::u32string_view b, Backend backend) {
    switch (backend) {
        case Backend::scalar:
            return detail::lcs_scalar(a, b);
        case Backend::bitparallel:
            return detail::lcs_bitparallel(a, b);
        case Backend::avx2: {
#if defined(__x86_64__) || defined(_M_X64)
            if (backend_available(Backend::avx2) && a.size() <= 64 && !a.empty() && !b.empty()) {
                std::size_t out[1];
                const std::u32string_view patterns[1] = {a};
                detail::lcs_avx2_batch4(patterns, b, out);
                return out[0];
            }
#endif
            return detail::lcs_bitparallel(a, b);
        }
    }
    return detail::lcs_scalar(a, b);
}

std::size_t indel_distance(std::u32string_view a, std::u32string_view b, Backend backend) {
    return a.size() + b.size() - 2 * lcs_length(a, b, backend);
}

double similarity(std::u32string_view a, std::u32string_view b, Backend backend) {
    const std::size_t total = a.size() + b.size();
    if (total == 0) return 1.0;
    const std::size_t distance = indel_distance(a, b, backend);
    return 1.0 - static_cast<double>(distance) / static_cast<double>(total);
}

double similarity_utf8(std::string_view a, std::string_view b, Backend backend) {
    const auto da = unicode::decode_utf8(a);
    const auto db = unicode::decode_utf8(b);
    if (!da || !db) throw std::invalid_argument("similarity_utf8: invalid UTF-8 input");
    return similarity(*da, *db, backend);
}

void similarity_one_to_many(std::u32string_view text,
                            std::span<const std::u32string> patterns,
                            std::span<double> out, Backend backend) {
    if (out.size() != patterns.size()) {
        throw std::invalid_argument("similarity_one_to_many: output size mismatch");
    }
    const auto finish = [&](std::size_t i, std::size_t lcs) {
        const std::size_t total = patterns[i].size() + text.size();
        out[i] = total == 0
                     ? 1.0
                     : 1.0 - static_cast<double>(total - 2 * lcs) / static_cast<double>(total);
    };

#if defined(__x86_64__) || defined(_M_X64)
    if (backend == Backend::avx2 && backend_available(Backend::avx2) && !text.empty()) {
        // Group short patterns four per register; everything else takes the
        // blocked kernel.
        std::vector<std::size_t> batched;
        batched.reserve(patterns.size());
        for (std::size_t i = 0; i < patterns.size(); ++i) {
            if (!patterns[i].empty() && patterns[i].size() <= 64) {
                batched.push_back(i);
            } else {
                finish(i, detail::lcs_bitparallel(patterns[i], text));
            }
        }
        for (std::size_t start = 0; start < batched.size(); start += 4) {
            const std::size_t n = std::min<std::size_t>(4, batched.size() - start);
            std::u32string_view views[4];
            std::size_t lcs[4] = {0, 0, 0, 0};
            for (std::size_t k = 0; k < n; ++k) views[k] = patterns[batched[start + k]];
            detail::lcs_avx2_batch4({views, n}, text, {lcs, n});
            for (std::size_t k = 0; k < n; ++k) finish(batched[start + k], lcs[k]);
        }
        return;
    }
#endif
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        finish(i, lcs_length(patterns[i], text, backend));
    }
}

}  // namespace jsonslots::sim
