#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace jsonslots::sim {

// Indel distance (minimum insertions + deletions) over Unicode scalar
// values, and the normalized similarity 1 - d / (|a| + |b|) built on it.
//
// Three equivalent kernels compute the underlying LCS length:
//   scalar       — two-row dynamic program; the reference everything else
//                  is tested against
//   bitparallel  — word-parallel LCS (single 64-bit word for short
//                  patterns, blocked for longer ones)
//   avx2         — four patterns per 256-bit register against one text;
//                  x86-64 only, picked at runtime via cpuid
enum class Backend { scalar, bitparallel, avx2 };

bool backend_available(Backend backend);

// Fastest backend supported by the running CPU.
Backend preferred_backend();

const char* backend_name(Backend backend);

std::size_t lcs_length(std::u32string_view a, std::u32string_view b,
                       Backend backend = preferred_backend());

std::size_t indel_distance(std::u32string_view a, std::u32string_view b,
                           Backend backend = preferred_backend());

// 1 - indel / (|a| + |b|); 1.0 when both inputs are empty. Symmetric.
double similarity(std::u32string_view a, std::u32string_view b,
                  Backend backend = preferred_backend());

// UTF-8 convenience overload; lengths are counted in code points.
double similarity_utf8(std::string_view a, std::string_view b,
                       Backend backend = preferred_backend());

// Scores one text against many patterns. With the avx2 backend, patterns of
// at most 64 code points are processed four per register; longer ones fall
// back to the blocked bit-parallel kernel.
void similarity_one_to_many(std::u32string_view text,
                            std::span<const std::u32string> patterns,
                            std::span<double> out,
                            Backend backend = preferred_backend());

namespace detail {

std::size_t lcs_scalar(std::u32string_view a, std::u32string_view b);
std::size_t lcs_bitparallel(std::u32string_view pattern, std::u32string_view text);

#if defined(__x86_64__) || defined(_M_X64)
// pattern_count <= 4, every pattern <= 64 code points.
void lcs_avx2_batch4(std::span<const std::u32string_view> patterns,
                     std::u32string_view text,
                     std::span<std::size_t> out);
#endif

}  // namespace detail

}  // namespace jsonslots::sim
