#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace jsonslots::unicode {

// Strict UTF-8 decode. Rejects overlong encodings, surrogates and
// out-of-range code points. Returns std::nullopt on the first bad byte;
// `bad_offset`, when given, receives its position.
std::optional<std::u32string> decode_utf8(std::string_view text,
                                          std::size_t* bad_offset = nullptr);

std::string encode_utf8(std::u32string_view code_points);

// Number of Unicode scalar values in a valid UTF-8 string.
std::size_t scalar_count(std::string_view utf8);

bool is_valid_utf8(std::string_view text);

// Canonical composition (NFC). Input must be valid UTF-8.
std::string nfc(std::string_view utf8);

}  // namespace jsonslots::unicode
