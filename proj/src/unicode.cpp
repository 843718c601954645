#include "jsonslots/unicode.hpp"

#include <unicode/unorm2.h>
#include <unicode/ustring.h>
#include <unicode/utypes.h>

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace jsonslots::unicode {

std::optional<std::u32string> decode_utf8(std::string_view text, std::size_t* bad_offset) {
    std::u32string out;
    out.reserve(text.size());
    std::size_t i = 0;
    const auto fail = [&](std::size_t at) -> std::optional<std::u32string> {
        if (bad_offset) *bad_offset = at;
        return std::nullopt;
    };
    while (i < text.size()) {
        const unsigned char lead = static_cast<unsigned char>(text[i]);
        if (lead < 0x80) {
            out.push_back(lead);
            ++i;
            continue;
        }
        int extra;
        std::uint32_t cp;
        std::uint32_t min;
        if ((lead & 0xE0) == 0xC0) {
            extra = 1; cp = lead & 0x1F; min = 0x80;
        } else if ((lead & 0xF0) == 0xE0) {
            extra = 2; cp = lead & 0x0F; min = 0x800;
        } else if ((lead & 0xF8) == 0xF0) {
            extra = 3; cp = lead & 0x07; min = 0x10000;
        } else {
            return fail(i);
        }
        if (i + static_cast<std::size_t>(extra) >= text.size()) return fail(i);
        for (int k = 1; k <= extra; ++k) {
            const unsigned char cont = static_cast<unsigned char>(text[i + k]);
            if ((cont & 0xC0) != 0x80) return fail(i);
            cp = (cp << 6) | (cont & 0x3F);
        }
        if (cp < min) return fail(i);                    // overlong
        if (cp >= 0xD800 && cp <= 0xDFFF) return fail(i); // surrogate
        if (cp > 0x10FFFF) return fail(i);
        out.push_back(static_cast<char32_t>(cp));
        i += 1 + extra;
    }
    return out;
}

std::string encode_utf8(std::u32string_view code_points) {
    std::string out;
    out.reserve(code_points.size());
    for (char32_t c : code_points) {
        const std::uint32_t cp = static_cast<std::uint32_t>(c);
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    }
    return out;
}

std::size_t scalar_count(std::string_view utf8) {
    std::size_t n = 0;
    for (unsigned char byte : utf8) {
        if ((byte & 0xC0) != 0x80) ++n;
    }
    return n;
}

bool is_valid_utf8(std::string_view text) {
    return decode_utf8(text).has_value();
}

std::string nfc(std::string_view utf8) {
    if (utf8.empty()) return {};
    UErrorCode status = U_ZERO_ERROR;
    const UNormalizer2* normalizer = unorm2_getNFCInstance(&status);
    if (U_FAILURE(status)) throw std::runtime_error("ICU NFC instance unavailable");

    // UTF-8 -> UTF-16
    std::vector<UChar> utf16(utf8.size() + 1);
    int32_t utf16_len = 0;
    u_strFromUTF8(utf16.data(), static_cast<int32_t>(utf16.size()), &utf16_len,
                  utf8.data(), static_cast<int32_t>(utf8.size()), &status);
    if (U_FAILURE(status)) throw std::runtime_error("invalid UTF-8 passed to nfc()");

    std::vector<UChar> normalized(static_cast<std::size_t>(utf16_len) * 3 + 16);
    int32_t norm_len = unorm2_normalize(normalizer, utf16.data(), utf16_len,
                                        normalized.data(),
                                        static_cast<int32_t>(normalized.size()), &status);
    if (status == U_BUFFER_OVERFLOW_ERROR) {
        status = U_ZERO_ERROR;
        normalized.resize(static_cast<std::size_t>(norm_len) + 1);
        norm_len = unorm2_normalize(normalizer, utf16.data(), utf16_len,
                                    normalized.data(),
                                    static_cast<int32_t>(normalized.size()), &status);
    }
    if (U_FAILURE(status)) throw std::runtime_error("ICU normalization failed");

    std::string out(static_cast<std::size_t>(norm_len) * 4 + 4, '\0');
    int32_t out_len = 0;
    u_strToUTF8(out.data(), static_cast<int32_t>(out.size()), &out_len,
                normalized.data(), norm_len, &status);
    if (U_FAILURE(status)) throw std::runtime_error("ICU UTF-8 conversion failed");
    out.resize(static_cast<std::size_t>(out_len));
    return out;
}

}  // namespace jsonslots::unicode
