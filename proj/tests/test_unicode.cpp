#include <doctest.h>

#include "jsonslots/unicode.hpp"

using namespace jsonslots;

TEST_CASE("utf8 decode/encode round trip") {
    const std::string samples[] = {
        "",
        "hello",
        "café",
        "中文 text",
        "emoji \U0001F600 end",
    };
    for (const std::string& sample : samples) {
        const auto decoded = unicode::decode_utf8(sample);
        REQUIRE(decoded.has_value());
        CHECK(unicode::encode_utf8(*decoded) == sample);
    }
}

TEST_CASE("utf8 strict rejections") {
    std::size_t at = 99;
    CHECK_FALSE(unicode::decode_utf8("\xC0\xAF", &at).has_value());  // overlong '/'
    CHECK(at == 0);
    CHECK_FALSE(unicode::decode_utf8("ok\xED\xA0\x80", &at).has_value());  // surrogate
    CHECK(at == 2);
    CHECK_FALSE(unicode::decode_utf8("\xE2\x82", &at).has_value());  // truncated
    CHECK_FALSE(unicode::decode_utf8("\x80", &at).has_value());      // stray continuation
    CHECK_FALSE(unicode::decode_utf8("\xF5\x80\x80\x80", &at).has_value());  // > U+10FFFF
}

TEST_CASE("scalar count") {
    CHECK(unicode::scalar_count("") == 0);
    CHECK(unicode::scalar_count("abc") == 3);
    CHECK(unicode::scalar_count("café") == 4);
    CHECK(unicode::scalar_count("\U0001F600") == 1);
}

TEST_CASE("nfc composes combining sequences") {
    // e + COMBINING ACUTE ACCENT -> U+00E9
    CHECK(unicode::nfc("é") == "é");
    // Hangul jamo compose to a syllable
    CHECK(unicode::nfc("가") == "가");
    // already-composed text is unchanged
    CHECK(unicode::nfc("café") == "café");
    CHECK(unicode::nfc("plain ascii") == "plain ascii");
    CHECK(unicode::nfc("") == "");
}

TEST_CASE("nfc is idempotent") {
    const std::string samples[] = {"é", "ä́bc", "Å", "mixed é text"};
    for (const std::string& sample : samples) {
        const std::string once = unicode::nfc(sample);
        CHECK(unicode::nfc(once) == once);
    }
}
