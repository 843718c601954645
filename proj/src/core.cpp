#include "jsonslots/core.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "jsonslots/unicode.hpp"

namespace jsonslots {

namespace {

bool is_ascii_alnum(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

std::string trim(std::string_view text) {
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    return std::string(text.substr(begin, end - begin));
}

}  // namespace

std::string to_snake_case(std::string_view display) {
    if (display.empty()) throw InvalidName("display name is empty");
    std::string out;
    out.reserve(display.size());
    bool pending_underscore = false;
    for (char c : display) {
        if (is_ascii_alnum(c)) {
            if (pending_underscore && !out.empty()) out.push_back('_');
            pending_underscore = false;
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else {
            pending_underscore = true;
        }
    }
    if (out.empty()) {
        throw InvalidName("display name \"" + std::string(display) +
                          "\" contains no alphanumeric characters");
    }
    return out;
}

bool is_snake_case(std::string_view key) {
    if (key.empty()) return false;
    if (key.front() == '_' || key.back() == '_') return false;
    for (char c : key) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
        if (!ok) return false;
    }
    return true;
}

IntentName IntentName::parse(std::string_view display) {
    IntentName name;
    std::size_t start = 0;
    while (true) {
        const std::size_t sep = display.find('>', start);
        const std::string_view raw =
            sep == std::string_view::npos ? display.substr(start) : display.substr(start, sep - start);
        std::string segment = trim(raw);
        if (segment.empty()) {
            throw InvalidName("intent name \"" + std::string(display) + "\" has an empty segment");
        }
        name.segments.push_back(std::move(segment));
        if (sep == std::string_view::npos) break;
        start = sep + 1;
    }
    return name;
}

std::string IntentName::display() const {
    std::string out;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (i > 0) out += " > ";
        out += segments[i];
    }
    return out;
}

EntityName EntityName::from_display(std::string_view display) {
    EntityName name;
    name.display = trim(display);
    if (name.display.empty()) throw InvalidName("entity display name is empty");
    name.key = to_snake_case(name.display);
    return name;
}

const std::vector<EntityName>* IntentCatalog::find(const IntentName& intent) const {
    for (const auto& [name, entities] : schemas) {
        if (name == intent) return &entities;
    }
    return nullptr;
}

void IntentCatalog::add(IntentName intent, std::vector<EntityName> entities) {
    if (find(intent) != nullptr) {
        throw DataError("duplicate catalog intent \"" + intent.display() + "\"");
    }
    if (entities.empty()) {
        throw DataError("catalog intent \"" + intent.display() + "\" has no entities");
    }
    schemas.emplace_back(std::move(intent), std::move(entities));
}

const std::string* IntentInstance::find(std::string_view key) const {
    for (const auto& [k, v] : entities) {
        if (k == key) return &v;
    }
    return nullptr;
}

const std::vector<EntityName>* TaskInput::find(const IntentName& intent) const {
    for (const auto& [name, entities] : requested) {
        if (name == intent) return &entities;
    }
    return nullptr;
}

bool TaskInput::shares_intent(const TaskInput& other) const {
    for (const auto& [name, entities] : requested) {
        if (other.requests_intent(name)) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Wire format
// ---------------------------------------------------------------------------

namespace {

using Kind = ExtractionParseError::Kind;

[[noreturn]] void malformed(std::size_t offset, const std::string& reason) {
    throw ExtractionParseError(Kind::malformed_json, offset, reason);
}

[[noreturn]] void violation(std::size_t offset, const std::string& reason) {
    throw ExtractionParseError(Kind::schema_violation, offset, reason);
}

// Minimal JSON reader tracking byte offsets. Object keys are kept in
// order, duplicates included, so the schema layer can report them. For
// objects, keys/key_offsets run parallel to items.
struct JsonValue {
    enum class Type { null_v, bool_v, number, string, array, object };

    Type type = Type::null_v;
    std::size_t offset = 0;
    std::string str;
    std::vector<JsonValue> items;
    std::vector<std::string> keys;
    std::vector<std::size_t> key_offsets;
};

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    static constexpr std::size_t kMaxDepth = 128;

    JsonValue parse_document() {
        skip_ws();
        if (pos_ >= text_.size()) malformed(pos_, "empty input");
        JsonValue value = parse_value();
        skip_ws();
        if (pos_ < text_.size()) malformed(pos_, "trailing characters after JSON value");
        return value;
    }

private:
    void skip_ws() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r') ++pos_;
            else break;
        }
    }

    char peek() const { return text_[pos_]; }

    void expect(char c, const char* what) {
        if (pos_ >= text_.size() || text_[pos_] != c) {
            malformed(pos_, std::string("expected ") + what);
        }
        ++pos_;
    }

    JsonValue parse_value() {
        if (pos_ >= text_.size()) malformed(pos_, "unexpected end of input");
        if (depth_ >= kMaxDepth) malformed(pos_, "nesting too deep");
        const char c = peek();
        switch (c) {
            case '[': return parse_array();
            case '{': return parse_object();
            case '"': return parse_string_value();
            case 't': return parse_literal("true", JsonValue::Type::bool_v);
            case 'f': return parse_literal("false", JsonValue::Type::bool_v);
            case 'n': return parse_literal("null", JsonValue::Type::null_v);
            default:
                if (c == '-' || (c >= '0' && c <= '9')) return parse_number();
                malformed(pos_, "unexpected character");
        }
    }

    JsonValue parse_literal(std::string_view word, JsonValue::Type type) {
        JsonValue v;
        v.type = type;
        v.offset = pos_;
        if (text_.substr(pos_, word.size()) != word) malformed(pos_, "invalid literal");
        pos_ += word.size();
        return v;
    }

    JsonValue parse_number() {
        JsonValue v;
        v.type = JsonValue::Type::number;
        v.offset = pos_;
        const std::size_t start = pos_;
        if (peek() == '-') ++pos_;
        if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(peek()))) {
            malformed(pos_, "invalid number");
        }
        if (peek() == '0') {
            ++pos_;
        } else {
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        }
        if (pos_ < text_.size() && peek() == '.') {
            ++pos_;
            if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(peek()))) {
                malformed(pos_, "invalid number");
            }
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        }
        if (pos_ < text_.size() && (peek() == 'e' || peek() == 'E')) {
            ++pos_;
            if (pos_ < text_.size() && (peek() == '+' || peek() == '-')) ++pos_;
            if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(peek()))) {
                malformed(pos_, "invalid number");
            }
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        }
        v.str = std::string(text_.substr(start, pos_ - start));
        return v;
    }

    JsonValue parse_string_value() {
        JsonValue v;
        v.type = JsonValue::Type::string;
        v.offset = pos_;
        v.str = parse_string();
        return v;
    }

    std::string parse_string() {
        const std::size_t string_start = pos_;
        expect('"', "'\"'");
        std::string raw;
        while (true) {
            if (pos_ >= text_.size()) malformed(string_start, "unterminated string");
            const unsigned char c = static_cast<unsigned char>(text_[pos_]);
            if (c == '"') {
                ++pos_;
                break;
            }
            if (c < 0x20) malformed(pos_, "raw control character in string");
            if (c == '\\') {
                ++pos_;
                if (pos_ >= text_.size()) malformed(string_start, "unterminated escape");
                const char esc = text_[pos_++];
                switch (esc) {
                    case '"': raw.push_back('"'); break;
                    case '\\': raw.push_back('\\'); break;
                    case '/': raw.push_back('/'); break;
                    case 'b': raw.push_back('\b'); break;
                    case 'f': raw.push_back('\f'); break;
                    case 'n': raw.push_back('\n'); break;
                    case 'r': raw.push_back('\r'); break;
                    case 't': raw.push_back('\t'); break;
                    case 'u': raw += parse_unicode_escape(); break;
                    default: malformed(pos_ - 1, "invalid escape sequence");
                }
                continue;
            }
            raw.push_back(static_cast<char>(c));
            ++pos_;
        }
        std::size_t bad = 0;
        if (!unicode::decode_utf8(raw, &bad)) {
            malformed(string_start, "invalid UTF-8 in string");
        }
        return raw;
    }

    std::string parse_unicode_escape() {
        const std::size_t at = pos_ - 2;
        const std::uint32_t first = parse_hex4(at);
        std::uint32_t cp = first;
        if (first >= 0xD800 && first <= 0xDBFF) {
            if (pos_ + 1 >= text_.size() || text_[pos_] != '\\' || text_[pos_ + 1] != 'u') {
                malformed(at, "unpaired surrogate escape");
            }
            pos_ += 2;
            const std::uint32_t second = parse_hex4(at);
            if (second < 0xDC00 || second > 0xDFFF) malformed(at, "invalid low surrogate");
            cp = 0x10000 + ((first - 0xD800) << 10) + (second - 0xDC00);
        } else if (first >= 0xDC00 && first <= 0xDFFF) {
            malformed(at, "unpaired surrogate escape");
        }
        return unicode::encode_utf8(std::u32string(1, static_cast<char32_t>(cp)));
    }

    std::uint32_t parse_hex4(std::size_t error_at) {
        if (pos_ + 4 > text_.size()) malformed(error_at, "truncated \\u escape");
        std::uint32_t value = 0;
        for (int i = 0; i < 4; ++i) {
            const char c = text_[pos_++];
            value <<= 4;
            if (c >= '0' && c <= '9') value |= static_cast<std::uint32_t>(c - '0');
            else if (c >= 'a' && c <= 'f') value |= static_cast<std::uint32_t>(c - 'a' + 10);
            else if (c >= 'A' && c <= 'F') value |= static_cast<std::uint32_t>(c - 'A' + 10);
            else malformed(error_at, "invalid \\u escape");
        }
        return value;
    }

    JsonValue parse_array() {
        JsonValue v;
        v.type = JsonValue::Type::array;
        v.offset = pos_;
        ++depth_;
        expect('[', "'['");
        skip_ws();
        if (pos_ < text_.size() && peek() == ']') {
            ++pos_;
            --depth_;
            return v;
        }
        while (true) {
            skip_ws();
            v.items.push_back(parse_value());
            skip_ws();
            if (pos_ >= text_.size()) malformed(v.offset, "unterminated array");
            if (peek() == ',') {
                ++pos_;
                continue;
            }
            if (peek() == ']') {
                ++pos_;
                break;
            }
            malformed(pos_, "expected ',' or ']'");
        }
        --depth_;
        return v;
    }

    JsonValue parse_object() {
        JsonValue v;
        v.type = JsonValue::Type::object;
        v.offset = pos_;
        ++depth_;
        expect('{', "'{'");
        skip_ws();
        if (pos_ < text_.size() && peek() == '}') {
            ++pos_;
            --depth_;
            return v;
        }
        while (true) {
            skip_ws();
            if (pos_ >= text_.size() || peek() != '"') malformed(pos_, "expected object key");
            v.key_offsets.push_back(pos_);
            v.keys.push_back(parse_string());
            skip_ws();
            expect(':', "':'");
            skip_ws();
            v.items.push_back(parse_value());
            skip_ws();
            if (pos_ >= text_.size()) malformed(v.offset, "unterminated object");
            if (peek() == ',') {
                ++pos_;
                continue;
            }
            if (peek() == '}') {
                ++pos_;
                break;
            }
            malformed(pos_, "expected ',' or '}'");
        }
        --depth_;
        return v;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t depth_ = 0;
};

const char* type_name(JsonValue::Type type) {
    switch (type) {
        case JsonValue::Type::null_v: return "null";
        case JsonValue::Type::bool_v: return "boolean";
        case JsonValue::Type::number: return "number";
        case JsonValue::Type::string: return "string";
        case JsonValue::Type::array: return "array";
        case JsonValue::Type::object: return "object";
    }
    return "?";
}

IntentInstance instance_from_object(const JsonValue& object) {
    IntentInstance instance;
    bool have_intent = false;
    for (std::size_t i = 0; i < object.keys.size(); ++i) {
        const JsonValue& field_value = object.items[i];
        const std::size_t key_offset = object.key_offsets[i];
        if (field_value.type != JsonValue::Type::string) {
            violation(field_value.offset,
                      "non-string value for key \"" + object.keys[i] + "\" (" +
                          type_name(field_value.type) + ")");
        }
        const std::string key = unicode::nfc(object.keys[i]);
        const std::string value = unicode::nfc(field_value.str);
        if (key == "intent") {
            if (have_intent) violation(key_offset, "duplicate \"intent\" key");
            have_intent = true;
            try {
                instance.intent = IntentName::parse(value);
            } catch (const InvalidName& e) {
                violation(field_value.offset, e.what());
            }
            continue;
        }
        if (key.empty()) violation(key_offset, "empty entity key");
        if (value.empty()) violation(field_value.offset, "empty value for key \"" + key + "\"");
        if (instance.find(key) != nullptr) {
            violation(key_offset, "duplicate entity key \"" + key + "\"");
        }
        instance.entities.emplace_back(key, value);
    }
    if (!have_intent) violation(object.offset, "missing \"intent\" key");
    return instance;
}

}  // namespace

Extraction parse_extraction(std::string_view text) {
    Reader reader(text);
    const JsonValue document = reader.parse_document();
    if (document.type != JsonValue::Type::array) {
        violation(document.offset, std::string("top-level value is not an array (") +
                                       type_name(document.type) + ")");
    }
    Extraction extraction;
    extraction.instances.reserve(document.items.size());
    for (const JsonValue& element : document.items) {
        if (element.type != JsonValue::Type::object) {
            violation(element.offset, std::string("array element is not an object (") +
                                          type_name(element.type) + ")");
        }
        extraction.instances.push_back(instance_from_object(element));
    }
    return extraction;
}

std::optional<Extraction> try_parse_extraction(std::string_view text, ParseFailure* failure) {
    try {
        return parse_extraction(text);
    } catch (const ExtractionParseError& e) {
        if (failure) *failure = ParseFailure{e.kind(), e.offset(), e.reason()};
        return std::nullopt;
    }
}

std::string json_escape(std::string_view text) {
    std::string out;
    out.reserve(text.size() + 2);
    for (unsigned char c : text) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\b': out += "\\b"; break;
            case '\f': out += "\\f"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (c < 0x20) {
                    static const char* hex = "0123456789abcdef";
                    out += "\\u00";
                    out += hex[c >> 4];
                    out += hex[c & 0xF];
                } else {
                    out.push_back(static_cast<char>(c));
                }
        }
    }
    return out;
}

std::string canonical_serialize(const Extraction& extraction) {
    std::string out = "[";
    for (std::size_t i = 0; i < extraction.instances.size(); ++i) {
        const IntentInstance& instance = extraction.instances[i];
        if (i > 0) out += ",";
        out += "{\"intent\":\"" + json_escape(instance.intent.display()) + "\"";
        for (const auto& [key, value] : instance.entities) {
            out += ",\"" + json_escape(key) + "\":\"" + json_escape(value) + "\"";
        }
        out += "}";
    }
    out += "]";
    return out;
}

std::vector<std::string> validate_record(const TaskRecord& record) {
    std::vector<std::string> problems;
    if (record.id.empty()) problems.push_back("empty record id");
    if (record.input.message.empty()) problems.push_back("empty message");
    if (record.input.requested.empty()) problems.push_back("empty requested map");

    std::set<IntentName> seen_intents;
    for (const auto& [intent, entities] : record.input.requested) {
        if (!seen_intents.insert(intent).second) {
            problems.push_back("duplicate requested intent \"" + intent.display() + "\"");
        }
        if (entities.empty()) {
            problems.push_back("requested intent \"" + intent.display() + "\" lists no entities");
        }
        std::set<std::string> seen_keys;
        for (const EntityName& entity : entities) {
            if (!is_snake_case(entity.key)) {
                problems.push_back("entity key \"" + entity.key + "\" is not snake_case");
            }
            if (!seen_keys.insert(entity.key).second) {
                problems.push_back("duplicate entity \"" + entity.key + "\" for intent \"" +
                                   intent.display() + "\"");
            }
        }
    }
    for (std::size_t i = 0; i < record.gold.instances.size(); ++i) {
        const IntentInstance& instance = record.gold.instances[i];
        const auto* entities = record.input.find(instance.intent);
        if (entities == nullptr) {
            problems.push_back("gold instance " + std::to_string(i) + " has unrequested intent \"" +
                               instance.intent.display() + "\"");
            continue;
        }
        for (const auto& [key, value] : instance.entities) {
            const bool known = std::any_of(entities->begin(), entities->end(),
                                           [&](const EntityName& e) { return e.key == key; });
            if (!known) {
                problems.push_back("gold instance " + std::to_string(i) + " has unrequested key \"" +
                                   key + "\"");
            }
            if (value.empty()) {
                problems.push_back("gold instance " + std::to_string(i) + " has empty value for \"" +
                                   key + "\"");
            }
        }
    }
    return problems;
}

}  // namespace jsonslots
