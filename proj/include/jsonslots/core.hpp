#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jsonslots/errors.hpp"

namespace jsonslots {

// Lowercases and snake-cases a display name: runs of non-alphanumeric
// characters collapse to a single underscore, with no leading or trailing
// underscore. Throws InvalidName when the input is empty or contains no
// alphanumeric characters at all.
std::string to_snake_case(std::string_view display);

bool is_snake_case(std::string_view key);

// Hierarchical intent name, e.g. "Order > Amendment > Remove Item".
struct IntentName {
    std::vector<std::string> segments;

    // Splits a display form on '>' and trims surrounding whitespace.
    // Throws InvalidName when any segment ends up empty.
    static IntentName parse(std::string_view display);

    std::string display() const;

    auto operator<=>(const IntentName&) const = default;
};

struct EntityName {
    std::string display;
    std::string key;  // to_snake_case(display)

    static EntityName from_display(std::string_view display);

    auto operator<=>(const EntityName&) const = default;
};

// Predefined intents with their ordered entity lists.
struct IntentCatalog {
    std::vector<std::pair<IntentName, std::vector<EntityName>>> schemas;

    const std::vector<EntityName>* find(const IntentName& intent) const;
    void add(IntentName intent, std::vector<EntityName> entities);
};

// One occurrence of an intent with its entity key-value pairs. The entity
// map preserves insertion order; keys are unique and never "intent".
struct IntentInstance {
    IntentName intent;
    std::vector<std::pair<std::string, std::string>> entities;

    const std::string* find(std::string_view key) const;
    // 1 + |entities|; the intent label counts as a pair.
    std::size_t pair_count() const { return 1 + entities.size(); }

    bool operator==(const IntentInstance&) const = default;
};

struct Extraction {
    std::vector<IntentInstance> instances;

    bool operator==(const Extraction&) const = default;
};

// A message with the intents to look for and, per intent, the entities to
// extract. Entity lists keep their stated order.
struct TaskInput {
    std::string message;
    std::vector<std::pair<IntentName, std::vector<EntityName>>> requested;

    const std::vector<EntityName>* find(const IntentName& intent) const;
    bool requests_intent(const IntentName& intent) const { return find(intent) != nullptr; }
    bool shares_intent(const TaskInput& other) const;
};

struct TaskRecord {
    std::string id;
    TaskInput input;
    Extraction gold;
    std::vector<std::string> flags;  // e.g. "unfaithful" on synthetic records
};

// Parses arbitrary text as the canonical wire format: a JSON array of flat
// objects, each carrying a string "intent" key plus string-valued entity
// keys. Keys and values are NFC-normalized. Throws ExtractionParseError.
Extraction parse_extraction(std::string_view text);

struct ParseFailure {
    ExtractionParseError::Kind kind;
    std::size_t offset = 0;
    std::string reason;
};

std::optional<Extraction> try_parse_extraction(std::string_view text,
                                               ParseFailure* failure = nullptr);

// Compact deterministic serialization: no insignificant whitespace,
// "intent" first, entity keys in stored order.
std::string canonical_serialize(const Extraction& extraction);

std::string json_escape(std::string_view text);

// Returns a list of invariant violations (empty when the record is valid):
// non-empty message and requested map, >= 1 entity per requested intent,
// snake-case requested keys, gold intents/keys covered by the request.
std::vector<std::string> validate_record(const TaskRecord& record);

}  // namespace jsonslots
