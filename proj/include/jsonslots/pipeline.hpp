#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "jsonslots/core.hpp"
#include "jsonslots/rng.hpp"

namespace jsonslots::pipeline {

// A BIO-tagged utterance from a legacy slot-filling corpus.
struct TaggedUtterance {
    std::vector<std::string> tokens;
    std::vector<std::string> tags;  // O, B-label, I-label
    IntentName intent;
};

// Maps raw slot labels to entity display names; unmapped labels fall back
// to the snake-cased raw label.
struct SlotMap {
    std::map<std::string, std::string> display_names;

    EntityName entity_for(const std::string& label) const;
};

struct ConvertOptions {
    SlotMap slot_map;
    // Called once per duplicate same-label span (first span wins).
    std::function<void(const std::string&)> on_collision;
};

// Per-intent slot inventory in first-seen order, from a full corpus pass.
std::vector<std::pair<IntentName, std::vector<std::string>>> slot_inventory(
    const std::vector<TaggedUtterance>& utterances);

// One utterance to one TaskRecord: message = tokens joined by spaces, one
// instance mapping each slot span to its concatenated tokens. `requested`
// lists the given inventory for the utterance's intent. Throws InvalidBio.
TaskRecord convert_tagged_utterance(const TaggedUtterance& utterance,
                                    const std::vector<std::string>& intent_inventory,
                                    const ConvertOptions& options,
                                    const std::string& id);

// Concatenates k (uniform in [k_min, k_max]) distinct records: messages
// joined with ". ", gold arrays concatenated, requested maps merged.
// Repeated intents across the sampled records are allowed. Throws
// PoolTooSmall when |pool| < k_max.
TaskRecord mix_records(const std::vector<TaskRecord>& pool, rng::Engine& engine,
                       const std::string& id, int k_min = 2, int k_max = 4);

struct Article {
    std::string id;
    std::string abstract_text;
    std::string article_type;
    std::vector<std::pair<std::string, std::string>> properties;
    std::vector<std::string> links;
};

enum class ThresholdMode {
    // A property counts toward the threshold only when its value occurs in
    // the article's abstract (the default).
    filter_then_threshold,
    // Raw presence counts toward the threshold; the in-abstract filter
    // still applies per record afterwards.
    threshold_then_filter,
};

using TypeSchema = std::vector<std::pair<std::string, std::vector<EntityName>>>;

// Retains, per article type, the properties that pass the given occurrence
// threshold (inclusive). Types with no surviving properties are dropped.
TypeSchema derive_type_schema(const std::vector<Article>& articles,
                              double threshold = 0.20,
                              ThresholdMode mode = ThresholdMode::filter_then_threshold);

// message = abstract; one instance holding the schema properties whose
// value occurs in the abstract. Throws UnknownType.
TaskRecord article_to_record(const Article& article, const TypeSchema& schema);

// Merges records whose articles link to each other reciprocally; merged
// groups are capped at `max_group` members, unlinked records pass through.
std::vector<TaskRecord> link_concat(
    const std::vector<TaskRecord>& records,
    const std::vector<std::pair<std::string, std::vector<std::string>>>& links,
    std::size_t max_group = 4);

struct AugmentParams {
    double drop_probability = 0.0;
    bool reorder = false;
};

// Drops each requested entity independently with drop_probability and
// optionally shuffles the survivors; gold pairs follow the requested list
// (dropped keys removed, survivors reordered, values never altered).
TaskRecord augment_record(const TaskRecord& record, const AugmentParams& params,
                          rng::Engine& engine);

}  // namespace jsonslots::pipeline
