#include "jsonslots/pipeline.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "jsonslots/unicode.hpp"

namespace jsonslots::pipeline {

namespace {

void merge_requested(std::vector<std::pair<IntentName, std::vector<EntityName>>>& target,
                     const std::vector<std::pair<IntentName, std::vector<EntityName>>>& extra) {
    for (const auto& [intent, entities] : extra) {
        auto it = std::find_if(target.begin(), target.end(),
                               [&](const auto& entry) { return entry.first == intent; });
        if (it == target.end()) {
            target.emplace_back(intent, entities);
            continue;
        }
        for (const EntityName& entity : entities) {
            const bool present = std::any_of(it->second.begin(), it->second.end(),
                                             [&](const EntityName& e) { return e.key == entity.key; });
            if (!present) it->second.push_back(entity);
        }
    }
}

}  // namespace

EntityName SlotMap::entity_for(const std::string& label) const {
    const auto it = display_names.find(label);
    if (it != display_names.end()) return EntityName::from_display(it->second);
    EntityName fallback;
    fallback.key = to_snake_case(label);
    fallback.display = fallback.key;
    return fallback;
}

std::vector<std::pair<IntentName, std::vector<std::string>>> slot_inventory(
    const std::vector<TaggedUtterance>& utterances) {
    std::vector<std::pair<IntentName, std::vector<std::string>>> inventory;
    for (const TaggedUtterance& utterance : utterances) {
        auto it = std::find_if(inventory.begin(), inventory.end(),
                               [&](const auto& entry) { return entry.first == utterance.intent; });
        if (it == inventory.end()) {
            inventory.emplace_back(utterance.intent, std::vector<std::string>{});
            it = std::prev(inventory.end());
        }
        for (const std::string& tag : utterance.tags) {
            if (tag.size() < 2 || tag[1] != '-') continue;
            const std::string label = tag.substr(2);
            if (std::find(it->second.begin(), it->second.end(), label) == it->second.end()) {
                it->second.push_back(label);
            }
        }
    }
    return inventory;
}

TaskRecord convert_tagged_utterance(const TaggedUtterance& utterance,
                                    const std::vector<std::string>& intent_inventory,
                                    const ConvertOptions& options, const std::string& id) {
    if (utterance.tokens.size() != utterance.tags.size()) {
        throw InvalidBio("token/tag count mismatch (" + std::to_string(utterance.tokens.size()) +
                         " vs " + std::to_string(utterance.tags.size()) + ")");
    }
    if (utterance.tokens.empty()) throw InvalidBio("empty utterance");

    // Collect spans, validating the BIO sequence as we go.
    std::vector<std::pair<std::string, std::string>> spans;  // label -> text
    std::string open_label;
    std::string open_text;
    const auto close = [&]() {
        if (!open_label.empty()) {
            spans.emplace_back(open_label, open_text);
            open_label.clear();
            open_text.clear();
        }
    };
    for (std::size_t i = 0; i < utterance.tags.size(); ++i) {
        const std::string& tag = utterance.tags[i];
        if (tag == "O") {
            close();
            continue;
        }
        if (tag.size() < 3 || (tag[0] != 'B' && tag[0] != 'I') || tag[1] != '-') {
            throw InvalidBio("bad tag \"" + tag + "\" at token " + std::to_string(i));
        }
        const std::string label = tag.substr(2);
        if (tag[0] == 'B') {
            close();
            open_label = label;
            open_text = utterance.tokens[i];
        } else {
            if (open_label != label) {
                throw InvalidBio("I-" + label + " at token " + std::to_string(i) +
                                 " does not continue a span");
            }
            open_text += " " + utterance.tokens[i];
        }
    }
    close();

    TaskRecord record;
    record.id = id;
    for (std::size_t i = 0; i < utterance.tokens.size(); ++i) {
        if (i > 0) record.input.message += " ";
        record.input.message += utterance.tokens[i];
    }

    std::vector<EntityName> requested_entities;
    for (const std::string& label : intent_inventory) {
        requested_entities.push_back(options.slot_map.entity_for(label));
    }
    record.input.requested.emplace_back(utterance.intent, std::move(requested_entities));

    IntentInstance instance;
    instance.intent = utterance.intent;
    for (const auto& [label, text] : spans) {
        const EntityName entity = options.slot_map.entity_for(label);
        if (instance.find(entity.key) != nullptr) {
            // A flat entity map cannot hold a second span; first span wins.
            if (options.on_collision) {
                options.on_collision("duplicate span for label \"" + label + "\" in " + id);
            }
            continue;
        }
        instance.entities.emplace_back(entity.key, text);
    }
    record.gold.instances.push_back(std::move(instance));
    return record;
}

TaskRecord mix_records(const std::vector<TaskRecord>& pool, rng::Engine& engine,
                       const std::string& id, int k_min, int k_max) {
    if (k_min < 1 || k_max < k_min) {
        throw DataError("invalid mix range [" + std::to_string(k_min) + ", " +
                        std::to_string(k_max) + "]");
    }
    if (pool.size() < static_cast<std::size_t>(k_max)) {
        throw PoolTooSmall("mixing needs at least " + std::to_string(k_max) +
                           " records, got " + std::to_string(pool.size()));
    }
    const int k = k_min + static_cast<int>(rng::uniform_below(
                              engine, static_cast<std::uint64_t>(k_max - k_min + 1)));
    const std::vector<std::size_t> picks =
        rng::sample_indices(engine, pool.size(), static_cast<std::size_t>(k));

    TaskRecord mixed;
    mixed.id = id;
    for (std::size_t n = 0; n < picks.size(); ++n) {
        const TaskRecord& source = pool[picks[n]];
        if (n > 0) mixed.input.message += ". ";
        mixed.input.message += source.input.message;
        merge_requested(mixed.input.requested, source.input.requested);
        for (const IntentInstance& instance : source.gold.instances) {
            mixed.gold.instances.push_back(instance);
        }
    }
    return mixed;
}

TypeSchema derive_type_schema(const std::vector<Article>& articles, double threshold,
                              ThresholdMode mode) {
    // Group articles by type, preserving first-seen type order.
    std::vector<std::string> type_order;
    std::map<std::string, std::vector<const Article*>> by_type;
    for (const Article& article : articles) {
        auto [it, inserted] = by_type.try_emplace(article.article_type);
        if (inserted) type_order.push_back(article.article_type);
        it->second.push_back(&article);
    }

    TypeSchema schema;
    for (const std::string& type : type_order) {
        const auto& group = by_type[type];
        std::vector<std::string> property_order;
        std::map<std::string, std::size_t> counts;
        for (const Article* article : group) {
            for (const auto& [name, value] : article->properties) {
                const bool countable = mode == ThresholdMode::threshold_then_filter ||
                                       article->abstract_text.find(value) != std::string::npos;
                if (!countable) continue;
                auto [it, inserted] = counts.try_emplace(name, 0);
                if (inserted) property_order.push_back(name);
                ++it->second;
            }
        }
        std::vector<EntityName> retained;
        for (const std::string& name : property_order) {
            const double share = static_cast<double>(counts[name]) /
                                 static_cast<double>(group.size());
            if (share >= threshold - 1e-12) {
                EntityName entity;
                entity.display = name;
                entity.key = to_snake_case(name);
                retained.push_back(std::move(entity));
            }
        }
        if (!retained.empty()) schema.emplace_back(type, std::move(retained));
    }
    return schema;
}

TaskRecord article_to_record(const Article& article, const TypeSchema& schema) {
    const auto it = std::find_if(schema.begin(), schema.end(), [&](const auto& entry) {
        return entry.first == article.article_type;
    });
    if (it == schema.end()) {
        throw UnknownType("article type \"" + article.article_type + "\" has no schema");
    }

    TaskRecord record;
    record.id = article.id;
    record.input.message = article.abstract_text;
    const IntentName intent = IntentName::parse(article.article_type);
    record.input.requested.emplace_back(intent, it->second);

    IntentInstance instance;
    instance.intent = intent;
    for (const EntityName& entity : it->second) {
        const auto prop = std::find_if(article.properties.begin(), article.properties.end(),
                                       [&](const auto& p) { return p.first == entity.display; });
        if (prop == article.properties.end()) continue;
        if (article.abstract_text.find(prop->second) == std::string::npos) continue;
        instance.entities.emplace_back(entity.key, prop->second);
    }
    record.gold.instances.push_back(std::move(instance));
    return record;
}

std::vector<TaskRecord> link_concat(
    const std::vector<TaskRecord>& records,
    const std::vector<std::pair<std::string, std::vector<std::string>>>& links,
    std::size_t max_group) {
    std::map<std::string, std::size_t> index_of;
    for (std::size_t i = 0; i < records.size(); ++i) index_of[records[i].id] = i;

    std::map<std::string, std::set<std::string>> outgoing;
    for (const auto& [from, targets] : links) {
        for (const std::string& to : targets) outgoing[from].insert(to);
    }

    // Union-find over reciprocal links only.
    std::vector<std::size_t> parent(records.size());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
    const std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (const auto& [from, targets] : outgoing) {
        const auto from_it = index_of.find(from);
        if (from_it == index_of.end()) continue;
        for (const std::string& to : targets) {
            const auto to_it = index_of.find(to);
            if (to_it == index_of.end()) continue;
            const auto back = outgoing.find(to);
            const bool mutual = back != outgoing.end() && back->second.count(from) > 0;
            if (mutual) parent[find(from_it->second)] = find(to_it->second);
        }
    }

    std::map<std::size_t, std::vector<std::size_t>> groups;
    std::vector<std::size_t> group_order;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const std::size_t root = find(i);
        auto [it, inserted] = groups.try_emplace(root);
        if (inserted) group_order.push_back(root);
        it->second.push_back(i);
    }

    std::vector<TaskRecord> out;
    for (std::size_t root : group_order) {
        const auto& members = groups[root];
        for (std::size_t start = 0; start < members.size(); start += max_group) {
            const std::size_t end = std::min(members.size(), start + max_group);
            if (end - start == 1) {
                out.push_back(records[members[start]]);
                continue;
            }
            TaskRecord merged;
            for (std::size_t m = start; m < end; ++m) {
                const TaskRecord& source = records[members[m]];
                if (m > start) {
                    merged.id += "+";
                    merged.input.message += " ";
                }
                merged.id += source.id;
                merged.input.message += source.input.message;
                merge_requested(merged.input.requested, source.input.requested);
                for (const IntentInstance& instance : source.gold.instances) {
                    merged.gold.instances.push_back(instance);
                }
            }
            out.push_back(std::move(merged));
        }
    }
    return out;
}

TaskRecord augment_record(const TaskRecord& record, const AugmentParams& params,
                          rng::Engine& engine) {
    TaskRecord augmented = record;
    for (auto& [intent, entities] : augmented.input.requested) {
        std::vector<EntityName> survivors;
        for (const EntityName& entity : entities) {
            if (rng::uniform01(engine) >= params.drop_probability) {
                survivors.push_back(entity);
            }
        }
        if (params.reorder) rng::shuffle(engine, survivors);
        entities = std::move(survivors);
    }
    // Gold pairs follow the requested list: dropped keys removed, the rest
    // reordered to match, values untouched.
    for (IntentInstance& instance : augmented.gold.instances) {
        const std::vector<EntityName>* requested = augmented.input.find(instance.intent);
        std::vector<std::pair<std::string, std::string>> kept;
        if (requested != nullptr) {
            for (const EntityName& entity : *requested) {
                if (const std::string* value = instance.find(entity.key)) {
                    kept.emplace_back(entity.key, *value);
                }
            }
        }
        instance.entities = std::move(kept);
    }
    return augmented;
}

}  // namespace jsonslots::pipeline
