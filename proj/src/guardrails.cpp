#include "jsonslots/guardrails.hpp"

#include <algorithm>

namespace jsonslots::guardrails {

Extraction sanitize_extraction(const Extraction& extraction, const TaskInput& input) {
    Extraction sanitized;
    sanitized.instances.reserve(extraction.instances.size());
    for (const IntentInstance& instance : extraction.instances) {
        const std::vector<EntityName>* requested = input.find(instance.intent);
        if (requested == nullptr) continue;  // intent was not requested
        IntentInstance kept;
        kept.intent = instance.intent;
        for (const auto& [key, value] : instance.entities) {
            const bool key_requested =
                std::any_of(requested->begin(), requested->end(),
                            [&](const EntityName& e) { return e.key == key; });
            if (!key_requested) continue;
            if (input.message.find(value) == std::string::npos) continue;
            kept.entities.emplace_back(key, value);
        }
        sanitized.instances.push_back(std::move(kept));
    }
    return sanitized;
}

}  // namespace jsonslots::guardrails
