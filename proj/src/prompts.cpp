#include "jsonslots/prompts.hpp"

#include <algorithm>

namespace jsonslots::prompts {

namespace {

std::string expand(const std::string& format, const std::string& intent,
                   const std::string& entities) {
    std::string out = format;
    const auto replace = [&out](std::string_view tag, const std::string& value) {
        const std::size_t at = out.find(tag);
        if (at != std::string::npos) out.replace(at, tag.size(), value);
    };
    replace("{intent}", intent);
    replace("{entities}", entities);
    return out;
}

std::string zero_shot_body(const TaskInput& input, const PromptTemplate& tmpl) {
    std::string lines;
    for (std::size_t i = 0; i < input.requested.size(); ++i) {
        const auto& [intent, entities] = input.requested[i];
        std::string joined;
        for (std::size_t k = 0; k < entities.size(); ++k) {
            if (k > 0) joined += ", ";
            joined += tmpl.snake_case_entities ? entities[k].key : entities[k].display;
        }
        if (i > 0) lines += "\n";
        lines += expand(tmpl.intent_line_format, intent.display(), joined);
    }
    return tmpl.instruction + tmpl.section_separator + lines + tmpl.section_separator +
           input.message + tmpl.section_separator + "[";
}

}  // namespace

Prompt build_prompt(const TaskInput& input, const PromptTemplate& tmpl,
                    const TaskRecord* exemplar) {
    Prompt prompt;
    if (exemplar == nullptr) {
        prompt.mode = PromptMode::zero_shot;
        prompt.text = zero_shot_body(input, tmpl);
        return prompt;
    }
    if (!exemplar->input.shares_intent(input)) {
        throw ExemplarIntentMismatch("exemplar \"" + exemplar->id +
                                     "\" shares no intent with the target");
    }
    prompt.mode = PromptMode::one_shot;
    prompt.exemplar_id = exemplar->id;
    // The exemplar's zero-shot rendering already ends with "["; the rest of
    // its gold JSON completes the demonstration.
    const std::string completed = zero_shot_body(exemplar->input, tmpl) +
                                  canonical_serialize(exemplar->gold).substr(1);
    prompt.text = completed + tmpl.section_separator + zero_shot_body(input, tmpl);
    return prompt;
}

const TaskRecord& select_exemplar(const TaskInput& input, const std::vector<TaskRecord>& pool,
                                  rng::Engine& engine, const std::string& exclude_id) {
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (!exclude_id.empty() && pool[i].id == exclude_id) continue;
        if (pool[i].input.shares_intent(input)) eligible.push_back(i);
    }
    if (eligible.empty()) {
        throw NoEligibleExemplar("no pool record shares an intent with the target");
    }
    const std::size_t pick = rng::uniform_below(engine, eligible.size());
    return pool[eligible[pick]];
}

}  // namespace jsonslots::prompts
