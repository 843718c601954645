#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jsonslots/core.hpp"
#include "jsonslots/rng.hpp"

namespace jsonslots::prompts {

enum class PromptMode { zero_shot, one_shot };

struct PromptTemplate {
    std::string instruction =
        "Extract the entities for each intent from the message below and return a JSON array.";
    // {intent} and {entities} expand to the intent display name and the
    // comma-joined entity keys.
    std::string intent_line_format = "{intent}: {entities}";
    std::string section_separator = "\n\n";
    // Snake-cased keys by default; display names when false.
    bool snake_case_entities = true;
};

struct Prompt {
    std::string text;  // always ends with the opening "["
    PromptMode mode = PromptMode::zero_shot;
    std::optional<std::string> exemplar_id;
};

// Renders the instruction, one line per requested intent, the message and
// the opening bracket. With an exemplar, its completed rendering (zero-shot
// body plus gold JSON) is prepended; the exemplar must share at least one
// requested intent or ExemplarIntentMismatch is thrown.
Prompt build_prompt(const TaskInput& input, const PromptTemplate& tmpl,
                    const TaskRecord* exemplar = nullptr);

// Uniform choice among pool records that share a requested intent with the
// input and whose id differs from exclude_id. Throws NoEligibleExemplar.
const TaskRecord& select_exemplar(const TaskInput& input,
                                  const std::vector<TaskRecord>& pool,
                                  rng::Engine& engine,
                                  const std::string& exclude_id = {});

}  // namespace jsonslots::prompts
