#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "jsonslots/core.hpp"
#include "jsonslots/rng.hpp"

namespace jsonslots::synth {

// Text-completion backend. The mock implementation is offline and fully
// deterministic given a fixture file; the live one talks to an HTTP
// endpoint configured through the environment.
class CompletionClient {
public:
    virtual ~CompletionClient() = default;
    virtual std::string complete(const std::string& prompt) = 0;
    virtual const char* mode() const = 0;
};

// FNV-1a over the prompt bytes; fixture completions are keyed by this.
std::string prompt_fingerprint(std::string_view prompt);

// Fixture layout:
//   { "completions": { "<fingerprint>": "email text", ... },
//     "fallback": { "kind": "faithful_template" } }
// Without a fallback entry, a prompt whose fingerprint is absent raises
// FixtureMiss. The faithful_template fallback composes a deterministic
// email that embeds every value of the target JSON found in the prompt.
std::unique_ptr<CompletionClient> make_mock_client(const std::string& fixture_path);

struct LiveConfig {
    std::string base_url;    // SYNTH_API_BASE
    std::string model;       // SYNTH_API_MODEL
    std::string auth_token;  // SYNTH_API_TOKEN
    int max_attempts = 3;
    std::size_t response_cap = 8192;

    static LiveConfig from_environment();
};

std::unique_ptr<CompletionClient> make_live_client(LiveConfig config);

struct GenerationSpec {
    Extraction target;                // fabricated values
    std::string adjective;
    std::vector<TaskRecord> exemplars;  // exactly 3, each sharing an intent
};

inline const std::array<const char*, 8> kDefaultAdjectives = {
    "informal", "formal", "terse", "verbose",
    "tabular",  "bulleted", "apologetic", "urgent",
};

// 1-4 instances with intents drawn (repeats allowed) from the catalog;
// every entity of a chosen intent receives a fabricated value.
Extraction sample_target(const IntentCatalog& catalog, rng::Engine& engine);

// Plausible fake value keyed off the entity name: ids, dates, names,
// quantities, amounts, addresses, sizes, with a generic fallback.
std::string fake_value(const EntityName& entity, rng::Engine& engine);

// 3 distinct pool records each sharing at least one intent with the
// target, uniform over the eligible set. Throws NotEnoughExemplars.
std::vector<TaskRecord> pick_exemplars(const Extraction& target,
                                       const std::vector<TaskRecord>& pool,
                                       rng::Engine& engine);

// Three JSON/email exemplar blocks, the target JSON, then an instruction
// asking for a <adjective> email that matches it.
std::string build_generation_prompt(const GenerationSpec& spec);

struct SynthOutcome {
    TaskRecord record;
    bool unfaithful = false;  // some target value missing from the message
};

SynthOutcome generate_record(CompletionClient& client, const GenerationSpec& spec,
                             const IntentCatalog& catalog, const std::string& id);

struct SplitResult {
    std::vector<TaskRecord> train;
    std::vector<TaskRecord> valid;
    std::vector<TaskRecord> test;
};

// Disjoint partition with sizes within one of N * ratio, seed-determined.
// Ratios must sum to 1 (tolerance 1e-9).
SplitResult split_dataset(const std::vector<TaskRecord>& records,
                          const std::array<double, 3>& ratios, rng::Engine& engine);

}  // namespace jsonslots::synth
