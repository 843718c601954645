#include "jsonslots/synth.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <map>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

namespace jsonslots::synth {

namespace {

std::string trim_text(const std::string& text) {
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    return text.substr(begin, end - begin);
}

}  // namespace

std::string prompt_fingerprint(std::string_view prompt) {
    // FNV-1a, 64-bit.
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char byte : prompt) {
        hash ^= byte;
        hash *= 0x100000001b3ULL;
    }
    char buffer[17];
    std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(hash));
    return buffer;
}

// ---------------------------------------------------------------------------
// Mock client
// ---------------------------------------------------------------------------

namespace {

class MockClient final : public CompletionClient {
public:
    explicit MockClient(const std::string& fixture_path) {
        std::ifstream in(fixture_path);
        if (!in) throw IoError("cannot open fixture file " + fixture_path);
        nlohmann::json fixture;
        try {
            in >> fixture;
        } catch (const nlohmann::json::exception& e) {
            throw DataError("bad fixture file " + fixture_path + ": " + e.what());
        }
        if (fixture.contains("completions")) {
            for (const auto& [key, value] : fixture.at("completions").items()) {
                completions_[key] = value.get<std::string>();
            }
        }
        if (fixture.contains("fallback")) {
            const std::string kind = fixture.at("fallback").value("kind", "");
            if (kind != "faithful_template") {
                throw DataError("unknown fixture fallback kind \"" + kind + "\"");
            }
            faithful_fallback_ = true;
        }
    }

    const char* mode() const override { return "mock"; }

    std::string complete(const std::string& prompt) override {
        const std::string fingerprint = prompt_fingerprint(prompt);
        const auto it = completions_.find(fingerprint);
        if (it != completions_.end()) return it->second;
        if (faithful_fallback_) return faithful_email(prompt);
        throw FixtureMiss("no canned completion for prompt fingerprint " + fingerprint);
    }

private:
    // Deterministic email covering every value of the target JSON, which is
    // the last "JSON:" block of the prompt.
    static std::string faithful_email(const std::string& prompt) {
        const std::size_t marker = prompt.rfind("JSON:\n");
        if (marker == std::string::npos) {
            throw FixtureMiss("fixture fallback cannot locate the target JSON in the prompt");
        }
        const std::size_t json_start = marker + 6;
        const std::size_t json_end = prompt.find('\n', json_start);
        const std::string json_line = prompt.substr(
            json_start, json_end == std::string::npos ? std::string::npos : json_end - json_start);
        const auto target = try_parse_extraction(json_line);
        if (!target) {
            throw FixtureMiss("fixture fallback cannot parse the target JSON in the prompt");
        }
        std::string email = "Hello,\n\nI am writing regarding the following requests.\n";
        for (const IntentInstance& instance : target->instances) {
            email += "For " + instance.intent.display() + ":";
            if (instance.entities.empty()) {
                email += " no further details.";
            } else {
                for (std::size_t i = 0; i < instance.entities.size(); ++i) {
                    const auto& [key, value] = instance.entities[i];
                    email += (i == 0 ? " " : ", ") + key + " " + value;
                }
                email += ".";
            }
            email += "\n";
        }
        email += "\nBest regards,\nAlex";
        return email;
    }

    std::map<std::string, std::string> completions_;
    bool faithful_fallback_ = false;
};

}  // namespace

std::unique_ptr<CompletionClient> make_mock_client(const std::string& fixture_path) {
    return std::make_unique<MockClient>(fixture_path);
}

// ---------------------------------------------------------------------------
// Live client
// ---------------------------------------------------------------------------

LiveConfig LiveConfig::from_environment() {
    LiveConfig config;
    if (const char* base = std::getenv("SYNTH_API_BASE")) config.base_url = base;
    if (const char* model = std::getenv("SYNTH_API_MODEL")) config.model = model;
    if (const char* token = std::getenv("SYNTH_API_TOKEN")) config.auth_token = token;
    return config;
}

namespace {

class LiveClient final : public CompletionClient {
public:
    explicit LiveClient(LiveConfig config) : config_(std::move(config)) {
        if (config_.base_url.empty() || config_.model.empty()) {
            throw ClientError("live mode needs SYNTH_API_BASE and SYNTH_API_MODEL");
        }
    }

    const char* mode() const override { return "live"; }

    std::string complete(const std::string& prompt) override {
        nlohmann::json body = {
            {"model", config_.model},
            {"prompt", prompt},
            {"max_tokens", 512},
            {"temperature", 0.7},
        };
        httplib::Headers headers;
        if (!config_.auth_token.empty()) {
            headers.emplace("Authorization", "Bearer " + config_.auth_token);
        }
        std::string last_error = "no attempt made";
        for (int attempt = 0; attempt < config_.max_attempts; ++attempt) {
            if (attempt > 0) {
                std::this_thread::sleep_for(std::chrono::milliseconds(500 << (attempt - 1)));
            }
            httplib::Client client(config_.base_url);
            client.set_read_timeout(60, 0);
            auto response = client.Post("/v1/completions", headers, body.dump(),
                                        "application/json");
            if (!response) {
                last_error = "transport error: " + httplib::to_string(response.error());
                continue;
            }
            if (response->status != 200) {
                last_error = "HTTP " + std::to_string(response->status);
                continue;
            }
            try {
                const nlohmann::json parsed = nlohmann::json::parse(response->body);
                std::string text = parsed.at("choices").at(0).at("text").get<std::string>();
                if (text.size() > config_.response_cap) {
                    text.resize(config_.response_cap);
                }
                return text;
            } catch (const nlohmann::json::exception& e) {
                last_error = std::string("bad response body: ") + e.what();
            }
        }
        throw ClientError("completion failed after " + std::to_string(config_.max_attempts) +
                          " attempts: " + last_error);
    }

private:
    LiveConfig config_;
};

}  // namespace

std::unique_ptr<CompletionClient> make_live_client(LiveConfig config) {
    return std::make_unique<LiveClient>(std::move(config));
}

// ---------------------------------------------------------------------------
// Target sampling
// ---------------------------------------------------------------------------

Extraction sample_target(const IntentCatalog& catalog, rng::Engine& engine) {
    if (catalog.schemas.empty()) throw DataError("empty intent catalog");
    Extraction target;
    const std::size_t count = 1 + rng::uniform_below(engine, 4);
    for (std::size_t n = 0; n < count; ++n) {
        const auto& [intent, entities] =
            catalog.schemas[rng::uniform_below(engine, catalog.schemas.size())];
        IntentInstance instance;
        instance.intent = intent;
        for (const EntityName& entity : entities) {
            instance.entities.emplace_back(entity.key, fake_value(entity, engine));
        }
        target.instances.push_back(std::move(instance));
    }
    return target;
}

namespace {

const char* kGivenNames[] = {
    "Alice", "Ben",   "Carla", "David", "Elena", "Frank", "Grace", "Henry",
    "Irene", "James", "Karen", "Louis", "Maria", "Nadia", "Oscar", "Priya",
};

const char* kFamilyNames[] = {
    "Adams", "Brown", "Clarke", "Davies", "Evans",  "Foster", "Garcia", "Hughes",
    "Ibanez", "Jones", "Klein", "Lopez",  "Martin", "Nguyen", "Olsen",  "Patel",
};

const char* kStreets[] = {
    "Maple Street", "Oak Avenue", "Mill Road", "Station Road",
    "High Street",  "Park Lane",  "River Walk", "Church Street",
};

const char* kCities[] = {
    "Springfield", "Riverton", "Fairview", "Greenwood",
    "Lakewood",    "Ashford",  "Milbrook", "Northgate",
};

const char* kSizes[] = {"XS", "S", "M", "L", "XL", "XXL"};

bool key_contains(const std::string& key, const char* needle) {
    return key.find(needle) != std::string::npos;
}

std::string two_digits(std::uint64_t value) {
    char buffer[3];
    std::snprintf(buffer, sizeof(buffer), "%02llu", static_cast<unsigned long long>(value));
    return buffer;
}

}  // namespace

std::string fake_value(const EntityName& entity, rng::Engine& engine) {
    const std::string& key = entity.key;
    if (key_contains(key, "date")) {
        const std::uint64_t year = 2021 + rng::uniform_below(engine, 4);
        const std::uint64_t month = 1 + rng::uniform_below(engine, 12);
        const std::uint64_t day = 1 + rng::uniform_below(engine, 28);
        return std::to_string(year) + "-" + two_digits(month) + "-" + two_digits(day);
    }
    if (key == "quantity") {
        return std::to_string(1 + rng::uniform_below(engine, 999));
    }
    if (key_contains(key, "amount") || key_contains(key, "price")) {
        const std::uint64_t whole = 1 + rng::uniform_below(engine, 5000);
        return "$" + std::to_string(whole) + "." + two_digits(rng::uniform_below(engine, 100));
    }
    if (key_contains(key, "name")) {
        const auto given = kGivenNames[rng::uniform_below(engine, std::size(kGivenNames))];
        const auto family = kFamilyNames[rng::uniform_below(engine, std::size(kFamilyNames))];
        return std::string(given) + " " + family;
    }
    if (key_contains(key, "address")) {
        const std::uint64_t number = 1 + rng::uniform_below(engine, 999);
        const auto street = kStreets[rng::uniform_below(engine, std::size(kStreets))];
        const auto city = kCities[rng::uniform_below(engine, std::size(kCities))];
        return std::to_string(number) + " " + street + ", " + city;
    }
    if (key == "size") {
        return kSizes[rng::uniform_below(engine, std::size(kSizes))];
    }
    if (key_contains(key, "number") || key_contains(key, "id")) {
        // Letter prefix from the key itself keeps distinct id fields apart.
        std::string prefix;
        for (char c : key) {
            if (c >= 'a' && c <= 'z') prefix += static_cast<char>(c - 'a' + 'A');
            if (prefix.size() == 2) break;
        }
        if (prefix.size() < 2) prefix = "ID";
        const std::uint64_t digits = 4 + rng::uniform_below(engine, 3);
        std::string number;
        for (std::uint64_t i = 0; i < digits; ++i) {
            number += static_cast<char>('0' + rng::uniform_below(engine, 10));
        }
        return prefix + "-" + number;
    }
    return key + "-" + std::to_string(100 + rng::uniform_below(engine, 900));
}

std::vector<TaskRecord> pick_exemplars(const Extraction& target,
                                       const std::vector<TaskRecord>& pool,
                                       rng::Engine& engine) {
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const bool shares = std::any_of(
            target.instances.begin(), target.instances.end(), [&](const IntentInstance& inst) {
                return pool[i].input.requests_intent(inst.intent);
            });
        if (shares) eligible.push_back(i);
    }
    if (eligible.size() < 3) {
        throw NotEnoughExemplars("need 3 exemplars sharing an intent, found " +
                                 std::to_string(eligible.size()));
    }
    const std::vector<std::size_t> picks = rng::sample_indices(engine, eligible.size(), 3);
    std::vector<TaskRecord> out;
    for (std::size_t pick : picks) out.push_back(pool[eligible[pick]]);
    return out;
}

std::string build_generation_prompt(const GenerationSpec& spec) {
    std::string prompt;
    for (const TaskRecord& exemplar : spec.exemplars) {
        prompt += "JSON:\n" + canonical_serialize(exemplar.gold) + "\n";
        prompt += "Email:\n" + exemplar.input.message + "\n\n";
    }
    prompt += "JSON:\n" + canonical_serialize(spec.target) + "\n";
    prompt += "Write a " + spec.adjective + " email which matches the above JSON.\n";
    prompt += "Email:\n";
    return prompt;
}

SynthOutcome generate_record(CompletionClient& client, const GenerationSpec& spec,
                             const IntentCatalog& catalog, const std::string& id) {
    const std::string prompt = build_generation_prompt(spec);
    const std::string completion = client.complete(prompt);

    SynthOutcome outcome;
    outcome.record.id = id;
    outcome.record.input.message = trim_text(completion);
    outcome.record.gold = spec.target;
    for (const IntentInstance& instance : spec.target.instances) {
        if (outcome.record.input.requests_intent(instance.intent)) continue;
        const std::vector<EntityName>* entities = catalog.find(instance.intent);
        if (entities == nullptr) {
            throw DataError("target intent \"" + instance.intent.display() +
                            "\" missing from catalog");
        }
        outcome.record.input.requested.emplace_back(instance.intent, *entities);
    }
    for (const IntentInstance& instance : spec.target.instances) {
        for (const auto& [key, value] : instance.entities) {
            if (outcome.record.input.message.find(value) == std::string::npos) {
                outcome.unfaithful = true;
            }
        }
    }
    if (outcome.unfaithful) outcome.record.flags.push_back("unfaithful");
    return outcome;
}

SplitResult split_dataset(const std::vector<TaskRecord>& records,
                          const std::array<double, 3>& ratios, rng::Engine& engine) {
    for (double ratio : ratios) {
        if (!(ratio >= 0.0 && ratio <= 1.0)) {
            throw DataError("split ratios must lie in [0, 1]");
        }
    }
    const double sum = ratios[0] + ratios[1] + ratios[2];
    if (std::abs(sum - 1.0) > 1e-9) {
        throw DataError("split ratios must sum to 1, got " + std::to_string(sum));
    }
    const std::size_t n = records.size();
    std::array<std::size_t, 3> sizes{};
    std::array<double, 3> fractional{};
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double exact = ratios[i] * static_cast<double>(n);
        sizes[i] = static_cast<std::size_t>(std::floor(exact));
        fractional[i] = exact - std::floor(exact);
        assigned += sizes[i];
    }
    while (assigned < n) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < 3; ++i) {
            if (fractional[i] > fractional[best]) best = i;
        }
        ++sizes[best];
        fractional[best] = -1.0;
        ++assigned;
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng::shuffle(engine, order);

    SplitResult result;
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < sizes[0]; ++i) result.train.push_back(records[order[cursor++]]);
    for (std::size_t i = 0; i < sizes[1]; ++i) result.valid.push_back(records[order[cursor++]]);
    for (std::size_t i = 0; i < sizes[2]; ++i) result.test.push_back(records[order[cursor++]]);
    return result;
}

}  // namespace jsonslots::synth
