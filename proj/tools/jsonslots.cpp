// jsonslots — dataset construction, prompting and scoring toolkit for
// multi-intent entity extraction as JSON generation.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <thread>

#include "jsonslots/core.hpp"
#include "jsonslots/eval.hpp"
#include "jsonslots/guardrails.hpp"
#include "jsonslots/jsonl.hpp"
#include "jsonslots/pipeline.hpp"
#include "jsonslots/prompts.hpp"
#include "jsonslots/rng.hpp"
#include "jsonslots/synth.hpp"
#include "jsonslots/version.hpp"

namespace {

using namespace jsonslots;

bool g_quiet = false;

void note(const std::string& message) {
    if (!g_quiet) std::cout << message << "\n";
}

std::string format4(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.4f", value);
    return buffer;
}

double round4(double value) {
    return std::round(value * 10000.0) / 10000.0;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

struct EvaluateArgs {
    std::string gold_path;
    std::string pred_path;
    std::string pred_field = "prediction";
    std::string report_path;
    unsigned jobs = 1;
};

void run_evaluate(const EvaluateArgs& args) {
    const std::vector<TaskRecord> gold = jsonl::read_records(args.gold_path);

    std::map<std::string, std::string> predictions;
    const std::vector<std::string> lines = jsonl::read_lines(args.pred_path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        nlohmann::json object;
        try {
            object = nlohmann::json::parse(lines[i]);
        } catch (const nlohmann::json::exception& e) {
            throw DataError("prediction line " + std::to_string(i + 1) + ": " + e.what());
        }
        if (!object.contains("id") || !object.contains(args.pred_field)) {
            throw DataError("prediction line " + std::to_string(i + 1) +
                            ": needs \"id\" and \"" + args.pred_field + "\"");
        }
        predictions[object.at("id").get<std::string>()] =
            object.at(args.pred_field).get<std::string>();
    }

    std::vector<eval::CorpusItem> items;
    items.reserve(gold.size());
    for (const TaskRecord& record : gold) {
        const auto it = predictions.find(record.id);
        if (it == predictions.end()) {
            throw DataError("no prediction for record \"" + record.id + "\"");
        }
        items.push_back({record.id, record.gold, it->second});
    }

    const eval::EvalReport report = eval::score_corpus(items, args.jobs);

    std::cout << "object    precision " << format4(report.object_scores.precision)
              << "  recall " << format4(report.object_scores.recall) << "  f1 "
              << format4(report.object_scores.f1) << "\n";
    std::cout << "key-value precision " << format4(report.kv_scores.precision) << "  recall "
              << format4(report.kv_scores.recall) << "  f1 " << format4(report.kv_scores.f1)
              << "\n";
    if (report.parse_failures > 0) {
        std::cout << "parse failures: " << report.parse_failures << "\n";
    }

    if (!args.report_path.empty()) {
        nlohmann::ordered_json doc;
        doc["version"] = kVersion;
        doc["object"] = {{"precision", round4(report.object_scores.precision)},
                         {"recall", round4(report.object_scores.recall)},
                         {"f1", round4(report.object_scores.f1)}};
        doc["key_value"] = {{"precision", round4(report.kv_scores.precision)},
                            {"recall", round4(report.kv_scores.recall)},
                            {"f1", round4(report.kv_scores.f1)}};
        doc["totals"] = {{"obj_tp", report.totals.obj_tp}, {"obj_fp", report.totals.obj_fp},
                         {"obj_fn", report.totals.obj_fn}, {"kv_tp", report.totals.kv_tp},
                         {"kv_fp", report.totals.kv_fp},   {"kv_fn", report.totals.kv_fn}};
        doc["parse_failures"] = report.parse_failures;
        auto& records = doc["records"] = nlohmann::ordered_json::array();
        for (const eval::RecordResult& result : report.per_record) {
            records.push_back({{"id", result.id},
                               {"obj_tp", result.counts.obj_tp},
                               {"obj_fp", result.counts.obj_fp},
                               {"obj_fn", result.counts.obj_fn},
                               {"kv_tp", result.counts.kv_tp},
                               {"kv_fp", result.counts.kv_fp},
                               {"kv_fn", result.counts.kv_fn},
                               {"parse_failed", result.parse_failed}});
        }
        jsonl::write_text(args.report_path, doc.dump(2) + "\n");
        note("wrote report to " + args.report_path);
    }
}

// ---------------------------------------------------------------------------
// convert
// ---------------------------------------------------------------------------

struct ConvertArgs {
    std::string format;
    std::string in_path;
    std::string out_path;
    std::string slot_map_path;
    unsigned jobs = 1;
};

pipeline::TaggedUtterance parse_tsv_line(const std::string& line, std::size_t line_number) {
    const std::size_t tab1 = line.find('\t');
    const std::size_t tab2 = tab1 == std::string::npos ? std::string::npos
                                                       : line.find('\t', tab1 + 1);
    if (tab1 == std::string::npos || tab2 == std::string::npos) {
        throw DataError("line " + std::to_string(line_number) +
                        ": expected <tokens>\\t<tags>\\t<intent>");
    }
    const auto split_spaces = [](std::string_view text) {
        std::vector<std::string> parts;
        std::size_t start = 0;
        while (start < text.size()) {
            std::size_t end = text.find(' ', start);
            if (end == std::string_view::npos) end = text.size();
            if (end > start) parts.emplace_back(text.substr(start, end - start));
            start = end + 1;
        }
        return parts;
    };
    pipeline::TaggedUtterance utterance;
    utterance.tokens = split_spaces(std::string_view(line).substr(0, tab1));
    utterance.tags = split_spaces(std::string_view(line).substr(tab1 + 1, tab2 - tab1 - 1));
    utterance.intent = IntentName::parse(std::string_view(line).substr(tab2 + 1));
    return utterance;
}

pipeline::SlotMap load_slot_map(const std::string& path) {
    pipeline::SlotMap slot_map;
    if (path.empty()) return slot_map;
    std::ifstream in(path);
    if (!in) throw IoError("cannot open slot map " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("bad slot map " + path + ": " + e.what());
    }
    for (const auto& [label, display] : doc.at("labels").items()) {
        slot_map.display_names[label] = display.get<std::string>();
    }
    return slot_map;
}

void run_convert(const ConvertArgs& args) {
    const std::vector<std::string> lines = jsonl::read_lines(args.in_path);
    std::vector<pipeline::TaggedUtterance> utterances;
    utterances.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        utterances.push_back(parse_tsv_line(lines[i], i + 1));
    }

    const auto inventory = pipeline::slot_inventory(utterances);
    const auto inventory_for = [&](const IntentName& intent) -> const std::vector<std::string>& {
        static const std::vector<std::string> empty;
        for (const auto& [name, labels] : inventory) {
            if (name == intent) return labels;
        }
        return empty;
    };

    // Utterances whose intent never carries a slot anywhere in the corpus
    // cannot form a valid record (a requested intent must list entities).
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < utterances.size(); ++i) {
        if (inventory_for(utterances[i].intent).empty()) {
            std::cerr << "note: line " << i + 1 << ": intent \""
                      << utterances[i].intent.display()
                      << "\" has an empty slot inventory, skipping\n";
        } else {
            kept.push_back(i);
        }
    }

    pipeline::ConvertOptions options;
    options.slot_map = load_slot_map(args.slot_map_path);
    options.on_collision = [](const std::string& message) {
        std::cerr << "note: " << message << "\n";
    };

    std::vector<TaskRecord> records(kept.size());
    const auto convert_one = [&](std::size_t k) {
        const std::size_t i = kept[k];
        char id[32];
        std::snprintf(id, sizeof(id), "%s-%06zu", args.format.c_str(), i + 1);
        records[k] = pipeline::convert_tagged_utterance(utterances[i],
                                                        inventory_for(utterances[i].intent),
                                                        options, id);
    };
    if (args.jobs <= 1 || kept.size() < 2) {
        for (std::size_t k = 0; k < kept.size(); ++k) convert_one(k);
    } else {
        const unsigned workers = std::min<unsigned>(args.jobs,
                                                    static_cast<unsigned>(kept.size()));
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w]() {
                for (std::size_t k = w; k < kept.size(); k += workers) convert_one(k);
            });
        }
        for (auto& worker : pool) worker.join();
    }

    jsonl::write_records(args.out_path, records);
    note(std::to_string(records.size()) + " records -> " + args.out_path);
}

// ---------------------------------------------------------------------------
// remaining subcommands
// ---------------------------------------------------------------------------

struct MixArgs {
    std::string in_path;
    std::string out_path;
    std::size_t count = 0;
    std::uint64_t seed = 0;
    int k_min = 2;
    int k_max = 4;
};

void run_mix(const MixArgs& args) {
    const std::vector<TaskRecord> pool = jsonl::read_records(args.in_path);
    rng::Engine engine(args.seed);
    std::vector<TaskRecord> mixed;
    mixed.reserve(args.count);
    for (std::size_t i = 0; i < args.count; ++i) {
        char id[32];
        std::snprintf(id, sizeof(id), "mix-%06zu", i + 1);
        mixed.push_back(pipeline::mix_records(pool, engine, id, args.k_min, args.k_max));
    }
    jsonl::write_records(args.out_path, mixed);
    note(std::to_string(mixed.size()) + " records -> " + args.out_path);
}

struct DbpediaArgs {
    std::string abstracts_path;
    std::string infobox_path;
    std::string out_path;
    double threshold = 0.20;
    std::string threshold_mode = "filter-first";
};

void run_dbpedia(const DbpediaArgs& args) {
    std::vector<pipeline::Article> articles;
    std::map<std::string, std::size_t> article_index;
    {
        const std::vector<std::string> lines = jsonl::read_lines(args.abstracts_path);
        for (std::size_t i = 0; i < lines.size(); ++i) {
            nlohmann::json object;
            try {
                object = nlohmann::json::parse(lines[i]);
            } catch (const nlohmann::json::exception& e) {
                throw DataError("abstracts line " + std::to_string(i + 1) + ": " + e.what());
            }
            pipeline::Article article;
            article.id = object.at("id").get<std::string>();
            article.article_type = object.at("type").get<std::string>();
            article.abstract_text = object.at("abstract").get<std::string>();
            if (object.contains("links")) {
                for (const auto& link : object.at("links")) {
                    article.links.push_back(link.get<std::string>());
                }
            }
            article_index[article.id] = articles.size();
            articles.push_back(std::move(article));
        }
    }
    {
        const std::vector<std::string> lines = jsonl::read_lines(args.infobox_path);
        for (std::size_t i = 0; i < lines.size(); ++i) {
            const std::string& line = lines[i];
            const std::size_t tab1 = line.find('\t');
            const std::size_t tab2 = tab1 == std::string::npos ? std::string::npos
                                                               : line.find('\t', tab1 + 1);
            if (tab1 == std::string::npos || tab2 == std::string::npos) {
                throw DataError("infobox line " + std::to_string(i + 1) +
                                ": expected <id>\\t<property>\\t<value>");
            }
            const std::string id = line.substr(0, tab1);
            const auto it = article_index.find(id);
            if (it == article_index.end()) continue;  // property for an unknown article
            articles[it->second].properties.emplace_back(
                line.substr(tab1 + 1, tab2 - tab1 - 1), line.substr(tab2 + 1));
        }
    }

    const pipeline::ThresholdMode mode = args.threshold_mode == "presence-first"
                                             ? pipeline::ThresholdMode::threshold_then_filter
                                             : pipeline::ThresholdMode::filter_then_threshold;
    const pipeline::TypeSchema schema =
        pipeline::derive_type_schema(articles, args.threshold, mode);

    std::vector<TaskRecord> records;
    std::vector<std::pair<std::string, std::vector<std::string>>> links;
    for (const pipeline::Article& article : articles) {
        const bool has_schema =
            std::any_of(schema.begin(), schema.end(),
                        [&](const auto& entry) { return entry.first == article.article_type; });
        if (!has_schema) {
            std::cerr << "note: skipping article " << article.id
                      << " (type has no retained entities)\n";
            continue;
        }
        records.push_back(pipeline::article_to_record(article, schema));
        links.emplace_back(article.id, article.links);
    }

    const std::vector<TaskRecord> merged = pipeline::link_concat(records, links);
    jsonl::write_records(args.out_path, merged);
    note(std::to_string(merged.size()) + " records -> " + args.out_path);
}

struct AugmentArgs {
    std::string in_path;
    std::string out_path;
    double drop = 0.0;
    bool reorder = false;
    std::uint64_t seed = 0;
};

void run_augment(const AugmentArgs& args) {
    const std::vector<TaskRecord> records = jsonl::read_records(args.in_path);
    rng::Engine engine(args.seed);
    pipeline::AugmentParams params;
    params.drop_probability = args.drop;
    params.reorder = args.reorder;
    std::vector<TaskRecord> augmented;
    augmented.reserve(records.size());
    for (const TaskRecord& record : records) {
        augmented.push_back(pipeline::augment_record(record, params, engine));
    }
    jsonl::write_records(args.out_path, augmented);
    note(std::to_string(augmented.size()) + " records -> " + args.out_path);
}

struct PromptArgs {
    std::string records_path;
    std::string pool_path;
    std::string out_path;
    std::string mode = "zero";
    std::uint64_t seed = 0;
    bool seed_given = false;
};

void run_prompt(const PromptArgs& args) {
    const std::vector<TaskRecord> records = jsonl::read_records(args.records_path);
    std::vector<TaskRecord> pool;
    if (!args.pool_path.empty()) pool = jsonl::read_records(args.pool_path);

    const prompts::PromptTemplate tmpl;
    rng::Engine engine(args.seed);

    std::string buffer;
    for (const TaskRecord& record : records) {
        prompts::Prompt prompt;
        if (args.mode == "one") {
            const TaskRecord& exemplar =
                prompts::select_exemplar(record.input, pool, engine, record.id);
            prompt = prompts::build_prompt(record.input, tmpl, &exemplar);
        } else {
            prompt = prompts::build_prompt(record.input, tmpl);
        }
        buffer += "{\"id\":\"" + json_escape(record.id) + "\",\"prompt\":\"" +
                  json_escape(prompt.text) + "\",\"exemplar_id\":";
        buffer += prompt.exemplar_id ? "\"" + json_escape(*prompt.exemplar_id) + "\"" : "null";
        buffer += "}\n";
    }
    jsonl::write_text(args.out_path, buffer);
    note(std::to_string(records.size()) + " prompts -> " + args.out_path);
}

struct GuardArgs {
    std::string records_path;
    std::string pred_path;
    std::string out_path;
};

void run_guard(const GuardArgs& args) {
    const std::vector<TaskRecord> records = jsonl::read_records(args.records_path);
    std::map<std::string, const TaskRecord*> by_id;
    for (const TaskRecord& record : records) by_id[record.id] = &record;

    std::vector<jsonl::Prediction> predictions = jsonl::read_predictions(args.pred_path);
    for (jsonl::Prediction& prediction : predictions) {
        const auto it = by_id.find(prediction.id);
        if (it == by_id.end()) {
            throw DataError("no record for prediction \"" + prediction.id + "\"");
        }
        const auto parsed = try_parse_extraction(prediction.text);
        if (!parsed) continue;  // malformed output passes through untouched
        const Extraction sanitized =
            guardrails::sanitize_extraction(*parsed, it->second->input);
        prediction.text = canonical_serialize(sanitized);
    }
    jsonl::write_predictions(args.out_path, predictions);
    note(std::to_string(predictions.size()) + " predictions -> " + args.out_path);
}

struct SynthArgs {
    std::string catalog_path;
    std::string seeds_path;
    std::string fixtures_path;
    std::string out_path;
    std::string mode = "mock";
    std::size_t count = 0;
    std::uint64_t seed = 0;
    bool drop_unfaithful = false;
};

void run_synth(const SynthArgs& args) {
    const IntentCatalog catalog = jsonl::read_catalog(args.catalog_path);
    const std::vector<TaskRecord> seeds = jsonl::read_records(args.seeds_path);

    std::unique_ptr<synth::CompletionClient> client;
    if (args.mode == "mock") {
        if (args.fixtures_path.empty()) throw DataError("mock mode needs --fixtures");
        client = synth::make_mock_client(args.fixtures_path);
    } else {
        client = synth::make_live_client(synth::LiveConfig::from_environment());
    }

    rng::Engine engine(args.seed);
    std::vector<TaskRecord> records;
    std::size_t unfaithful = 0;
    for (std::size_t i = 0; i < args.count; ++i) {
        synth::GenerationSpec spec;
        spec.target = synth::sample_target(catalog, engine);
        spec.adjective = synth::kDefaultAdjectives[rng::uniform_below(
            engine, synth::kDefaultAdjectives.size())];
        spec.exemplars = synth::pick_exemplars(spec.target, seeds, engine);
        char id[32];
        std::snprintf(id, sizeof(id), "synth-%06zu", i + 1);
        const synth::SynthOutcome outcome =
            synth::generate_record(*client, spec, catalog, id);
        if (outcome.unfaithful) {
            ++unfaithful;
            if (args.drop_unfaithful) continue;
        }
        records.push_back(outcome.record);
    }
    jsonl::write_records(args.out_path, records);
    note(std::to_string(records.size()) + " records -> " + args.out_path +
         (unfaithful > 0 ? " (" + std::to_string(unfaithful) + " unfaithful)" : ""));
}

struct SplitArgs {
    std::string in_path;
    std::string out_prefix;
    std::string ratios = "0.8,0.1,0.1";
    std::uint64_t seed = 0;
};

void run_split(const SplitArgs& args) {
    const std::vector<TaskRecord> records = jsonl::read_records(args.in_path);
    std::array<double, 3> ratios{};
    if (std::sscanf(args.ratios.c_str(), "%lf,%lf,%lf", &ratios[0], &ratios[1], &ratios[2]) != 3) {
        throw DataError("ratios must be three comma-separated numbers");
    }
    rng::Engine engine(args.seed);
    const synth::SplitResult split = synth::split_dataset(records, ratios, engine);
    jsonl::write_records(args.out_prefix + ".train.jsonl", split.train);
    jsonl::write_records(args.out_prefix + ".valid.jsonl", split.valid);
    jsonl::write_records(args.out_prefix + ".test.jsonl", split.test);
    note("split " + std::to_string(records.size()) + " records into " +
         std::to_string(split.train.size()) + "/" + std::to_string(split.valid.size()) + "/" +
         std::to_string(split.test.size()));
}

struct ValidateArgs {
    std::string in_path;
};

void run_validate(const ValidateArgs& args) {
    const std::vector<std::string> lines = jsonl::read_lines(args.in_path);
    nlohmann::ordered_json failures = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string id = "line " + std::to_string(i + 1);
        std::vector<std::string> problems;
        try {
            const TaskRecord record = jsonl::record_from_line(lines[i], i + 1);
            id = record.id;
            problems = validate_record(record);
        } catch (const Error& e) {
            problems.push_back(e.what());
        }
        if (!problems.empty()) {
            failures.push_back({{"id", id}, {"problems", problems}});
        }
    }
    if (!failures.empty()) {
        nlohmann::ordered_json report;
        report["error"] = "validation_failed";
        report["records"] = failures;
        std::cerr << report.dump() << "\n";
        std::exit(1);
    }
    note(std::to_string(lines.size()) + " records ok");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-intent extraction toolkit: dataset construction, prompting, scoring"};
    app.set_version_flag("--version", std::string(kBuildId));
    app.add_flag("--quiet", g_quiet, "suppress progress output");
    app.require_subcommand(1);

    EvaluateArgs evaluate_args;
    auto* evaluate = app.add_subcommand("evaluate", "score predictions against gold records");
    evaluate->add_option("--gold", evaluate_args.gold_path, "gold records (jsonl)")->required();
    evaluate->add_option("--pred", evaluate_args.pred_path, "predictions (jsonl)")->required();
    evaluate->add_option("--pred-field", evaluate_args.pred_field,
                         "field holding the generated text");
    evaluate->add_option("--report", evaluate_args.report_path, "write a JSON report here");
    evaluate->add_option("--jobs", evaluate_args.jobs, "worker threads");

    ConvertArgs convert_args;
    auto* convert = app.add_subcommand("convert", "convert BIO-tagged utterances (tsv)");
    convert->add_option("--format", convert_args.format, "atis, snips or slurp")
        ->required()
        ->check(CLI::IsMember({"atis", "snips", "slurp"}));
    convert->add_option("--in", convert_args.in_path, "input tsv")->required();
    convert->add_option("--out", convert_args.out_path, "output jsonl")->required();
    convert->add_option("--slot-map", convert_args.slot_map_path,
                        "label -> display name map (json)");
    convert->add_option("--jobs", convert_args.jobs, "worker threads");

    MixArgs mix_args;
    auto* mix = app.add_subcommand("mix", "concatenate 2-4 records per output record");
    mix->add_option("--in", mix_args.in_path, "input jsonl")->required();
    mix->add_option("--n", mix_args.count, "number of mixed records")->required();
    mix->add_option("--seed", mix_args.seed, "rng seed")->required();
    mix->add_option("--out", mix_args.out_path, "output jsonl")->required();
    mix->add_option("--k-min", mix_args.k_min, "minimum records per mix");
    mix->add_option("--k-max", mix_args.k_max, "maximum records per mix");

    DbpediaArgs dbpedia_args;
    auto* dbpedia = app.add_subcommand("dbpedia", "build records from article fixtures");
    dbpedia->add_option("--abstracts", dbpedia_args.abstracts_path, "articles (jsonl)")
        ->required();
    dbpedia->add_option("--infobox", dbpedia_args.infobox_path, "properties (tsv)")->required();
    dbpedia->add_option("--threshold", dbpedia_args.threshold, "entity retention threshold")
        ->check(CLI::Range(0.0, 1.0));
    dbpedia->add_option("--threshold-mode", dbpedia_args.threshold_mode,
                        "filter-first or presence-first")
        ->check(CLI::IsMember({"filter-first", "presence-first"}));
    dbpedia->add_option("--out", dbpedia_args.out_path, "output jsonl")->required();

    AugmentArgs augment_args;
    auto* augment = app.add_subcommand("augment", "drop and/or reorder requested entities");
    augment->add_option("--in", augment_args.in_path, "input jsonl")->required();
    augment->add_option("--drop", augment_args.drop, "per-entity drop probability")
        ->check(CLI::Range(0.0, 1.0));
    augment->add_flag("--reorder", augment_args.reorder, "shuffle surviving entities");
    augment->add_option("--seed", augment_args.seed, "rng seed")->required();
    augment->add_option("--out", augment_args.out_path, "output jsonl")->required();

    PromptArgs prompt_args;
    auto* prompt = app.add_subcommand("prompt", "render zero- or one-shot prompts");
    prompt->add_option("--records", prompt_args.records_path, "target records (jsonl)")
        ->required();
    prompt->add_option("--mode", prompt_args.mode, "zero or one")
        ->required()
        ->check(CLI::IsMember({"zero", "one"}));
    prompt->add_option("--pool", prompt_args.pool_path, "exemplar pool (jsonl)");
    auto* prompt_seed = prompt->add_option("--seed", prompt_args.seed, "rng seed");
    prompt->add_option("--out", prompt_args.out_path, "output jsonl")->required();
    prompt->callback([&]() { prompt_args.seed_given = prompt_seed->count() > 0; });

    GuardArgs guard_args;
    auto* guard = app.add_subcommand("guard", "strip unrequested or ungrounded pairs");
    guard->add_option("--records", guard_args.records_path, "task records (jsonl)")->required();
    guard->add_option("--pred", guard_args.pred_path, "predictions (jsonl)")->required();
    guard->add_option("--out", guard_args.out_path, "output jsonl")->required();

    SynthArgs synth_args;
    auto* synth_cmd = app.add_subcommand("synth", "generate synthetic email records");
    synth_cmd->add_option("--catalog", synth_args.catalog_path, "intent catalog (json)")
        ->required();
    synth_cmd->add_option("--seeds", synth_args.seeds_path, "seed exemplars (jsonl)")->required();
    synth_cmd->add_option("--n", synth_args.count, "records to generate")->required();
    synth_cmd->add_option("--seed", synth_args.seed, "rng seed")->required();
    synth_cmd->add_option("--mode", synth_args.mode, "mock or live")
        ->check(CLI::IsMember({"mock", "live"}));
    synth_cmd->add_option("--fixtures", synth_args.fixtures_path, "mock completions (json)");
    synth_cmd->add_option("--out", synth_args.out_path, "output jsonl")->required();
    synth_cmd->add_flag("--drop-unfaithful", synth_args.drop_unfaithful,
                        "drop records whose email misses a target value");

    SplitArgs split_args;
    auto* split = app.add_subcommand("split", "partition records into train/valid/test");
    split->add_option("--in", split_args.in_path, "input jsonl")->required();
    split->add_option("--ratios", split_args.ratios, "three comma-separated ratios");
    split->add_option("--seed", split_args.seed, "rng seed")->required();
    split->add_option("--out-prefix", split_args.out_prefix, "output path prefix")->required();

    ValidateArgs validate_args;
    auto* validate = app.add_subcommand("validate", "check record invariants");
    validate->add_option("--in", validate_args.in_path, "input jsonl")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (evaluate->parsed()) run_evaluate(evaluate_args);
        else if (convert->parsed()) run_convert(convert_args);
        else if (mix->parsed()) run_mix(mix_args);
        else if (dbpedia->parsed()) run_dbpedia(dbpedia_args);
        else if (augment->parsed()) run_augment(augment_args);
        else if (prompt->parsed()) {
            if (prompt_args.mode == "one" && !prompt_args.seed_given) {
                std::cerr << "prompt --mode one requires --seed\n";
                return 2;
            }
            if (prompt_args.mode == "one" && prompt_args.pool_path.empty()) {
                std::cerr << "prompt --mode one requires --pool\n";
                return 2;
            }
            run_prompt(prompt_args);
        }
        else if (guard->parsed()) run_guard(guard_args);
        else if (synth_cmd->parsed()) run_synth(synth_args);
        else if (split->parsed()) run_split(split_args);
        else if (validate->parsed()) run_validate(validate_args);
    } catch (const Error& e) {
        nlohmann::json report = {{"error", e.code()}, {"message", e.what()}};
        std::cerr << report.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        nlohmann::json report = {{"error", "internal"}, {"message", e.what()}};
        std::cerr << report.dump() << "\n";
        return 1;
    }
    return 0;
}
