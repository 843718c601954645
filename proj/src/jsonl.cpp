#include "jsonslots/jsonl.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "jsonslots/unicode.hpp"

namespace jsonslots::jsonl {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json parse_line(const std::string& line, std::size_t line_number) {
    try {
        return ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("line " + std::to_string(line_number) + ": invalid JSON: " + e.what());
    }
}

std::string require_string(const ordered_json& object, const char* field,
                           std::size_t line_number) {
    if (!object.contains(field) || !object.at(field).is_string()) {
        throw DataError("line " + std::to_string(line_number) + ": missing string field \"" +
                        field + "\"");
    }
    return object.at(field).get<std::string>();
}

}  // namespace

std::string record_to_line(const TaskRecord& record) {
    std::string out = "{\"id\":\"" + json_escape(record.id) + "\",\"message\":\"" +
                      json_escape(record.input.message) + "\",\"requested\":{";
    for (std::size_t i = 0; i < record.input.requested.size(); ++i) {
        const auto& [intent, entities] = record.input.requested[i];
        if (i > 0) out += ",";
        out += "\"" + json_escape(intent.display()) + "\":[";
        for (std::size_t k = 0; k < entities.size(); ++k) {
            if (k > 0) out += ",";
            out += "\"" + json_escape(entities[k].display) + "\"";
        }
        out += "]";
    }
    out += "},\"gold\":" + canonical_serialize(record.gold);
    if (!record.flags.empty()) {
        out += ",\"flags\":[";
        for (std::size_t i = 0; i < record.flags.size(); ++i) {
            if (i > 0) out += ",";
            out += "\"" + json_escape(record.flags[i]) + "\"";
        }
        out += "]";
    }
    out += "}";
    return out;
}

TaskRecord record_from_line(const std::string& line, std::size_t line_number) {
    const ordered_json object = parse_line(line, line_number);
    if (!object.is_object()) {
        throw DataError("line " + std::to_string(line_number) + ": record is not an object");
    }
    TaskRecord record;
    record.id = require_string(object, "id", line_number);
    record.input.message = unicode::nfc(require_string(object, "message", line_number));

    if (!object.contains("requested") || !object.at("requested").is_object()) {
        throw DataError("line " + std::to_string(line_number) +
                        ": missing object field \"requested\"");
    }
    for (const auto& [intent_display, entity_list] : object.at("requested").items()) {
        IntentName intent;
        try {
            intent = IntentName::parse(unicode::nfc(intent_display));
        } catch (const InvalidName& e) {
            throw DataError("line " + std::to_string(line_number) + ": " + e.what());
        }
        if (!entity_list.is_array()) {
            throw DataError("line " + std::to_string(line_number) +
                            ": requested entities must be an array");
        }
        std::vector<EntityName> entities;
        for (const auto& item : entity_list) {
            if (!item.is_string()) {
                throw DataError("line " + std::to_string(line_number) +
                                ": entity names must be strings");
            }
            try {
                entities.push_back(EntityName::from_display(unicode::nfc(item.get<std::string>())));
            } catch (const InvalidName& e) {
                throw DataError("line " + std::to_string(line_number) + ": " + e.what());
            }
        }
        record.input.requested.emplace_back(std::move(intent), std::move(entities));
    }

    if (!object.contains("gold") || !object.at("gold").is_array()) {
        throw DataError("line " + std::to_string(line_number) + ": missing array field \"gold\"");
    }
    try {
        record.gold = parse_extraction(object.at("gold").dump());
    } catch (const ExtractionParseError& e) {
        throw DataError("line " + std::to_string(line_number) + ": bad gold array: " + e.what());
    }

    if (object.contains("flags")) {
        for (const auto& flag : object.at("flags")) {
            record.flags.push_back(flag.get<std::string>());
        }
    }
    return record;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    if (!out) throw IoError("write failed for " + path);
}

std::vector<TaskRecord> read_records(const std::string& path) {
    const std::vector<std::string> lines = read_lines(path);
    std::vector<TaskRecord> records;
    records.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        records.push_back(record_from_line(lines[i], i + 1));
    }
    return records;
}

void write_records(const std::string& path, const std::vector<TaskRecord>& records) {
    std::string buffer;
    for (const TaskRecord& record : records) {
        buffer += record_to_line(record);
        buffer += "\n";
    }
    write_text(path, buffer);
}

std::vector<Prediction> read_predictions(const std::string& path) {
    const std::vector<std::string> lines = read_lines(path);
    std::vector<Prediction> predictions;
    predictions.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const ordered_json object = parse_line(lines[i], i + 1);
        Prediction prediction;
        prediction.id = require_string(object, "id", i + 1);
        prediction.text = require_string(object, "prediction", i + 1);
        predictions.push_back(std::move(prediction));
    }
    return predictions;
}

void write_predictions(const std::string& path, const std::vector<Prediction>& predictions) {
    std::string buffer;
    for (const Prediction& prediction : predictions) {
        buffer += "{\"id\":\"" + json_escape(prediction.id) + "\",\"prediction\":\"" +
                  json_escape(prediction.text) + "\"}\n";
    }
    write_text(path, buffer);
}

IntentCatalog read_catalog(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open catalog " + path);
    ordered_json document;
    try {
        in >> document;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("bad catalog file " + path + ": " + e.what());
    }
    if (!document.contains("intents") || !document.at("intents").is_array()) {
        throw DataError("catalog " + path + " needs an \"intents\" array");
    }
    IntentCatalog catalog;
    for (const auto& entry : document.at("intents")) {
        const IntentName intent = IntentName::parse(entry.at("name").get<std::string>());
        std::vector<EntityName> entities;
        for (const auto& name : entry.at("entities")) {
            entities.push_back(EntityName::from_display(name.get<std::string>()));
        }
        catalog.add(intent, std::move(entities));
    }
    return catalog;
}

}  // namespace jsonslots::jsonl
