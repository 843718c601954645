#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "jsonslots/core.hpp"

namespace jsonslots::jsonl {

// One TaskRecord per line:
//   {"id": ..., "message": ..., "requested": {intent: [entity display names]},
//    "gold": [...]}
// plus an optional "flags" array on synthetic records. Field names and
// their order are part of the public contract; writing is byte-stable.
std::string record_to_line(const TaskRecord& record);
TaskRecord record_from_line(const std::string& line, std::size_t line_number);

std::vector<TaskRecord> read_records(const std::string& path);
void write_records(const std::string& path, const std::vector<TaskRecord>& records);

// Prediction lines: {"id": ..., "prediction": "<raw model output text>"}.
struct Prediction {
    std::string id;
    std::string text;
};

std::vector<Prediction> read_predictions(const std::string& path);
void write_predictions(const std::string& path, const std::vector<Prediction>& predictions);

// Catalog file: {"intents": [{"name": ..., "entities": [display, ...]}, ...]}
IntentCatalog read_catalog(const std::string& path);

std::vector<std::string> read_lines(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}  // namespace jsonslots::jsonl
