#pragma once

#include "jsonslots/core.hpp"

namespace jsonslots::guardrails {

// Removes hallucinated content from a generated extraction: instances whose
// intent was not requested, pairs whose key was not requested for that
// intent, and pairs whose value does not occur in the message (exact
// NFC-normalized substring, case-sensitive). Instance order is preserved
// and instances left without entities are retained. Idempotent.
Extraction sanitize_extraction(const Extraction& extraction, const TaskInput& input);

}  // namespace jsonslots::guardrails
