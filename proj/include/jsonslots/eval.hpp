#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "jsonslots/core.hpp"
#include "jsonslots/similarity.hpp"

namespace jsonslots::eval {

// True/false positive/negative tallies at object level and key-value level.
// Counts from a corpus are the element-wise sum over records.
struct EvalCounts {
    std::uint64_t obj_tp = 0;
    std::uint64_t obj_fp = 0;
    std::uint64_t obj_fn = 0;
    std::uint64_t kv_tp = 0;
    std::uint64_t kv_fp = 0;
    std::uint64_t kv_fn = 0;

    EvalCounts& operator+=(const EvalCounts& other);
    bool operator==(const EvalCounts&) const = default;
};

struct Scores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// p = tp/(tp+fp), r = tp/(tp+fn), f1 = 2pr/(p+r). A 0/0 ratio is 1.0 when
// tp = fp = fn = 0 (vacuous perfection) and 0.0 otherwise.
Scores prf1(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn);

// How gold and generated objects were matched up. Indices refer to the
// original arrays; each index appears at most once across the four lists.
struct Pairing {
    std::vector<std::pair<std::size_t, std::size_t>> exact_pairs;
    std::vector<std::pair<std::size_t, std::size_t>> fuzzy_pairs;
    std::vector<std::size_t> unpaired_gold;
    std::vector<std::size_t> unpaired_gen;
};

// Compact JSON object text with "intent" first and entity keys sorted
// lexicographically. Two instances with the same pairs in any stored order
// map to the same string; this is the form all matching works on.
std::string object_string(const IntentInstance& instance);

// Pairs gold and generated objects: identical canonical strings first
// (greedy, ascending gold index, lowest available generated index), then an
// optimal assignment of the remainder maximizing total similarity of the
// canonical strings. Ties are broken toward the lexicographically smallest
// sequence of generated indices in gold-index order.
Pairing pair_objects(const std::vector<IntentInstance>& gold,
                     const std::vector<IntentInstance>& gen,
                     sim::Backend backend = sim::preferred_backend());

EvalCounts score_pairing(const Pairing& pairing,
                         const std::vector<IntentInstance>& gold,
                         const std::vector<IntentInstance>& gen);

EvalCounts score_record(const Extraction& gold, const Extraction& gen,
                        sim::Backend backend = sim::preferred_backend());

// Same contract as score_record with the fuzzy assignment found by
// exhaustive enumeration of injective pairings (same tie-break). Throws
// SizeLimit when either side exceeds 8 objects after exact pairing.
EvalCounts oracle_score_record(const Extraction& gold, const Extraction& gen);

struct CorpusItem {
    std::string id;
    Extraction gold;
    std::string generated_text;
};

struct RecordResult {
    std::string id;
    EvalCounts counts;
    bool parse_failed = false;
};

struct EvalReport {
    std::vector<RecordResult> per_record;
    EvalCounts totals;
    Scores object_scores;
    Scores kv_scores;
    std::uint64_t parse_failures = 0;
};

// Parses and scores every record; unparseable generations count all gold
// objects and pairs as false negatives. Totals are micro-averaged. `jobs`
// fans the per-record work out across threads; results are identical for
// any job count.
EvalReport score_corpus(const std::vector<CorpusItem>& items, unsigned jobs = 1,
                        sim::Backend backend = sim::preferred_backend());

std::size_t total_pairs(const Extraction& extraction);

}  // namespace jsonslots::eval
