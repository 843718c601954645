#include "jsonslots/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "jsonslots/errors.hpp"
#include "jsonslots/unicode.hpp"

namespace jsonslots::eval {

namespace {

// Totals that differ by less than this are treated as tied; the tie-break
// (and the oracle) share the same convention.
constexpr double kTieTolerance = 1e-9;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Minimum-cost perfect matching on a square matrix (Jonker-Volgenant style
// potentials, O(n^3)). Returns row -> column.
std::vector<int> min_cost_assignment(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> match(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, kInf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = match[j0];
            int j1 = -1;
            double delta = kInf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j) {
        if (match[j] > 0) row_to_col[match[j] - 1] = j - 1;
    }
    return row_to_col;
}

// Maximum total similarity over injective pairings of exactly
// min(rows, cols) pairs. `sim` is rows x cols.
double best_assignment_total(const std::vector<std::vector<double>>& sim,
                             const std::vector<std::size_t>& rows,
                             const std::vector<std::size_t>& cols) {
    if (rows.empty() || cols.empty()) return 0.0;
    const std::size_t n = std::max(rows.size(), cols.size());
    std::vector<std::vector<double>> cost(n, std::vector<double>(n, 1.0));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            cost[i][j] = 1.0 - sim[rows[i]][cols[j]];
        }
    }
    const std::vector<int> assignment = min_cost_assignment(cost);
    double total = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const int j = assignment[i];
        if (j >= 0 && static_cast<std::size_t>(j) < cols.size()) {
            total += sim[rows[i]][cols[j]];
        }
    }
    return total;
}

struct CanonicalView {
    std::vector<std::string> strings;       // canonical object strings
    std::vector<std::u32string> decoded;    // same, as code points
};

CanonicalView canonicalize(const std::vector<IntentInstance>& instances) {
    CanonicalView view;
    view.strings.reserve(instances.size());
    view.decoded.reserve(instances.size());
    for (const IntentInstance& instance : instances) {
        view.strings.push_back(object_string(instance));
        auto decoded = unicode::decode_utf8(view.strings.back());
        if (!decoded) throw std::invalid_argument("instance contains invalid UTF-8");
        view.decoded.push_back(std::move(*decoded));
    }
    return view;
}

// Greedy exact phase: ascending gold index, lowest unconsumed identical
// generated instance.
void pair_exact(const CanonicalView& gold, const CanonicalView& gen, Pairing& pairing,
                std::vector<std::size_t>& gold_rest, std::vector<std::size_t>& gen_rest) {
    std::vector<char> gen_used(gen.strings.size(), 0);
    for (std::size_t g = 0; g < gold.strings.size(); ++g) {
        bool matched = false;
        for (std::size_t h = 0; h < gen.strings.size(); ++h) {
            if (!gen_used[h] && gold.strings[g] == gen.strings[h]) {
                gen_used[h] = 1;
                pairing.exact_pairs.emplace_back(g, h);
                matched = true;
                break;
            }
        }
        if (!matched) gold_rest.push_back(g);
    }
    for (std::size_t h = 0; h < gen.strings.size(); ++h) {
        if (!gen_used[h]) gen_rest.push_back(h);
    }
}

std::vector<std::vector<double>> similarity_matrix(const CanonicalView& gold,
                                                   const CanonicalView& gen,
                                                   const std::vector<std::size_t>& gold_rest,
                                                   const std::vector<std::size_t>& gen_rest,
                                                   sim::Backend backend) {
    std::vector<std::vector<double>> matrix(gold_rest.size(),
                                            std::vector<double>(gen_rest.size(), 0.0));
    std::vector<std::u32string> patterns;
    patterns.reserve(gold_rest.size());
    for (std::size_t g : gold_rest) patterns.push_back(gold.decoded[g]);
    std::vector<double> column(gold_rest.size(), 0.0);
    for (std::size_t j = 0; j < gen_rest.size(); ++j) {
        sim::similarity_one_to_many(gen.decoded[gen_rest[j]], patterns, column, backend);
        for (std::size_t i = 0; i < gold_rest.size(); ++i) matrix[i][j] = column[i];
    }
    return matrix;
}

}  // namespace

std::string object_string(const IntentInstance& instance) {
    std::vector<std::pair<std::string, std::string>> sorted = instance.entities;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::string out = "{\"intent\":\"" + json_escape(instance.intent.display()) + "\"";
    for (const auto& [key, value] : sorted) {
        out += ",\"" + json_escape(key) + "\":\"" + json_escape(value) + "\"";
    }
    out += "}";
    return out;
}

Pairing pair_objects(const std::vector<IntentInstance>& gold,
                     const std::vector<IntentInstance>& gen, sim::Backend backend) {
    Pairing pairing;
    const CanonicalView gold_view = canonicalize(gold);
    const CanonicalView gen_view = canonicalize(gen);

    std::vector<std::size_t> gold_rest;
    std::vector<std::size_t> gen_rest;
    pair_exact(gold_view, gen_view, pairing, gold_rest, gen_rest);

    if (gold_rest.empty() || gen_rest.empty()) {
        pairing.unpaired_gold = gold_rest;
        pairing.unpaired_gen = gen_rest;
        return pairing;
    }

    // sim[i][j] indexed by position within gold_rest / gen_rest.
    std::vector<std::size_t> all_rows(gold_rest.size());
    std::vector<std::size_t> all_cols(gen_rest.size());
    for (std::size_t i = 0; i < all_rows.size(); ++i) all_rows[i] = i;
    for (std::size_t j = 0; j < all_cols.size(); ++j) all_cols[j] = j;
    const std::vector<std::vector<double>> sim_matrix =
        similarity_matrix(gold_view, gen_view, gold_rest, gen_rest, backend);

    const double optimum = best_assignment_total(sim_matrix, all_rows, all_cols);
    const std::size_t need = std::min(gold_rest.size(), gen_rest.size());

    // Fix pairs gold-by-gold, lowest generated index first, keeping only
    // choices that still reach the optimal total. An unpaired gold sorts
    // after any pairing, so skipping is the last resort.
    std::vector<char> col_used(gen_rest.size(), 0);
    std::vector<std::pair<std::size_t, std::size_t>> fixed;  // rest-relative
    double fixed_sum = 0.0;
    for (std::size_t i = 0; i < gold_rest.size() && fixed.size() < need; ++i) {
        const std::size_t pairs_remaining = need - fixed.size();
        const std::size_t golds_after = gold_rest.size() - i - 1;

        std::vector<std::size_t> rows_after;
        for (std::size_t r = i + 1; r < gold_rest.size(); ++r) rows_after.push_back(r);

        bool chosen = false;
        for (std::size_t j = 0; j < gen_rest.size() && !chosen; ++j) {
            if (col_used[j]) continue;
            std::vector<std::size_t> cols_left;
            for (std::size_t c = 0; c < gen_rest.size(); ++c) {
                if (!col_used[c] && c != j) cols_left.push_back(c);
            }
            double rest = 0.0;
            if (pairs_remaining > 1) {
                rest = best_assignment_total(sim_matrix, rows_after, cols_left);
            }
            if (fixed_sum + sim_matrix[i][j] + rest >= optimum - kTieTolerance) {
                col_used[j] = 1;
                fixed.emplace_back(i, j);
                fixed_sum += sim_matrix[i][j];
                chosen = true;
            }
        }
        if (!chosen && golds_after < pairs_remaining) {
            // Unreachable if the optimum was computed correctly.
            throw std::logic_error("pair_objects: no admissible column found");
        }
    }

    std::vector<char> row_paired(gold_rest.size(), 0);
    for (const auto& [i, j] : fixed) {
        row_paired[i] = 1;
        pairing.fuzzy_pairs.emplace_back(gold_rest[i], gen_rest[j]);
    }
    for (std::size_t i = 0; i < gold_rest.size(); ++i) {
        if (!row_paired[i]) pairing.unpaired_gold.push_back(gold_rest[i]);
    }
    for (std::size_t j = 0; j < gen_rest.size(); ++j) {
        if (!col_used[j]) pairing.unpaired_gen.push_back(gen_rest[j]);
    }
    return pairing;
}

EvalCounts& EvalCounts::operator+=(const EvalCounts& other) {
    obj_tp += other.obj_tp;
    obj_fp += other.obj_fp;
    obj_fn += other.obj_fn;
    kv_tp += other.kv_tp;
    kv_fp += other.kv_fp;
    kv_fn += other.kv_fn;
    return *this;
}

Scores prf1(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn) {
    const bool all_zero = tp == 0 && fp == 0 && fn == 0;
    Scores scores;
    if (tp + fp > 0) {
        scores.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    } else {
        scores.precision = all_zero ? 1.0 : 0.0;
    }
    if (tp + fn > 0) {
        scores.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    } else {
        scores.recall = all_zero ? 1.0 : 0.0;
    }
    if (scores.precision + scores.recall > 0.0) {
        scores.f1 = 2.0 * scores.precision * scores.recall /
                    (scores.precision + scores.recall);
    } else {
        scores.f1 = all_zero ? 1.0 : 0.0;
    }
    return scores;
}

namespace {

void count_fuzzy_pair(const IntentInstance& gold, const IntentInstance& gen,
                      EvalCounts& counts) {
    // The intent label participates like any other pair; it is present on
    // both sides, so a mismatch is a false positive (key match, value
    // mismatch), never a false negative.
    if (gold.intent == gen.intent) {
        ++counts.kv_tp;
    } else {
        ++counts.kv_fp;
    }
    for (const auto& [key, value] : gen.entities) {
        const std::string* gold_value = gold.find(key);
        if (gold_value == nullptr) {
            ++counts.kv_fp;  // key only in generated
        } else if (*gold_value == value) {
            ++counts.kv_tp;
        } else {
            ++counts.kv_fp;  // matching key, mismatched value
        }
    }
    for (const auto& [key, value] : gold.entities) {
        if (gen.find(key) == nullptr) ++counts.kv_fn;  // key only in gold
    }
}

}  // namespace

EvalCounts score_pairing(const Pairing& pairing, const std::vector<IntentInstance>& gold,
                         const std::vector<IntentInstance>& gen) {
    EvalCounts counts;
    for (const auto& [g, h] : pairing.exact_pairs) {
        ++counts.obj_tp;
        counts.kv_tp += gold[g].pair_count();
    }
    for (const auto& [g, h] : pairing.fuzzy_pairs) {
        ++counts.obj_fp;
        count_fuzzy_pair(gold[g], gen[h], counts);
    }
    for (std::size_t h : pairing.unpaired_gen) {
        ++counts.obj_fp;
        counts.kv_fp += gen[h].pair_count();
    }
    for (std::size_t g : pairing.unpaired_gold) {
        ++counts.obj_fn;
        counts.kv_fn += gold[g].pair_count();
    }
    return counts;
}

EvalCounts score_record(const Extraction& gold, const Extraction& gen, sim::Backend backend) {
    const Pairing pairing = pair_objects(gold.instances, gen.instances, backend);
    return score_pairing(pairing, gold.instances, gen.instances);
}

// ---------------------------------------------------------------------------
// Exhaustive oracle. Deliberately shares no pairing or counting code with
// the production path; only object_string and the similarity primitive are
// reused.
// ---------------------------------------------------------------------------

namespace {

struct OracleSearch {
    const std::vector<std::vector<double>>* sim = nullptr;
    std::size_t gold_count = 0;
    std::size_t gen_count = 0;
    std::size_t need = 0;

    std::vector<std::pair<std::size_t, std::size_t>> current;
    std::vector<char> gen_used;

    bool have_best = false;
    double best_total = 0.0;
    std::vector<std::pair<std::size_t, std::size_t>> best;

    void run(std::size_t gold_index, double total) {
        if (current.size() == need) {
            // Enumeration order is the lexicographic order of the pairing
            // sequences, so on ties the first candidate wins.
            if (!have_best || total > best_total + kTieTolerance) {
                have_best = true;
                best_total = total;
                best = current;
            }
            return;
        }
        if (gold_index >= gold_count) return;
        for (std::size_t h = 0; h < gen_count; ++h) {
            if (gen_used[h]) continue;
            gen_used[h] = 1;
            current.emplace_back(gold_index, h);
            run(gold_index + 1, total + (*sim)[gold_index][h]);
            current.pop_back();
            gen_used[h] = 0;
        }
        const std::size_t golds_after = gold_count - gold_index - 1;
        if (golds_after >= need - current.size()) {
            run(gold_index + 1, total);  // leave this gold unpaired
        }
    }
};

}  // namespace

EvalCounts oracle_score_record(const Extraction& gold, const Extraction& gen) {
    // Exact phase, restated independently: ascending gold order, lowest
    // unconsumed generated instance with an identical canonical string.
    std::vector<std::string> gold_strings;
    std::vector<std::string> gen_strings;
    for (const auto& instance : gold.instances) gold_strings.push_back(object_string(instance));
    for (const auto& instance : gen.instances) gen_strings.push_back(object_string(instance));

    EvalCounts counts;
    std::vector<char> gen_taken(gen_strings.size(), 0);
    std::vector<std::size_t> gold_rest;
    for (std::size_t g = 0; g < gold_strings.size(); ++g) {
        bool matched = false;
        for (std::size_t h = 0; h < gen_strings.size(); ++h) {
            if (!gen_taken[h] && gold_strings[g] == gen_strings[h]) {
                gen_taken[h] = 1;
                matched = true;
                ++counts.obj_tp;
                counts.kv_tp += gold.instances[g].pair_count();
                break;
            }
        }
        if (!matched) gold_rest.push_back(g);
    }
    std::vector<std::size_t> gen_rest;
    for (std::size_t h = 0; h < gen_strings.size(); ++h) {
        if (!gen_taken[h]) gen_rest.push_back(h);
    }

    if (gold_rest.size() > 8 || gen_rest.size() > 8) {
        throw SizeLimit("oracle limited to 8 objects per side after exact pairing (got " +
                        std::to_string(gold_rest.size()) + " gold, " +
                        std::to_string(gen_rest.size()) + " generated)");
    }

    std::vector<std::vector<double>> sim_matrix(gold_rest.size(),
                                                std::vector<double>(gen_rest.size(), 0.0));
    for (std::size_t i = 0; i < gold_rest.size(); ++i) {
        for (std::size_t j = 0; j < gen_rest.size(); ++j) {
            sim_matrix[i][j] = sim::similarity_utf8(gold_strings[gold_rest[i]],
                                                    gen_strings[gen_rest[j]],
                                                    sim::Backend::scalar);
        }
    }

    OracleSearch search;
    search.sim = &sim_matrix;
    search.gold_count = gold_rest.size();
    search.gen_count = gen_rest.size();
    search.need = std::min(gold_rest.size(), gen_rest.size());
    search.gen_used.assign(gen_rest.size(), 0);
    if (search.need > 0) search.run(0, 0.0);

    std::vector<char> gold_in_pair(gold_rest.size(), 0);
    std::vector<char> gen_in_pair(gen_rest.size(), 0);
    for (const auto& [i, j] : search.best) {
        gold_in_pair[i] = 1;
        gen_in_pair[j] = 1;
        const IntentInstance& g = gold.instances[gold_rest[i]];
        const IntentInstance& h = gen.instances[gen_rest[j]];
        ++counts.obj_fp;
        if (g.intent == h.intent) ++counts.kv_tp; else ++counts.kv_fp;
        for (const auto& [key, value] : h.entities) {
            const std::string* gv = g.find(key);
            if (gv == nullptr) ++counts.kv_fp;
            else if (*gv == value) ++counts.kv_tp;
            else ++counts.kv_fp;
        }
        for (const auto& [key, value] : g.entities) {
            if (h.find(key) == nullptr) ++counts.kv_fn;
        }
    }
    for (std::size_t i = 0; i < gold_rest.size(); ++i) {
        if (!gold_in_pair[i]) {
            ++counts.obj_fn;
            counts.kv_fn += gold.instances[gold_rest[i]].pair_count();
        }
    }
    for (std::size_t j = 0; j < gen_rest.size(); ++j) {
        if (!gen_in_pair[j]) {
            ++counts.obj_fp;
            counts.kv_fp += gen.instances[gen_rest[j]].pair_count();
        }
    }
    return counts;
}

std::size_t total_pairs(const Extraction& extraction) {
    std::size_t total = 0;
    for (const auto& instance : extraction.instances) total += instance.pair_count();
    return total;
}

EvalReport score_corpus(const std::vector<CorpusItem>& items, unsigned jobs,
                        sim::Backend backend) {
    EvalReport report;
    report.per_record.resize(items.size());

    const auto score_one = [&](std::size_t index) {
        const CorpusItem& item = items[index];
        RecordResult result;
        result.id = item.id;
        if (const auto parsed = try_parse_extraction(item.generated_text)) {
            result.counts = score_record(item.gold, *parsed, backend);
        } else {
            result.parse_failed = true;
            result.counts.obj_fn = item.gold.instances.size();
            result.counts.kv_fn = total_pairs(item.gold);
        }
        report.per_record[index] = std::move(result);
    };

    if (jobs <= 1 || items.size() < 2) {
        for (std::size_t i = 0; i < items.size(); ++i) score_one(i);
    } else {
        const unsigned worker_count = std::min<unsigned>(jobs, static_cast<unsigned>(items.size()));
        std::vector<std::thread> workers;
        workers.reserve(worker_count);
        for (unsigned w = 0; w < worker_count; ++w) {
            workers.emplace_back([&, w]() {
                for (std::size_t i = w; i < items.size(); i += worker_count) score_one(i);
            });
        }
        for (auto& worker : workers) worker.join();
    }

    for (const RecordResult& result : report.per_record) {
        report.totals += result.counts;
        if (result.parse_failed) ++report.parse_failures;
    }
    report.object_scores = prf1(report.totals.obj_tp, report.totals.obj_fp, report.totals.obj_fn);
    report.kv_scores = prf1(report.totals.kv_tp, report.totals.kv_fp, report.totals.kv_fn);
    return report;
}

}  // namespace jsonslots::eval
