#include <doctest.h>

#include <algorithm>

#include "jsonslots/eval.hpp"
#include "jsonslots/rng.hpp"
#include "test_util.hpp"

using namespace jsonslots;
using eval::EvalCounts;

namespace {

IntentInstance make_instance(const char* intent,
                             std::vector<std::pair<std::string, std::string>> entities) {
    IntentInstance instance;
    instance.intent = IntentName::parse(intent);
    instance.entities = std::move(entities);
    return instance;
}

// The walked-through scoring example: three gold objects against two
// generated ones — one exact match with 4 pairs, one fuzzy pair with 2
// matching pairs and 1 value mismatch, one unmatched gold object with 4
// pairs. Expected counts: objects (1,1,1), key-value (6,1,4).
struct WalkthroughFixture {
    Extraction gold;
    Extraction gen;
};

WalkthroughFixture walkthrough() {
    WalkthroughFixture fixture;
    fixture.gold.instances = {
        make_instance("Order > Amendment > Reduce Quantity By",
                      {{"order_number", "ON-100"}, {"product_id", "P-5"}, {"quantity", "2"}}),
        make_instance("Order > Date Change",
                      {{"order_number", "ON-200"}, {"new_date", "2023-05-01"}}),
        make_instance("Payroll > Correction > Cancel",
                      {{"employee_name", "John Smith"},
                       {"check_number", "CHK-77"},
                       {"amount", "$450"}}),
    };
    fixture.gen.instances = {
        make_instance("Order > Amendment > Reduce Quantity By",
                      {{"order_number", "ON-100"}, {"product_id", "P-5"}, {"quantity", "2"}}),
        make_instance("Order > Date Change",
                      {{"order_number", "ON-200"}, {"new_date", "2023-06-01"}}),
    };
    return fixture;
}

EvalCounts counts(std::uint64_t obj_tp, std::uint64_t obj_fp, std::uint64_t obj_fn,
                  std::uint64_t kv_tp, std::uint64_t kv_fp, std::uint64_t kv_fn) {
    return EvalCounts{obj_tp, obj_fp, obj_fn, kv_tp, kv_fp, kv_fn};
}

}  // namespace

TEST_CASE("prf1") {
    const auto half = eval::prf1(1, 1, 1);
    CHECK(half.precision == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(half.recall == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(half.f1 == doctest::Approx(0.5).epsilon(1e-12));

    const auto kv = eval::prf1(6, 1, 4);
    CHECK(kv.precision == doctest::Approx(6.0 / 7.0).epsilon(1e-12));
    CHECK(kv.recall == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(kv.f1 == doctest::Approx(12.0 / 17.0).epsilon(1e-12));

    const auto vacuous = eval::prf1(0, 0, 0);
    CHECK(vacuous.precision == 1.0);
    CHECK(vacuous.recall == 1.0);
    CHECK(vacuous.f1 == 1.0);

    const auto miss = eval::prf1(0, 3, 0);
    CHECK(miss.precision == 0.0);
    CHECK(miss.recall == 0.0);
    CHECK(miss.f1 == 0.0);

    const auto no_gold = eval::prf1(0, 0, 2);
    CHECK(no_gold.precision == 0.0);
    CHECK(no_gold.recall == 0.0);
}

TEST_CASE("object_string sorts entity keys and leads with intent") {
    const IntentInstance instance = make_instance("A", {{"b", "2"}, {"a", "1"}});
    CHECK(eval::object_string(instance) == R"({"intent":"A","a":"1","b":"2"})");
    CHECK(eval::object_string(make_instance("A", {})) == R"({"intent":"A"})");

    const IntentInstance reordered = make_instance("A", {{"a", "1"}, {"b", "2"}});
    CHECK(eval::object_string(instance) == eval::object_string(reordered));
}

TEST_CASE("pair_objects basics") {
    const auto x = make_instance("Order > Cancel", {{"order_number", "ON-1"}});

    SUBCASE("identical singletons pair exactly") {
        const eval::Pairing pairing = eval::pair_objects({x}, {x});
        REQUIRE(pairing.exact_pairs.size() == 1);
        CHECK(pairing.exact_pairs[0] == std::pair<std::size_t, std::size_t>{0, 0});
        CHECK(pairing.fuzzy_pairs.empty());
        CHECK(pairing.unpaired_gold.empty());
        CHECK(pairing.unpaired_gen.empty());
    }

    SUBCASE("crossed similarity picks the maximizing pairing") {
        // gold [X, Y], gen [Y', X']: the crossed assignment wins
        const auto gold_x = make_instance("Order > Cancel", {{"order_number", "ON-1111"}});
        const auto gold_y = make_instance("Return > Label", {{"return_id", "R-2222"}});
        const auto gen_y = make_instance("Return > Label", {{"return_id", "R-2299"}});
        const auto gen_x = make_instance("Order > Cancel", {{"order_number", "ON-1199"}});
        const eval::Pairing pairing = eval::pair_objects({gold_x, gold_y}, {gen_y, gen_x});
        CHECK(pairing.exact_pairs.empty());
        REQUIRE(pairing.fuzzy_pairs.size() == 2);
        CHECK(pairing.fuzzy_pairs[0] == std::pair<std::size_t, std::size_t>{0, 1});
        CHECK(pairing.fuzzy_pairs[1] == std::pair<std::size_t, std::size_t>{1, 0});
    }

    SUBCASE("three gold, one generated") {
        const auto a = make_instance("A", {{"order_number", "1"}});
        const auto b = make_instance("B", {{"order_number", "2"}});
        const auto c = make_instance("C", {{"order_number", "3"}});
        const eval::Pairing pairing = eval::pair_objects({a, b, c}, {c});
        CHECK(pairing.exact_pairs.size() == 1);
        CHECK(pairing.fuzzy_pairs.empty());
        CHECK(pairing.unpaired_gold.size() == 2);
        CHECK(pairing.unpaired_gen.empty());
    }

    SUBCASE("duplicate instances pair greedily in index order") {
        const eval::Pairing pairing = eval::pair_objects({x, x}, {x, x});
        REQUIRE(pairing.exact_pairs.size() == 2);
        CHECK(pairing.exact_pairs[0] == std::pair<std::size_t, std::size_t>{0, 0});
        CHECK(pairing.exact_pairs[1] == std::pair<std::size_t, std::size_t>{1, 1});
    }

    SUBCASE("empty sides") {
        const eval::Pairing none = eval::pair_objects({}, {});
        CHECK(none.exact_pairs.empty());
        const eval::Pairing only_gold = eval::pair_objects({x}, {});
        CHECK(only_gold.unpaired_gold == std::vector<std::size_t>{0});
        const eval::Pairing only_gen = eval::pair_objects({}, {x});
        CHECK(only_gen.unpaired_gen == std::vector<std::size_t>{0});
    }
}

TEST_CASE("score_record pinned examples") {
    SUBCASE("perfect match, 2 objects x 3 entities") {
        Extraction gold;
        gold.instances = {
            make_instance("A", {{"a", "1"}, {"b", "2"}, {"c", "3"}}),
            make_instance("B", {{"d", "4"}, {"e", "5"}, {"f", "6"}}),
        };
        const EvalCounts result = eval::score_record(gold, gold);
        CHECK(result == counts(2, 0, 0, 8, 0, 0));
    }

    SUBCASE("empty generation") {
        Extraction gold;
        gold.instances = {make_instance("A", {{"a", "1"}, {"b", "2"}})};
        const EvalCounts result = eval::score_record(gold, Extraction{});
        CHECK(result == counts(0, 0, 1, 0, 0, 3));
    }

    SUBCASE("empty gold, two generated") {
        Extraction gen;
        gen.instances = {make_instance("A", {{"a", "1"}}), make_instance("B", {})};
        const EvalCounts result = eval::score_record(Extraction{}, gen);
        CHECK(result == counts(0, 2, 0, 0, 3, 0));
    }

    SUBCASE("walkthrough fixture scores (1,1,1)/(6,1,4)") {
        const auto fixture = walkthrough();
        const EvalCounts expected = counts(1, 1, 1, 6, 1, 4);
        CHECK(eval::score_record(fixture.gold, fixture.gen) == expected);
        CHECK(eval::oracle_score_record(fixture.gold, fixture.gen) == expected);

        const auto object_scores = eval::prf1(1, 1, 1);
        CHECK(object_scores.f1 == doctest::Approx(0.5));
        const auto kv_scores = eval::prf1(6, 1, 4);
        CHECK(kv_scores.precision == doctest::Approx(0.857142857142857));
        CHECK(kv_scores.recall == doctest::Approx(0.6));
        CHECK(kv_scores.f1 == doctest::Approx(0.705882352941176));
    }

    SUBCASE("intent mismatch inside a fuzzy pair is a key-value FP") {
        Extraction gold;
        gold.instances = {make_instance("A", {{"a", "1"}})};
        Extraction gen;
        gen.instances = {make_instance("B", {{"a", "1"}})};
        const EvalCounts result = eval::score_record(gold, gen);
        CHECK(result == counts(0, 1, 0, 1, 1, 0));
    }
}

TEST_CASE("score_record never alters on array permutations") {
    rng::Engine engine(31);
    for (int round = 0; round < 100; ++round) {
        Extraction gold = testutil::random_extraction(engine, 4);
        Extraction gen = testutil::perturb_extraction(gold, engine);
        const EvalCounts base = eval::score_record(gold, gen);

        rng::shuffle(engine, gold.instances);
        rng::shuffle(engine, gen.instances);
        CHECK(eval::score_record(gold, gen) == base);
    }
}

TEST_CASE("perfection: scoring an extraction against itself") {
    rng::Engine engine(37);
    for (int round = 0; round < 100; ++round) {
        const Extraction x = testutil::random_extraction(engine, 4);
        const EvalCounts result = eval::score_record(x, x);
        CHECK(result.obj_fp == 0);
        CHECK(result.obj_fn == 0);
        CHECK(result.kv_fp == 0);
        CHECK(result.kv_fn == 0);
        CHECK(result.obj_tp == x.instances.size());
        const auto scores = eval::prf1(result.obj_tp, result.obj_fp, result.obj_fn);
        CHECK(scores.f1 == 1.0);
    }
}

TEST_CASE("conservation laws") {
    // The generated side conserves mass unconditionally. On the gold side a
    // fuzzy pair consumes a gold object without producing a count, so
    // obj_tp + obj_fn equals |gold| minus the fuzzy-pair count.
    rng::Engine engine(41);
    for (int round = 0; round < 1000; ++round) {
        const Extraction gold = testutil::random_extraction(engine, 4);
        const Extraction gen = round % 2 == 0
                                   ? testutil::perturb_extraction(gold, engine)
                                   : testutil::random_extraction(engine, 4);
        const EvalCounts result = eval::score_record(gold, gen);
        const eval::Pairing pairing = eval::pair_objects(gold.instances, gen.instances);

        CHECK(result.obj_tp + result.obj_fp == gen.instances.size());
        CHECK(result.kv_tp + result.kv_fp == eval::total_pairs(gen));
        CHECK(result.obj_tp + result.obj_fn + pairing.fuzzy_pairs.size() ==
              gold.instances.size());
    }
}

TEST_CASE("duality on exact-or-unpaired records") {
    // With no fuzzy pairs, swapping gold and generated swaps fp with fn and
    // precision with recall.
    rng::Engine engine(43);
    for (int round = 0; round < 200; ++round) {
        Extraction gold = testutil::random_extraction(engine, 4);
        // generated = subset of gold plus duplicated members: every object
        // either matches exactly or is unpaired
        Extraction gen;
        for (const auto& instance : gold.instances) {
            if (rng::uniform_below(engine, 2) == 0) gen.instances.push_back(instance);
        }
        const EvalCounts forward = eval::score_record(gold, gen);
        const EvalCounts backward = eval::score_record(gen, gold);
        CHECK(forward.obj_tp == backward.obj_tp);
        CHECK(forward.obj_fp == backward.obj_fn);
        CHECK(forward.obj_fn == backward.obj_fp);

        const auto f = eval::prf1(forward.obj_tp, forward.obj_fp, forward.obj_fn);
        const auto b = eval::prf1(backward.obj_tp, backward.obj_fp, backward.obj_fn);
        CHECK(f.precision == doctest::Approx(b.recall));
        CHECK(f.recall == doctest::Approx(b.precision));
    }
}

TEST_CASE("fuzzy pairing maximizes total similarity (vs enumeration)") {
    rng::Engine engine(47);
    for (int round = 0; round < 200; ++round) {
        const Extraction gold = testutil::random_extraction(engine, 4);
        const Extraction gen = testutil::random_extraction(engine, 4);
        const eval::Pairing pairing = eval::pair_objects(gold.instances, gen.instances);

        // total similarity of the chosen fuzzy pairs
        double chosen = 0.0;
        for (const auto& [g, h] : pairing.fuzzy_pairs) {
            chosen += sim::similarity_utf8(eval::object_string(gold.instances[g]),
                                           eval::object_string(gen.instances[h]),
                                           sim::Backend::scalar);
        }
        // enumerate alternatives over the same leftover sets
        std::vector<std::size_t> gold_rest = pairing.unpaired_gold;
        std::vector<std::size_t> gen_rest = pairing.unpaired_gen;
        for (const auto& [g, h] : pairing.fuzzy_pairs) {
            gold_rest.push_back(g);
            gen_rest.push_back(h);
        }
        std::sort(gold_rest.begin(), gold_rest.end());
        std::sort(gen_rest.begin(), gen_rest.end());
        if (gold_rest.empty() || gen_rest.empty()) continue;

        // Permute the larger side; its first `need` slots pair with the
        // smaller side, which covers every injective pairing.
        const bool gold_small = gold_rest.size() <= gen_rest.size();
        const std::size_t need = std::min(gold_rest.size(), gen_rest.size());
        std::vector<std::size_t> perm(gold_small ? gen_rest.size() : gold_rest.size());
        for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
        double best = 0.0;
        do {
            double total = 0.0;
            for (std::size_t i = 0; i < need; ++i) {
                const std::size_t g = gold_small ? gold_rest[i] : gold_rest[perm[i]];
                const std::size_t h = gold_small ? gen_rest[perm[i]] : gen_rest[i];
                total += sim::similarity_utf8(eval::object_string(gold.instances[g]),
                                              eval::object_string(gen.instances[h]),
                                              sim::Backend::scalar);
            }
            best = std::max(best, total);
        } while (std::next_permutation(perm.begin(), perm.end()));
        CHECK(chosen >= best - 1e-9);
    }
}

TEST_CASE("tie-breaking on engineered equal-similarity matrices") {
    // All cross similarities equal: object strings differ only in the last
    // character, so any injective pairing is optimal. The winner must be
    // the lexicographically smallest generated-index sequence in gold
    // order, with unpaired golds sorting last.
    const auto obj = [](const char* value) {
        return make_instance("A", {{"order_number", value}});
    };

    SUBCASE("square tie") {
        const eval::Pairing pairing =
            eval::pair_objects({obj("aa1"), obj("aa2")}, {obj("aa3"), obj("aa4")});
        REQUIRE(pairing.fuzzy_pairs.size() == 2);
        CHECK(pairing.fuzzy_pairs[0] == std::pair<std::size_t, std::size_t>{0, 0});
        CHECK(pairing.fuzzy_pairs[1] == std::pair<std::size_t, std::size_t>{1, 1});
    }

    SUBCASE("more gold than generated: earliest golds pair first") {
        const eval::Pairing pairing =
            eval::pair_objects({obj("aa1"), obj("aa2"), obj("aa3")}, {obj("aa4"), obj("aa5")});
        REQUIRE(pairing.fuzzy_pairs.size() == 2);
        CHECK(pairing.fuzzy_pairs[0] == std::pair<std::size_t, std::size_t>{0, 0});
        CHECK(pairing.fuzzy_pairs[1] == std::pair<std::size_t, std::size_t>{1, 1});
        CHECK(pairing.unpaired_gold == std::vector<std::size_t>{2});
    }

    SUBCASE("oracle agrees on tied counts") {
        Extraction gold;
        gold.instances = {obj("aa1"), obj("aa2"), obj("aa3")};
        Extraction gen;
        gen.instances = {obj("aa4"), obj("aa5")};
        CHECK(eval::score_record(gold, gen) == eval::oracle_score_record(gold, gen));
    }
}

TEST_CASE("oracle equals score_record on 500 random cases") {
    rng::Engine engine(53);
    for (int round = 0; round < 500; ++round) {
        const Extraction gold = testutil::random_extraction(engine, 5);
        const Extraction gen = round % 3 == 0 ? testutil::random_extraction(engine, 5)
                                              : testutil::perturb_extraction(gold, engine);
        CAPTURE(round);
        CHECK(eval::score_record(gold, gen) == eval::oracle_score_record(gold, gen));
    }
}

TEST_CASE("oracle size limit") {
    Extraction gold;
    Extraction gen;
    for (int i = 0; i < 9; ++i) {
        gold.instances.push_back(
            make_instance("A", {{"order_number", "G-" + std::to_string(i)}}));
        gen.instances.push_back(
            make_instance("A", {{"order_number", "H-" + std::to_string(i)}}));
    }
    CHECK_THROWS_AS(eval::oracle_score_record(gold, gen), SizeLimit);
    // exact matches do not count toward the limit
    Extraction nine_exact = gold;
    CHECK_NOTHROW(eval::oracle_score_record(nine_exact, gold));
}

TEST_CASE("score_corpus") {
    const auto fixture = walkthrough();

    SUBCASE("identical records score 1.0") {
        std::vector<eval::CorpusItem> items;
        for (int i = 0; i < 4; ++i) {
            items.push_back({"r" + std::to_string(i), fixture.gold,
                             canonical_serialize(fixture.gold)});
        }
        const eval::EvalReport report = eval::score_corpus(items);
        CHECK(report.object_scores.f1 == doctest::Approx(1.0));
        CHECK(report.kv_scores.f1 == doctest::Approx(1.0));
        CHECK(report.parse_failures == 0);
    }

    SUBCASE("unparseable generation counts as all-FN") {
        // gold pair counts: 4 + 3 + 4
        std::vector<eval::CorpusItem> items = {{"r0", fixture.gold, "not json"}};
        const eval::EvalReport report = eval::score_corpus(items);
        CHECK(report.parse_failures == 1);
        CHECK(report.totals == counts(0, 0, 3, 0, 0, 11));
    }

    SUBCASE("totals sum per-record counts") {
        // record 1: the walkthrough (1,1,1)/(6,1,4); record 2: a perfect
        // 5-pair object (1,0,0)/(5,0,0)
        Extraction second;
        second.instances = {make_instance(
            "A", {{"a", "1"}, {"b", "2"}, {"c", "3"}, {"d", "4"}})};
        std::vector<eval::CorpusItem> items = {
            {"r1", fixture.gold, canonical_serialize(fixture.gen)},
            {"r2", second, canonical_serialize(second)},
        };
        const eval::EvalReport report = eval::score_corpus(items);
        CHECK(report.totals == counts(2, 1, 1, 11, 1, 4));
        CHECK(report.kv_scores.precision == doctest::Approx(11.0 / 12.0));
        CHECK(report.per_record.size() == 2);
        CHECK(report.per_record[0].counts == counts(1, 1, 1, 6, 1, 4));
        CHECK(report.per_record[1].counts == counts(1, 0, 0, 5, 0, 0));
    }

    SUBCASE("job count does not change results") {
        rng::Engine engine(59);
        std::vector<eval::CorpusItem> items;
        for (int i = 0; i < 40; ++i) {
            const Extraction gold = testutil::random_extraction(engine, 4);
            const Extraction gen = testutil::perturb_extraction(gold, engine);
            items.push_back({"r" + std::to_string(i), gold, canonical_serialize(gen)});
        }
        const eval::EvalReport sequential = eval::score_corpus(items, 1);
        const eval::EvalReport parallel = eval::score_corpus(items, 8);
        CHECK(sequential.totals == parallel.totals);
        for (std::size_t i = 0; i < items.size(); ++i) {
            CHECK(sequential.per_record[i].counts == parallel.per_record[i].counts);
        }
    }

    SUBCASE("record order does not change totals") {
        rng::Engine engine(61);
        std::vector<eval::CorpusItem> items;
        for (int i = 0; i < 20; ++i) {
            const Extraction gold = testutil::random_extraction(engine, 3);
            items.push_back({"r" + std::to_string(i), gold,
                             canonical_serialize(testutil::perturb_extraction(gold, engine))});
        }
        const eval::EvalReport forward = eval::score_corpus(items);
        std::reverse(items.begin(), items.end());
        const eval::EvalReport reversed = eval::score_corpus(items);
        CHECK(forward.totals == reversed.totals);
    }
}

TEST_CASE("eval backends agree end to end") {
    rng::Engine engine(67);
    for (int round = 0; round < 100; ++round) {
        const Extraction gold = testutil::random_extraction(engine, 5);
        const Extraction gen = testutil::perturb_extraction(gold, engine);
        const EvalCounts scalar = eval::score_record(gold, gen, sim::Backend::scalar);
        const EvalCounts bitpar = eval::score_record(gold, gen, sim::Backend::bitparallel);
        CHECK(scalar == bitpar);
        if (sim::backend_available(sim::Backend::avx2)) {
            CHECK(scalar == eval::score_record(gold, gen, sim::Backend::avx2));
        }
    }
}
