#include <doctest.h>

#include <algorithm>

#include "jsonslots/guardrails.hpp"
#include "jsonslots/rng.hpp"
#include "test_util.hpp"

using namespace jsonslots;
using guardrails::sanitize_extraction;

namespace {

TaskInput make_input() {
    TaskInput input;
    input.message = "please cancel order ON-1 and reschedule return R-7 to 2023-03-14";
    input.requested = {
        {IntentName::parse("Order > Cancel"),
         {EntityName::from_display("Order Number")}},
        {IntentName::parse("Return > Reschedule Pickup"),
         {EntityName::from_display("Return ID"), EntityName::from_display("New Date")}},
    };
    return input;
}

IntentInstance instance(const char* intent,
                        std::vector<std::pair<std::string, std::string>> entities) {
    IntentInstance out;
    out.intent = IntentName::parse(intent);
    out.entities = std::move(entities);
    return out;
}

}  // namespace

TEST_CASE("sanitize keeps fully grounded extractions") {
    const TaskInput input = make_input();
    Extraction extraction;
    extraction.instances = {
        instance("Order > Cancel", {{"order_number", "ON-1"}}),
        instance("Return > Reschedule Pickup",
                 {{"return_id", "R-7"}, {"new_date", "2023-03-14"}}),
    };
    CHECK(sanitize_extraction(extraction, input) == extraction);
}

TEST_CASE("sanitize removes ungrounded values but keeps the instance") {
    const TaskInput input = make_input();
    Extraction extraction;
    extraction.instances = {
        instance("Order > Cancel", {{"order_number", "XYZ-999"}}),
    };
    const Extraction out = sanitize_extraction(extraction, input);
    REQUIRE(out.instances.size() == 1);
    CHECK(out.instances[0].entities.empty());
    CHECK(out.instances[0].intent.display() == "Order > Cancel");
}

TEST_CASE("sanitize removes unrequested keys and intents") {
    const TaskInput input = make_input();
    Extraction extraction;
    extraction.instances = {
        instance("Order > Cancel", {{"order_number", "ON-1"}, {"product_id", "ON-1"}}),
        instance("Payroll > Employee > Add", {{"employee_name", "ON-1"}}),
        instance("Return > Reschedule Pickup", {{"return_id", "R-7"}}),
    };
    const Extraction out = sanitize_extraction(extraction, input);
    REQUIRE(out.instances.size() == 2);  // unrequested intent dropped entirely
    CHECK(out.instances[0].entities.size() == 1);
    CHECK(out.instances[0].entities[0].first == "order_number");
    CHECK(out.instances[1].intent.display() == "Return > Reschedule Pickup");
}

TEST_CASE("substring check is case-sensitive") {
    const TaskInput input = make_input();
    Extraction extraction;
    extraction.instances = {instance("Order > Cancel", {{"order_number", "on-1"}})};
    const Extraction out = sanitize_extraction(extraction, input);
    CHECK(out.instances[0].entities.empty());
}

TEST_CASE("sanitize fuzz: soundness, idempotence, monotonicity") {
    const TaskInput input = make_input();
    rng::Engine engine(23);
    for (int round = 0; round < 1000; ++round) {
        Extraction noisy;
        const std::size_t count = rng::uniform_below(engine, 5);
        for (std::size_t i = 0; i < count; ++i) {
            IntentInstance candidate = testutil::random_instance(engine);
            // bias some values toward message substrings so both branches run
            for (auto& [key, value] : candidate.entities) {
                const std::uint64_t dice = rng::uniform_below(engine, 3);
                if (dice == 0) value = "ON-1";
                else if (dice == 1) value = "R-7";
            }
            noisy.instances.push_back(std::move(candidate));
        }

        const Extraction once = sanitize_extraction(noisy, input);

        // soundness: every surviving pair is requested and grounded
        for (const auto& inst : once.instances) {
            const auto* requested = input.find(inst.intent);
            REQUIRE(requested != nullptr);
            for (const auto& [key, value] : inst.entities) {
                CHECK(std::any_of(requested->begin(), requested->end(),
                                  [&, k = key](const EntityName& e) { return e.key == k; }));
                CHECK(input.message.find(value) != std::string::npos);
            }
        }
        // idempotence
        CHECK(sanitize_extraction(once, input) == once);
        // monotonicity: no new instances, values never rewritten
        CHECK(once.instances.size() <= noisy.instances.size());
    }
}
