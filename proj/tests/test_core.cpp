#include <doctest.h>

#include "mt/core.hpp"

#include <set>

using namespace mt;

TEST_CASE("seed derivation is deterministic and separates streams") {
    CHECK(seed_of(7, 1) == seed_of(7, 1));
    CHECK(seed_of(7, 1) != seed_of(7, 2));
    CHECK(seed_of(7, 1) != seed_of(8, 1));
    CHECK(seed_of(7, 1, 2) != seed_of(7, 2, 1));
    CHECK(seed_of(3, "elicit") == seed_of(3, "elicit"));
    CHECK(seed_of(3, "elicit") != seed_of(3, "elicit2"));
    std::set<std::uint64_t> seen;
    for (std::uint64_t n = 0; n < 20; ++n)
        for (std::uint64_t t = 0; t < 50; ++t) seen.insert(seed_of(0, n, t));
    CHECK(seen.size() == 1000);
}

TEST_CASE("rng replays and stays in range") {
    Rng a(42), b(42);
    std::vector<std::size_t> counts(5, 0);
    for (int i = 0; i < 5000; ++i) {
        auto k = a.index(5);
        CHECK(k == b.index(5));
        ++counts[k];
    }
    for (auto c : counts) CHECK(c > 800);
    for (int i = 0; i < 100; ++i) {
        double u = a.unit();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    CHECK_THROWS_AS(a.index(0), DomainError);
}

TEST_CASE("examples round trip through json") {
    LabeledExample z{{3, 5}, false};
    auto j = example_json(z);
    CHECK(j.at("label") == 0);
    CHECK(example_from_json(j) == z);
    CHECK_THROWS_AS(example_from_json(json{{"x", 0}, {"y", 0}, {"label", 2}}), DomainError);
}

TEST_CASE("trace jsonl round trip") {
    TeachingTrace tr;
    tr.steps.push_back({0, {{1, 2}, true}, json{{"r1", {0, 0, 1, 1}}}, 40});
    tr.steps.push_back({1, {{0, 0}, false}, json{{"r1", {1, 1, 1, 1}}}, std::nullopt});
    auto text = trace_jsonl(tr);
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
    auto back = steps_from_jsonl(text);
    REQUIRE(back.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(back[i].t == tr.steps[i].t);
        CHECK(back[i].example == tr.steps[i].example);
        CHECK(back[i].learner == tr.steps[i].learner);
        CHECK(back[i].vs_size == tr.steps[i].vs_size);
    }
    CHECK(trace_jsonl({back, Terminal::Running}) == text);
}

TEST_CASE("bitset member helpers agree with a scan") {
    Bits b(37);
    for (std::size_t i : {0, 4, 5, 19, 36}) b.set(i);
    auto m = members(b);
    CHECK(m == std::vector<std::size_t>{0, 4, 5, 19, 36});
    for (std::size_t k = 0; k < m.size(); ++k) CHECK(nth_member(b, k) == m[k]);
}

TEST_CASE("preference keys order by tier, then distance, then subkey") {
    CHECK(PreferenceKey{0, 9, 9} < PreferenceKey{1, 0, 0});
    CHECK(PreferenceKey{1, 2, 9} < PreferenceKey{1, 3, 0});
    CHECK(PreferenceKey{1, 2, 3} < PreferenceKey{1, 2, 4});
    CHECK(l1({0, 0}, {2, 3}) == 5);
    CHECK(to_string(Terminal::ReachedTarget) == "reached");
    CHECK(to_string(Terminal::BudgetExhausted) == "exhausted");
}
