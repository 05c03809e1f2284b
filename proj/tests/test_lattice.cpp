#include <doctest.h>

#include "mt/learner.hpp"

using namespace mt;

TEST_CASE("lattice labels and bounds") {
    Lattice L(5);
    CHECK_FALSE(L.consistent({4, 4}, {{4, 4}, true}));
    CHECK(L.consistent({4, 4}, {{1, 4}, true}));
    CHECK_THROWS_AS(L.label({4, 4}, {5, 0}), DomainError);
    CHECK_THROWS_AS(positive_example_at({2, 2}, {2, 2}), ForbiddenExample);
}

TEST_CASE("one positive example removes exactly the flagged node") {
    Lattice L(3);
    Bits vs = full_space(L);
    vs = update_version_space(L, vs, {{0, 0}, true});
    CHECK(vs.count() == 8);
    CHECK_FALSE(vs.test(L.id({0, 0})));
    CHECK(update_version_space(L, vs, {{0, 0}, true}) == vs);
    for (auto i = vs.find_first(); i != Bits::npos; i = vs.find_next(i))
        if (!(L.hyp(i) == Cell{2, 1})) vs = update_version_space(L, vs, {L.hyp(i), true});
    CHECK(vs.count() == 1);
    CHECK(vs.test(L.id({2, 1})));
}

TEST_CASE("tie rule keys") {
    Lattice L(9);
    CHECK(L.key({3, 2}, {2, 2}) < L.key({4, 2}, {2, 2}));
    CHECK(L.key({3, 2}, {2, 2}) == L.key({2, 3}, {2, 2}));
    CHECK(L.key({3, 2}, {2, 2}) < L.key({1, 2}, {2, 2}));
    CHECK(L.key({8, 3}, {7, 3}) == L.key({7, 4}, {7, 3}));
    Lattice lex(9, LatticeTieRule::Lexicographic);
    CHECK(lex.key({3, 2}, {2, 2}) < lex.key({2, 3}, {2, 2}));
    Lattice none(9, LatticeTieRule::None);
    CHECK(none.key({1, 2}, {2, 2}) == none.key({3, 2}, {2, 2}));
}

TEST_CASE("choice set after flagging the current node") {
    Lattice L(9);
    auto s = initial_state(L, {2, 2});
    LatticeLearner learner(L, {TieBreak::seeded(3), {}});
    auto c = learner.choice_set(s, {{2, 2}, true});
    CHECK(c == std::vector<Cell>{{2, 3}, {3, 2}});
    learner.step(s, {{2, 2}, true});
    CHECK((s.h == Cell{2, 3} || s.h == Cell{3, 2}));
    CHECK(s.vs.count() == 80);

    auto s2 = initial_state(L, {2, 2});
    CHECK(learner.choice_set(s2, {{5, 5}, true}) == std::vector<Cell>{{2, 2}});
}

TEST_CASE("choice set stays within the larger-sum neighbours") {
    Lattice L(6);
    for (int x = 0; x < 6; ++x)
        for (int y = 0; y < 6; ++y) {
            auto s = initial_state(L, {x, y});
            LatticeLearner learner(L, {});
            for (Cell c : learner.choice_set(s, {{x, y}, true})) {
                CHECK(l1(c, {x, y}) == 1);
                bool inner = x + 1 < 6 || y + 1 < 6;
                if (inner) CHECK(c.x + c.y == x + y + 1);
            }
        }
}

TEST_CASE("lattice choice sets match brute force over random probes") {
    Rng rng(5);
    for (int probe = 0; probe < 1000; ++probe) {
        int n = 2 + static_cast<int>(rng.index(5));
        Lattice L(n, static_cast<LatticeTieRule>(rng.index(3)));
        Bits vs = full_space(L);
        Cell target = L.hyp(rng.index(L.size()));
        for (int k = static_cast<int>(rng.index(L.size())); k > 0; --k) {
            Cell v = L.hyp(rng.index(L.size()));
            if (!(v == target)) L.restrict(vs, {v, true});
        }
        Cell h = L.hyp(nth_member(vs, rng.index(vs.count())));
        Cell v = L.hyp(rng.index(L.size()));
        if (v == target) continue;
        LabeledExample z{v, true};
        Bits next = update_version_space(L, vs, z);
        // Reference: direct scan with the L1 distance and tie component.
        std::vector<Cell> ref;
        std::optional<std::tuple<int, long>> best;
        for (auto i = next.find_first(); i != Bits::npos; i = next.find_next(i)) {
            Cell c = L.hyp(i);
            long sub = L.tie_rule() == LatticeTieRule::CoordinateSum  ? -(c.x + c.y)
                       : L.tie_rule() == LatticeTieRule::Lexicographic ? -(c.x * n + c.y)
                                                                       : 0;
            std::tuple<int, long> k{l1(c, h), sub};
            if (!best || k < *best) {
                best = k;
                ref.clear();
            }
            if (k == *best) ref.push_back(c);
        }
        std::vector<Cell> got;
        for (auto i : learner_choice_set(L, L.id(h), vs, z)) got.push_back(L.hyp(i));
        std::sort(ref.begin(), ref.end());
        std::sort(got.begin(), got.end());
        REQUIRE(ref == got);
    }
}

TEST_CASE("noise-free learner is deterministic and the noisy one is uniform") {
    Lattice L(3);
    std::vector<int> hist(9, 0);
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
        auto s = initial_state(L, {1, 1});
        LatticeLearner learner(L, {TieBreak::seeded(static_cast<std::uint64_t>(i)), {1.0}});
        learner.step(s, {{0, 0}, true});
        ++hist[L.id(s.h)];
    }
    CHECK(hist[0] == 0);
    double expected = trials / 8.0, chi2 = 0;
    for (int i = 1; i < 9; ++i) chi2 += (hist[i] - expected) * (hist[i] - expected) / expected;
    CHECK(chi2 < 24.3);  // chi-square, 7 dof, p = 0.001

    for (int seed = 0; seed < 5; ++seed) {
        auto a = initial_state(L, {1, 1});
        auto b = initial_state(L, {1, 1});
        LatticeLearner la(L, {TieBreak::seeded(seed), {}}), lb(L, {TieBreak::seeded(seed), {}});
        for (Cell v : {Cell{1, 1}, Cell{0, 0}, Cell{2, 1}}) {
            if (!a.vs.test(L.id(v))) continue;
            la.step(a, {v, true});
            lb.step(b, {v, true});
            CHECK(a.h == b.h);
        }
    }
    CHECK_THROWS_AS(LatticeLearner(L, {TieBreak::adversarial(), {}}), Unsupported);
}
