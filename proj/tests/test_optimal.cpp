#include "mt/optimal.hpp"
#include "mt/teachers.hpp"

#include <doctest.h>

#include <numeric>
#include <random>

using namespace mt;

namespace {

// Each example removes exactly one hypothesis.
std::vector<Bits> single_removals(int m) { return subset_removal_examples(m, 1); }

// Random example family containing the target; every other hypothesis is removed by at least one.
std::vector<Bits> random_examples(int m, int target, int count, std::mt19937& g) {
    std::vector<Bits> out;
    for (int i = 0; i < count; ++i) {
        Bits b(m);
        for (int h = 0; h < m; ++h)
            if (h == target || g() % 2) b.set(h);
        out.push_back(b);
    }
    Bits covered(m);
    for (auto& b : out) covered |= ~b;
    for (int h = 0; h < m; ++h)
        if (h != target && !covered.test(h)) out[h % count].reset(h);
    return out;
}

// Direct minimax over explicit version spaces, no pruning.
int brute_dstar(const FiniteInstance& I, int h, Mask H, int t) {
    if (h == t) return 0;
    int best = 1 << 20;
    for (int e = 0; e < I.num_examples(); ++e) {
        Mask H2 = H & I.mask(e);
        if (!(H2 >> t & 1) || H2 == H) continue;
        int worst = 0;
        for (int c : members(bits_from_mask(finite::choice(I, h, H2), I.size())))
            worst = std::max(worst, brute_dstar(I, c, H2, t));
        best = std::min(best, 1 + worst);
    }
    return best;
}

}  // namespace

TEST_CASE("dstar trivial and single-removal instances") {
    FiniteInstance one(1, {Bits(1, 1)}, uniform_preference());
    CHECK(dstar(one, 0, 0) == 0);
    CHECK(nonadaptive_opt(one, 0, 0) == 0);
    for (int m = 2; m <= 8; ++m) {
        FiniteInstance I(m, single_removals(m), uniform_preference());
        CHECK(dstar(I, 1, 0) == m - 1);
        CHECK(greedy_cost(I, 1, 0) == m - 1);
    }
}

TEST_CASE("dstar matches unpruned recursion") {
    std::mt19937 g(11);
    for (int trial = 0; trial < 60; ++trial) {
        int m = 3 + trial % 5;
        std::vector<std::vector<int>> tab(m, std::vector<int>(m));
        for (int h = 0; h < m; ++h)
            for (int hp = 0; hp < m; ++hp) tab[h][hp] = hp == h ? 0 : 1 + static_cast<int>(g() % 3);
        int t = static_cast<int>(g() % m);
        FiniteInstance I(m, random_examples(m, t, 5, g), table_preference(tab));
        int h0 = (t + 1) % m;
        CHECK(dstar(I, h0, t) == brute_dstar(I, h0, I.full(), t));
    }
}

TEST_CASE("dstar invariant under relabeling") {
    std::mt19937 g(5);
    for (int trial = 0; trial < 30; ++trial) {
        int m = 4 + trial % 4;
        std::vector<std::vector<int>> tab(m, std::vector<int>(m));
        for (int h = 0; h < m; ++h)
            for (int hp = 0; hp < m; ++hp) tab[h][hp] = hp == h ? 0 : 1 + static_cast<int>(g() % 4);
        int t = static_cast<int>(g() % m);
        auto ex = random_examples(m, t, 6, g);
        FiniteInstance I(m, ex, table_preference(tab));

        std::vector<int> p(m);
        std::iota(p.begin(), p.end(), 0);
        std::shuffle(p.begin(), p.end(), g);
        std::vector<std::vector<int>> tab2(m, std::vector<int>(m));
        for (int h = 0; h < m; ++h)
            for (int hp = 0; hp < m; ++hp) tab2[p[h]][p[hp]] = tab[h][hp];
        std::vector<Bits> ex2;
        for (auto& b : ex) {
            Bits c(m);
            for (int h = 0; h < m; ++h)
                if (b.test(h)) c.set(p[h]);
            ex2.push_back(c);
        }
        FiniteInstance J(m, ex2, table_preference(tab2));
        int h0 = (t + 1) % m;
        CHECK(dstar(I, h0, t) == dstar(J, p[h0], p[t]));
    }
}

TEST_CASE("cap violations are unsupported") {
    FiniteInstance I(16, single_removals(16), uniform_preference());
    CHECK_THROWS_AS(dstar(I, 1, 0), Unsupported);
    CHECK_THROWS_AS(nonadaptive_opt(I, 1, 0), Unsupported);
    std::vector<Bits> big(1, Bits(21));
    big[0].set();
    FiniteInstance J(21, big, uniform_preference());
    CHECK_THROWS_AS(compute_td(J, 0), Unsupported);
    CHECK_THROWS_AS(J.full(), Unsupported);
}

TEST_CASE("state-independent preference: adaptivity plays no role") {
    std::mt19937 g(2024);
    for (int trial = 0; trial < 20; ++trial) {
        int m = 3 + trial % 8;
        int t = static_cast<int>(g() % m);
        int count = std::min(12, m + 2);
        std::function<PreferenceKey(int, int)> pref;
        if (trial % 2 == 0) {
            pref = uniform_preference();
        } else {
            std::vector<int> r(m);
            for (auto& x : r) x = static_cast<int>(g() % 4);
            pref = global_preference(r);
        }
        FiniteInstance I(m, random_examples(m, t, count, g), pref);
        REQUIRE(I.state_independent());
        int h0 = (t + 1) % m;
        CHECK(dstar(I, h0, t) == nonadaptive_opt(I, h0, t));
    }
}

TEST_CASE("lattice cross-checks") {
    SUBCASE("3x3 corner to corner equals Ada-L worst case") {
        Lattice L(3);
        auto I = lattice_instance(L);
        auto s = initial_state(L, Cell{0, 0});
        auto w = worst_case_lattice(L, s, Cell{2, 2}, lattice_ada_l(L, Cell{2, 2}), 18);
        CHECK(dstar(I, L.id({0, 0}), L.id({2, 2})) == w.cost);
    }
    SUBCASE("4x4 diagonal has an adaptivity gap") {
        Lattice L(4);
        auto I = lattice_instance(L);
        int h0 = static_cast<int>(L.id({0, 0})), t = static_cast<int>(L.id({3, 3}));
        int d = dstar(I, h0, t, 16);
        int na = nonadaptive_opt(I, h0, t, 16);
        CHECK(d < na);
    }
    SUBCASE("2x2 positive-only teaching dimension") {
        Lattice L(2);
        CHECK(compute_td(lattice_instance(L), static_cast<int>(L.id({1, 1}))) == 3);
    }
}

TEST_CASE("cost report ordering") {
    Lattice L(3);
    auto I = lattice_instance(L);
    auto r = cost_report(I, static_cast<int>(L.id({0, 0})), static_cast<int>(L.id({2, 2})));
    REQUIRE(r.nonadaptive_opt);
    CHECK(r.adaptive_opt <= *r.nonadaptive_opt);
    CHECK(r.adaptive_opt <= r.greedy);
    auto j = r.to_json();
    CHECK(j["adaptive_opt"] == r.adaptive_opt);
    CHECK(j["rank0"] == 9);
}

TEST_CASE("teaching dimension") {
    FiniteInstance one(1, {Bits(1, 1)}, uniform_preference());
    CHECK(compute_td(one, 0) == 0);
    // one example isolates hypothesis 0
    std::vector<Bits> ex{Bits(4, 0b0001), Bits(4, 0b0011), Bits(4, 0b0101)};
    CHECK(compute_td(FiniteInstance(4, ex, uniform_preference()), 0) == 1);
    CHECK(compute_td(FiniteInstance(5, single_removals(5), uniform_preference()), 2) == 4);
}

TEST_CASE("preference-based teaching dimension") {
    auto ex = single_removals(3);
    CHECK(compute_pbtd(FiniteInstance(3, ex, global_preference({0, 1, 2})), 0) == 0);
    // chain with the target in the middle: only the more preferred one must go
    CHECK(compute_pbtd(FiniteInstance(3, ex, global_preference({0, 1, 2})), 1) == 1);
    std::mt19937 g(3);
    for (int trial = 0; trial < 20; ++trial) {
        int m = 3 + trial % 6;
        int t = static_cast<int>(g() % m);
        FiniteInstance I(m, random_examples(m, t, 6, g), uniform_preference());
        CHECK(compute_pbtd(I, t) == compute_td(I, t));
    }
    std::vector<std::vector<int>> tab{{0, 1, 2}, {2, 0, 1}, {1, 2, 0}};
    CHECK_THROWS_AS(compute_pbtd(FiniteInstance(3, ex, table_preference(tab)), 0), DomainError);
}

TEST_CASE("rank of the target is minimal at the target") {
    std::mt19937 g(8);
    for (int trial = 0; trial < 30; ++trial) {
        int m = 3 + trial % 6;
        std::vector<std::vector<int>> tab(m, std::vector<int>(m));
        for (int h = 0; h < m; ++h)
            for (int hp = 0; hp < m; ++hp) tab[h][hp] = hp == h ? 0 : 1 + static_cast<int>(g() % 3);
        int t = static_cast<int>(g() % m);
        FiniteInstance I(m, single_removals(m), table_preference(tab));
        long at_t = finite::rank(I, t, I.full(), t);
        CHECK(at_t == 1);
        for (int h = 0; h < m; ++h) CHECK(finite::rank(I, h, I.full(), t) >= at_t);
    }
}

TEST_CASE("greedy bound conditions") {
    SUBCASE("subset removal satisfies condition 2") {
        for (int k = 1; k <= 3; ++k) {
            FiniteInstance I(6, subset_removal_examples(6, k), uniform_preference());
            CHECK(check_condition2(I).holds);
            CHECK(check_condition1(I, 0).holds);
        }
    }
    SUBCASE("condition 2 witness") {
        std::vector<Bits> ex{Bits(3, 0b001)};  // removes {1,2} but no example removes {1} alone
        auto c = check_condition2(FiniteInstance(3, ex, uniform_preference()));
        CHECK_FALSE(c.holds);
        CHECK(c.witness["example"] == 0);
        CHECK(c.witness["subset"].size() == 1);
    }
    SUBCASE("condition 1 witness is a genuine violation") {
        // from 0: 1 preferred, then 2, then the target 3; from 1: the target before 2 fails
        std::vector<std::vector<int>> tab{{0, 1, 2, 3}, {1, 0, 3, 2}, {1, 1, 0, 1}, {1, 1, 1, 0}};
        FiniteInstance I(4, single_removals(4), table_preference(tab));
        auto c = check_condition1(I, 3);
        REQUIRE_FALSE(c.holds);
        int h = c.witness["h"], i = c.witness["hi"], j = c.witness["hj"];
        CHECK(I.key(i, h) <= I.key(j, h));
        CHECK(I.key(j, h) <= I.key(3, h));
        CHECK(I.key(j, i) > I.key(3, i));
    }
    SUBCASE("4x4 two-rectangle class fails condition 2") {
        auto cls = std::make_shared<TwoRecClass>(4, TwoRecPrefs{});
        auto I = tworec_instance(cls);
        auto c = check_greedy_conditions(I, 0);
        CHECK_FALSE(c.cond2.holds);
        CHECK(c.to_json()["cond2"]["witness"].contains("subset"));
    }
    SUBCASE("large class without a singleton witness is unsupported") {
        FiniteInstance I(14, single_removals(14), uniform_preference());
        CHECK_THROWS_AS(check_condition2(I), Unsupported);
    }
    SUBCASE("bound holds on random instances that satisfy both conditions") {
        std::mt19937 g(1);
        int tested = 0;
        for (int trial = 0; trial < 400; ++trial) {
            int m = 4 + trial % 6, k = 1 + trial % 3;
            std::function<PreferenceKey(int, int)> pref;
            if (trial % 2) {
                std::vector<int> r(m);
                for (auto& x : r) x = static_cast<int>(g() % 3);
                pref = global_preference(r);
            } else {
                std::vector<std::vector<int>> tab(m, std::vector<int>(m));
                for (int h = 0; h < m; ++h)
                    for (int hp = 0; hp < m; ++hp) tab[h][hp] = hp == h ? 0 : 1 + static_cast<int>(g() % 3);
                pref = table_preference(tab);
            }
            FiniteInstance I(m, subset_removal_examples(m, k), pref);
            int t = static_cast<int>(g() % m), h0 = (t + 1) % m;
            auto c = check_greedy_conditions(I, t);
            if (!c.cond1.holds || !c.cond2.holds) continue;
            ++tested;
            int d = dstar(I, h0, t);
            CHECK(greedy_cost(I, h0, t) <= greedy_bound(I, h0, t, d) + 1e-9);
        }
        CHECK(tested >= 20);
    }
}
