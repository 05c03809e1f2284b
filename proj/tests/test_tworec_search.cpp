#include <doctest.h>

#include "mt/tworec_search.hpp"

using namespace mt;

namespace {

// Brute-force reference: explicit version space from the shown examples.
Bits vs_of(const TwoRecClass& cls, const std::vector<LabeledExample>& zs) {
    Bits vs = full_space(cls);
    for (const auto& z : zs) cls.restrict(vs, z);
    return vs;
}

std::vector<TwoRecHyp> hyps(const TwoRecClass& cls, const std::vector<std::size_t>& ids) {
    std::vector<TwoRecHyp> out;
    for (auto i : ids) out.push_back(cls.hyp(i));
    std::sort(out.begin(), out.end());
    return out;
}

void probe(int n, TwoRecPrefs prefs, int probes, std::uint64_t seed) {
    TwoRecClass cls(n, prefs);
    Rng rng(seed);
    for (int p = 0; p < probes; ++p) {
        const auto& target = cls.hyp(rng.index(cls.size()));
        std::size_t h = rng.index(cls.size());
        ExampleGrid g(n);
        std::vector<LabeledExample> zs;
        int k = static_cast<int>(rng.index(6));
        for (int i = 0; i < k; ++i) {
            Cell c{static_cast<int>(rng.index(n)), static_cast<int>(rng.index(n))};
            LabeledExample z{c, target.contains(c)};
            zs.push_back(z);
            g.add(z);
        }
        Bits vs = vs_of(cls, zs);
        TwoRecSearch s(g, prefs);
        auto brute = hyps(cls, brute_force_choice(cls, h, vs));
        auto fast = s.choice(cls.hyp(h));
        std::sort(fast.begin(), fast.end());
        REQUIRE(brute == fast);

        std::size_t other = nth_member(vs, rng.index(vs.count()));
        PreferenceKey bound = cls.key_id(other, h);
        CHECK(s.count_at_most(cls.hyp(h), bound) == rank_tilde(cls, h, vs, other));
        auto listed = s.enumerate_at_most(cls.hyp(h), bound);
        CHECK(listed == hyps(cls, members(preferred_version_space(cls, other, h, vs))));
    }
}

}  // namespace

TEST_CASE("structured choice matches brute force") {
    for (int n = 2; n <= 6; ++n) probe(n, {}, n <= 4 ? 300 : 200, 100 + n);
}

TEST_CASE("structured choice matches brute force with optional preference flags") {
    probe(5, {true, false}, 150, 11);
    probe(5, {false, true}, 150, 12);
    probe(5, {true, true}, 150, 13);
}

TEST_CASE("no consistent hypothesis is reported") {
    ExampleGrid g(1);
    g.add({{0, 0}, false});
    TwoRecSearch s(g);
    CHECK_THROWS_AS(s.choice(TwoRecHyp::one({0, 0, 0, 0})), InconsistentTeaching);
}
