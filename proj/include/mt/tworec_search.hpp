#pragma once

// Structured (non-enumerating) learner update for 2-Rec: candidates are generated tier by tier
// and, inside distance tiers, level by level, so only the neighbourhood of the current
// hypothesis is touched unless the learner has to jump into a uniform tier.

#include "mt/tworec.hpp"

#include <cmath>
#include <functional>

namespace mt {

class TwoRecSearch {
public:
    TwoRecSearch(const ExampleGrid& g, TwoRecPrefs prefs = {}) : g_(g), n_(g.n()), prefs_(prefs) {}

    // Learner choice set: the consistent hypotheses with the minimal key relative to h.
    std::vector<TwoRecHyp> choice(const TwoRecHyp& h) {
        for (const auto& t : tiers(h)) {
            if (t.kind == Kind::Dist1 || t.kind == Kind::Dist2) {
                for (int d = t.dmin; d <= t.dmax; ++d) {
                    auto lv = level(h, t, d);
                    if (!lv.empty()) return keep_min(h, std::move(lv));
                }
            } else {
                auto all = uniform(h, t);
                if (!all.empty()) return all;
            }
        }
        throw InconsistentTeaching("no consistent 2-Rec hypothesis");
    }

    // Number of consistent hypotheses whose key relative to h is <= bound.
    long count_at_most(const TwoRecHyp& h, const PreferenceKey& bound) {
        long total = 0;
        for (const auto& t : tiers(h)) {
            if (t.tier > bound.tier) break;
            if (t.kind == Kind::Dist1 || t.kind == Kind::Dist2) {
                int dmax = t.tier < bound.tier ? t.dmax : std::min(t.dmax, bound.dist);
                if (t.tier < bound.tier && t.kind == Kind::Dist2) {
                    total += count_h2_all() - (t.dmin > 0 && g_.consistent(h) ? 1 : 0);
                    continue;
                }
                if (t.tier < bound.tier && t.kind == Kind::Dist1) {
                    total += static_cast<long>(consistent_h1().size());
                    continue;
                }
                for (int d = t.dmin; d <= dmax; ++d) {
                    auto lv = level(h, t, d);
                    if (t.tier == bound.tier && d == bound.dist && prefs_.l1_secondary) {
                        for (const auto& x : lv)
                            if (prefs_key(x, h) <= bound) ++total;
                    } else {
                        total += static_cast<long>(lv.size());
                    }
                }
            } else {
                PreferenceKey k{t.tier, 0, 0};
                if (k <= bound) total += static_cast<long>(uniform(h, t).size());
            }
        }
        return total;
    }

    // All consistent hypotheses with key <= bound (for tests and small grids).
    std::vector<TwoRecHyp> enumerate_at_most(const TwoRecHyp& h, const PreferenceKey& bound) {
        std::vector<TwoRecHyp> out;
        for (const auto& t : tiers(h)) {
            if (t.tier > bound.tier) break;
            if (t.kind == Kind::Dist1 || t.kind == Kind::Dist2) {
                for (int d = t.dmin; d <= t.dmax; ++d)
                    for (auto& x : level(h, t, d))
                        if (prefs_key(x, h) <= bound) out.push_back(x);
            } else {
                for (auto& x : uniform(h, t))
                    if (prefs_key(x, h) <= bound) out.push_back(x);
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    // Every consistent rectangle that could be one rectangle of a hypothesis (no negatives).
    const std::vector<Rect>& negative_free() {
        if (!negfree_) {
            negfree_.emplace();
            for (const auto& r : all_rects(n_))
                if (g_.neg_in(r) == 0) negfree_->push_back(r);
        }
        return *negfree_;
    }

    const std::vector<Rect>& consistent_h1() {
        if (!h1_) {
            h1_.emplace();
            auto box = g_.positive_box();
            for (int x1 = 0; x1 <= (box ? box->x1 : n_ - 1); ++x1)
                for (int y1 = 0; y1 <= (box ? box->y1 : n_ - 1); ++y1)
                    for (int x2 = box ? box->x2 : x1; x2 < n_; ++x2)
                        for (int y2 = box ? box->y2 : y1; y2 < n_; ++y2) {
                            Rect r{x1, y1, x2, y2};
                            if (x2 < x1 || y2 < y1) continue;
                            if (g_.neg_in(r) == 0) h1_->push_back(r);
                        }
            std::sort(h1_->begin(), h1_->end());
        }
        return *h1_;
    }

    long count_h2_all() {
        if (!h2_count_) {
            long c = 0;
            for_each_h2([&](const Rect&, const Rect&) { ++c; });
            h2_count_ = c;
        }
        return *h2_count_;
    }

private:
    enum class Kind { Dist1, Dist2, Self, Delete, Merge, S1All, H2NotS1All, H1All, H1Overlap, H1Other };
    struct Tier {
        int tier;
        Kind kind;
        int dmin = 0, dmax = 0;
    };

    PreferenceKey prefs_key(const TwoRecHyp& x, const TwoRecHyp& h) const { return preference_key_2rec(x, h, prefs_); }

    std::vector<Tier> tiers(const TwoRecHyp& h) const {
        if (!h.is_two())
            return {{0, Kind::Dist1, 0, 4}, {1, Kind::S1All}, {2, Kind::H2NotS1All}};
        if (is_s1(h) || is_s2(h)) {
            std::vector<Tier> t{{tier::kSelf, Kind::Self}, {tier::kDelete, Kind::Delete}, {tier::kMerge, Kind::Merge}};
            if (prefs_.overlap_outranks_h2) {
                t.push_back({3, Kind::H1Overlap});
                t.push_back({4, Kind::Dist2, 1, 8});
            } else {
                t.push_back({3, Kind::Dist2, 1, 8});
                t.push_back({4, Kind::H1Overlap});
            }
            t.push_back({5, Kind::H1Other});
            return t;
        }
        return {{0, Kind::Dist2, 0, 8}, {1, Kind::H1All}};
    }

    std::vector<TwoRecHyp> keep_min(const TwoRecHyp& h, std::vector<TwoRecHyp> lv) const {
        if (!prefs_.l1_secondary) return lv;
        PreferenceKey best = prefs_key(lv[0], h);
        for (const auto& x : lv) best = std::min(best, prefs_key(x, h));
        std::vector<TwoRecHyp> out;
        for (const auto& x : lv)
            if (prefs_key(x, h) == best) out.push_back(x);
        return out;
    }

    std::vector<TwoRecHyp> level(const TwoRecHyp& h, const Tier& t, int d) {
        return t.kind == Kind::Dist1 ? h1_level(h.r1(), d) : h2_level(h, d);
    }

    std::vector<TwoRecHyp> uniform(const TwoRecHyp& h, const Tier& t) {
        std::vector<TwoRecHyp> out;
        switch (t.kind) {
            case Kind::Self:
                if (g_.consistent(h)) out.push_back(h);
                break;
            case Kind::Delete:
                for (const auto& x : delete_targets(h))
                    if (g_.consistent(x)) out.push_back(x);
                break;
            case Kind::Merge:
                if (auto m = merge_target(h); m && g_.consistent(*m)) {
                    bool is_delete = false;
                    for (const auto& x : delete_targets(h)) is_delete |= x == *m;
                    if (!is_delete) out.push_back(*m);
                }
                break;
            case Kind::S1All: out = s1_all(); break;
            case Kind::H2NotS1All:
                for_each_h2([&](const Rect& a, const Rect& b) {
                    if (!a.singleton() && !b.singleton()) out.push_back(TwoRecHyp::two(a, b));
                });
                std::sort(out.begin(), out.end());
                break;
            case Kind::H1All:
                for (const auto& r : consistent_h1()) out.push_back(TwoRecHyp::one(r));
                break;
            case Kind::H1Overlap:
            case Kind::H1Other:
                for (const auto& r : consistent_h1()) {
                    bool ov = r.overlaps(h.r1()) || r.overlaps(h.r2());
                    if (ov != (t.kind == Kind::H1Overlap)) continue;
                    auto x = TwoRecHyp::one(r);
                    bool special = false;
                    for (const auto& y : delete_targets(h)) special |= y == x;
                    if (auto m = merge_target(h)) special |= *m == x;
                    if (!special) out.push_back(x);
                }
                break;
            default: break;
        }
        return out;
    }

    // Rectangles obtained from r by changing exactly d of its four coordinates.
    template <class F>
    void rects_at(const Rect& r, int d, F&& f) const {
        const int orig[4] = {r.x1, r.y1, r.x2, r.y2};
        for (int mask = 0; mask < 16; ++mask) {
            if (__builtin_popcount(mask) != d) continue;
            int v[4] = {orig[0], orig[1], orig[2], orig[3]};
            std::function<void(int)> rec = [&](int i) {
                if (i == 4) {
                    Rect q{v[0], v[1], v[2], v[3]};
                    if (q.x1 <= q.x2 && q.y1 <= q.y2) f(q);
                    return;
                }
                if (!(mask >> i & 1)) return rec(i + 1);
                for (int val = 0; val < n_; ++val) {
                    if (val == orig[i]) continue;
                    v[i] = val;
                    rec(i + 1);
                }
                v[i] = orig[i];
            };
            rec(0);
        }
    }

    std::vector<TwoRecHyp> h1_level(const Rect& r, int d) const {
        std::vector<TwoRecHyp> out;
        if (d == 0) {
            if (g_.consistent(TwoRecHyp::one(r))) out.push_back(TwoRecHyp::one(r));
            return out;
        }
        rects_at(r, d, [&](const Rect& q) {
            if (g_.neg_in(q) == 0 && g_.pos_in(q) == g_.total_pos()) out.push_back(TwoRecHyp::one(q));
        });
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<TwoRecHyp> h2_level(const TwoRecHyp& h, int d) {
        std::vector<TwoRecHyp> out;
        if (d == 0) {
            if (g_.consistent(h)) out.push_back(h);
            return out;
        }
        double subset_cost = 0;
        for (int k = 0; k <= d; ++k) {
            if (k > 4 || d - k > 4) continue;
            subset_cost += binom(4, k) * binom(4, d - k) * std::pow(n_ - 1, d);
        }
        if (subset_cost > 4e6) {
            // Cheaper to scan all consistent pairs once.
            for_each_h2([&](const Rect& a, const Rect& b) {
                auto x = TwoRecHyp::two(a, b);
                if (dist_e(x, h) == d) out.push_back(x);
            });
            std::sort(out.begin(), out.end());
            return out;
        }
        const Rect& a = h.r1();
        const Rect& b = h.r2();
        for (int k = 0; k <= d; ++k) {
            if (k > 4 || d - k > 4) continue;
            std::vector<Rect> as, bs;
            auto collect = [&](const Rect& r, int kk, std::vector<Rect>& dst) {
                if (kk == 0) {
                    if (g_.neg_in(r) == 0) dst.push_back(r);
                    return;
                }
                rects_at(r, kk, [&](const Rect& q) {
                    if (g_.neg_in(q) == 0) dst.push_back(q);
                });
            };
            collect(a, k, as);
            collect(b, d - k, bs);
            for (const auto& p : as)
                for (const auto& q : bs) {
                    if (!separated(p, q)) continue;
                    if (g_.pos_in(p) + g_.pos_in(q) != g_.total_pos()) continue;
                    auto x = TwoRecHyp::two(p, q);
                    if (dist_e(x, h) == d) out.push_back(x);
                }
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    template <class F>
    void for_each_h2(F&& f) {
        const auto& nf = negative_free();
        const int tp = g_.total_pos();
        std::vector<int> pin(nf.size());
        for (std::size_t i = 0; i < nf.size(); ++i) pin[i] = g_.pos_in(nf[i]);
        for (std::size_t i = 0; i < nf.size(); ++i)
            for (std::size_t j = i + 1; j < nf.size(); ++j)
                if (pin[i] + pin[j] == tp && separated(nf[i], nf[j])) f(nf[i], nf[j]);
    }

    std::vector<TwoRecHyp> s1_all() {
        std::vector<TwoRecHyp> out;
        const int tp = g_.total_pos();
        for (const auto& r : negative_free()) {
            int missing = tp - g_.pos_in(r);
            if (missing > 1) continue;
            if (missing == 1) {
                for (auto c : g_.positives()) {
                    if (r.contains(c)) continue;
                    Rect s = cell_rect(c);
                    if (separated(r, s)) out.push_back(TwoRecHyp::two(r, s));
                    break;
                }
            } else {
                for (int x = 0; x < n_; ++x)
                    for (int y = 0; y < n_; ++y) {
                        Rect s{x, y, x, y};
                        if (g_.label_at({x, y}) == 0 || !separated(r, s)) continue;
                        out.push_back(TwoRecHyp::two(r, s));
                    }
            }
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    static double binom(int n, int k) {
        double r = 1;
        for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
        return r;
    }

    const ExampleGrid& g_;
    int n_;
    TwoRecPrefs prefs_;
    std::optional<std::vector<Rect>> negfree_;
    std::optional<std::vector<Rect>> h1_;
    std::optional<long> h2_count_;
};

inline std::vector<TwoRecHyp> structured_update_2rec(const TwoRecHyp& h, const ExampleGrid& g,
                                                     const TwoRecPrefs& prefs = {}) {
    return TwoRecSearch(g, prefs).choice(h);
}

}  // namespace mt
