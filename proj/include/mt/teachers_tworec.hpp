#pragma once

// 2-Rec teachers: the Ada-R oracle and teacher, the Non-R sequence, and the enumerated
// baselines. Examples are always labeled by the target h*.

#include "mt/teachers.hpp"

namespace mt {

// The four positive corners of r followed by their axis-adjacent outside cells (on-grid only).
inline std::vector<Cell> all_corners(const Rect& r, int n) {
    std::vector<Cell> pos{{r.x1, r.y1}, {r.x2, r.y1}, {r.x1, r.y2}, {r.x2, r.y2}};
    std::vector<Cell> neg{{r.x1 - 1, r.y1}, {r.x1, r.y1 - 1}, {r.x2 + 1, r.y1}, {r.x2, r.y1 - 1},
                          {r.x1 - 1, r.y2}, {r.x1, r.y2 + 1}, {r.x2 + 1, r.y2}, {r.x2, r.y2 + 1}};
    std::vector<Cell> out;
    for (auto c : pos) out.push_back(c);
    for (auto c : neg)
        if (c.x >= 0 && c.y >= 0 && c.x < n && c.y < n) out.push_back(c);
    return out;
}

// Top-left and bottom-right corners with their outside neighbours (at most 6 cells).
inline std::vector<Cell> diagonal_corners(const Rect& r, int n) {
    std::vector<Cell> cand{{r.x1, r.y1}, {r.x2, r.y2}, {r.x1 - 1, r.y1}, {r.x1, r.y1 - 1},
                           {r.x2 + 1, r.y2}, {r.x2, r.y2 + 1}};
    std::vector<Cell> out;
    for (auto c : cand)
        if (c.x >= 0 && c.y >= 0 && c.x < n && c.y < n) out.push_back(c);
    return out;
}

inline std::vector<Cell> border_cells(const Rect& r) {
    std::vector<Cell> out;
    for (int x = r.x1; x <= r.x2; ++x)
        for (int y = r.y1; y <= r.y2; ++y)
            if (x == r.x1 || x == r.x2 || y == r.y1 || y == r.y2) out.push_back({x, y});
    return out;
}

// Labels the cells by the target, drops duplicates, positives first then lexicographic.
inline std::vector<LabeledExample> labeled_corner_order(std::vector<Cell> cells, const TwoRecHyp& target) {
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    std::vector<LabeledExample> out;
    for (auto c : cells) out.push_back({c, target.contains(c)});
    std::stable_sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.label > b.label; });
    return out;
}

inline std::vector<LabeledExample> corner_examples(const TwoRecHyp& h, const TwoRecHyp& target, int n, bool all) {
    std::vector<Cell> cells;
    for (int i = 0; i < h.count(); ++i) {
        auto c = all ? all_corners(h.rect(i), n) : diagonal_corners(h.rect(i), n);
        cells.insert(cells.end(), c.begin(), c.end());
    }
    return labeled_corner_order(cells, target);
}

// Splits of R: two rectangles tiling R apart from one full-length line.
inline std::vector<TwoRecHyp> splits_of(const Rect& R) {
    std::vector<TwoRecHyp> out;
    for (int g = R.x1 + 1; g < R.x2; ++g) out.push_back(TwoRecHyp::two({R.x1, R.y1, g - 1, R.y2}, {g + 1, R.y1, R.x2, R.y2}));
    for (int g = R.y1 + 1; g < R.y2; ++g) out.push_back(TwoRecHyp::two({R.x1, R.y1, R.x2, g - 1}, {R.x1, g + 1, R.x2, R.y2}));
    std::sort(out.begin(), out.end());
    return out;
}

inline bool is_split_of(const TwoRecHyp& h, const TwoRecHyp& target) {
    return !target.is_two() && is_s2(h) && enclosing(h) == target.r1();
}

enum class Scenario { H1to1, H1to2, H2to1, H2to2 };

inline Scenario scenario_of(const TwoRecHyp& h, const TwoRecHyp& target) {
    if (!h.is_two()) return target.is_two() ? Scenario::H1to2 : Scenario::H1to1;
    return target.is_two() ? Scenario::H2to2 : Scenario::H2to1;
}

inline std::string to_string(Scenario s) {
    switch (s) {
        case Scenario::H1to1: return "H1to1";
        case Scenario::H1to2: return "H1to2";
        case Scenario::H2to1: return "H2to1";
        default: return "H2to2";
    }
}

inline Scenario scenario_from(const std::string& s) {
    if (s == "H1to1") return Scenario::H1to1;
    if (s == "H1to2") return Scenario::H1to2;
    if (s == "H2to1") return Scenario::H2to1;
    if (s == "H2to2") return Scenario::H2to2;
    throw DomainError("unknown scenario: " + s);
}

struct OracleResult {
    std::vector<TwoRecHyp> candidates;
    TwoRecHyp selected;
    bool singleton_phase = false;  // candidates shrink the off-target rectangle to one cell
};

namespace detail {

inline std::vector<TwoRecHyp> consistent_only(std::vector<TwoRecHyp> hs, const ExampleGrid& g) {
    std::vector<TwoRecHyp> out;
    for (auto& h : hs)
        if (g.consistent(h)) out.push_back(h);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline std::vector<TwoRecHyp> oracle_candidates(const TwoRecHyp& ht, const ExampleGrid& g, const TwoRecHyp& target,
                                                bool* singleton_phase = nullptr) {
    const int n = g.n();
    switch (scenario_of(ht, target)) {
        case Scenario::H1to1:
        case Scenario::H2to2: return {target};
        case Scenario::H1to2: {
            if (ht.r1() == target.r1() || ht.r1() == target.r2()) {
                const Rect& other = ht.r1() == target.r1() ? target.r2() : target.r1();
                // Singletons placed where the target is positive, so corner teaching stays aligned.
                std::vector<TwoRecHyp> ext;
                for (int x = other.x1; x <= other.x2; ++x)
                    for (int y = other.y1; y <= other.y2; ++y) {
                        Rect s{x, y, x, y};
                        if (separated(ht.r1(), s)) ext.push_back(TwoRecHyp::two(ht.r1(), s));
                    }
                return consistent_only(ext, g);
            }
            return {TwoRecHyp::one(target.r1())};
        }
        case Scenario::H2to1: {
            const Rect& R = target.r1();
            bool o1 = ht.r1().overlaps(R), o2 = ht.r2().overlaps(R);
            if (o1 && o2) {
                if (is_split_of(ht, target)) return {target};
                std::vector<TwoRecHyp> valid;
                for (const auto& s : splits_of(R)) {
                    bool a1 = s.r1().overlaps(ht.r1()), a2 = s.r1().overlaps(ht.r2());
                    bool b1 = s.r2().overlaps(ht.r1()), b2 = s.r2().overlaps(ht.r2());
                    if ((a1 != a2) && (b1 != b2) && (a1 != b1)) valid.push_back(s);
                }
                auto c = consistent_only(valid, g);
                if (c.empty()) c = consistent_only(splits_of(R), g);
                if (c.empty()) c = {target};
                return c;
            }
            if (is_s1(ht)) {
                // Only deleting the rectangle that misses the target leads towards it. With both
                // rectangles off target any deletion leaves a single rectangle to move.
                std::vector<TwoRecHyp> del;
                for (const auto& d : delete_targets(ht))
                    if (d.r1().overlaps(R) || (!o1 && !o2)) del.push_back(d);
                if (!del.empty()) {
                    auto c = consistent_only(del, g);
                    return c.empty() ? std::vector<TwoRecHyp>{target} : c;
                }
            }
            // Keep the rectangle that meets the target, reduce the disjoint one to a singleton.
            std::vector<TwoRecHyp> c;
            auto add = [&](const Rect& keep, const Rect& drop) {
                for (int x = drop.x1; x <= drop.x2; ++x)
                    for (int y = drop.y1; y <= drop.y2; ++y) {
                        Rect s{x, y, x, y};
                        if (separated(keep, s)) c.push_back(TwoRecHyp::two(keep, s));
                    }
            };
            if (!o1) add(ht.r2(), ht.r1());
            if (!o2) add(ht.r1(), ht.r2());
            c = consistent_only(c, g);
            if (singleton_phase) *singleton_phase = !c.empty();
            if (c.empty()) c = {target};
            return c;
        }
    }
    (void)n;
    return {target};
}

}  // namespace detail

inline OracleResult oracle_ada_r(const TwoRecHyp& ht, const ExampleGrid& g, const TwoRecHyp& target,
                                 const TwoRecPrefs& prefs = {}) {
    OracleResult r;
    r.candidates = detail::oracle_candidates(ht, g, target, &r.singleton_phase);
    if (r.candidates.empty()) r.candidates = {target};
    r.selected = r.candidates[0];
    if (r.candidates.size() > 1) {
        TwoRecSearch s(g, prefs);
        long best = std::numeric_limits<long>::max();
        for (const auto& c : r.candidates) {
            long k = s.count_at_most(ht, preference_key_2rec(c, ht, prefs));
            if (k < best) {
                best = k;
                r.selected = c;
            }
        }
    }
    return r;
}

// Unshown cell minimizing the worst-case number of hypotheses the learner ranks at least as
// high as its nearest intermediate target after the move. Ties go to the smallest cell.
inline std::optional<LabeledExample> greedy_example(const TwoRecHyp& ht, const ExampleGrid& g,
                                                    const TwoRecHyp& target, const std::vector<TwoRecHyp>& targets,
                                                    const TwoRecPrefs& prefs = {}) {
    const int n = g.n();
    std::optional<LabeledExample> best;
    long best_obj = std::numeric_limits<long>::max();
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            Cell c{x, y};
            if (g.shown(c)) continue;
            LabeledExample z{c, target.contains(c)};
            ExampleGrid g2 = g.with(z);
            std::vector<TwoRecHyp> live;
            for (const auto& t : targets)
                if (g2.consistent(t)) live.push_back(t);
            long obj = std::numeric_limits<long>::max() - 1;
            if (!live.empty()) {
                TwoRecSearch s(g2, prefs);
                std::vector<TwoRecHyp> moves =
                    ht.contains(c) == z.label ? std::vector<TwoRecHyp>{ht} : s.choice(ht);
                obj = 0;
                for (const auto& hz : moves) {
                    PreferenceKey bound = preference_key_2rec(live[0], hz, prefs);
                    for (const auto& t : live) bound = std::min(bound, preference_key_2rec(t, hz, prefs));
                    obj = std::max(obj, s.count_at_most(hz, bound));
                }
            }
            if (!best || obj < best_obj) {
                best = z;
                best_obj = obj;
            }
        }
    if (best && best_obj == std::numeric_limits<long>::max() - 1 && !(targets.size() == 1 && targets[0] == target))
        return greedy_example(ht, g, target, {target}, prefs);
    return best;
}

// Singleton phase: intermediate targets are equally preferred, so the example minimizes the
// worst-case number of intermediate targets left after the learner's move. Ties fall back to
// the rank objective, then to the smallest cell.
inline std::optional<LabeledExample> halving_example(const TwoRecHyp& ht, const ExampleGrid& g,
                                                     const TwoRecHyp& target, const std::vector<TwoRecHyp>& targets,
                                                     const TwoRecPrefs& prefs = {}) {
    const int n = g.n();
    struct Scored {
        LabeledExample z;
        std::size_t left;
    };
    std::vector<Scored> scored;
    std::size_t best_left = std::numeric_limits<std::size_t>::max();
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            Cell c{x, y};
            if (g.shown(c)) continue;
            LabeledExample z{c, target.contains(c)};
            // targets are consistent with g, so only the new cell can rule one out
            auto agree = std::count_if(targets.begin(), targets.end(),
                                       [&](const TwoRecHyp& t) { return t.contains(c) == z.label; });
            if (agree == 0) continue;
            std::size_t left = 0;
            if (ht.contains(c) == z.label) {
                left = static_cast<std::size_t>(agree);
            } else {
                ExampleGrid g2 = g.with(z);
                for (const auto& hz : TwoRecSearch(g2, prefs).choice(ht))
                    left = std::max(left, hz == target ? 0 : detail::oracle_candidates(hz, g2, target).size());
            }
            scored.push_back({z, left});
            best_left = std::min(best_left, left);
        }
    if (scored.empty()) return greedy_example(ht, g, target, targets, prefs);
    std::optional<LabeledExample> best;
    long best_rank = std::numeric_limits<long>::max();
    for (const auto& [z, left] : scored) {
        if (left != best_left) continue;
        ExampleGrid g2 = g.with(z);
        TwoRecSearch s(g2, prefs);
        std::vector<TwoRecHyp> live;
        for (const auto& t : targets)
            if (g2.consistent(t)) live.push_back(t);
        std::vector<TwoRecHyp> moves = ht.contains(z.at) == z.label ? std::vector<TwoRecHyp>{ht} : s.choice(ht);
        long rank = 0;
        for (const auto& hz : moves) {
            PreferenceKey bound = preference_key_2rec(live[0], hz, prefs);
            for (const auto& t : live) bound = std::min(bound, preference_key_2rec(t, hz, prefs));
            rank = std::max(rank, s.count_at_most(hz, bound));
        }
        if (!best || rank < best_rank) {
            best = z;
            best_rank = rank;
        }
    }
    return best;
}

inline std::optional<LabeledExample> next_unshown(const std::vector<LabeledExample>& seq, const ExampleGrid& g) {
    for (const auto& z : seq)
        if (!g.shown(z.at)) return z;
    return std::nullopt;
}

inline std::optional<LabeledExample> teacher_ada_r(const TwoRecHyp& ht, const ExampleGrid& g, const TwoRecHyp& target,
                                                   const TwoRecPrefs& prefs = {}) {
    if (ht == target) return std::nullopt;
    const int n = g.n();
    auto orc = oracle_ada_r(ht, g, target, prefs);
    if (scenario_of(ht, target) == Scenario::H2to1) {
        if (is_split_of(orc.selected, target) && dist_e(ht, orc.selected) > 1)
            if (auto z = next_unshown(corner_examples(target, target, n, true), g)) return z;
        if (orc.singleton_phase) return halving_example(ht, g, target, orc.candidates, prefs);
        return greedy_example(ht, g, target, orc.candidates, prefs);
    }
    if (auto z = next_unshown(corner_examples(orc.selected, target, n, false), g)) return z;
    // Corners used up without reaching the target: continue greedily towards h*.
    return greedy_example(ht, g, target, {target}, prefs);
}

inline std::vector<LabeledExample> build_non_r(const TwoRecHyp& h0, const TwoRecHyp& target, int n) {
    std::vector<LabeledExample> seq;
    auto append = [&](const std::vector<LabeledExample>& zs) {
        for (const auto& z : zs)
            if (std::none_of(seq.begin(), seq.end(), [&](auto& w) { return w.at == z.at; })) seq.push_back(z);
    };
    if (scenario_of(h0, target) == Scenario::H2to1) {
        const Rect& R = target.r1();
        bool o1 = h0.r1().overlaps(R), o2 = h0.r2().overlaps(R);
        if (o1 && o2) {
            append(corner_examples(target, target, n, true));
            std::vector<LabeledExample> edge;
            for (auto c : border_cells(R)) edge.push_back({c, true});
            append(edge);
        } else {
            std::vector<LabeledExample> inside;
            for (int i = 0; i < 2; ++i) {
                if (h0.rect(i).overlaps(R)) continue;
                const Rect& r = h0.rect(i);
                for (int x = r.x1; x <= r.x2; ++x)
                    for (int y = r.y1; y <= r.y2; ++y) inside.push_back({{x, y}, false});
            }
            std::sort(inside.begin(), inside.end(), [](auto& a, auto& b) { return a.at < b.at; });
            append(inside);
            append(corner_examples(target, target, n, true));
        }
        return seq;
    }
    append(corner_examples(target, target, n, false));
    return seq;
}

// ---- wrappers producing teacher functions over TwoRecState ----

inline TeacherFn<TwoRecState> tworec_ada_r(const TwoRecHyp& target, TwoRecPrefs prefs = {}) {
    return [target, prefs](const TwoRecState& s) { return teacher_ada_r(s.h, s.grid, target, prefs); };
}

inline std::vector<LabeledExample> tworec_candidates(const ExampleGrid& g, const TwoRecHyp& target) {
    std::vector<LabeledExample> out;
    for (int x = 0; x < g.n(); ++x)
        for (int y = 0; y < g.n(); ++y)
            if (!g.shown({x, y})) out.push_back({{x, y}, target.contains({x, y})});
    return out;
}

inline TeacherFn<TwoRecState> tworec_sc(std::shared_ptr<const TwoRecClass> cls, const TwoRecHyp& target) {
    return [cls, target](const TwoRecState& s) -> std::optional<LabeledExample> {
        if (!s.vs) throw Unsupported("SC needs an enumerated version space");
        auto c = tworec_candidates(s.grid, target);
        auto i = sc_pick(*cls, *s.vs, c);
        if (!i) return std::nullopt;
        return c[*i];
    };
}

inline TeacherFn<TwoRecState> tworec_rand(const TwoRecHyp& target, std::uint64_t seed) {
    return [target, seed](const TwoRecState& s) -> std::optional<LabeledExample> {
        auto c = tworec_candidates(s.grid, target);
        if (c.empty()) return std::nullopt;
        Rng r(seed_of(seed, static_cast<std::uint64_t>(s.t)));
        return c[r.index(c.size())];
    };
}

inline TeacherFn<TwoRecState> tworec_myopic(std::shared_ptr<const TwoRecClass> cls, const TwoRecHyp& target) {
    return [cls, target](const TwoRecState& s) -> std::optional<LabeledExample> {
        if (!s.vs) throw Unsupported("myopic teaching needs an enumerated version space");
        auto c = tworec_candidates(s.grid, target);
        auto i = myopic_pick(*cls, cls->id(s.h), *s.vs, c, cls->id(target));
        if (!i) return std::nullopt;
        return c[*i];
    };
}

// Strip layout: h* is a 1 x len strip on row 1, the learner starts with h* plus a second
// 1 x len strip on row n - 2, on an (len + 2)-sided grid.
struct StripInstance {
    int n;
    TwoRecHyp h0, target;
    Rect r2;
};

inline StripInstance strip_instance(int len) {
    if (len < 2) throw DomainError("strip length must be at least 2");
    int n = len + 2;
    Rect r1{1, 1, len, 1}, r2{1, n - 2, len, n - 2};
    return {n, TwoRecHyp::two(r1, r2), TwoRecHyp::one(r1), r2};
}

// Examples shown inside r2 up to the step where the learner no longer touches r2.
inline int examples_until_dropped(const TeachingTrace& tr, const Rect& r2, int n) {
    int inside = 0;
    for (const auto& st : tr.steps) {
        if (r2.contains(st.example.at)) ++inside;
        auto h = tworec_from_json(st.learner, n);
        bool touches = h.r1().overlaps(r2) || (h.is_two() && h.r2().overlaps(r2));
        if (!touches) return inside;
    }
    return -1;
}

}  // namespace mt
