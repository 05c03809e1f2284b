#pragma once

// Class-agnostic baselines (SC, Rand, myopic rank-greedy) and the Lattice teachers.

#include "mt/learner.hpp"

#include <limits>
#include <set>

namespace mt {

// ---- generic, over an enumerated class ----

// Index into cands of the set-cover pick: most hypotheses removed, first in candidate order.
template <class C>
std::optional<std::size_t> sc_pick(const C& cls, const Bits& vs, const std::vector<LabeledExample>& cands) {
    std::optional<std::size_t> best;
    std::size_t best_gain = 0;
    const std::size_t before = vs.count();
    for (std::size_t i = 0; i < cands.size(); ++i) {
        Bits next = vs;
        cls.restrict(next, cands[i]);
        std::size_t gain = before - next.count();
        if (!best || gain > best_gain) {
            best = i;
            best_gain = gain;
        }
    }
    return best;
}

// Worst rank of the target over the learner's possible next hypotheses after z.
template <class C>
long myopic_score(const C& cls, std::size_t h, const Bits& vs, const LabeledExample& z, std::size_t target) {
    Bits next = update_version_space(cls, vs, z);
    long worst = 0;
    for (auto hp : brute_force_choice(cls, h, next)) worst = std::max(worst, rank_tilde(cls, hp, next, target));
    return worst;
}

// Argmin of myopic_score over candidates that remove at least one hypothesis; ties prefer
// examples that keep the learner where it is, then candidate order.
template <class C>
std::optional<std::size_t> myopic_pick(const C& cls, std::size_t h, const Bits& vs,
                                       const std::vector<LabeledExample>& cands, std::size_t target) {
    std::optional<std::size_t> best;
    std::pair<long, int> bk{std::numeric_limits<long>::max(), 0};
    const std::size_t before = vs.count();
    for (std::size_t i = 0; i < cands.size(); ++i) {
        Bits next = update_version_space(cls, vs, cands[i]);
        if (next.count() == before) continue;
        long s = myopic_score(cls, h, vs, cands[i], target);
        std::pair<long, int> k{s, cls.label_id(h, cands[i].at) == cands[i].label ? 0 : 1};
        if (k < bk) {
            bk = k;
            best = i;
        }
    }
    return best;
}

// ---- Lattice ----

inline std::vector<LabeledExample> lattice_candidates(const Lattice& cls, const LatticeState& s, Cell target) {
    std::vector<LabeledExample> out;
    for (auto i = s.vs.find_first(); i != Bits::npos; i = s.vs.find_next(i)) {
        Cell v = cls.hyp(i);
        if (!(v == target)) out.push_back({v, true});
    }
    std::sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.at < b.at; });
    return out;
}

inline TeacherFn<LatticeState> lattice_sc(const Lattice& cls, Cell target) {
    return [cls, target](const LatticeState& s) -> std::optional<LabeledExample> {
        auto c = lattice_candidates(cls, s, target);
        auto i = sc_pick(cls, s.vs, c);
        if (!i) return std::nullopt;
        return c[*i];
    };
}

inline TeacherFn<LatticeState> lattice_rand(const Lattice& cls, Cell target, std::uint64_t seed) {
    return [cls, target, seed](const LatticeState& s) -> std::optional<LabeledExample> {
        auto c = lattice_candidates(cls, s, target);
        if (c.empty()) return std::nullopt;
        Rng r(seed_of(seed, static_cast<std::uint64_t>(s.t)));
        return c[r.index(c.size())];
    };
}

inline TeacherFn<LatticeState> lattice_myopic(const Lattice& cls, Cell target) {
    return [cls, target](const LatticeState& s) -> std::optional<LabeledExample> {
        auto c = lattice_candidates(cls, s, target);
        auto i = myopic_pick(cls, cls.id(s.h), s.vs, c, cls.id(target));
        if (!i) return std::nullopt;
        return c[*i];
    };
}

// Closer-to-target hypotheses that come first in the learner's preference from h_t.
inline std::vector<Cell> oracle_ada_l(const Lattice& cls, Cell ht, const Bits& vs, Cell target) {
    const int dt = l1(ht, target);
    std::vector<Cell> pool;
    for (auto i = vs.find_first(); i != Bits::npos; i = vs.find_next(i))
        if (!(cls.hyp(i) == ht)) pool.push_back(cls.hyp(i));
    std::vector<Cell> out;
    for (Cell hp : pool) {
        const int dp = l1(hp, target);
        if (dp >= dt) continue;
        const auto kp = cls.key(hp, ht);
        bool ok = true;
        for (Cell hpp : pool) {
            if (cls.key(hpp, ht) > kp) continue;
            const int dpp = l1(hpp, target);
            if (!(dpp == dp || (dp < dt && dt <= dpp))) {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(hp);
    }
    if (out.empty()) {
        // Fall back to the most preferred closer hypotheses.
        std::optional<PreferenceKey> best;
        for (Cell hp : pool) {
            if (l1(hp, target) >= dt) continue;
            auto k = cls.key(hp, ht);
            if (!best || k < *best) {
                best = k;
                out.clear();
            }
            if (k == *best) out.push_back(hp);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Unexplored hypotheses the learner would consider no later than the oracle targets but
// that do not bring it closer. Most preferred first.
inline std::vector<Cell> bad_neighbors(const Lattice& cls, Cell ht, const Bits& vs, Cell target,
                                       const std::vector<Cell>& targets) {
    std::vector<Cell> out;
    if (targets.empty()) return out;
    PreferenceKey bound = cls.key(targets[0], ht);
    for (Cell c : targets) bound = std::max(bound, cls.key(c, ht));
    const int dt = l1(ht, target);
    for (auto i = vs.find_first(); i != Bits::npos; i = vs.find_next(i)) {
        Cell v = cls.hyp(i);
        if (v == ht || v == target) continue;
        if (cls.key(v, ht) <= bound && l1(v, target) >= dt) out.push_back(v);
    }
    std::sort(out.begin(), out.end(), [&](Cell a, Cell b) {
        auto ka = cls.key(a, ht), kb = cls.key(b, ht);
        return ka != kb ? ka < kb : a < b;
    });
    return out;
}

inline LabeledExample teacher_ada_l(const Lattice& cls, Cell ht, const Bits& vs, Cell target) {
    auto targets = oracle_ada_l(cls, ht, vs, target);
    auto bad = bad_neighbors(cls, ht, vs, target, targets);
    if (!bad.empty()) return positive_example_at(bad[0], target);
    return positive_example_at(ht, target);
}

inline TeacherFn<LatticeState> lattice_ada_l(const Lattice& cls, Cell target) {
    return [cls, target](const LatticeState& s) -> std::optional<LabeledExample> {
        if (s.h == target) return std::nullopt;
        return teacher_ada_l(cls, s.h, s.vs, target);
    };
}

// x-first then y monotone path from h0 to h*, both ends included.
inline std::vector<Cell> staircase_path(Cell h0, Cell target) {
    std::vector<Cell> p{h0};
    Cell c = h0;
    while (c.x != target.x) {
        c.x += c.x < target.x ? 1 : -1;
        p.push_back(c);
    }
    while (c.y != target.y) {
        c.y += c.y < target.y ? 1 : -1;
        p.push_back(c);
    }
    return p;
}

// Every neighbour of the path is flagged (lexicographic order), then the path itself in
// traversal order, which leaves the learner a single way forward at each step.
inline std::vector<LabeledExample> build_non_l(const Lattice& cls, Cell h0, Cell target) {
    cls.check(h0);
    cls.check(target);
    auto path = staircase_path(h0, target);
    std::set<Cell> on_path(path.begin(), path.end());
    std::set<Cell> around;
    for (Cell p : path)
        for (Cell w : cls.neighbors(p))
            if (!on_path.count(w)) around.insert(w);
    std::vector<LabeledExample> seq;
    for (Cell w : around) seq.push_back(positive_example_at(w, target));
    for (Cell p : path)
        if (!(p == target)) seq.push_back(positive_example_at(p, target));
    return seq;
}

template <class State>
TeacherFn<State> sequence_teacher(std::vector<LabeledExample> seq) {
    return [seq = std::move(seq)](const State& s) -> std::optional<LabeledExample> {
        if (s.t < 0 || static_cast<std::size_t>(s.t) >= seq.size()) return std::nullopt;
        return seq[s.t];
    };
}

}  // namespace mt
