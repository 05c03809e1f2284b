#pragma once

// Simulated learners (Eq. 1 dynamics with seeded tie-breaking and optional epsilon noise),
// the teaching loop, and an exact worst-case-over-ties evaluator.

#include "mt/lattice.hpp"
#include "mt/tworec_search.hpp"

#include <functional>
#include <map>

namespace mt {

struct LatticeState {
    Cell h;
    Bits vs;  // unexplored nodes; the lattice is always held explicitly
    std::vector<LabeledExample> shown;
    int t = 0;
};

struct TwoRecState {
    TwoRecHyp h;
    ExampleGrid grid;
    std::optional<Bits> vs;  // present in explicit mode
    std::vector<LabeledExample> shown;
    int t = 0;
};

inline LatticeState initial_state(const Lattice& cls, Cell h0) {
    cls.check(h0);
    return {h0, full_space(cls), {}, 0};
}

// explicit=true needs an enumerated class.
inline TwoRecState initial_state(const TwoRecClass& cls, const TwoRecHyp& h0, bool explicit_vs) {
    if (!cls.valid(h0)) throw DomainError("initial hypothesis outside the grid");
    TwoRecState s{h0, ExampleGrid(cls.n()), std::nullopt, {}, 0};
    if (explicit_vs) s.vs = full_space(cls);
    return s;
}

struct LearnerConfig {
    TieBreak tiebreak = TieBreak::seeded(0);
    NoiseModel noise;
};

namespace detail {

inline void check_config(const LearnerConfig& c) {
    if (c.tiebreak.mode == TieBreak::Mode::Adversarial)
        throw Unsupported("adversarial ties are resolved by the worst-case evaluator, not by step()");
    if (c.noise.epsilon < 0 || c.noise.epsilon > 1) throw DomainError("epsilon must be in [0,1]");
}

}  // namespace detail

class LatticeLearner {
public:
    LatticeLearner(const Lattice& cls, LearnerConfig cfg)
        : cls_(cls), eps_(cfg.noise.epsilon), tie_(cfg.tiebreak.seed), noise_(seed_of(cfg.tiebreak.seed, "noise")) {
        detail::check_config(cfg);
    }

    const Lattice& cls() const { return cls_; }

    // Choice set of Eq. 1 after z, without mutating the state.
    std::vector<Cell> choice_set(const LatticeState& s, const LabeledExample& z) const {
        auto ids = learner_choice_set(cls_, cls_.id(s.h), s.vs, z);
        std::vector<Cell> out;
        for (auto i : ids) out.push_back(cls_.hyp(i));
        return out;
    }

    void step(LatticeState& s, const LabeledExample& z) {
        cls_.restrict(s.vs, z);
        if (s.vs.none()) throw InconsistentTeaching("example empties the version space");
        s.shown.push_back(z);
        ++s.t;
        if (eps_ > 0 && noise_.unit() < eps_) {
            s.h = cls_.hyp(nth_member(s.vs, noise_.index(s.vs.count())));
            return;
        }
        auto ids = brute_force_choice(cls_, cls_.id(s.h), s.vs);
        s.h = cls_.hyp(ids.size() == 1 ? ids[0] : ids[tie_.index(ids.size())]);
    }

    static json hyp_json(Cell h) { return Lattice::to_json(h); }
    std::optional<long> vs_size(const LatticeState& s) const { return static_cast<long>(s.vs.count()); }

private:
    Lattice cls_;
    double eps_;
    Rng tie_, noise_;
};

class TwoRecLearner {
public:
    TwoRecLearner(std::shared_ptr<const TwoRecClass> cls, LearnerConfig cfg)
        : cls_(std::move(cls)), eps_(cfg.noise.epsilon), tie_(cfg.tiebreak.seed),
          noise_(seed_of(cfg.tiebreak.seed, "noise")) {
        detail::check_config(cfg);
    }

    const TwoRecClass& cls() const { return *cls_; }

    // Sorted in canonical order (which is also id order in explicit mode).
    std::vector<TwoRecHyp> choice_set(const TwoRecState& s, const LabeledExample& z) const {
        if (s.vs) {
            auto ids = learner_choice_set(*cls_, cls_->id(s.h), *s.vs, z);
            std::vector<TwoRecHyp> out;
            for (auto i : ids) out.push_back(cls_->hyp(i));
            return out;
        }
        auto out = TwoRecSearch(s.grid.with(z), cls_->prefs()).choice(s.h);
        std::sort(out.begin(), out.end());
        return out;
    }

    void step(TwoRecState& s, const LabeledExample& z) {
        if (eps_ > 0 && !s.vs) throw Unsupported("noisy learner needs an enumerated version space");
        auto c = choice_set(s, z);
        s.grid.add(z);
        if (s.vs) cls_->restrict(*s.vs, z);
        s.shown.push_back(z);
        ++s.t;
        if (eps_ > 0 && noise_.unit() < eps_) {
            s.h = cls_->hyp(nth_member(*s.vs, noise_.index(s.vs->count())));
            return;
        }
        s.h = c.size() == 1 ? c[0] : c[tie_.index(c.size())];
    }

    static json hyp_json(const TwoRecHyp& h) { return to_json(h); }
    std::optional<long> vs_size(const TwoRecState& s) const {
        if (!s.vs) return std::nullopt;
        return static_cast<long>(s.vs->count());
    }

private:
    std::shared_ptr<const TwoRecClass> cls_;
    double eps_;
    Rng tie_, noise_;
};

inline bool target_label(const Lattice&, Cell target, Cell at) { return !(target == at); }
inline bool target_label(const TwoRecClass&, const TwoRecHyp& target, Cell at) { return target.contains(at); }

// A teacher maps the observed learner state to the next example, or nullopt when it has
// nothing left to show.
template <class State>
using TeacherFn = std::function<std::optional<LabeledExample>(const State&)>;

struct RunResult {
    TeachingTrace trace;
    int examples_used = 0;
    bool reached = false;
};

template <class Learner, class State, class Hyp>
RunResult run_teaching(Learner& learner, const TeacherFn<State>& teacher, State& s, const Hyp& target,
                       int budget) {
    RunResult r;
    while (!(s.h == target)) {
        if (s.t >= budget) break;
        auto z = teacher(s);
        if (!z) break;
        if (z->label != target_label(learner.cls(), target, z->at))
            throw InconsistentTeaching("teacher emitted an example inconsistent with the target");
        learner.step(s, *z);
        r.trace.steps.push_back({s.t, *z, Learner::hyp_json(s.h), learner.vs_size(s)});
    }
    r.examples_used = s.t;
    r.reached = s.h == target;
    r.trace.terminal = r.reached ? Terminal::ReachedTarget : Terminal::BudgetExhausted;
    return r;
}

// Worst case over every learner tie, for a deterministic teacher. Memoized on the learner
// state via key(). A state the teacher cannot finish within the budget costs budget + 1.
struct WorstCase {
    int cost = 0;
    bool reached = false;
    std::vector<LabeledExample> path;  // examples along one worst branch
};

template <class State, class Hyp, class Choice, class Advance, class Key>
WorstCase worst_case(const State& s0, const Hyp& target, const TeacherFn<State>& teacher, Choice choice,
                     Advance advance, Key key, int budget) {
    std::map<std::string, std::pair<int, std::vector<LabeledExample>>> memo;
    const int fail = budget + 1;
    std::function<std::pair<int, std::vector<LabeledExample>>(const State&)> go =
        [&](const State& s) -> std::pair<int, std::vector<LabeledExample>> {
        if (s.h == target) return {0, {}};
        if (s.t >= budget) return {fail - s.t, {}};
        std::string k = key(s);
        if (auto it = memo.find(k); it != memo.end()) return it->second;
        auto z = teacher(s);
        std::pair<int, std::vector<LabeledExample>> best{fail - s.t, {}};
        if (z) {
            best = {-1, {}};
            for (const auto& h : choice(s, *z)) {
                State n = advance(s, *z, h);
                auto [c, p] = go(n);
                if (1 + c > best.first) {
                    p.insert(p.begin(), *z);
                    best = {1 + c, std::move(p)};
                }
            }
        }
        memo.emplace(k, best);
        return best;
    };
    auto [c, p] = go(s0);
    WorstCase w;
    w.cost = std::min(c, fail);
    w.reached = c + s0.t <= budget;
    w.path = std::move(p);
    return w;
}

inline std::string bits_key(const Bits& b) {
    std::string out;
    boost::to_string(b, out);
    return out;
}

inline WorstCase worst_case_lattice(const Lattice& cls, const LatticeState& s0, Cell target,
                                    const TeacherFn<LatticeState>& teacher, int budget) {
    auto choice = [&](const LatticeState& s, const LabeledExample& z) {
        std::vector<Cell> out;
        for (auto i : learner_choice_set(cls, cls.id(s.h), s.vs, z)) out.push_back(cls.hyp(i));
        return out;
    };
    auto advance = [&](const LatticeState& s, const LabeledExample& z, Cell h) {
        LatticeState n = s;
        cls.restrict(n.vs, z);
        n.shown.push_back(z);
        ++n.t;
        n.h = h;
        return n;
    };
    // The teachers used here depend on the state only through (h, unexplored set, t).
    auto key = [&](const LatticeState& s) {
        return std::to_string(cls.id(s.h)) + ":" + std::to_string(s.t) + ":" + bits_key(s.vs);
    };
    return worst_case(s0, target, teacher, choice, advance, key, budget);
}

inline WorstCase worst_case_tworec(const TwoRecClass& cls, const TwoRecState& s0, const TwoRecHyp& target,
                                   const TeacherFn<TwoRecState>& teacher, int budget) {
    auto choice = [&](const TwoRecState& s, const LabeledExample& z) {
        if (s.vs) {
            std::vector<TwoRecHyp> out;
            for (auto i : learner_choice_set(cls, cls.id(s.h), *s.vs, z)) out.push_back(cls.hyp(i));
            return out;
        }
        auto out = TwoRecSearch(s.grid.with(z), cls.prefs()).choice(s.h);
        std::sort(out.begin(), out.end());
        return out;
    };
    auto advance = [&](const TwoRecState& s, const LabeledExample& z, const TwoRecHyp& h) {
        TwoRecState n = s;
        n.grid.add(z);
        if (n.vs) cls.restrict(*n.vs, z);
        n.shown.push_back(z);
        ++n.t;
        n.h = h;
        return n;
    };
    auto key = [&](const TwoRecState& s) {
        std::string k = to_json(s.h).dump() + ":" + std::to_string(s.t) + ":";
        for (const auto& z : s.shown) k += std::to_string(z.at.x) + "," + std::to_string(z.at.y) + ";";
        return k;
    };
    return worst_case(s0, target, teacher, choice, advance, key, budget);
}

}  // namespace mt
