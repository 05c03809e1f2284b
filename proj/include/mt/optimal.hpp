#pragma once

// Exact solvers on small finite teaching instances: minimax adaptive cost, the best
// non-adaptive sequence, the myopic rank-greedy teacher, teaching dimensions, and the
// sufficient conditions for the greedy bound.

#include "mt/lattice.hpp"
#include "mt/tworec.hpp"

#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <unordered_map>

namespace mt {

using Mask = std::uint32_t;

inline constexpr int kMaxFiniteHyps = 20;
inline constexpr int kDstarCap = 15;
inline constexpr int kNonadaptiveCap = 12;
inline constexpr int kPowersetCap = 12;
inline constexpr int kDimensionCap = 20;

// A finite class given by its examples (each as the set of hypotheses consistent with it)
// and the preference sigma(hp; h).
class FiniteInstance {
public:
    FiniteInstance(int m, std::vector<Bits> consistent, std::function<PreferenceKey(int, int)> key)
        : m_(m), consistent_(std::move(consistent)), key_(std::move(key)) {
        if (m < 1) throw DomainError("instance needs at least one hypothesis");
        for (const auto& b : consistent_)
            if (static_cast<int>(b.size()) != m) throw DomainError("example mask size mismatch");
        if (m_ <= kMaxFiniteHyps) {
            keys_.resize(static_cast<std::size_t>(m_) * m_);
            for (int hp = 0; hp < m_; ++hp)
                for (int h = 0; h < m_; ++h) keys_[static_cast<std::size_t>(h) * m_ + hp] = key_(hp, h);
            for (const auto& b : consistent_) masks_.push_back(static_cast<Mask>(b.to_ulong()));
        }
    }

    int size() const { return m_; }
    int num_examples() const { return static_cast<int>(consistent_.size()); }
    const Bits& consistent_set(int e) const { return consistent_[e]; }
    PreferenceKey key(int hp, int h) const {
        return keys_.empty() ? key_(hp, h) : keys_[static_cast<std::size_t>(h) * m_ + hp];
    }
    Mask mask(int e) const { return small(), masks_[e]; }
    Mask full() const { return small(), (m_ == 32 ? ~Mask{0} : (Mask{1} << m_) - 1); }

    // sigma(hp; h) does not depend on h.
    bool state_independent() const {
        for (int hp = 0; hp < m_; ++hp)
            for (int h = 1; h < m_; ++h)
                if (key(hp, h) != key(hp, 0)) return false;
        return true;
    }

    void small() const {
        if (m_ > kMaxFiniteHyps) throw Unsupported("instance too large for the exact solvers");
    }

private:
    int m_;
    std::vector<Bits> consistent_;
    std::function<PreferenceKey(int, int)> key_;
    std::vector<PreferenceKey> keys_;
    std::vector<Mask> masks_;
};

inline Bits bits_from_mask(Mask m, int size) { return Bits(size, m); }

// ---- synthesized instances ----

// One example per subset S of at most k hypotheses; the example is consistent with all
// hypotheses outside S. Includes the empty subset.
inline std::vector<Bits> subset_removal_examples(int m, int k) {
    std::vector<Bits> out;
    for (Mask s = 0; s < (Mask{1} << m); ++s)
        if (std::popcount(s) <= k) out.push_back(bits_from_mask(~s & ((Mask{1} << m) - 1), m));
    return out;
}

inline std::function<PreferenceKey(int, int)> uniform_preference() {
    return [](int, int) { return PreferenceKey{}; };
}

// sigma(hp; h) = rank[hp].
inline std::function<PreferenceKey(int, int)> global_preference(std::vector<int> rank) {
    return [rank = std::move(rank)](int hp, int) { return PreferenceKey{0, rank[hp], 0}; };
}

// sigma(hp; h) = table[h][hp], with 0 on the diagonal so the learner stays when it can.
inline std::function<PreferenceKey(int, int)> table_preference(std::vector<std::vector<int>> table) {
    return [t = std::move(table)](int hp, int h) { return PreferenceKey{0, t[h][hp], 0}; };
}

inline FiniteInstance lattice_instance(const Lattice& L) {
    const int m = static_cast<int>(L.size());
    std::vector<Bits> ex;
    for (int v = 0; v < m; ++v) {
        Bits b(m);
        b.set();
        b.reset(v);
        ex.push_back(b);
    }
    return FiniteInstance(m, ex, [L](int hp, int h) { return L.key_id(hp, h); });
}

// Every (cell, label) pair of an enumerated 2-Rec class.
inline FiniteInstance tworec_instance(std::shared_ptr<const TwoRecClass> cls) {
    std::vector<Bits> ex;
    for (std::size_t c = 0; c < cls->num_locations(); ++c) {
        const Bits& pos = cls->pos_mask(cls->location(c));
        ex.push_back(pos);
        ex.push_back(~pos);
    }
    return FiniteInstance(static_cast<int>(cls->size()), ex, [cls](int hp, int h) { return cls->key_id(hp, h); });
}

// ---- core operations on masks ----

namespace finite {

inline Mask choice(const FiniteInstance& I, int h, Mask H) {
    Mask out = 0;
    std::optional<PreferenceKey> best;
    for (Mask r = H; r; r &= r - 1) {
        int i = std::countr_zero(r);
        auto k = I.key(i, h);
        if (!best || k < *best) {
            best = k;
            out = 0;
        }
        if (k == *best) out |= Mask{1} << i;
    }
    return out;
}

inline long rank(const FiniteInstance& I, int h, Mask H, int target) {
    if (!(H >> target & 1)) throw DomainError("target not in version space");
    auto bound = I.key(target, h);
    long n = 0;
    for (Mask r = H; r; r &= r - 1)
        if (I.key(std::countr_zero(r), h) <= bound) ++n;
    return n;
}

// Examples a consistent teacher may use in version space H: keep the target, remove something.
inline std::vector<int> useful_examples(const FiniteInstance& I, Mask H, int target) {
    std::vector<int> out;
    for (int e = 0; e < I.num_examples(); ++e) {
        Mask m = I.mask(e);
        if ((m >> target & 1) && (H & m) != H) out.push_back(e);
    }
    return out;
}

}  // namespace finite

inline long rank_tilde_finite(const FiniteInstance& I, int h, const Bits& H, int target) {
    I.small();
    return finite::rank(I, h, static_cast<Mask>(H.to_ulong()), target);
}

// Minimax adaptive cost: min over examples of 1 + the worst next state.
class Dstar {
public:
    Dstar(const FiniteInstance& I, int target, int cap = kDstarCap) : I_(I), t_(target) {
        if (I.size() > cap) throw Unsupported("instance exceeds the minimax cap");
    }

    int operator()(int h, Mask H) {
        if (h == t_) return 0;
        std::uint64_t key = static_cast<std::uint64_t>(H) << 5 | static_cast<std::uint64_t>(h);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        int best = std::numeric_limits<int>::max();
        for (int e : finite::useful_examples(I_, H, t_)) {
            Mask H2 = H & I_.mask(e);
            int worst = 0;
            for (Mask c = finite::choice(I_, h, H2); c; c &= c - 1) {
                worst = std::max(worst, (*this)(std::countr_zero(c), H2));
                if (1 + worst >= best) break;
            }
            best = std::min(best, 1 + worst);
        }
        if (best == std::numeric_limits<int>::max()) throw InconsistentTeaching("target unreachable");
        memo_.emplace(key, best);
        return best;
    }

    // An example attaining the minimum, first by index.
    std::optional<int> best_example(int h, Mask H) {
        if (h == t_) return std::nullopt;
        int target_cost = (*this)(h, H);
        for (int e : finite::useful_examples(I_, H, t_)) {
            Mask H2 = H & I_.mask(e);
            int worst = 0;
            for (Mask c = finite::choice(I_, h, H2); c; c &= c - 1)
                worst = std::max(worst, (*this)(std::countr_zero(c), H2));
            if (1 + worst == target_cost) return e;
        }
        return std::nullopt;
    }

    std::size_t states() const { return memo_.size(); }

private:
    const FiniteInstance& I_;
    int t_;
    std::unordered_map<std::uint64_t, int> memo_;
};

inline int dstar(const FiniteInstance& I, int h0, int target, int cap = kDstarCap) {
    Dstar d(I, target, cap);
    return d(h0, I.full());
}

// Shortest fixed sequence such that every tie resolution hits the target somewhere along it.
inline int nonadaptive_opt(const FiniteInstance& I, int h0, int target, int cap = kNonadaptiveCap) {
    if (I.size() > cap || I.num_examples() > cap) throw Unsupported("instance exceeds the non-adaptive cap");
    if (h0 == target) return 0;
    std::unordered_map<std::uint64_t, int> failed;  // (H, live set) -> deepest depth proven insufficient
    std::function<bool(Mask, Mask, int)> go = [&](Mask H, Mask S, int depth) -> bool {
        if (S == 0) return true;
        if (depth == 0) return false;
        std::uint64_t key = static_cast<std::uint64_t>(H) << 32 | S;
        if (auto it = failed.find(key); it != failed.end() && it->second >= depth) return false;
        for (int e : finite::useful_examples(I, H, target)) {
            Mask H2 = H & I.mask(e);
            Mask S2 = 0;
            for (Mask r = S; r; r &= r - 1) S2 |= finite::choice(I, std::countr_zero(r), H2);
            S2 &= ~(Mask{1} << target);
            if (go(H2, S2, depth - 1)) return true;
        }
        auto& f = failed[key];
        f = std::max(f, depth);
        return false;
    };
    for (int d = 1; d <= I.num_examples(); ++d)
        if (go(I.full(), Mask{1} << h0, d)) return d;
    throw InconsistentTeaching("no fixed sequence reaches the target");
}

// The myopic teacher: argmin over examples of the worst post-move rank of the target; ties
// prefer examples that keep the learner in place, then example index.
inline std::optional<int> greedy_example_finite(const FiniteInstance& I, int h, Mask H, int target) {
    std::optional<int> best;
    std::pair<long, int> bk{std::numeric_limits<long>::max(), 0};
    for (int e : finite::useful_examples(I, H, target)) {
        Mask H2 = H & I.mask(e);
        long worst = 0;
        for (Mask c = finite::choice(I, h, H2); c; c &= c - 1)
            worst = std::max(worst, finite::rank(I, std::countr_zero(c), H2, target));
        std::pair<long, int> k{worst, (I.mask(e) >> h & 1) ? 0 : 1};
        if (k < bk) {
            bk = k;
            best = e;
        }
    }
    return best;
}

// Worst case over ties of the myopic teacher's cost.
inline int greedy_cost(const FiniteInstance& I, int h0, int target) {
    I.small();
    std::unordered_map<std::uint64_t, int> memo;
    std::function<int(int, Mask)> go = [&](int h, Mask H) -> int {
        if (h == target) return 0;
        std::uint64_t key = static_cast<std::uint64_t>(H) << 5 | static_cast<std::uint64_t>(h);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        auto e = greedy_example_finite(I, h, H, target);
        if (!e) throw InconsistentTeaching("greedy teacher has no useful example");
        Mask H2 = H & I.mask(*e);
        int worst = 0;
        for (Mask c = finite::choice(I, h, H2); c; c &= c - 1) worst = std::max(worst, go(std::countr_zero(c), H2));
        memo.emplace(key, 1 + worst);
        return 1 + worst;
    };
    return go(h0, I.full());
}

inline double greedy_bound(const FiniteInstance& I, int h0, int target, int opt) {
    I.small();
    double d = static_cast<double>(finite::rank(I, h0, I.full(), target));
    return 2.0 * (std::log2(d) + 1.0) * opt;
}

// Minimum number of examples whose common version space is {target}.
inline int compute_td(const FiniteInstance& I, int target, int cap = kDimensionCap) {
    if (I.size() > cap) throw Unsupported("instance exceeds the teaching-dimension cap");
    return [&] {
        const Mask goal = Mask{1} << target;
        std::vector<int> dist(std::size_t{1} << I.size(), -1);
        std::vector<Mask> frontier{I.full()};
        dist[I.full()] = 0;
        for (int d = 0; !frontier.empty(); ++d) {
            std::vector<Mask> next;
            for (Mask H : frontier) {
                if (H == goal) return d;
                for (int e = 0; e < I.num_examples(); ++e) {
                    Mask H2 = H & I.mask(e);
                    if (!(H2 & goal) || dist[H2] != -1) continue;
                    dist[H2] = d + 1;
                    next.push_back(H2);
                }
            }
            frontier = std::move(next);
        }
        throw InconsistentTeaching("target cannot be isolated");
    }();
}

// Minimum number of examples after which every surviving hypothesis other than the target
// is strictly less preferred than it. Needs a state-independent preference.
inline int compute_pbtd(const FiniteInstance& I, int target, int cap = kDimensionCap) {
    if (I.size() > cap) throw Unsupported("instance exceeds the teaching-dimension cap");
    if (!I.state_independent()) throw DomainError("preference-based teaching dimension needs a global preference");
    auto tk = I.key(target, 0);
    Mask bad = 0;
    for (int h = 0; h < I.size(); ++h)
        if (h != target && I.key(h, 0) <= tk) bad |= Mask{1} << h;
    std::vector<char> seen(std::size_t{1} << I.size(), 0);
    std::vector<Mask> frontier{I.full()};
    seen[I.full()] = 1;
    for (int d = 0; !frontier.empty(); ++d) {
        std::vector<Mask> next;
        for (Mask H : frontier) {
            if ((H & bad) == 0) return d;
            for (int e = 0; e < I.num_examples(); ++e) {
                Mask H2 = H & I.mask(e);
                if (!(H2 >> target & 1) || seen[H2]) continue;
                seen[H2] = 1;
                next.push_back(H2);
            }
        }
        frontier = std::move(next);
    }
    throw InconsistentTeaching("target cannot be made most preferred");
}

struct ConditionResult {
    bool holds = true;
    json witness;  // null when the condition holds
};

struct GreedyConditions {
    ConditionResult cond1, cond2;
    json to_json() const {
        return {{"cond1", {{"holds", cond1.holds}, {"witness", cond1.witness}}},
                {"cond2", {{"holds", cond2.holds}, {"witness", cond2.witness}}}};
    }
};

// Condition 1 over the whole class for a fixed target (restricting H only drops quantifiers).
inline ConditionResult check_condition1(const FiniteInstance& I, int target) {
    const int m = I.size();
    for (int h = 0; h < m; ++h) {
        auto th = I.key(target, h);
        for (int i = 0; i < m; ++i) {
            auto ki = I.key(i, h);
            if (ki > th) continue;
            auto ti = I.key(target, i);
            for (int j = 0; j < m; ++j) {
                auto kj = I.key(j, h);
                if (ki <= kj && kj <= th && I.key(j, i) > ti) return {false, {{"h", h}, {"hi", i}, {"hj", j}}};
            }
        }
    }
    return {};
}

// Condition 2 over the whole class: every non-empty subset of an example's inconsistent set
// is itself the inconsistent set of some example. Exhaustive up to the powerset cap; above it only
// singleton subsets are tried, and a failure to find a witness is reported as unsupported.
inline ConditionResult check_condition2(const FiniteInstance& I, int cap = kPowersetCap) {
    const int m = I.size();
    std::vector<Bits> bars;
    for (int e = 0; e < I.num_examples(); ++e) bars.push_back(~I.consistent_set(e));
    auto exists = [&](const Bits& s) { return std::find(bars.begin(), bars.end(), s) != bars.end(); };
    auto witness = [&](int e, const Bits& s) {
        json hs = json::array();
        for (auto i : members(s)) hs.push_back(i);
        return json{{"example", e}, {"subset", hs}};
    };
    if (m <= cap) {
        for (int e = 0; e < I.num_examples(); ++e) {
            Mask bar = static_cast<Mask>(bars[e].to_ulong());
            for (Mask s = bar; s; s = (s - 1) & bar) {
                Bits b = bits_from_mask(s, m);
                if (!exists(b)) return {false, witness(e, b)};
            }
        }
        return {};
    }
    for (int e = 0; e < I.num_examples(); ++e)
        for (auto i : members(bars[e])) {
            Bits b(m);
            b.set(i);
            if (!exists(b)) return {false, witness(e, b)};
        }
    throw Unsupported("class too large to check condition 2 exhaustively");
}

inline GreedyConditions check_greedy_conditions(const FiniteInstance& I, int target, int cap = kPowersetCap) {
    GreedyConditions r;
    r.cond2 = check_condition2(I, cap);
    r.cond1 = check_condition1(I, target);
    return r;
}

// Subset-removal instance on m hypotheses with sets of size <= k and a seeded preference:
// a random global rank when global is set, else a random state-dependent table.
struct SyntheticInstance {
    FiniteInstance inst;
    int h0, target;
};

inline SyntheticInstance synthetic_instance(int m, int k, bool global, std::uint64_t seed) {
    if (m < 2 || m > kPowersetCap) throw DomainError("synthetic instances need 2 <= m <= 12");
    Rng rng(seed);
    std::function<PreferenceKey(int, int)> pref;
    if (global) {
        std::vector<int> r(m);
        for (auto& x : r) x = static_cast<int>(rng.index(3));
        pref = global_preference(r);
    } else {
        std::vector<std::vector<int>> tab(m, std::vector<int>(m));
        for (int h = 0; h < m; ++h)
            for (int hp = 0; hp < m; ++hp) tab[h][hp] = hp == h ? 0 : 1 + static_cast<int>(rng.index(3));
        pref = table_preference(tab);
    }
    int t = static_cast<int>(rng.index(m));
    return {FiniteInstance(m, subset_removal_examples(m, k), pref), (t + 1) % m, t};
}

struct CostReport {
    int adaptive_opt = 0;
    std::optional<int> nonadaptive_opt;
    int greedy = 0;
    long rank0 = 0;
    std::vector<std::string> notes;

    json to_json() const {
        return {{"adaptive_opt", adaptive_opt},
                {"nonadaptive_opt", nonadaptive_opt ? json(*nonadaptive_opt) : json(nullptr)},
                {"greedy", greedy},
                {"rank0", rank0},
                {"notes", notes}};
    }
};

inline CostReport cost_report(const FiniteInstance& I, int h0, int target, int cap = kDstarCap) {
    CostReport r;
    r.adaptive_opt = dstar(I, h0, target, cap);
    r.greedy = greedy_cost(I, h0, target);
    r.rank0 = finite::rank(I, h0, I.full(), target);
    if (I.size() <= kNonadaptiveCap && I.num_examples() <= kNonadaptiveCap)
        r.nonadaptive_opt = nonadaptive_opt(I, h0, target);
    else
        r.notes.push_back("nonadaptive_opt skipped: instance exceeds the non-adaptive cap");
    if (I.state_independent()) r.notes.push_back("state-independent preference");
    return r;
}

}  // namespace mt
