#pragma once

// The 2-Rec class: one rectangle, or two cell-disjoint rectangles separated by a gap.

#include "mt/core.hpp"
#include "mt/version_space.hpp"

#include <algorithm>
#include <array>
#include <memory>
#include <unordered_map>

namespace mt {

struct Rect {
    int x1 = 0, y1 = 0, x2 = 0, y2 = 0;  // inclusive
    auto operator<=>(const Rect&) const = default;

    int width() const { return x2 - x1 + 1; }
    int height() const { return y2 - y1 + 1; }
    long area() const { return static_cast<long>(width()) * height(); }
    bool singleton() const { return x1 == x2 && y1 == y2; }
    bool contains(Cell c) const { return c.x >= x1 && c.x <= x2 && c.y >= y1 && c.y <= y2; }
    bool overlaps(const Rect& o) const {
        return x1 <= o.x2 && o.x1 <= x2 && y1 <= o.y2 && o.y1 <= y2;
    }
    bool inside(const Rect& o) const {
        return x1 >= o.x1 && x2 <= o.x2 && y1 >= o.y1 && y2 <= o.y2;
    }
    bool valid_on(int n) const { return 0 <= x1 && x1 <= x2 && x2 < n && 0 <= y1 && y1 <= y2 && y2 < n; }
};

inline Rect cell_rect(Cell c) { return {c.x, c.y, c.x, c.y}; }

// Cell-disjoint with at least one empty row or column between the two rectangles.
inline bool separated(const Rect& a, const Rect& b) {
    return a.x2 + 1 < b.x1 || b.x2 + 1 < a.x1 || a.y2 + 1 < b.y1 || b.y2 + 1 < a.y1;
}

inline int coord_diff(const Rect& a, const Rect& b) {
    return (a.x1 != b.x1) + (a.y1 != b.y1) + (a.x2 != b.x2) + (a.y2 != b.y2);
}

inline long coord_l1(const Rect& a, const Rect& b) {
    return std::abs(a.x1 - b.x1) + std::abs(a.y1 - b.y1) + std::abs(a.x2 - b.x2) +
           std::abs(a.y2 - b.y2);
}

inline Rect bounding(const Rect& a, const Rect& b) {
    return {std::min(a.x1, b.x1), std::min(a.y1, b.y1), std::max(a.x2, b.x2), std::max(a.y2, b.y2)};
}

class TwoRecHyp {
public:
    TwoRecHyp() = default;

    static TwoRecHyp one(const Rect& r) {
        TwoRecHyp h;
        h.k_ = 1;
        h.r_[0] = r;
        return h;
    }
    static TwoRecHyp two(const Rect& a, const Rect& b) {
        if (!separated(a, b)) throw DomainError("rectangles must be disjoint and non-touching");
        TwoRecHyp h;
        h.k_ = 2;
        h.r_[0] = std::min(a, b);
        h.r_[1] = std::max(a, b);
        return h;
    }

    int count() const { return k_; }
    bool is_two() const { return k_ == 2; }
    const Rect& r1() const { return r_[0]; }
    const Rect& r2() const { return r_[1]; }
    const Rect& rect(int i) const { return r_[i]; }

    bool contains(Cell c) const { return r_[0].contains(c) || (k_ == 2 && r_[1].contains(c)); }
    bool valid_on(int n) const { return r_[0].valid_on(n) && (k_ == 1 || r_[1].valid_on(n)); }
    long area() const { return r_[0].area() + (k_ == 2 ? r_[1].area() : 0); }
    // Longest side over the rectangles.
    int max_side() const {
        int m = std::max(r_[0].width(), r_[0].height());
        if (k_ == 2) m = std::max({m, r_[1].width(), r_[1].height()});
        return m;
    }

    auto operator<=>(const TwoRecHyp&) const = default;

private:
    int k_ = 1;
    std::array<Rect, 2> r_{};
};

inline Rect enclosing(const TwoRecHyp& h) {
    return h.is_two() ? bounding(h.r1(), h.r2()) : h.r1();
}

inline bool is_s1(const TwoRecHyp& h) {
    return h.is_two() && (h.r1().singleton() || h.r2().singleton());
}

// Closed form for a split: both rectangles span the enclosing rectangle across one axis and
// are separated by a single full-length line.
inline bool is_s2(const TwoRecHyp& h) {
    if (!h.is_two()) return false;
    const Rect& a = h.r1();
    const Rect& b = h.r2();
    if (a.y1 == b.y1 && a.y2 == b.y2) {
        const Rect& l = a.x1 < b.x1 ? a : b;
        const Rect& r = a.x1 < b.x1 ? b : a;
        if (l.x2 + 2 == r.x1) return true;
    }
    if (a.x1 == b.x1 && a.x2 == b.x2) {
        const Rect& t = a.y1 < b.y1 ? a : b;
        const Rect& u = a.y1 < b.y1 ? b : a;
        if (t.y2 + 2 == u.y1) return true;
    }
    return false;
}

// Split test by search: no other two-rectangle hypothesis inside the enclosing rectangle
// covers every cell of h.
inline bool is_s2_exhaustive(const TwoRecHyp& h) {
    if (!h.is_two()) return false;
    Rect e = enclosing(h);
    std::vector<Rect> rs;
    for (int x1 = e.x1; x1 <= e.x2; ++x1)
        for (int y1 = e.y1; y1 <= e.y2; ++y1)
            for (int x2 = x1; x2 <= e.x2; ++x2)
                for (int y2 = y1; y2 <= e.y2; ++y2) rs.push_back({x1, y1, x2, y2});
    auto covers = [](const Rect& p, const Rect& q, const Rect& r) {
        // r is covered by p or by q (a rectangle of h cannot straddle two separated rectangles)
        return r.inside(p) || r.inside(q);
    };
    for (std::size_t i = 0; i < rs.size(); ++i)
        for (std::size_t j = i + 1; j < rs.size(); ++j) {
            if (!separated(rs[i], rs[j])) continue;
            if (!covers(rs[i], rs[j], h.r1()) || !covers(rs[i], rs[j], h.r2())) continue;
            if (TwoRecHyp::two(rs[i], rs[j]) != h) return false;
        }
    return true;
}

enum class Subclass { H1, S1, S2, H2Other };

// S1 takes precedence for hypotheses in both shortcut sets; use is_s1/is_s2 for exact flags.
inline Subclass membership(const TwoRecHyp& h) {
    if (!h.is_two()) return Subclass::H1;
    if (is_s1(h)) return Subclass::S1;
    if (is_s2(h)) return Subclass::S2;
    return Subclass::H2Other;
}

inline std::string to_string(Subclass s) {
    switch (s) {
        case Subclass::H1: return "H1";
        case Subclass::S1: return "S1";
        case Subclass::S2: return "S2";
        default: return "H2_other";
    }
}

// (moved-edge count, total displacement) under the best rectangle assignment.
inline std::pair<int, long> edge_distance(const TwoRecHyp& a, const TwoRecHyp& b) {
    if (a.count() != b.count()) throw DomainError("dist_e is only defined within a subclass");
    if (!a.is_two()) return {coord_diff(a.r1(), b.r1()), coord_l1(a.r1(), b.r1())};
    std::pair<int, long> p{coord_diff(a.r1(), b.r1()) + coord_diff(a.r2(), b.r2()),
                           coord_l1(a.r1(), b.r1()) + coord_l1(a.r2(), b.r2())};
    std::pair<int, long> q{coord_diff(a.r1(), b.r2()) + coord_diff(a.r2(), b.r1()),
                           coord_l1(a.r1(), b.r2()) + coord_l1(a.r2(), b.r1())};
    return std::min(p, q);
}

inline int dist_e(const TwoRecHyp& a, const TwoRecHyp& b) { return edge_distance(a, b).first; }

inline std::vector<TwoRecHyp> delete_targets(const TwoRecHyp& h) {
    std::vector<TwoRecHyp> out;
    if (!is_s1(h)) return out;
    if (h.r2().singleton()) out.push_back(TwoRecHyp::one(h.r1()));
    if (h.r1().singleton()) out.push_back(TwoRecHyp::one(h.r2()));
    std::sort(out.begin(), out.end());
    return out;
}

inline std::optional<TwoRecHyp> merge_target(const TwoRecHyp& h) {
    if (!is_s2(h)) return std::nullopt;
    return TwoRecHyp::one(enclosing(h));
}

struct TwoRecPrefs {
    bool l1_secondary = false;          // break equal edge counts by total displacement
    bool overlap_outranks_h2 = false;   // rank overlapping H1 above H2 moves from a shortcut state
};

// Internal tier numbering. From a shortcut state the delete target ranks before the merge
// target, which covers hypotheses that are both.
namespace tier {
inline constexpr int kSelf = 0;
inline constexpr int kDelete = 1;
inline constexpr int kMerge = 2;
}  // namespace tier

inline PreferenceKey preference_key_2rec(const TwoRecHyp& hp, const TwoRecHyp& h,
                                         const TwoRecPrefs& prefs = {}) {
    auto dist_key = [&](int t) {
        auto [d, l] = edge_distance(hp, h);
        return PreferenceKey{t, d, prefs.l1_secondary ? l : 0};
    };
    if (!h.is_two()) {
        if (!hp.is_two()) return dist_key(0);
        return {is_s1(hp) ? 1 : 2, 0, 0};
    }
    bool hs1 = is_s1(h), hs2 = is_s2(h);
    if (hs1 || hs2) {
        const int t_h2 = prefs.overlap_outranks_h2 ? 4 : 3;
        const int t_ov = prefs.overlap_outranks_h2 ? 3 : 4;
        if (hp == h) return {tier::kSelf, 0, 0};
        if (hp.is_two()) return dist_key(t_h2);
        if (hs1) {
            if ((h.r2().singleton() && hp.r1() == h.r1()) || (h.r1().singleton() && hp.r1() == h.r2()))
                return {tier::kDelete, 0, 0};
        }
        if (hs2 && hp.r1() == enclosing(h)) return {tier::kMerge, 0, 0};
        if (hp.r1().overlaps(h.r1()) || hp.r1().overlaps(h.r2())) return {t_ov, 0, 0};
        return {5, 0, 0};
    }
    if (hp.is_two()) return dist_key(0);
    return {1, 0, 0};
}

inline json to_json(const TwoRecHyp& h) {
    json rects = json::array();
    for (int i = 0; i < h.count(); ++i) {
        const Rect& r = h.rect(i);
        rects.push_back({{"x1", r.x1}, {"y1", r.y1}, {"x2", r.x2}, {"y2", r.y2}});
    }
    return {{"rects", rects}};
}

inline TwoRecHyp tworec_from_json(const json& j, int n) {
    const auto& a = j.at("rects");
    if (!a.is_array() || a.empty() || a.size() > 2) throw DomainError("rects must hold 1 or 2 entries");
    auto rect = [&](const json& r) {
        Rect out{r.at("x1").get<int>(), r.at("y1").get<int>(), r.at("x2").get<int>(), r.at("y2").get<int>()};
        if (!out.valid_on(n)) throw DomainError("rectangle outside the grid");
        return out;
    };
    if (a.size() == 1) return TwoRecHyp::one(rect(a[0]));
    return TwoRecHyp::two(rect(a[0]), rect(a[1]));
}

// Labeled cells shown so far, with prefix sums for O(1) rectangle queries.
class ExampleGrid {
public:
    explicit ExampleGrid(int n) : n_(n), lab_(static_cast<std::size_t>(n) * n, -1) { rebuild(); }

    int n() const { return n_; }

    void add(const LabeledExample& z) {
        check(z.at);
        auto& l = lab_[idx(z.at)];
        int v = z.label ? 1 : 0;
        if (l != -1 && l != v) throw InconsistentTeaching("conflicting labels for one cell");
        if (l == v) return;
        l = static_cast<std::int8_t>(v);
        if (z.label) positives_.push_back(z.at);
        rebuild();
    }
    ExampleGrid with(const LabeledExample& z) const {
        ExampleGrid g = *this;
        g.add(z);
        return g;
    }

    int label_at(Cell c) const { return lab_[idx(c)]; }
    bool shown(Cell c) const { return lab_[idx(c)] != -1; }
    int total_pos() const { return total_pos_; }
    const std::vector<Cell>& positives() const { return positives_; }

    int pos_in(const Rect& r) const { return sum(P_, r); }
    int neg_in(const Rect& r) const { return sum(N_, r); }

    bool consistent(const TwoRecHyp& h) const {
        if (!h.is_two()) return neg_in(h.r1()) == 0 && pos_in(h.r1()) == total_pos_;
        return neg_in(h.r1()) == 0 && neg_in(h.r2()) == 0 &&
               pos_in(h.r1()) + pos_in(h.r2()) == total_pos_;
    }

    // Bounding box of the positives, if any.
    std::optional<Rect> positive_box() const {
        if (positives_.empty()) return std::nullopt;
        Rect b = cell_rect(positives_[0]);
        for (auto c : positives_) b = bounding(b, cell_rect(c));
        return b;
    }

    void check(Cell c) const {
        if (c.x < 0 || c.y < 0 || c.x >= n_ || c.y >= n_) throw DomainError("cell out of bounds");
    }

private:
    std::size_t idx(Cell c) const { return static_cast<std::size_t>(c.y) * n_ + c.x; }
    int at(const std::vector<int>& S, int x, int y) const { return S[static_cast<std::size_t>(y) * (n_ + 1) + x]; }
    int sum(const std::vector<int>& S, const Rect& r) const {
        return at(S, r.x2 + 1, r.y2 + 1) - at(S, r.x1, r.y2 + 1) - at(S, r.x2 + 1, r.y1) + at(S, r.x1, r.y1);
    }
    void rebuild() {
        std::size_t w = n_ + 1;
        P_.assign(w * w, 0);
        N_.assign(w * w, 0);
        total_pos_ = 0;
        for (int y = 0; y < n_; ++y)
            for (int x = 0; x < n_; ++x) {
                int l = lab_[idx({x, y})];
                int p = l == 1, q = l == 0;
                total_pos_ += p;
                std::size_t k = (y + 1) * w + (x + 1);
                P_[k] = p + P_[k - 1] + P_[k - w] - P_[k - w - 1];
                N_[k] = q + N_[k - 1] + N_[k - w] - N_[k - w - 1];
            }
    }

    int n_;
    std::vector<std::int8_t> lab_;
    std::vector<Cell> positives_;
    std::vector<int> P_, N_;
    int total_pos_ = 0;
};

inline std::vector<Rect> all_rects(int n) {
    std::vector<Rect> out;
    for (int x1 = 0; x1 < n; ++x1)
        for (int y1 = 0; y1 < n; ++y1)
            for (int x2 = x1; x2 < n; ++x2)
                for (int y2 = y1; y2 < n; ++y2) out.push_back({x1, y1, x2, y2});
    return out;
}

// Grids up to this side length are enumerated explicitly by default.
inline constexpr int kTwoRecEnumerationCap = 8;

// The 2-Rec class on an n x n grid. Enumerated (dense ids, per-cell membership bitsets)
// when n is within the cap; otherwise only the structured search is available.
class TwoRecClass {
public:
    using Hyp = TwoRecHyp;

    explicit TwoRecClass(int n, TwoRecPrefs prefs = {}, int enumeration_cap = kTwoRecEnumerationCap)
        : n_(n), prefs_(prefs) {
        if (n < 1 || n > 60) throw DomainError("grid side must be in [1, 60]");
        if (n <= enumeration_cap) enumerate();
    }

    int n() const { return n_; }
    const TwoRecPrefs& prefs() const { return prefs_; }
    bool enumerated() const { return !hyps_.empty(); }
    std::size_t num_locations() const { return static_cast<std::size_t>(n_) * n_; }
    Cell location(std::size_t i) const { return {static_cast<int>(i % n_), static_cast<int>(i / n_)}; }
    std::size_t location_index(Cell c) const { return static_cast<std::size_t>(c.y) * n_ + c.x; }
    bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < n_ && c.y < n_; }

    std::size_t size() const { return need_enum(), hyps_.size(); }
    std::size_t h1_count() const { return need_enum(), h1_count_; }
    const TwoRecHyp& hyp(std::size_t i) const { return hyps_.at(i); }
    std::size_t id(const TwoRecHyp& h) const {
        need_enum();
        auto it = index_.find(pack(h));
        if (it == index_.end()) throw DomainError("hypothesis not in class");
        return it->second;
    }

    bool label(const TwoRecHyp& h, Cell c) const {
        if (!in_bounds(c)) throw DomainError("cell out of bounds");
        return h.contains(c);
    }
    bool label_id(std::size_t h, Cell c) const { return label(hyps_[h], c); }
    bool consistent(const TwoRecHyp& h, const LabeledExample& z) const { return label(h, z.at) == z.label; }

    PreferenceKey key(const TwoRecHyp& hp, const TwoRecHyp& h) const { return preference_key_2rec(hp, h, prefs_); }
    PreferenceKey key_id(std::size_t hp, std::size_t h) const { return key(hyps_[hp], hyps_[h]); }

    const Bits& pos_mask(Cell c) const { return need_enum(), masks_[location_index(c)]; }
    void restrict(Bits& vs, const LabeledExample& z) const {
        const Bits& m = pos_mask(z.at);
        if (z.label) vs &= m;
        else vs -= m;
    }

    static json to_json(const TwoRecHyp& h) { return mt::to_json(h); }
    TwoRecHyp from_json(const json& j) const { return tworec_from_json(j, n_); }

    bool valid(const TwoRecHyp& h) const { return h.valid_on(n_); }

private:
    void need_enum() const {
        if (hyps_.empty()) throw Unsupported("2-Rec class is not enumerated at this grid size");
    }
    static std::uint64_t pack(const TwoRecHyp& h) {
        auto p = [](const Rect& r) {
            return static_cast<std::uint64_t>(r.x1) | static_cast<std::uint64_t>(r.y1) << 6 |
                   static_cast<std::uint64_t>(r.x2) << 12 | static_cast<std::uint64_t>(r.y2) << 18;
        };
        std::uint64_t v = p(h.r1());
        if (h.is_two()) v |= p(h.r2()) << 24 | 1ULL << 48;
        return v;
    }
    void enumerate() {
        auto rs = all_rects(n_);
        for (const auto& r : rs) hyps_.push_back(TwoRecHyp::one(r));
        h1_count_ = hyps_.size();
        for (std::size_t i = 0; i < rs.size(); ++i)
            for (std::size_t j = i + 1; j < rs.size(); ++j)
                if (separated(rs[i], rs[j])) hyps_.push_back(TwoRecHyp::two(rs[i], rs[j]));
        index_.reserve(hyps_.size() * 2);
        for (std::size_t i = 0; i < hyps_.size(); ++i) index_.emplace(pack(hyps_[i]), i);
        masks_.assign(num_locations(), Bits(hyps_.size()));
        for (std::size_t i = 0; i < hyps_.size(); ++i)
            for (int k = 0; k < hyps_[i].count(); ++k) {
                const Rect& r = hyps_[i].rect(k);
                for (int x = r.x1; x <= r.x2; ++x)
                    for (int y = r.y1; y <= r.y2; ++y) masks_[location_index({x, y})].set(i);
            }
    }

    int n_;
    TwoRecPrefs prefs_;
    std::vector<TwoRecHyp> hyps_;
    std::size_t h1_count_ = 0;
    std::unordered_map<std::uint64_t, std::uint32_t> index_;
    std::vector<Bits> masks_;
};

}  // namespace mt
