#pragma once

#include "mt/core.hpp"
#include "mt/version_space.hpp"

namespace mt {

// How equal-distance candidates are ordered. CoordinateSum prefers the larger i+j,
// Lexicographic the larger (i, j), None leaves them tied (pure L1 preference).
enum class LatticeTieRule { CoordinateSum, Lexicographic, None };

class Lattice {
public:
    using Hyp = Cell;

    explicit Lattice(int n, LatticeTieRule rule = LatticeTieRule::CoordinateSum)
        : n_(n), rule_(rule) {
        if (n < 1) throw DomainError("lattice side must be positive");
    }

    int n() const { return n_; }
    LatticeTieRule tie_rule() const { return rule_; }
    std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }
    std::size_t num_locations() const { return size(); }

    bool in_bounds(Cell v) const { return v.x >= 0 && v.y >= 0 && v.x < n_ && v.y < n_; }
    void check(Cell v) const {
        if (!in_bounds(v)) throw DomainError("lattice node out of bounds");
    }

    std::size_t id(Cell v) const {
        check(v);
        return static_cast<std::size_t>(v.x) * n_ + v.y;
    }
    Cell hyp(std::size_t i) const { return {static_cast<int>(i / n_), static_cast<int>(i % n_)}; }
    Cell location(std::size_t i) const { return hyp(i); }

    // A node is labeled positive ("not the target") unless it is the hypothesis itself.
    bool label(Cell h, Cell v) const {
        check(v);
        return !(h == v);
    }
    bool label_id(std::size_t h, Cell v) const { return label(hyp(h), v); }

    bool consistent(Cell h, const LabeledExample& z) const { return label(h, z.at) == z.label; }

    PreferenceKey key(Cell hp, Cell h) const {
        long sub = 0;
        switch (rule_) {
            case LatticeTieRule::CoordinateSum: sub = -(hp.x + hp.y); break;
            case LatticeTieRule::Lexicographic: sub = -(static_cast<long>(hp.x) * n_ + hp.y); break;
            case LatticeTieRule::None: break;
        }
        return {0, l1(hp, h), sub};
    }
    PreferenceKey key_id(std::size_t hp, std::size_t h) const { return key(hyp(hp), hyp(h)); }

    void restrict(Bits& vs, const LabeledExample& z) const {
        std::size_t v = id(z.at);
        if (z.label) {
            vs.reset(v);
        } else {
            bool had = vs.test(v);
            vs.reset();
            if (had) vs.set(v);
        }
    }

    std::vector<Cell> neighbors(Cell v) const {
        std::vector<Cell> out;
        const Cell d[4] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
        for (auto [dx, dy] : d) {
            Cell w{v.x + dx, v.y + dy};
            if (in_bounds(w)) out.push_back(w);
        }
        return out;
    }

    static json to_json(Cell v) { return {{"node", {v.x, v.y}}}; }
    Cell from_json(const json& j) const {
        const auto& a = j.at("node");
        if (!a.is_array() || a.size() != 2) throw DomainError("node must be [i,j]");
        Cell v{a[0].get<int>(), a[1].get<int>()};
        check(v);
        return v;
    }

private:
    int n_;
    LatticeTieRule rule_;
};

inline LabeledExample positive_example_at(Cell v, Cell target) {
    if (v == target) throw ForbiddenExample("cannot flag the target node");
    return {v, true};
}

inline LatticeTieRule lattice_tie_rule_from(const std::string& s) {
    if (s == "sum") return LatticeTieRule::CoordinateSum;
    if (s == "lex") return LatticeTieRule::Lexicographic;
    if (s == "none") return LatticeTieRule::None;
    throw DomainError("unknown lattice tie rule: " + s);
}

}  // namespace mt
