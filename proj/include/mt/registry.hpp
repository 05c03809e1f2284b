#pragma once

// Teacher construction by identifier, shared by the harness, the CLI and the service.

#include "mt/optimal.hpp"
#include "mt/teachers.hpp"
#include "mt/teachers_tworec.hpp"

namespace mt {

inline constexpr int kMyopicGridCap = 4;

inline const std::vector<std::string>& teacher_ids() {
    static const std::vector<std::string> ids{"sc", "rand", "myopic", "ada-r", "non-r", "ada-l", "non-l", "optimal"};
    return ids;
}

inline bool is_adaptive(const std::string& id) { return id != "non-r" && id != "non-l"; }

// 2-Rec teachers that need the enumerated version space.
inline bool tworec_needs_enumeration(const std::string& id) { return id == "sc" || id == "myopic"; }

// Throws DomainError for unknown or class-mismatched ids and Unsupported for cap violations.
inline void check_tworec_teacher(const std::string& id, int n) {
    if (id == "ada-l" || id == "non-l") throw DomainError("teacher " + id + " is for the lattice class");
    if (std::find(teacher_ids().begin(), teacher_ids().end(), id) == teacher_ids().end())
        throw DomainError("unknown teacher " + id);
    if (id == "optimal") throw Unsupported("exact optimal teaching exceeds the cap for every 2-Rec grid");
    if (id == "myopic" && n > kMyopicGridCap) throw Unsupported("myopic teaching is capped at 4x4 grids");
    if (tworec_needs_enumeration(id) && n > kTwoRecEnumerationCap) throw Unsupported(id + " needs an enumerated class");
}

inline void check_lattice_teacher(const std::string& id, int n) {
    if (id == "ada-r" || id == "non-r") throw DomainError("teacher " + id + " is for the 2-Rec class");
    if (std::find(teacher_ids().begin(), teacher_ids().end(), id) == teacher_ids().end())
        throw DomainError("unknown teacher " + id);
    if (id == "optimal" && n * n > kDstarCap) throw Unsupported("exact optimal teaching is capped at 15 hypotheses");
}

// Minimax-optimal lattice teacher for tiny boards.
inline TeacherFn<LatticeState> lattice_optimal(const Lattice& cls, Cell target) {
    struct Solver {
        FiniteInstance inst;
        Dstar d;
        Solver(const Lattice& L, Cell t) : inst(lattice_instance(L)), d(inst, static_cast<int>(L.id(t))) {}
    };
    auto solver = std::make_shared<Solver>(cls, target);
    return [cls, target, solver](const LatticeState& s) -> std::optional<LabeledExample> {
        auto e = solver->d.best_example(static_cast<int>(cls.id(s.h)), static_cast<Mask>(s.vs.to_ulong()));
        if (!e) return std::nullopt;
        return positive_example_at(cls.hyp(static_cast<std::size_t>(*e)), target);
    };
}

inline TeacherFn<LatticeState> make_lattice_teacher(const std::string& id, const Lattice& cls, Cell h0, Cell target,
                                                    std::uint64_t seed) {
    check_lattice_teacher(id, cls.n());
    if (id == "sc") return lattice_sc(cls, target);
    if (id == "rand") return lattice_rand(cls, target, seed);
    if (id == "myopic") return lattice_myopic(cls, target);
    if (id == "ada-l") return lattice_ada_l(cls, target);
    if (id == "non-l") return sequence_teacher<LatticeState>(build_non_l(cls, h0, target));
    return lattice_optimal(cls, target);
}

inline TeacherFn<TwoRecState> make_tworec_teacher(const std::string& id, std::shared_ptr<const TwoRecClass> cls,
                                                  const TwoRecHyp& h0, const TwoRecHyp& target, std::uint64_t seed) {
    check_tworec_teacher(id, cls->n());
    if (id == "sc") return tworec_sc(cls, target);
    if (id == "rand") return tworec_rand(target, seed);
    if (id == "myopic") return tworec_myopic(cls, target);
    if (id == "ada-r") return tworec_ada_r(target, cls->prefs());
    return sequence_teacher<TwoRecState>(build_non_r(h0, target, cls->n()));
}

}  // namespace mt
