#pragma once

// Class-agnostic operations over an enumerated hypothesis class.
//
// A class C used here exposes:
//   std::size_t size() const;
//   PreferenceKey key_id(std::size_t hp, std::size_t h) const;   // sigma(hp; h)
//   bool label_id(std::size_t h, Cell at) const;
//   void restrict(Bits& vs, const LabeledExample& z) const;      // vs &= H({z})

#include "mt/core.hpp"

#include <algorithm>
#include <limits>

namespace mt {

template <class C>
Bits full_space(const C& cls) {
    Bits b(cls.size());
    b.set();
    return b;
}

template <class C>
Bits update_version_space(const C& cls, Bits vs, const LabeledExample& z) {
    cls.restrict(vs, z);
    return vs;
}

// Exact argmin of sigma(.; h) over the given (already updated) version space.
template <class C>
std::vector<std::size_t> brute_force_choice(const C& cls, std::size_t h, const Bits& vs) {
    std::vector<std::size_t> best;
    PreferenceKey bk{std::numeric_limits<int>::max(), 0, 0};
    for (auto i = vs.find_first(); i != Bits::npos; i = vs.find_next(i)) {
        PreferenceKey k = cls.key_id(i, h);
        if (k < bk) {
            bk = k;
            best.clear();
        }
        if (k == bk) best.push_back(i);
    }
    return best;
}

template <class C>
std::vector<std::size_t> learner_choice_set(const C& cls, std::size_t h, const Bits& vs,
                                            const LabeledExample& z) {
    Bits next = update_version_space(cls, vs, z);
    if (next.none()) throw InconsistentTeaching("example empties the version space");
    return brute_force_choice(cls, h, next);
}

// |{h' in H : sigma(h'; h) <= sigma(h*; h)}|
template <class C>
long rank_tilde(const C& cls, std::size_t h, const Bits& vs, std::size_t target) {
    if (!vs.test(target)) throw DomainError("target not in version space");
    PreferenceKey bound = cls.key_id(target, h);
    long n = 0;
    for (auto i = vs.find_first(); i != Bits::npos; i = vs.find_next(i))
        if (cls.key_id(i, h) <= bound) ++n;
    return n;
}

template <class C>
Bits preferred_version_space(const C& cls, std::size_t target, std::size_t h, const Bits& vs) {
    Bits out(vs.size());
    if (!vs.test(target)) throw DomainError("target not in version space");
    PreferenceKey bound = cls.key_id(target, h);
    for (auto i = vs.find_first(); i != Bits::npos; i = vs.find_next(i))
        if (cls.key_id(i, h) <= bound) out.set(i);
    return out;
}

}  // namespace mt
