#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <utility>

#include "fockgerbe/errors.hpp"
#include "fockgerbe/fock.hpp"

namespace fockgerbe {

/// Element of a U(1) torsor, stored as its unit coordinate against an
/// implicit base point, tagged with the torsor it inhabits.  Combinations
/// are only allowed between compatible tags, mirroring the canonical
/// isomorphisms (pairing, tensor, dual).
struct PhaseElement {
    cdouble value;
    std::string tag;

    PhaseElement(cdouble v, std::string t, double tol = 1e-12) : value(v), tag(std::move(t)) {
        if (std::abs(std::abs(value) - 1.0) > tol)
            throw Error("phase element must have unit modulus");
    }
};

inline void require_same_tag(const PhaseElement& a, const PhaseElement& b) {
    if (a.tag != b.tag) throw TagMismatchError("torsor tags differ: " + a.tag + " vs " + b.tag);
}

/// z with t = z s; pair(t, t) = 1 and pair(z t, s) = z pair(t, s).
inline cdouble torsor_pair(const PhaseElement& t, const PhaseElement& s) {
    require_same_tag(t, s);
    return t.value / s.value;
}

inline PhaseElement torsor_scale(cdouble z, const PhaseElement& t) {
    return PhaseElement(z * t.value, t.tag);
}

inline PhaseElement torsor_tensor(const PhaseElement& a, const PhaseElement& b) {
    return PhaseElement(a.value * b.value, "(" + a.tag + ")*(" + b.tag + ")");
}

inline PhaseElement torsor_dual(const PhaseElement& t) {
    return PhaseElement(std::conj(t.value), "dual(" + t.tag + ")");
}

/// Canonical map dual(T) (x) T -> U(1): s* (x) t -> z_{st}.
inline cdouble torsor_dual_pairing(const PhaseElement& s_dual, const PhaseElement& t) {
    if (s_dual.tag != "dual(" + t.tag + ")")
        throw TagMismatchError("dual pairing requires dual(" + t.tag + ")");
    return s_dual.value * t.value;
}

/// Inner product on F (x) T for the tensor product representation:
/// <f (x) t, g (x) u> = <f, g> <t, u> with <t, u> = t / u.
inline cdouble rep_tensor_inner(const FockVector& f, const PhaseElement& t, const FockVector& g,
                                const PhaseElement& u) {
    require_same_tag(t, u);
    if (f.basis.get() != g.basis.get()) throw Error("vectors live on different Fock bases");
    return inner(f, g) * (t.value / u.value);
}

} // namespace fockgerbe
