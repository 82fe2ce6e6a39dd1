#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "fockgerbe/errors.hpp"
#include "fockgerbe/loop.hpp"

namespace fockgerbe {

// ---------------------------------------------------------------------------
// U(1)-valued data on an overlap: a constant phase or a sampled circle map
// ---------------------------------------------------------------------------

struct GridDesc {
    enum class Kind { Const, Circle };
    Kind kind = Kind::Const;
    int samples = 0;

    bool operator==(const GridDesc& o) const { return kind == o.kind && samples == o.samples; }
    static GridDesc constant() { return {Kind::Const, 0}; }
    static GridDesc circle(int n) { return {Kind::Circle, n}; }
};

struct U1Fn {
    bool is_const = true;
    cdouble cval{1.0, 0.0};
    Eigen::VectorXcd samples;

    static U1Fn one() { return U1Fn{}; }

    static U1Fn constant(cdouble z, double tol = 1e-12) {
        if (std::abs(std::abs(z) - 1.0) > tol) throw Error("U1 constant must be unit modulus");
        U1Fn f;
        f.cval = z;
        return f;
    }

    static U1Fn circle(Eigen::VectorXcd v, double tol = 1e-9) {
        for (int i = 0; i < v.size(); ++i) {
            const double m = std::abs(v(i));
            if (std::abs(m - 1.0) > tol) throw Error("U1 samples must be unit modulus");
            v(i) /= m;
        }
        U1Fn f;
        f.is_const = false;
        f.samples = std::move(v);
        return f;
    }

    GridDesc grid() const {
        return is_const ? GridDesc::constant() : GridDesc::circle(static_cast<int>(samples.size()));
    }

    U1Fn inverse() const {
        U1Fn f = *this;
        if (is_const)
            f.cval = std::conj(cval);
        else
            f.samples = samples.conjugate();
        return f;
    }

    U1Fn restricted_to(const GridDesc& g) const {
        if (is_const) {
            if (g.kind == GridDesc::Kind::Const) return *this;
            U1Fn f;
            f.is_const = false;
            f.samples = Eigen::VectorXcd::Constant(g.samples, cval);
            return f;
        }
        if (g.kind == GridDesc::Kind::Circle && g.samples == samples.size()) return *this;
        throw GridMismatchError("cannot restrict circle data to an incompatible grid");
    }

    friend U1Fn operator*(const U1Fn& a, const U1Fn& b) {
        if (a.is_const && b.is_const) return U1Fn::constant(a.cval * b.cval);
        const GridDesc g = a.is_const ? b.grid() : a.grid();
        const U1Fn ra = a.restricted_to(g);
        const U1Fn rb = b.restricted_to(g);
        U1Fn f;
        f.is_const = false;
        f.samples = ra.samples.cwiseProduct(rb.samples);
        return f;
    }

    double dist(const U1Fn& o) const {
        if (is_const && o.is_const) return std::abs(cval - o.cval);
        const GridDesc g = is_const ? o.grid() : grid();
        const U1Fn a = restricted_to(g);
        const U1Fn b = o.restricted_to(g);
        return (a.samples - b.samples).cwiseAbs().maxCoeff();
    }

    bool is_one(double tol = 1e-10) const { return dist(one()) < tol; }
};

/// Degree of a sampled circle-valued map: total unwrapped phase / 2 pi.
/// Adjacent steps must stay below pi or a RefineError asks for more samples.
inline int winding_degree(const U1Fn& f, double step_margin = 1e-9, double int_tol = 1e-6) {
    if (f.is_const) return 0;
    const auto& v = f.samples;
    const int m = static_cast<int>(v.size());
    double total = 0.0;
    for (int k = 0; k < m; ++k) {
        const cdouble ratio = v((k + 1) % m) / v(k);
        const double step = std::arg(ratio);
        if (std::abs(step) >= 0.5 * kTwoPi - step_margin)
            throw RefineError("phase step at or beyond pi; refine the sampling");
        total += step;
    }
    const double deg = total / kTwoPi;
    const double rounded = std::round(deg);
    if (std::abs(deg - rounded) > int_tol)
        throw RefineError("unwrapped winding is not integral; refine the sampling");
    return static_cast<int>(rounded);
}

// ---------------------------------------------------------------------------
// indexed covers with explicit nerves
// ---------------------------------------------------------------------------

using Tuple = std::vector<int>;

inline Tuple sorted_tuple(Tuple t) {
    std::sort(t.begin(), t.end());
    return t;
}

inline bool tuple_injective(const Tuple& t) {
    Tuple s = sorted_tuple(t);
    return std::adjacent_find(s.begin(), s.end()) == s.end();
}

/// Sign of the permutation sorting t ascending (t injective).
inline int sort_sign(const Tuple& t) {
    Tuple s = t;
    int swaps = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t k = i + 1; k < s.size(); ++k)
            if (s[i] > s[k]) {
                std::swap(s[i], s[k]);
                ++swaps;
            }
    return (swaps % 2 == 0) ? 1 : -1;
}

/// Finite indexed cover recorded by its nerve:  the canonical ascending
/// tuples flagged nonempty, each carrying the sample grid its U(1)-valued
/// functions use.  Tuples absent from the nerve are empty intersections.
struct IndexedCover {
    std::vector<int> indices;
    std::map<Tuple, GridDesc> nerve; // canonical ascending injective tuples

    bool nonempty(const Tuple& canonical) const { return nerve.count(canonical) != 0; }

    GridDesc grid(const Tuple& canonical) const {
        auto it = nerve.find(canonical);
        if (it == nerve.end()) throw NerveIncompleteError("tuple not in nerve");
        return it->second;
    }

    std::vector<Tuple> tuples_of_size(std::size_t k) const {
        std::vector<Tuple> out;
        for (const auto& [t, g] : nerve)
            if (t.size() == k) out.push_back(t);
        return out;
    }

    /// nerve must be closed under passing to subtuples
    void validate() const {
        for (const auto& [t, g] : nerve) {
            if (!std::is_sorted(t.begin(), t.end()) || !tuple_injective(t))
                throw NerveIncompleteError("nerve keys must be canonical ascending tuples");
            for (std::size_t drop = 0; drop < t.size(); ++drop) {
                if (t.size() == 1) break;
                Tuple face;
                for (std::size_t i = 0; i < t.size(); ++i)
                    if (i != drop) face.push_back(t[i]);
                if (!nonempty(face))
                    throw NerveIncompleteError("nerve is not closed under subtuples");
            }
        }
    }
};

using CoverPtr = std::shared_ptr<const IndexedCover>;

// ---------------------------------------------------------------------------
// alternating cochains and the coboundary
// ---------------------------------------------------------------------------

/// Degree-p alternating assignment of U(1)-valued data to (p+1)-tuples.
/// Values are stored on canonical ascending nonempty tuples; evaluation on
/// an arbitrary tuple applies the permutation sign multiplicatively and is
/// the identity on non-injective tuples or empty intersections.
struct CechCochain {
    CoverPtr cover;
    int degree = 0;
    std::map<Tuple, U1Fn> entries;

    CechCochain(CoverPtr c, int deg) : cover(std::move(c)), degree(deg) {}

    void set(const Tuple& canonical, U1Fn f) {
        if (static_cast<int>(canonical.size()) != degree + 1)
            throw Error("tuple arity does not match the cochain degree");
        if (!std::is_sorted(canonical.begin(), canonical.end()) || !tuple_injective(canonical))
            throw Error("set() expects a canonical ascending tuple");
        if (!cover->nonempty(canonical)) throw NerveIncompleteError("tuple is empty in the cover");
        entries[canonical] = std::move(f);
    }

    U1Fn value(const Tuple& t) const {
        if (static_cast<int>(t.size()) != degree + 1)
            throw Error("tuple arity does not match the cochain degree");
        if (!tuple_injective(t)) return U1Fn::one();
        const Tuple canonical = sorted_tuple(t);
        if (!cover->nonempty(canonical)) return U1Fn::one();
        auto it = entries.find(canonical);
        if (it == entries.end()) return U1Fn::one();
        return sort_sign(t) == 1 ? it->second : it->second.inverse();
    }

    bool is_trivial(double tol = 1e-10) const {
        for (const auto& [t, f] : entries)
            if (!f.is_one(tol)) return false;
        return true;
    }

    double dist(const CechCochain& o, double grid_fallback = 0.0) const {
        (void)grid_fallback;
        double worst = 0.0;
        for (const auto& [t, f] : entries) worst = std::max(worst, f.dist(o.value(t)));
        for (const auto& [t, f] : o.entries) worst = std::max(worst, f.dist(value(t)));
        return worst;
    }
};

/// Multiplicative coboundary: (delta c)(t) = prod_k c(t drop k)^{(-1)^k},
/// each face restricted to the grid of t.
inline CechCochain cech_coboundary(const CechCochain& c) {
    CechCochain out(c.cover, c.degree + 1);
    for (const Tuple& t : c.cover->tuples_of_size(static_cast<std::size_t>(c.degree) + 2)) {
        const GridDesc g = c.cover->grid(t);
        U1Fn acc = U1Fn::one().restricted_to(g);
        for (std::size_t drop = 0; drop < t.size(); ++drop) {
            Tuple face;
            for (std::size_t i = 0; i < t.size(); ++i)
                if (i != drop) face.push_back(t[i]);
            const U1Fn fv = c.value(face).restricted_to(g);
            acc = acc * (drop % 2 == 0 ? fv : fv.inverse());
        }
        out.entries[t] = acc;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dixmier-Douady cocycle from sections and a multiplication rule
// ---------------------------------------------------------------------------

/// Composition rule of the gerbe: coordinates of m(sigma_ij (x) sigma_jk)
/// in the (i,k) torsor.  The default is plain pointwise multiplication,
/// which is the rule of a canonical trivial gerbe in section coordinates.
using SectionMult =
    std::function<U1Fn(int i, int j, int k, const U1Fn& s_ij, const U1Fn& s_jk)>;

inline U1Fn product_mult(int, int, int, const U1Fn& a, const U1Fn& b) { return a * b; }

/// Pairwise sections sigma_ij; entries with i < j are the stored data and
/// sigma_ji = sigma_ij^{-1} is enforced.
struct SectionFamily {
    std::map<std::pair<int, int>, U1Fn> entries;

    void set(int i, int j, U1Fn f) {
        if (i == j) throw Error("no section on a diagonal pair");
        entries[{i, j}] = std::move(f);
    }

    U1Fn get(int i, int j) const {
        auto it = entries.find({i, j});
        if (it != entries.end()) return it->second;
        auto rev = entries.find({j, i});
        if (rev != entries.end()) return rev->second.inverse();
        throw Error("missing section for pair");
    }

    void check_inverse_convention(double tol = 1e-10) const {
        for (const auto& [key, f] : entries) {
            auto rev = entries.find({key.second, key.first});
            if (rev == entries.end()) continue;
            if (!(f * rev->second).is_one(tol))
                throw InverseConventionError("sigma_ji is not the inverse of sigma_ij");
        }
    }
};

/// g_ijk with m(sigma_ij (x) sigma_jk) = g_ijk sigma_ik on each triple
/// overlap; alternating by construction and a 2-cocycle for an associative
/// multiplication.
inline CechCochain dd_cocycle(const CoverPtr& cover, const SectionFamily& sections,
                              const SectionMult& mult = product_mult) {
    sections.check_inverse_convention();
    CechCochain out(cover, 2);
    for (const Tuple& t : cover->tuples_of_size(3)) {
        const int i = t[0], j = t[1], k = t[2];
        const GridDesc g = cover->grid(t);
        const U1Fn s_ij = sections.get(i, j).restricted_to(g);
        const U1Fn s_jk = sections.get(j, k).restricted_to(g);
        const U1Fn s_ik = sections.get(i, k).restricted_to(g);
        out.entries[t] = mult(i, j, k, s_ij, s_jk) * s_ik.inverse();
    }
    return out;
}

inline double cocycle_defect(const CechCochain& g) {
    const CechCochain d = cech_coboundary(g);
    double worst = 0.0;
    for (const auto& [t, f] : d.entries) worst = std::max(worst, f.dist(U1Fn::one()));
    return worst;
}

// ---------------------------------------------------------------------------
// coboundary for principal-bundle cochains over fiber powers Y^[p]
// ---------------------------------------------------------------------------

/// U(1) function on Y^[p] where Y is a disjoint union of charts over a
/// common base grid: one U1Fn per ORDERED p-tuple of charts (repetition
/// allowed — fiber products include diagonals).
struct BundleCochain {
    std::vector<int> charts;
    GridDesc grid;
    int arity = 1;
    std::map<Tuple, U1Fn> values;

    U1Fn value(const Tuple& t) const {
        auto it = values.find(t);
        if (it == values.end()) throw GridMismatchError("missing bundle cochain value");
        return it->second.restricted_to(grid);
    }
};

/// delta(g)(y_1..y_p) = prod_i g(.. y_i dropped ..)^{(-1)^{i-1}}.
inline BundleCochain delta_bundle_cochain(const BundleCochain& g) {
    BundleCochain out;
    out.charts = g.charts;
    out.grid = g.grid;
    out.arity = g.arity + 1;
    std::vector<Tuple> tuples;
    Tuple cur(static_cast<std::size_t>(out.arity));
    std::function<void(std::size_t)> rec = [&](std::size_t pos) {
        if (pos == cur.size()) {
            tuples.push_back(cur);
            return;
        }
        for (int c : out.charts) {
            cur[pos] = c;
            rec(pos + 1);
        }
    };
    rec(0);
    for (const Tuple& t : tuples) {
        U1Fn acc = U1Fn::one().restricted_to(g.grid);
        for (std::size_t drop = 0; drop < t.size(); ++drop) {
            Tuple face;
            for (std::size_t i = 0; i < t.size(); ++i)
                if (i != drop) face.push_back(t[i]);
            const U1Fn fv = g.value(face);
            acc = acc * (drop % 2 == 0 ? fv : fv.inverse());
        }
        out.values[t] = acc;
    }
    return out;
}

// ---------------------------------------------------------------------------
// suspension cover and the partial inverse of the connecting map
// ---------------------------------------------------------------------------

/// The cover of Sigma X built from a good cover of X: two caps indexed
/// -1 and +1 plus the extruded base sets.  The two cone restrictions and
/// the restriction to X share the index set; restriction only empties
/// tuples.
struct SuspensionCover {
    CoverPtr sigma;
    CoverPtr cone_minus;
    CoverPtr cone_plus;
    CoverPtr base_restriction;
};

inline SuspensionCover build_suspension_cover(const IndexedCover& base) {
    base.validate();
    for (int i : base.indices)
        if (i == -1 || i == 1) throw Error("base cover indices must avoid -1 and +1");

    auto sigma = std::make_shared<IndexedCover>();
    sigma->indices = {-1, 1};
    for (int i : base.indices) sigma->indices.push_back(i);

    for (const auto& [t, g] : base.nerve) {
        sigma->nerve[t] = g; // extruded sets keep the base intersections
        Tuple with_minus = {-1};
        Tuple with_plus = {1};
        for (int i : t) with_minus.push_back(i), with_plus.push_back(i);
        sigma->nerve[sorted_tuple(with_minus)] = g; // caps meet every extrusion
        sigma->nerve[sorted_tuple(with_plus)] = g;
    }
    sigma->nerve[{-1}] = GridDesc::constant();
    sigma->nerve[{1}] = GridDesc::constant();
    // no tuple contains both caps: the caps are disjoint

    auto drop_with = [&](std::initializer_list<int> bad) {
        auto c = std::make_shared<IndexedCover>();
        c->indices = sigma->indices;
        for (const auto& [t, g] : sigma->nerve) {
            bool keep = true;
            for (int b : bad)
                if (std::find(t.begin(), t.end(), b) != t.end()) keep = false;
            if (keep) c->nerve[t] = g;
        }
        return c;
    };

    SuspensionCover out;
    out.cone_minus = drop_with({1});
    out.cone_plus = drop_with({-1});
    out.base_restriction = drop_with({-1, 1});
    out.sigma = sigma;
    return out;
}

/// Forward connecting map on cochain representatives: a 1-cocycle h on
/// U^Sigma cap X lifts to the cone and its coboundary descends to the
/// 2-cocycle concentrated on (-1, i, j) tuples.
inline CechCochain suspension_forward(const CechCochain& h, const SuspensionCover& sc,
                                      double tol = 1e-9) {
    if (h.degree != 1) throw Error("suspension_forward expects a 1-cochain");
    if (cocycle_defect(h) > tol) throw SupportShapeError("input 1-cochain is not a cocycle");
    CechCochain g(sc.sigma, 2);
    for (const auto& [t, f] : h.entries) {
        Tuple lifted = {-1, t[0], t[1]};
        g.entries[lifted] = f;
    }
    return g;
}

/// Partial inverse of the connecting map: for a 2-cocycle supported on
/// (-1, i, j) tuples, the chase reduces to restriction of those entries
/// to X.  Reverses suspension_forward exactly.
inline CechCochain suspension_partial_inverse(const CechCochain& g, const SuspensionCover& sc,
                                              double tol = 1e-9) {
    if (g.degree != 2) throw Error("suspension_partial_inverse expects a 2-cochain");
    for (const auto& [t, f] : g.entries) {
        const bool cap_minus_type = (t.size() == 3 && t[0] == -1 && t[1] != 1);
        if (!cap_minus_type && !f.is_one(tol))
            throw SupportShapeError("2-cocycle support is not concentrated on (-1,i,j) tuples");
    }
    if (cocycle_defect(g) > tol)
        throw SupportShapeError("input 2-cochain is not a cocycle");
    CechCochain h(sc.base_restriction, 1);
    for (const auto& [t, f] : g.entries) {
        if (!(t.size() == 3 && t[0] == -1)) continue;
        h.entries[{t[1], t[2]}] = f; // restriction to X keeps the sample grid
    }
    return h;
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

inline nlohmann::json grid_to_json(const GridDesc& g) {
    if (g.kind == GridDesc::Kind::Const) return {{"kind", "const"}};
    return {{"kind", "circle"}, {"samples", g.samples}};
}

inline GridDesc grid_from_json(const nlohmann::json& j) {
    if (j.at("kind") == "const") return GridDesc::constant();
    return GridDesc::circle(j.at("samples").get<int>());
}

inline nlohmann::json u1fn_to_json(const U1Fn& f) {
    if (f.is_const) return {{"kind", "const"}, {"data", {f.cval.real(), f.cval.imag()}}};
    nlohmann::json data = nlohmann::json::array();
    for (int i = 0; i < f.samples.size(); ++i)
        data.push_back({f.samples(i).real(), f.samples(i).imag()});
    return {{"kind", "circle"}, {"data", data}};
}

inline U1Fn u1fn_from_json(const nlohmann::json& j) {
    if (j.at("kind") == "const") {
        const auto& d = j.at("data");
        return U1Fn::constant({d.at(0).get<double>(), d.at(1).get<double>()});
    }
    const auto& d = j.at("data");
    Eigen::VectorXcd v(d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = cdouble(d.at(i).at(0).get<double>(),
                                                  d.at(i).at(1).get<double>());
    return U1Fn::circle(v);
}

inline nlohmann::json cover_to_json(const IndexedCover& c) {
    nlohmann::json nerve = nlohmann::json::array();
    for (const auto& [t, g] : c.nerve) {
        nlohmann::json e = grid_to_json(g);
        e["tuple"] = t;
        nerve.push_back(e);
    }
    return {{"indices", c.indices}, {"nerve", nerve}};
}

inline IndexedCover cover_from_json(const nlohmann::json& j) {
    IndexedCover c;
    c.indices = j.at("indices").get<std::vector<int>>();
    for (const auto& e : j.at("nerve"))
        c.nerve[e.at("tuple").get<Tuple>()] = grid_from_json(e);
    c.validate();
    return c;
}

inline nlohmann::json cochain_to_json(const CechCochain& c) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [t, f] : c.entries) {
        nlohmann::json e = u1fn_to_json(f);
        e["tuple"] = t;
        entries.push_back(e);
    }
    return {{"cover", cover_to_json(*c.cover)}, {"degree", c.degree}, {"entries", entries}};
}

inline CechCochain cochain_from_json(const nlohmann::json& j) {
    auto cover = std::make_shared<IndexedCover>(cover_from_json(j.at("cover")));
    CechCochain c(cover, j.at("degree").get<int>());
    for (const auto& e : j.at("entries"))
        c.entries[e.at("tuple").get<Tuple>()] = u1fn_from_json(e);
    return c;
}

} // namespace fockgerbe
