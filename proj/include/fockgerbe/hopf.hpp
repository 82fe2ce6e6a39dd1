#pragma once

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "fockgerbe/cech.hpp"
#include "fockgerbe/geometry.hpp"
#include "fockgerbe/modes.hpp"
#include "fockgerbe/pair_vacuum.hpp"

namespace fockgerbe {

// ---------------------------------------------------------------------------
// configuration
// ---------------------------------------------------------------------------

struct ExperimentConfig {
    int n = 4;
    int cutoff = 4;          // frequency cutoff Q
    int loop_samples = 64;   // samples of the transition loops (power of two)
    int equator_samples = 256;
    int meridian_steps = 48;
    double cond_bound = 1e8;
    double residual_tol = 1e-8;
    double degenerate_sigma = 1e-7; // sigma_min(C) below this flags the point
    double min_step_overlap = 0.2;  // |<v_t, v_{t-1}>| below this forces bisection
    int max_bisection_depth = 12;
    double perturb_eps = 2e-2;
    int max_retries = 4;
    unsigned long long seed = 0;
    std::string out_dir = ".";
    bool same_cap_consistency = false; // null test: reuse one cap's phases for both

    void validate() const {
        if (n != 4) throw Error("the experiment runs on fiber dimension 4");
        SampledLoop::check_count(static_cast<std::size_t>(loop_samples));
        if (!is_power_of_two(static_cast<std::size_t>(equator_samples)))
            throw Error("equator sample count must be a power of two");
    }
};

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    if (j.count("n")) c.n = j.at("n").get<int>();
    if (j.count("cutoff")) c.cutoff = j.at("cutoff").get<int>();
    if (j.count("loop_samples")) c.loop_samples = j.at("loop_samples").get<int>();
    if (j.count("equator_samples")) c.equator_samples = j.at("equator_samples").get<int>();
    if (j.count("meridian_steps")) c.meridian_steps = j.at("meridian_steps").get<int>();
    if (j.count("cond_bound")) c.cond_bound = j.at("cond_bound").get<double>();
    if (j.count("residual_tol")) c.residual_tol = j.at("residual_tol").get<double>();
    if (j.count("degenerate_sigma")) c.degenerate_sigma = j.at("degenerate_sigma").get<double>();
    if (j.count("perturb_eps")) c.perturb_eps = j.at("perturb_eps").get<double>();
    if (j.count("max_retries")) c.max_retries = j.at("max_retries").get<int>();
    if (j.count("seed")) c.seed = j.at("seed").get<unsigned long long>();
    if (j.count("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------
// fiber families over S^2 = { x in S^3 : pi_i(x) = 0 }
// ---------------------------------------------------------------------------

/// Per-point data of the gerbe fiber over x: the transition loop, the
/// orthogonal mode operator it multiplies by, and the vacuum data that
/// coordinates the intertwiner torsor.
struct FiberGerbeData {
    Quaternion x;
    TruncatedOperator g;
    double hs_commutator = 0.0;
    double sigma_min_c = 0.0;
    double youla_residual = 0.0;
    double vacuum_residual = 0.0;
    PairVacuum vacuum;
    bool degenerate = false;
};

/// A family assigns to each sphere point the fiber operator and its vacuum.
struct FiberFamily {
    std::string name;
    std::function<TruncatedOperator(const Quaternion&)> op_of;
    // empty -> derive the vacuum from Z_g of op_of
    std::function<PairVacuum(const Quaternion&)> vacuum_of;
};

/// The main family: g(x) is the multiplication operator of the SO(4) loop
/// of left multiplications along the transition loop r(x), orthogonalized
/// at the truncation window.
inline FiberFamily main_family(const ModeBasis& basis, const ExperimentConfig& cfg) {
    FiberFamily fam;
    fam.name = "hopf";
    fam.op_of = [basis, cfg](const Quaternion& x) {
        const SampledLoop r = transition_loop_r(x, static_cast<std::size_t>(cfg.loop_samples));
        const FourierLoop sigma = so4_loop_of_quaternion_loop(r);
        MultiplicationOptions opts;
        opts.orthogonalize = true;
        return multiplication_operator(basis, sigma, opts);
    };
    return fam;
}

/// Null family: the constant loop at 1, so every fiber operator is the
/// identity and the transition must wind zero times.
inline FiberFamily null_family(const ModeBasis& basis) {
    FiberFamily fam;
    fam.name = "null";
    fam.op_of = [basis](const Quaternion&) {
        TruncatedOperator op(basis, Eigen::MatrixXcd::Identity(basis.dim(), basis.dim()));
        op.verify_flags();
        return op;
    };
    return fam;
}

/// Synthetic family with known winding: a single mode pair rotates by the
/// polar angle with the azimuth as phase, so the vacuum line sweeps the
/// sphere of a two-level system exactly once and |c1| = 1.
inline FiberFamily synthetic_family(const LagrangianFrame& frame) {
    FiberFamily fam;
    fam.name = "synthetic";
    const Eigen::VectorXcd f1 = frame.columns.col(0);
    const Eigen::VectorXcd f2 = frame.columns.col(1);
    const Eigen::VectorXcd f1b = frame.basis.real_structure(f1);
    const Eigen::VectorXcd f2b = frame.basis.real_structure(f2);
    auto angles = [](const Quaternion& x) {
        const double theta = std::acos(std::clamp(x.a, -1.0, 1.0)); // polar from +1
        const double phi = std::atan2(x.d, x.c);
        return std::pair<double, double>(theta / 2.0, phi);
    };
    fam.op_of = [=](const Quaternion& x) {
        const auto [al, phi] = angles(x);
        const cdouble mu = std::exp(cdouble(0.0, phi));
        const int N = frame.ambient_dim();
        Eigen::MatrixXcd g = Eigen::MatrixXcd::Identity(N, N);
        const double co = std::cos(al), si = std::sin(al);
        g += (co - 1.0) * (f1 * f1.adjoint() + f2 * f2.adjoint() + f1b * f1b.adjoint() +
                           f2b * f2b.adjoint());
        g += -si * std::conj(mu) * (f2b * f1.adjoint());
        g += si * std::conj(mu) * (f1b * f2.adjoint());
        g += -si * mu * (f2 * f1b.adjoint());
        g += si * mu * (f1 * f2b.adjoint());
        TruncatedOperator op(frame.basis, std::move(g));
        op.verify_flags();
        return op;
    };
    fam.vacuum_of = [=](const Quaternion& x) {
        const auto [al, phi] = angles(x);
        PairVacuum v;
        v.cols = Eigen::MatrixXcd::Zero(frame.ambient_dim(), 2);
        v.cols.col(0) = f1;
        v.cols.col(1) = f2;
        v.alpha = {al};
        v.spin = {std::exp(cdouble(0.0, phi))};
        return v;
    };
    return fam;
}

/// Vacuum plus diagnostics for one sphere point.
inline FiberGerbeData fiber_transition(const Quaternion& x, const FiberFamily& fam,
                                       const LagrangianFrame& frame,
                                       const ExperimentConfig& cfg) {
    FiberGerbeData out;
    out.x = x;
    out.g = fam.op_of(x);
    out.hs_commutator = hs_commutator_norm(frame.unitary_structure(), out.g.mat);
    if (fam.vacuum_of) {
        out.vacuum = fam.vacuum_of(x);
        const CADecomposition ca = decompose_ca(out.g.mat, frame.unitary_structure());
        out.sigma_min_c = c_spectrum(ca.c).smin;
    } else {
        try {
            PairVacuumResult pv = pair_vacuum_of(out.g, frame, cfg.cond_bound);
            out.vacuum = std::move(pv.vac);
            out.sigma_min_c = pv.sigma_min_c;
            out.youla_residual = pv.youla_residual;
        } catch (const SingularCError& e) {
            out.sigma_min_c = e.smallest_singular_value;
            out.degenerate = true;
            return out;
        }
    }
    if (out.sigma_min_c < cfg.degenerate_sigma && !fam.vacuum_of) out.degenerate = true;
    out.vacuum_residual = vacuum_condition_residual(out.vacuum, out.g, frame);
    if (out.vacuum_residual > cfg.residual_tol) out.degenerate = true;
    return out;
}

/// parallel map over an index range honoring FOCKGERBE_THREADS; results are
/// written into pre-sized slots so aggregation stays deterministic
template <class F>
inline void parallel_for(int count, F&& f) {
    int width = 1;
    if (const char* env = std::getenv("FOCKGERBE_THREADS")) width = std::max(1, std::atoi(env));
    width = std::min(width, count > 0 ? count : 1);
    if (width <= 1) {
        for (int i = 0; i < count; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(width));
    for (int w = 0; w < width; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) f(i);
        });
    for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------------------
// cap trivializations by phase continuation and the clutching degree
// ---------------------------------------------------------------------------

struct PointRecord {
    std::string cap;
    int index = 0;
    double t = 0.0, phi = 0.0;
    Quaternion x;
    double sigma_min_c = 0.0;
    double vacuum_residual = 0.0;
    double youla_residual = 0.0;
    int pairs = 0;
    bool degenerate = false;
};

struct ChernResult {
    int degree = 0;
    U1Fn transition;                       // sampled on the equator
    std::vector<PointRecord> records;      // per evaluated point
    std::vector<Quaternion> degenerate_points;
    int retries_used = 0;
    double max_phase_step = 0.0;
    double max_vacuum_residual = 0.0;
    double min_sigma_c = std::numeric_limits<double>::infinity();
};

namespace detail {

struct SphereFrame {
    // orthonormal triple in the (1, j, k) copy of R^3 inside S^3
    Eigen::Vector3d pole{1.0, 0.0, 0.0};
    Eigen::Vector3d u{0.0, 1.0, 0.0};
    Eigen::Vector3d v{0.0, 0.0, 1.0};

    Quaternion point(double t, double phi, int cap_sign) const {
        // t in [0, pi/2]: geodesic from the cap pole to the equator
        const Eigen::Vector3d e = std::cos(phi) * u + std::sin(phi) * v;
        const Eigen::Vector3d p =
            std::cos(t) * static_cast<double>(cap_sign) * pole + std::sin(t) * e;
        return Quaternion(p(0), 0.0, p(1), p(2));
    }

    void perturb(double eps, int attempt) {
        // deterministic small rotation of the triple
        const double a = eps * (1.0 + attempt);
        const Eigen::AngleAxisd rot(a, (attempt % 2 == 0 ? u : v).normalized());
        pole = (rot * pole).normalized();
        u = (rot * u).normalized();
        v = (rot * v).normalized();
        // re-orthogonalize
        u = (u - u.dot(pole) * pole).normalized();
        v = pole.cross(u);
    }
};

struct Section {
    PairVacuum vac;
    cdouble phase{1.0, 0.0}; // section value = phase * canonical vacuum
};

struct EvalOutcome {
    FiberGerbeData data;
    PointRecord record;
};

inline EvalOutcome eval_point(const Quaternion& x, double t, double phi, int idx,
                              const char* cap_name, const FiberFamily& fam,
                              const LagrangianFrame& frame, const ExperimentConfig& cfg) {
    EvalOutcome out;
    out.data = fiber_transition(x, fam, frame, cfg);
    out.record.cap = cap_name;
    out.record.index = idx;
    out.record.t = t;
    out.record.phi = phi;
    out.record.x = x;
    out.record.sigma_min_c = out.data.sigma_min_c;
    out.record.vacuum_residual = out.data.vacuum_residual;
    out.record.youla_residual = out.data.youla_residual;
    out.record.pairs = out.data.vacuum.pair_count();
    out.record.degenerate = out.data.degenerate;
    return out;
}

/// One meridian trace: records, the continued phase, and the failure kind
/// if the trace hit a degenerate point or lost phase lock.
struct MeridianOutcome {
    bool ok = false;
    bool degenerate = false;
    bool refine = false;
    cdouble phase{1.0, 0.0};
    std::vector<PointRecord> records;
    std::vector<Quaternion> degenerate_points;
};

struct MeridianTracer {
    const FiberFamily& fam;
    const LagrangianFrame& frame;
    const ExperimentConfig& cfg;
    const SphereFrame& sphere;
    int cap_sign = 1;
    MeridianOutcome* out = nullptr;

    const char* cap_name() const { return cap_sign > 0 ? "plus" : "minus"; }

    FiberGerbeData eval(double t, double phi, int idx) {
        EvalOutcome e = eval_point(sphere.point(t, phi, cap_sign), t, phi, idx, cap_name(),
                                   fam, frame, cfg);
        out->records.push_back(e.record);
        if (e.data.degenerate) {
            out->degenerate_points.push_back(e.record.x);
            out->degenerate = true;
            throw DegeneratePointError("degenerate point on a continuation path");
        }
        return e.data;
    }

    // continue the section phase from (t0, prev) to t1; bisect while the
    // vacuum overlap is too small to trust the phase transport
    Section advance(const Section& prev, double t0, double t1, double phi, int idx, int depth) {
        const FiberGerbeData d1 = eval(t1, phi, idx);
        const cdouble ov = pair_vacuum_overlap(d1.vacuum, prev.vac);
        if (std::abs(ov) < cfg.min_step_overlap) {
            if (depth >= cfg.max_bisection_depth) {
                out->refine = true;
                throw RefineError("phase continuation lost track; refine the grids");
            }
            const double tm = 0.5 * (t0 + t1);
            const Section mid = advance(prev, t0, tm, phi, idx, depth + 1);
            return advance(mid, tm, t1, phi, idx, depth + 1);
        }
        Section next;
        next.vac = d1.vacuum;
        next.phase = prev.phase * std::conj(ov / std::abs(ov));
        return next;
    }

    void trace(int k, double t_start, const Section& anchor) {
        try {
            Section cur = anchor;
            const double phi = kTwoPi * k / cfg.equator_samples;
            const double t_end = 0.25 * kTwoPi; // pi/2
            for (int s = 1; s <= cfg.meridian_steps; ++s) {
                const double t0 = t_start + (t_end - t_start) * (s - 1) / cfg.meridian_steps;
                const double t1 = t_start + (t_end - t_start) * s / cfg.meridian_steps;
                cur = advance(cur, t0, t1, phi, k, 0);
            }
            out->phase = cur.phase;
            out->ok = true;
        } catch (const DegeneratePointError&) {
        } catch (const RefineError&) {
        }
    }
};

} // namespace detail

/// Clutching computation of c1(Q): trivialize the intertwiner-torsor bundle
/// over the two caps by continuing canonical vacuum phases along meridians,
/// sample the transition on the equator, and take its winding.  Meridians
/// are independent and traced in parallel (FOCKGERBE_THREADS).
inline ChernResult chern_of_q(const FiberFamily& fam, const LagrangianFrame& frame,
                              const ExperimentConfig& cfg) {
    detail::SphereFrame sphere;
    ChernResult result;
    std::vector<Quaternion> sticky_degenerate;
    for (int attempt = 0;; ++attempt) {
        for (const auto& q : result.degenerate_points) sticky_degenerate.push_back(q);
        result = ChernResult{};
        result.retries_used = attempt;
        try {
            const int m = cfg.equator_samples;
            Eigen::VectorXcd transition(m);
            std::vector<cdouble> cap_phase[2];
            const int caps_to_trace = cfg.same_cap_consistency ? 1 : 2;
            for (int capi = 0; capi < caps_to_trace; ++capi) {
                const int cap_sign = capi == 0 ? 1 : -1;
                const char* cap_name = cap_sign > 0 ? "plus" : "minus";
                // anchor at the pole, or on a small ring when the pole is bad
                std::optional<detail::Section> pole_anchor;
                const double t_ring = (0.25 * kTwoPi) / cfg.meridian_steps;
                {
                    detail::EvalOutcome dp = detail::eval_point(
                        sphere.point(0.0, 0.0, cap_sign), 0.0, 0.0, -1, cap_name, fam, frame,
                        cfg);
                    result.records.push_back(dp.record);
                    if (dp.data.degenerate)
                        result.degenerate_points.push_back(dp.record.x);
                    else
                        pole_anchor = detail::Section{dp.data.vacuum, cdouble{1.0, 0.0}};
                }
                std::optional<PairVacuum> ring_ref;
                std::vector<detail::Section> anchors(static_cast<std::size_t>(m));
                std::vector<std::vector<PointRecord>> ring_records(
                    static_cast<std::size_t>(m));
                double t_start = 0.0;
                if (!pole_anchor) {
                    // reference-projection anchor on the ring, continuous across
                    // the singular (never evaluated) cap center
                    t_start = t_ring;
                    std::vector<detail::EvalOutcome> ring(static_cast<std::size_t>(m));
                    std::atomic<bool> ring_degenerate{false};
                    parallel_for(m, [&](int k) {
                        const double phi = kTwoPi * k / m;
                        ring[static_cast<std::size_t>(k)] =
                            detail::eval_point(sphere.point(t_ring, phi, cap_sign), t_ring,
                                               phi, k, cap_name, fam, frame, cfg);
                        if (ring[static_cast<std::size_t>(k)].data.degenerate)
                            ring_degenerate = true;
                    });
                    for (int k = 0; k < m; ++k)
                        ring_records[static_cast<std::size_t>(k)].push_back(
                            ring[static_cast<std::size_t>(k)].record);
                    if (ring_degenerate) {
                        for (auto& e : ring)
                            if (e.data.degenerate) result.degenerate_points.push_back(e.record.x);
                        throw DegeneratePointError("degenerate ring around a singular pole");
                    }
                    ring_ref = ring[0].data.vacuum;
                    for (int k = 0; k < m; ++k) {
                        const cdouble c = pair_vacuum_overlap(
                            *ring_ref, ring[static_cast<std::size_t>(k)].data.vacuum);
                        if (std::abs(c) < cfg.min_step_overlap)
                            throw RefineError("ring anchor overlap too small");
                        anchors[static_cast<std::size_t>(k)] =
                            detail::Section{ring[static_cast<std::size_t>(k)].data.vacuum,
                                            c / std::abs(c)};
                    }
                } else {
                    for (int k = 0; k < m; ++k) anchors[static_cast<std::size_t>(k)] = *pole_anchor;
                }

                std::vector<detail::MeridianOutcome> outcomes(static_cast<std::size_t>(m));
                parallel_for(m, [&](int k) {
                    detail::MeridianTracer tracer{fam, frame, cfg, sphere, cap_sign,
                                                  &outcomes[static_cast<std::size_t>(k)]};
                    tracer.trace(k, t_start, anchors[static_cast<std::size_t>(k)]);
                });

                cap_phase[capi].assign(static_cast<std::size_t>(m), cdouble{1.0, 0.0});
                bool any_degenerate = false, any_refine = false;
                for (int k = 0; k < m; ++k) {
                    auto& o = outcomes[static_cast<std::size_t>(k)];
                    for (auto& r : ring_records[static_cast<std::size_t>(k)])
                        result.records.push_back(r);
                    for (auto& r : o.records) result.records.push_back(r);
                    for (auto& q : o.degenerate_points) result.degenerate_points.push_back(q);
                    any_degenerate = any_degenerate || o.degenerate;
                    any_refine = any_refine || o.refine;
                    cap_phase[capi][static_cast<std::size_t>(k)] = o.phase;
                }
                for (const auto& r : result.records) {
                    if (r.degenerate) continue;
                    result.max_vacuum_residual =
                        std::max(result.max_vacuum_residual, r.vacuum_residual);
                    result.min_sigma_c = std::min(result.min_sigma_c, r.sigma_min_c);
                }
                if (any_degenerate)
                    throw DegeneratePointError("degenerate point on a continuation path");
                if (any_refine) throw RefineError("phase continuation lost track");
            }
            if (cfg.same_cap_consistency) cap_phase[1] = cap_phase[0];
            for (int k = 0; k < m; ++k)
                transition(k) = cap_phase[0][static_cast<std::size_t>(k)] *
                                std::conj(cap_phase[1][static_cast<std::size_t>(k)]);
            result.transition = U1Fn::circle(transition);
            for (int k = 0; k < m; ++k) {
                const double step = std::abs(std::arg(transition((k + 1) % m) / transition(k)));
                result.max_phase_step = std::max(result.max_phase_step, step);
            }
            result.degree = winding_degree(result.transition);
            for (const auto& q : sticky_degenerate) result.degenerate_points.push_back(q);
            return result;
        } catch (const Error&) {
            if (attempt >= cfg.max_retries) throw;
            sphere.perturb(cfg.perturb_eps, attempt);
        }
    }
}

// ---------------------------------------------------------------------------
// reports
// ---------------------------------------------------------------------------

struct RunManifest {
    std::string subcommand;
    unsigned long long seed = 0;
    nlohmann::json config;
};

inline void emit_report(const ChernResult& res, const RunManifest& manifest,
                        const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    {
        std::ofstream csv(out_dir + "/points.csv");
        csv << "cap,index,t,phi,a,c,d,sigma_min_c,vacuum_residual,youla_residual,pairs,"
               "degenerate\n";
        char buf[512];
        for (const auto& r : res.records) {
            std::snprintf(buf, sizeof(buf),
                          "%s,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d\n",
                          r.cap.c_str(), r.index, r.t, r.phi, r.x.a, r.x.c, r.x.d,
                          r.sigma_min_c, r.vacuum_residual, r.youla_residual, r.pairs,
                          r.degenerate ? 1 : 0);
            csv << buf;
        }
    }
    {
        std::ofstream txt(out_dir + "/phase_vs_angle.txt");
        txt << "# phi  unwrapped_arg\n";
        char buf[128];
        double acc = 0.0;
        const auto& v = res.transition.samples;
        for (int k = 0; k < v.size(); ++k) {
            if (k > 0) acc += std::arg(v(k) / v(k - 1));
            std::snprintf(buf, sizeof(buf), "%.17g %.17g\n",
                          kTwoPi * k / static_cast<double>(v.size()), std::arg(v(0)) + acc);
            txt << buf;
        }
    }
    {
        nlohmann::json degs = nlohmann::json::array();
        for (const auto& q : res.degenerate_points) degs.push_back({q.a, q.b, q.c, q.d});
        nlohmann::json j = {{"degree", res.degree},
                            {"retries_used", res.retries_used},
                            {"max_phase_step", res.max_phase_step},
                            {"max_vacuum_residual", res.max_vacuum_residual},
                            {"min_sigma_c", res.min_sigma_c},
                            {"degenerate_points", degs},
                            {"subcommand", manifest.subcommand},
                            {"seed", manifest.seed},
                            {"config", manifest.config}};
        std::ofstream out(out_dir + "/summary.json");
        out << j.dump(2) << "\n";
    }
}


} // namespace fockgerbe
