#pragma once

#include <complex>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "fockgerbe/errors.hpp"
#include "fockgerbe/quaternion.hpp"

namespace fockgerbe {

using cdouble = std::complex<double>;

inline bool is_power_of_two(std::size_t n) { return n >= 1 && (n & (n - 1)) == 0; }

constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Values of a loop [0,2pi) -> C^dim at M uniformly spaced parameters,
/// column k holding the value at s_k = 2 pi k / M.  M must be a power of
/// two >= 8 so discrete Fourier transforms round-trip exactly.
struct SampledLoop {
    Eigen::MatrixXcd values; // dim x M

    SampledLoop() = default;
    SampledLoop(Eigen::Index dim, std::size_t samples) {
        check_count(samples);
        values = Eigen::MatrixXcd::Zero(dim, static_cast<Eigen::Index>(samples));
    }

    static void check_count(std::size_t samples) {
        if (samples < 8 || !is_power_of_two(samples))
            throw SampleCountError("sample count must be a power of two >= 8");
    }

    Eigen::Index dim() const { return values.rows(); }
    std::size_t samples() const { return static_cast<std::size_t>(values.cols()); }
    double param(std::size_t k) const { return kTwoPi * static_cast<double>(k) / static_cast<double>(samples()); }
};

namespace detail {

// In-place iterative radix-2 FFT; sign = -1 forward, +1 inverse (unscaled).
inline void fft_radix2(std::vector<cdouble>& a, int sign) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = static_cast<double>(sign) * kTwoPi / static_cast<double>(len);
        const cdouble wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cdouble w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cdouble u = a[i + k];
                const cdouble v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

} // namespace detail

/// Frequency-indexed Fourier coefficients of a sampled loop.  Frequencies
/// run over [-M/2, M/2); coefficient f reconstructs as
/// v(s) = sum_f coef(f) e^{i f s}.
struct LoopSpectrum {
    std::map<int, Eigen::VectorXcd> coef;

    Eigen::VectorXcd at(int f, Eigen::Index dim) const {
        auto it = coef.find(f);
        if (it == coef.end()) return Eigen::VectorXcd::Zero(dim);
        return it->second;
    }
};

inline LoopSpectrum fourier_of_loop(const SampledLoop& loop) {
    const std::size_t m = loop.samples();
    SampledLoop::check_count(m);
    LoopSpectrum spec;
    std::vector<cdouble> buf(m);
    Eigen::MatrixXcd freq(loop.dim(), static_cast<Eigen::Index>(m));
    for (Eigen::Index r = 0; r < loop.dim(); ++r) {
        for (std::size_t k = 0; k < m; ++k) buf[k] = loop.values(r, static_cast<Eigen::Index>(k));
        detail::fft_radix2(buf, -1);
        for (std::size_t k = 0; k < m; ++k)
            freq(r, static_cast<Eigen::Index>(k)) = buf[k] / static_cast<double>(m);
    }
    const int half = static_cast<int>(m) / 2;
    for (int f = -half; f < half; ++f) {
        const std::size_t bin = static_cast<std::size_t>((f + static_cast<int>(m)) % static_cast<int>(m));
        Eigen::VectorXcd c = freq.col(static_cast<Eigen::Index>(bin));
        if (c.norm() > 0.0) spec.coef[f] = c;
    }
    return spec;
}

inline SampledLoop loop_of_fourier(const LoopSpectrum& spec, Eigen::Index dim, std::size_t samples) {
    SampledLoop out(dim, samples);
    for (std::size_t k = 0; k < samples; ++k) {
        const double s = out.param(k);
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
        for (const auto& [f, c] : spec.coef)
            v += c * std::exp(cdouble(0.0, f * s));
        out.values.col(static_cast<Eigen::Index>(k)) = v;
    }
    return out;
}

/// Band-limited loop of complex n x n matrices sigma(t) = sum_k sigma_k e^{ikt}.
/// A real loop (values in B(R^n)) satisfies conj(sigma_k) = sigma_{-k}.
struct FourierLoop {
    std::map<int, Eigen::MatrixXcd> coef;

    int band() const {
        int b = 0;
        for (const auto& [k, m] : coef)
            if (m.norm() > 0.0) b = std::max(b, std::abs(k));
        return b;
    }

    Eigen::Index n() const {
        if (coef.empty()) return 0;
        return coef.begin()->second.rows();
    }

    Eigen::MatrixXcd at(int k) const {
        auto it = coef.find(k);
        if (it == coef.end()) return Eigen::MatrixXcd::Zero(n(), n());
        return it->second;
    }

    Eigen::MatrixXcd sample(double t) const {
        Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(n(), n());
        for (const auto& [k, m] : coef) v += m * std::exp(cdouble(0.0, k * t));
        return v;
    }

    double real_defect() const {
        double d = 0.0;
        for (const auto& [k, m] : coef) d = std::max(d, (m.conjugate() - at(-k)).norm());
        return d;
    }

    /// max over a sample grid of || sigma(t)^T sigma(t) - 1 ||.
    double orthogonality_defect(std::size_t samples = 64) const {
        double d = 0.0;
        const Eigen::Index nn = n();
        for (std::size_t k = 0; k < samples; ++k) {
            const double t = kTwoPi * static_cast<double>(k) / static_cast<double>(samples);
            const Eigen::MatrixXcd s = sample(t);
            d = std::max(d, (s.adjoint() * s - Eigen::MatrixXcd::Identity(nn, nn)).norm());
        }
        return d;
    }

    static FourierLoop constant(const Eigen::MatrixXd& a) {
        FourierLoop l;
        l.coef[0] = a.cast<cdouble>();
        return l;
    }

    /// Pointwise product (st)(t) = s(t) t(t); coefficients convolve.
    friend FourierLoop operator*(const FourierLoop& s, const FourierLoop& t) {
        FourierLoop out;
        for (const auto& [k1, m1] : s.coef)
            for (const auto& [k2, m2] : t.coef) {
                auto it = out.coef.find(k1 + k2);
                if (it == out.coef.end())
                    out.coef[k1 + k2] = m1 * m2;
                else
                    it->second += m1 * m2;
            }
        return out;
    }
};

/// SO(4)-valued loop of left quaternion multiplications along a quaternion loop.
inline FourierLoop so4_loop_of_quaternion_loop(const SampledLoop& qloop, double unit_tol = 1e-9) {
    if (qloop.dim() != 4) throw Error("quaternion loop must have 4 real components");
    const std::size_t m = qloop.samples();
    SampledLoop mat(16, m);
    for (std::size_t k = 0; k < m; ++k) {
        Quaternion q(qloop.values(0, static_cast<Eigen::Index>(k)).real(),
                     qloop.values(1, static_cast<Eigen::Index>(k)).real(),
                     qloop.values(2, static_cast<Eigen::Index>(k)).real(),
                     qloop.values(3, static_cast<Eigen::Index>(k)).real());
        const Eigen::Matrix4d s = so4_of_quat(q, unit_tol);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c)
                mat.values(r * 4 + c, static_cast<Eigen::Index>(k)) = s(r, c);
    }
    const LoopSpectrum spec = fourier_of_loop(mat);
    FourierLoop out;
    for (const auto& [f, v] : spec.coef) {
        Eigen::MatrixXcd mf(4, 4);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) mf(r, c) = v(r * 4 + c);
        if (mf.norm() > 1e-14) out.coef[f] = mf;
    }
    return out;
}

} // namespace fockgerbe
