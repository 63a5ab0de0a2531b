#pragma once

// Periodic spatial grids, spectral fields with lazily synchronized Fourier
// coefficients, Sobolev norms, random band-limited data, and trajectories.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "dskg/errors.hpp"
#include "dskg/fft.hpp"
#include "dskg/kernels.hpp"

namespace dskg {

struct PeriodicGrid {
    int d = 1;       // spatial dimension, 1 or 2
    int npts = 256;  // points per axis, power of two >= 16

    static constexpr double length = 2.0 * std::numbers::pi;

    void validate() const {
        if (d != 1 && d != 2) throw config_error("grid.d must be 1 or 2");
        if (npts < 16 || (npts & (npts - 1)) != 0)
            throw config_error("grid.npts must be a power of two >= 16");
    }

    std::size_t size() const {
        return d == 1 ? static_cast<std::size_t>(npts)
                      : static_cast<std::size_t>(npts) * npts;
    }

    double x(int i) const { return length * i / npts; }

    // wavenumber of a 1-D index in FFT storage order
    int k_of(int i) const { return i <= npts / 2 ? i : i - npts; }

    double k_squared(std::size_t idx) const {
        if (d == 1) {
            double k = k_of(static_cast<int>(idx));
            return k * k;
        }
        int ky = k_of(static_cast<int>(idx) / npts);
        int kx = k_of(static_cast<int>(idx) % npts);
        return double(kx) * kx + double(ky) * ky;
    }

    bool operator==(const PeriodicGrid&) const = default;
};

class SpectralField {
public:
    SpectralField() = default;

    explicit SpectralField(const PeriodicGrid& g)
        : grid_(g), values_(g.size(), cplx(0.0)), coeffs_(g.size(), cplx(0.0)),
          values_ok_(true), coeffs_ok_(true) {}

    static SpectralField from_values(const PeriodicGrid& g, std::vector<cplx> v) {
        SpectralField f;
        f.grid_ = g;
        f.values_ = std::move(v);
        if (f.values_.size() != g.size())
            throw config_error("SpectralField: value array does not match grid");
        f.values_ok_ = true;
        f.coeffs_ok_ = false;
        return f;
    }

    static SpectralField from_coeffs(const PeriodicGrid& g, std::vector<cplx> c) {
        SpectralField f;
        f.grid_ = g;
        f.coeffs_ = std::move(c);
        if (f.coeffs_.size() != g.size())
            throw config_error("SpectralField: coeff array does not match grid");
        f.coeffs_ok_ = true;
        f.values_ok_ = false;
        return f;
    }

    const PeriodicGrid& grid() const { return grid_; }

    const std::vector<cplx>& values() const {
        sync_values();
        return values_;
    }

    const std::vector<cplx>& coeffs() const {
        sync_coeffs();
        return coeffs_;
    }

    std::vector<cplx>& mutable_values() {
        sync_values();
        coeffs_ok_ = false;
        return values_;
    }

    std::vector<cplx>& mutable_coeffs() {
        sync_coeffs();
        values_ok_ = false;
        return coeffs_;
    }

    SpectralField& operator+=(const SpectralField& o) {
        check_same_grid(o);
        auto& c = mutable_coeffs();
        const auto& oc = o.coeffs();
        for (std::size_t i = 0; i < c.size(); ++i) c[i] += oc[i];
        return *this;
    }

    SpectralField& operator-=(const SpectralField& o) {
        check_same_grid(o);
        auto& c = mutable_coeffs();
        const auto& oc = o.coeffs();
        for (std::size_t i = 0; i < c.size(); ++i) c[i] -= oc[i];
        return *this;
    }

    SpectralField& operator*=(cplx a) {
        auto& c = mutable_coeffs();
        for (auto& v : c) v *= a;
        return *this;
    }

    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(cplx s, SpectralField a) { return a *= s; }

private:
    void check_same_grid(const SpectralField& o) const {
        if (!(grid_ == o.grid_))
            throw numerical_error("SpectralField: grid mismatch in arithmetic");
    }

    void sync_values() const {
        if (values_ok_) return;
        values_ = coeffs_;
        if (grid_.d == 1)
            fft_inverse(values_);
        else
            fft_inverse_2d(values_, grid_.npts, grid_.npts);
        values_ok_ = true;
    }

    void sync_coeffs() const {
        if (coeffs_ok_) return;
        coeffs_ = values_;
        if (grid_.d == 1)
            fft_forward(coeffs_);
        else
            fft_forward_2d(coeffs_, grid_.npts, grid_.npts);
        coeffs_ok_ = true;
    }

    PeriodicGrid grid_;
    mutable std::vector<cplx> values_, coeffs_;
    mutable bool values_ok_ = false, coeffs_ok_ = false;
};

inline SpectralField to_spectral(const SpectralField& f) {
    SpectralField g = f;
    g.coeffs();
    return g;
}

inline SpectralField to_physical(const SpectralField& f) {
    SpectralField g = f;
    g.values();
    return g;
}

// H_s norm via the Fourier multiplier (1+|k|^2)^{s}, with the continuum
// (2pi)^d measure so that s=0 reproduces the L2 norm of the interpolant.
inline double sobolev_norm(const SpectralField& f, double s) {
    const auto& c = f.coeffs();
    const auto& g = f.grid();
    double acc = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i)
        acc += std::pow(1.0 + g.k_squared(i), s) * std::norm(c[i]);
    return std::sqrt(acc * std::pow(PeriodicGrid::length, g.d));
}

inline double l2_norm_physical(const SpectralField& f) {
    const auto& v = f.values();
    const auto& g = f.grid();
    double acc = 0.0;
    for (const auto& z : v) acc += std::norm(z);
    double cell = std::pow(PeriodicGrid::length / g.npts, g.d);
    return std::sqrt(acc * cell);
}

inline double linf_norm(const SpectralField& f) {
    double m = 0.0;
    for (const auto& z : f.values()) m = std::max(m, std::abs(z));
    return m;
}

// 2/3-rule dealiasing: zero every coefficient with an axis wavenumber above
// npts/3.  Applied after pointwise products of fields.
inline void dealias(SpectralField& f) {
    const auto& g = f.grid();
    auto& c = f.mutable_coeffs();
    const int kcut = g.npts / 3;
    if (g.d == 1) {
        for (int i = 0; i < g.npts; ++i)
            if (std::abs(g.k_of(i)) > kcut) c[i] = 0.0;
    } else {
        for (int y = 0; y < g.npts; ++y)
            for (int x = 0; x < g.npts; ++x)
                if (std::abs(g.k_of(x)) > kcut || std::abs(g.k_of(y)) > kcut)
                    c[std::size_t(y) * g.npts + x] = 0.0;
    }
}

inline SpectralField multiply_dealiased(const SpectralField& a, const SpectralField& b) {
    const auto& va = a.values();
    const auto& vb = b.values();
    std::vector<cplx> prod(va.size());
    for (std::size_t i = 0; i < va.size(); ++i) prod[i] = va[i] * vb[i];
    SpectralField out = SpectralField::from_values(a.grid(), std::move(prod));
    dealias(out);
    return out;
}

// ---------------------------------------------------------------------------
// deterministic random fields

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() {  // [0,1)
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double normal() {  // Box-Muller, no cached state
        double u1 = std::max(uniform(), 1e-300);
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 gen_;
};

// Random band-limited field with |c_k| ~ (1+|k|^2)^{-s_weight/2} up to kmax.
// real=true enforces Hermitian symmetry so physical values are real.
inline SpectralField random_field(const PeriodicGrid& g, int kmax, double s_weight,
                                  Rng& rng, bool real = true) {
    std::vector<cplx> c(g.size(), cplx(0.0));
    auto amp = [&](double k2) { return std::pow(1.0 + k2, -0.5 * s_weight); };
    if (g.d == 1) {
        const int n = g.npts;
        c[0] = amp(0.0) * (real ? cplx(rng.normal()) : cplx(rng.normal(), rng.normal()));
        for (int k = 1; k <= std::min(kmax, n / 2 - 1); ++k) {
            cplx zk(rng.normal(), rng.normal());
            c[k] = amp(double(k) * k) * zk / std::sqrt(2.0);
            if (real)
                c[n - k] = std::conj(c[k]);
            else
                c[n - k] = amp(double(k) * k) *
                           cplx(rng.normal(), rng.normal()) / std::sqrt(2.0);
        }
    } else {
        const int n = g.npts;
        for (int ky = -std::min(kmax, n / 2 - 1); ky <= std::min(kmax, n / 2 - 1); ++ky)
            for (int kx = -std::min(kmax, n / 2 - 1); kx <= std::min(kmax, n / 2 - 1); ++kx) {
                if (real && (ky < 0 || (ky == 0 && kx < 0))) continue;
                double k2 = double(kx) * kx + double(ky) * ky;
                if (k2 > double(kmax) * kmax) continue;
                std::size_t ix = std::size_t((ky + n) % n) * n + std::size_t((kx + n) % n);
                cplx zk(rng.normal(), rng.normal());
                if (real && kx == 0 && ky == 0) zk = cplx(zk.real());
                c[ix] = amp(k2) * zk / std::sqrt(2.0);
                if (real && !(kx == 0 && ky == 0)) {
                    std::size_t ixm =
                        std::size_t((n - ky) % n) * n + std::size_t((n - kx) % n);
                    c[ixm] = std::conj(c[ix]);
                }
            }
    }
    return SpectralField::from_coeffs(g, std::move(c));
}

// ---------------------------------------------------------------------------
// named data profiles (shared by solvers and configs)

inline SpectralField field_constant(const PeriodicGrid& g, cplx value) {
    return SpectralField::from_values(g, std::vector<cplx>(g.size(), value));
}

inline SpectralField field_cos(const PeriodicGrid& g, int k, double amp = 1.0) {
    std::vector<cplx> v(g.size());
    if (g.d == 1) {
        for (int i = 0; i < g.npts; ++i) v[i] = amp * std::cos(k * g.x(i));
    } else {
        for (int y = 0; y < g.npts; ++y)
            for (int x = 0; x < g.npts; ++x)
                v[std::size_t(y) * g.npts + x] =
                    amp * std::cos(k * g.x(x)) * std::cos(k * g.x(y));
    }
    return SpectralField::from_values(g, std::move(v));
}

// smooth periodic bump exp(kappa(cos x - 1)), positive, analytic
inline SpectralField field_gaussian(const PeriodicGrid& g, double kappa = 8.0,
                                    double amp = 1.0) {
    std::vector<cplx> v(g.size());
    if (g.d == 1) {
        for (int i = 0; i < g.npts; ++i)
            v[i] = amp * std::exp(kappa * (std::cos(g.x(i) - std::numbers::pi) - 1.0));
    } else {
        for (int y = 0; y < g.npts; ++y)
            for (int x = 0; x < g.npts; ++x)
                v[std::size_t(y) * g.npts + x] =
                    amp * std::exp(kappa * (std::cos(g.x(x) - std::numbers::pi) +
                                            std::cos(g.x(y) - std::numbers::pi) - 2.0));
    }
    return SpectralField::from_values(g, std::move(v));
}

// positive bump (1+cos x)/2 (per-axis product in d=2)
inline SpectralField field_bump(const PeriodicGrid& g, double amp = 1.0) {
    std::vector<cplx> v(g.size());
    if (g.d == 1) {
        for (int i = 0; i < g.npts; ++i)
            v[i] = amp * 0.5 * (1.0 + std::cos(g.x(i) - std::numbers::pi));
    } else {
        for (int y = 0; y < g.npts; ++y)
            for (int x = 0; x < g.npts; ++x)
                v[std::size_t(y) * g.npts + x] =
                    amp * 0.25 * (1.0 + std::cos(g.x(x) - std::numbers::pi)) *
                    (1.0 + std::cos(g.x(y) - std::numbers::pi));
    }
    return SpectralField::from_values(g, std::move(v));
}

// ---------------------------------------------------------------------------

// Time-indexed sequence of fields with cached H_s norms at params.s.
struct Trajectory {
    ModelParams params;
    std::vector<double> times;
    std::vector<SpectralField> fields;
    std::vector<double> hs_norms;

    void push(double t, SpectralField f) {
        if (!times.empty() && t <= times.back())
            throw numerical_error("Trajectory: times must be strictly increasing");
        hs_norms.push_back(sobolev_norm(f, params.s));
        times.push_back(t);
        fields.push_back(std::move(f));
    }

    std::size_t size() const { return times.size(); }
};

// sup_t e^{gamma t} ||psi(t)||_{H_s} over the stored samples
inline double weighted_sup_norm(const Trajectory& traj, double gamma) {
    if (traj.times.empty())
        throw numerical_error("weighted_sup_norm: empty trajectory");
    double m = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        m = std::max(m, std::exp(gamma * traj.times[i]) * traj.hs_norms[i]);
    return m;
}

}  // namespace dskg
