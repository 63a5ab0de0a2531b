#pragma once

// Kernel functions E, K0, K1 and dE/dt of the integral transform for the
// damped wave equation on an exponentially contracting background, for
// complex mass parameter M.  M = 1/2 and M = 3/2 admit closed forms used as
// exact anchors in the tests.

#include <cmath>
#include <complex>
#include <string>

#include "dskg/errors.hpp"
#include "dskg/specfun.hpp"

namespace dskg {

// Physical configuration shared by every solver.
//   n     damping coefficient (spatial dimension of the model)
//   m2    mass squared, possibly complex
//   M     principal square root of n^2/4 - m2 (Re M >= 0)
//   s     Sobolev index
//   alpha nonlinearity exponent
struct ModelParams {
    int n = 3;
    cplx m2{0.0, 0.0};
    cplx M{0.0, 0.0};
    double s = 2.0;
    double alpha = 0.0;

    static ModelParams from_m2(int n, cplx m2, double s, double alpha = 0.0) {
        ModelParams p;
        p.n = n;
        p.m2 = m2;
        p.M = principal_root(n, m2);
        p.s = s;
        p.alpha = alpha;
        return p;
    }

    static ModelParams from_M(int n, cplx M, double s, double alpha = 0.0) {
        ModelParams p;
        p.n = n;
        p.M = M;
        p.m2 = cplx(0.25 * n * n) - M * M;
        p.s = s;
        p.alpha = alpha;
        return p;
    }

    static cplx principal_root(int n, cplx m2) {
        cplx M = std::sqrt(cplx(0.25 * n * n) - m2);
        if (M.real() < 0.0) M = -M;
        return M;
    }

    void validate() const {
        cplx resid = M * M - (cplx(0.25 * n * n) - m2);
        if (std::abs(resid) > 1e-12 * (1.0 + std::abs(m2)))
            throw config_error("ModelParams: M^2 != n^2/4 - m2 (residual " +
                               std::to_string(std::abs(resid)) + ")");
        if (M.real() < 0.0)
            throw config_error("ModelParams: Re M must be >= 0 (principal branch)");
        if (n < 1) throw config_error("ModelParams: n must be a positive integer");
    }
};

// Arguments of E(r,t;0,t0;M): spatial offset r >= 0 and times t > t0 >= 0.
struct KernelArgs {
    double r = 0.0;
    double t = 1.0;
    double t0 = 0.0;
};

struct KernelEval {
    cplx value;
    Hyp2f1Branch branch;
    double f_est_abs_error;
};

namespace detail {

// principal power of a positive real base
inline cplx rpow(double base, cplx w) {
    if (!(base > 0.0))
        throw numerical_error("kernel: non-positive power base (domain violated)");
    return std::exp(w * std::log(base));
}

inline cplx pow4(cplx w) { return std::exp(-w * std::log(4.0)); }  // 4^{-w}

}  // namespace detail

inline KernelEval kernel_E_diag(const KernelArgs& a, cplx M) {
    const double r = a.r, t = a.t, t0 = a.t0;
    const double limit = std::exp(-t0) - std::exp(-t);
    if (r < 0.0 || t < 0.0 || t0 < 0.0 || t <= t0)
        throw domain_error("kernel_E: requires r >= 0 and t > t0 >= 0");
    if (r > limit + 1e-12 * (1.0 + limit))
        throw domain_error("kernel_E: r exceeds e^{-t0} - e^{-t}");

    const double u = std::exp(-t0), w = std::exp(-t);
    const double D = (w + u) * (w + u) - r * r;
    const double N = (u - w) * (u - w) - r * r;
    double zeta = N / D;
    if (zeta < 0.0) zeta = 0.0;  // clamp boundary rounding
    auto F = hyp2f1({0.5 - M, 0.5 - M, cplx(1.0), zeta});
    cplx val = detail::pow4(M) * std::exp(M * (t0 + t)) *
               detail::rpow(D, M - 0.5) * F.value;
    return {val, F.branch, F.est_abs_error};
}

inline cplx kernel_E(const KernelArgs& a, cplx M) { return kernel_E_diag(a, M).value; }

// K1(z,t;M) = E(z,t;0,0;M), supported on 0 <= z <= 1 - e^{-t}.
inline KernelEval kernel_K1_diag(double z, double t, cplx M) {
    return kernel_E_diag({z, t, 0.0}, M);
}

inline cplx kernel_K1(double z, double t, cplx M) {
    return kernel_K1_diag(z, t, M).value;
}

// K0(z,t;M) = -d/db E(z,t;0,b;M) at b=0; the written-out two-term form.
// The factor (1-e^{-t})^2 - z^2 vanishes at z = 1-e^{-t}; evaluation within
// 1e-12 of that boundary is refused rather than extrapolated.
inline KernelEval kernel_K0_diag(double z, double t, cplx M) {
    if (z < 0.0 || t <= 0.0) throw domain_error("kernel_K0: requires z >= 0, t > 0");
    const double w = std::exp(-t);
    const double zmax = 1.0 - w;
    if (z >= zmax - 1e-12)
        throw domain_error("kernel_K0: z within 1e-12 of the singular boundary 1-e^{-t}");

    const double A = (1.0 + w) * (1.0 + w) - z * z;
    const double B = (1.0 - w) * (1.0 - w) - z * z;
    const double zeta = B / A;
    auto F1 = hyp2f1({0.5 - M, 0.5 - M, cplx(1.0), zeta});
    auto F2 = hyp2f1({-0.5 - M, 0.5 - M, cplx(1.0), zeta});
    cplx bracket = (cplx(w - 1.0) + M * (w * w - 1.0 - z * z)) * F1.value +
                   (1.0 - w * w + z * z) * (0.5 + M) * F2.value;
    cplx val = detail::pow4(M) * std::exp(M * t) * detail::rpow(A, M) * bracket /
               (B * std::sqrt(A));
    return {val, F1.branch, F1.est_abs_error + F2.est_abs_error};
}

inline cplx kernel_K0(double z, double t, cplx M) {
    return kernel_K0_diag(z, t, M).value;
}

// dE/dt(r,t;0,b;M), product-rule form: (d/dt prefactor)*F plus
// prefactor * F'(zeta) * dzeta/dt with F' = (1/2-M)^2 F(3/2-M,3/2-M;2;zeta).
inline KernelEval kernel_dE_dt_diag(double r, double t, double b, cplx M) {
    const double limit = std::exp(-b) - std::exp(-t);
    if (r < 0.0 || b < 0.0 || t <= b)
        throw domain_error("kernel_dE_dt: requires r >= 0 and t > b >= 0");
    if (r > limit + 1e-12 * (1.0 + limit))
        throw domain_error("kernel_dE_dt: r exceeds e^{-b} - e^{-t}");

    const double u = std::exp(-b), w = std::exp(-t);
    const double D = (u + w) * (u + w) - r * r;
    const double N = (u - w) * (u - w) - r * r;
    double zeta = N / D;
    if (zeta < 0.0) zeta = 0.0;

    auto F = hyp2f1({0.5 - M, 0.5 - M, cplx(1.0), zeta});
    auto Fp = hyp2f1({1.5 - M, 1.5 - M, cplx(2.0), zeta});

    const cplx c4 = detail::pow4(M);
    const cplx eM = std::exp(M * (b + t));

    // d/dt [ 4^{-M} e^{M(b+t)} D^{M-1/2} ], with dD/dt = -2(u+w)w
    cplx dpref = c4 * eM * (M * detail::rpow(D, M - 0.5) +
                            (M - 0.5) * (-2.0 * (u + w) * w) * detail::rpow(D, M - 1.5));

    // dzeta/dt = 4uw(u^2 - w^2 - r^2)/D^2
    const double dzeta = 4.0 * u * w * (u * u - w * w - r * r) / (D * D);
    cplx dF = (0.5 - M) * (0.5 - M) * Fp.value * dzeta;

    cplx val = dpref * F.value + c4 * eM * detail::rpow(D, M - 0.5) * dF;
    return {val, F.branch, F.est_abs_error + Fp.est_abs_error};
}

inline cplx kernel_dE_dt(double r, double t, double b, cplx M) {
    return kernel_dE_dt_diag(r, t, b, M).value;
}

// Closed forms at the distinguished masses (test anchors).
namespace closed_form {

inline cplx E_half(double t0, double t) { return 0.5 * std::exp(0.5 * (t0 + t)); }
inline cplx K0_half(double t) { return -0.25 * std::exp(0.5 * t); }
inline cplx K1_half(double t) { return 0.5 * std::exp(0.5 * t); }

inline cplx E_threehalf(double r, double t, double b) {
    return 0.25 * std::exp(-0.5 * b - 0.5 * t) *
           (std::exp(2.0 * b) + std::exp(2.0 * t) -
            r * r * std::exp(2.0 * (b + t)));
}

inline cplx dE_dt_threehalf(double r, double t, double b) {
    return 0.125 * std::exp(-0.5 * b - 0.5 * t) *
           (3.0 * std::exp(2.0 * t) - 3.0 * r * r * std::exp(2.0 * (b + t)) -
            std::exp(2.0 * b));
}

}  // namespace closed_form

}  // namespace dskg
