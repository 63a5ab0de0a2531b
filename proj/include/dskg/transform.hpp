#pragma once

// The integral-transform solution machinery: operator K (double integral of
// the wave solution against the kernel E), the composition G = K o EE, the
// full linear representation with its K0/K1 data terms, the M = 1/2
// specialization with constant kernels, and the time-derivative
// representation built from dE/dt and the characteristic boundary identity.

#include <cmath>
#include <functional>
#include <vector>

#include "dskg/evolution.hpp"
#include "dskg/field.hpp"
#include "dskg/kernels.hpp"
#include "dskg/parallel.hpp"
#include "dskg/quadrature.hpp"

namespace dskg {

// Node counts for the tensor-product Gauss-Legendre rules: nb outer nodes in
// b over [0,t], nr inner nodes in r over [0, e^{-b}-e^{-t}], ns nodes in s
// over [0,1] for the data terms.  Open rules, so the K0 singular endpoint is
// never touched.
struct QuadratureSpec {
    int nb = 64;
    int nr = 64;
    int ns = 64;

    void validate() const {
        if (nb < 16 || nr < 16 || ns < 16)
            throw config_error("quad node counts must all be >= 16");
    }
};

inline double phi_of_t(double t) {
    if (t < 0.0) throw domain_error("phi_of_t: t must be >= 0");
    return 1.0 - std::exp(-t);
}

struct LinearProblem {
    ModelParams params;
    SpectralField psi0;
    SpectralField psi1;
    std::function<SpectralField(double)> source;  // t -> field; may be empty
    QuadratureSpec quad;
};

// Precomputed quadrature nodes and kernel values for K[.](x,t); reusable
// across Picard iterations, where the kernel factor never changes.
struct KPlan {
    double t = 0.0;
    int n = 3;
    cplx M{};
    struct BNode {
        double b, wb, rmax;
        std::vector<double> r, wr;
        std::vector<cplx> E;  // E(r_i, t; 0, b; M)
    };
    std::vector<BNode> nodes;

    static KPlan build(double t, cplx M, int n, const QuadratureSpec& quad) {
        quad.validate();
        if (!(t > 0.0)) throw domain_error("KPlan: t must be > 0");
        KPlan plan;
        plan.t = t;
        plan.n = n;
        plan.M = M;
        const auto& rb = gauss_legendre(quad.nb);
        const auto& rr = gauss_legendre(quad.nr);
        plan.nodes.resize(quad.nb);
        const double emt = std::exp(-t);
        parallel_for(quad.nb, [&](std::size_t j) {
            auto& node = plan.nodes[j];
            node.b = 0.5 * t * (1.0 + rb.nodes[j]);
            node.wb = 0.5 * t * rb.weights[j];
            node.rmax = std::exp(-node.b) - emt;
            node.r.resize(quad.nr);
            node.wr.resize(quad.nr);
            node.E.resize(quad.nr);
            for (int i = 0; i < quad.nr; ++i) {
                node.r[i] = 0.5 * node.rmax * (1.0 + rr.nodes[i]);
                node.wr[i] = 0.5 * node.rmax * rr.weights[i];
                node.E[i] = kernel_E({node.r[i], t, node.b}, M);
            }
        });
        return plan;
    }
};

// K[v](x,t) = 2 e^{-nt/2} int_0^t db int_0^{e^{-b}-e^{-t}} dr e^{nb/2}
//             v(x,r;b) E(r,t;0,b;M), with v supplied as (r,b) -> field.
inline SpectralField apply_K_plan(const KPlan& plan,
                                  const std::function<SpectralField(double, double)>& v) {
    SpectralField acc;
    bool first = true;
    for (const auto& node : plan.nodes) {
        const double eb = std::exp(0.5 * plan.n * node.b);
        for (std::size_t i = 0; i < node.r.size(); ++i) {
            SpectralField term = v(node.r[i], node.b);
            term *= cplx(node.wb * node.wr[i] * eb) * node.E[i];
            if (first) {
                acc = std::move(term);
                first = false;
            } else {
                acc += term;
            }
        }
    }
    if (first) throw numerical_error("apply_K: empty quadrature");
    acc *= cplx(2.0 * std::exp(-0.5 * plan.n * plan.t));
    return acc;
}

inline SpectralField apply_K(const std::function<SpectralField(double, double)>& v,
                             double t, cplx M, int n, const QuadratureSpec& quad) {
    return apply_K_plan(KPlan::build(t, M, n, quad), v);
}

// G[f](x,t) = K[EE[f]](x,t): solve the wave problem with datum f(.,b) and
// integrate.  The wave solve is exact per mode, so the datum coefficients are
// computed once per b node and the r dependence is a cosine multiplier.
inline SpectralField apply_G_plan(const KPlan& plan,
                                  const std::function<SpectralField(double)>& f) {
    const int nb = static_cast<int>(plan.nodes.size());
    std::vector<std::vector<cplx>> partial(nb);

    parallel_for(nb, [&](std::size_t j) {
        const auto& node = plan.nodes[j];
        SpectralField datum = f(node.b);
        const auto& g = datum.grid();
        const auto& dc = datum.coeffs();
        const double eb = std::exp(0.5 * plan.n * node.b);
        std::vector<cplx> sum(dc.size(), cplx(0.0));
        for (std::size_t i = 0; i < node.r.size(); ++i) {
            const cplx w = cplx(node.wb * node.wr[i] * eb) * node.E[i];
            const double r = node.r[i];
            for (std::size_t m = 0; m < dc.size(); ++m) {
                double k = std::sqrt(g.k_squared(m));
                sum[m] += w * (dc[m] * std::cos(k * r));
            }
        }
        partial[j] = std::move(sum);
    });

    // deterministic ordered reduction
    SpectralField datum0 = f(plan.nodes.front().b);
    std::vector<cplx> total(datum0.grid().size(), cplx(0.0));
    for (int j = 0; j < nb; ++j)
        for (std::size_t m = 0; m < total.size(); ++m) total[m] += partial[j][m];
    const cplx pref(2.0 * std::exp(-0.5 * plan.n * plan.t));
    for (auto& z : total) z *= pref;
    return SpectralField::from_coeffs(datum0.grid(), std::move(total));
}

inline SpectralField apply_G(const std::function<SpectralField(double)>& f, double t,
                             const ModelParams& params, const QuadratureSpec& quad) {
    return apply_G_plan(KPlan::build(t, params.M, params.n, quad), f);
}

namespace detail {

// wave solution of datum at radius rho (zero velocity), exact per mode
inline SpectralField wave_at(const SpectralField& datum, double rho) {
    const auto& g = datum.grid();
    const auto& c = datum.coeffs();
    std::vector<cplx> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i)
        out[i] = c[i] * std::cos(std::sqrt(g.k_squared(i)) * rho);
    return SpectralField::from_coeffs(g, std::move(out));
}

}  // namespace detail

// Full linear representation: source double integral followed by the three
// data terms (boundary wave term, the (2K0 + nK1) psi0 integral, and the
// 2K1 psi1 integral), each quadratured per QuadratureSpec.
inline SpectralField linear_solution(const LinearProblem& p, double t) {
    p.quad.validate();
    if (!(t > 0.0)) throw domain_error("linear_solution: t must be > 0");
    const int n = p.params.n;
    const cplx M = p.params.M;
    const double phi = phi_of_t(t);
    const double damp_n = std::exp(-0.5 * n * t);

    // data term 1: e^{-(n-1)t/2} v_{psi0}(x, phi(t))
    SpectralField acc = detail::wave_at(p.psi0, phi);
    acc *= cplx(std::exp(-0.5 * (n - 1) * t));

    // data terms 2 and 3: s integrals over [0,1] with the K0/K1 kernels
    const auto& rule = gauss_legendre(p.quad.ns);
    for (int i = 0; i < p.quad.ns; ++i) {
        const double s = 0.5 * (1.0 + rule.nodes[i]);
        const double w = 0.5 * rule.weights[i];
        const double z = phi * s;
        const cplx k0 = kernel_K0(z, t, M);
        const cplx k1 = kernel_K1(z, t, M);

        SpectralField v0 = detail::wave_at(p.psi0, z);
        v0 *= cplx(w * damp_n * phi) * (2.0 * k0 + double(n) * k1);
        acc += v0;

        SpectralField v1 = detail::wave_at(p.psi1, z);
        v1 *= cplx(2.0 * w * damp_n * phi) * k1;
        acc += v1;
    }

    if (p.source) {
        acc += apply_G(p.source, t, p.params, p.quad);
    }
    return acc;
}

// M = 1/2 specialization: all kernels collapse to constants and the
// representation becomes four elementary integrals.
inline SpectralField linear_solution_M_half(const LinearProblem& p, double t) {
    p.quad.validate();
    if (!(t > 0.0)) throw domain_error("linear_solution_M_half: t must be > 0");
    const int n = p.params.n;
    const double phi = phi_of_t(t);
    const double pref = std::exp(-0.5 * (n - 1) * t);

    SpectralField acc = detail::wave_at(p.psi0, phi);

    const auto& rule = gauss_legendre(p.quad.ns);
    for (int i = 0; i < p.quad.ns; ++i) {
        const double sigma = 0.5 * phi * (1.0 + rule.nodes[i]);
        const double w = 0.5 * phi * rule.weights[i];

        SpectralField v0 = detail::wave_at(p.psi0, sigma);
        v0 *= cplx(w * 0.5 * (n - 1));
        acc += v0;

        SpectralField v1 = detail::wave_at(p.psi1, sigma);
        v1 *= cplx(w);
        acc += v1;
    }
    acc *= cplx(pref);

    if (p.source) {
        // e^{-(n-1)t/2} int_0^t e^{(n+1)b/2} db int_0^{e^{-b}-e^{-t}} v dr
        const auto& rb = gauss_legendre(p.quad.nb);
        const auto& rr = gauss_legendre(p.quad.nr);
        const double emt = std::exp(-t);
        SpectralField src;
        bool first = true;
        for (int j = 0; j < p.quad.nb; ++j) {
            const double b = 0.5 * t * (1.0 + rb.nodes[j]);
            const double wb = 0.5 * t * rb.weights[j];
            const double rmax = std::exp(-b) - emt;
            SpectralField datum = p.source(b);
            for (int i = 0; i < p.quad.nr; ++i) {
                const double r = 0.5 * rmax * (1.0 + rr.nodes[i]);
                const double wr = 0.5 * rmax * rr.weights[i];
                SpectralField term = detail::wave_at(datum, r);
                term *= cplx(wb * wr * std::exp(0.5 * (n + 1) * b));
                if (first) {
                    src = std::move(term);
                    first = false;
                } else {
                    src += term;
                }
            }
        }
        src *= cplx(pref);
        acc += src;
    }
    return acc;
}

// d/dt of the representation.  For the source part the derivative is exact:
//   -(n/2) psi + boundary term (E on the characteristic = e^{(b+t)/2}/2)
//   + the dE/dt double integral.
// Data terms are differentiated by fourth-order central differences in t.
inline SpectralField linear_solution_dt(const LinearProblem& p, double t) {
    p.quad.validate();
    if (!(t > 0.0)) throw domain_error("linear_solution_dt: t must be > 0");
    const int n = p.params.n;
    const cplx M = p.params.M;

    SpectralField acc;
    bool have = false;

    if (p.source) {
        LinearProblem src_only = p;
        src_only.psi0 = SpectralField(p.psi0.grid());
        src_only.psi1 = SpectralField(p.psi1.grid());
        SpectralField psi_src = linear_solution(src_only, t);
        psi_src *= cplx(-0.5 * n);
        acc = std::move(psi_src);
        have = true;

        const auto& rb = gauss_legendre(p.quad.nb);
        const auto& rr = gauss_legendre(p.quad.nr);
        const double emt = std::exp(-t);
        const double damp = std::exp(-0.5 * n * t);
        for (int j = 0; j < p.quad.nb; ++j) {
            const double b = 0.5 * t * (1.0 + rb.nodes[j]);
            const double wb = 0.5 * t * rb.weights[j];
            const double rmax = std::exp(-b) - emt;
            SpectralField datum = p.source(b);

            // boundary term from the moving r-limit: the chain rule brings the
            // Jacobian d/dt(e^{-b}-e^{-t}) = e^{-t} against the characteristic
            // value E = e^{(b+t)/2}/2
            SpectralField bnd = detail::wave_at(datum, rmax);
            bnd *= cplx(2.0 * damp * wb * std::exp(0.5 * n * b) * emt * 0.5 *
                        std::exp(0.5 * (b + t)));
            acc += bnd;

            for (int i = 0; i < p.quad.nr; ++i) {
                const double r = 0.5 * rmax * (1.0 + rr.nodes[i]);
                const double wr = 0.5 * rmax * rr.weights[i];
                SpectralField term = detail::wave_at(datum, r);
                term *= cplx(2.0 * damp * wb * wr * std::exp(0.5 * n * b)) *
                        kernel_dE_dt(r, t, b, M);
                acc += term;
            }
        }
    }

    const double n0 = sobolev_norm(p.psi0, 0.0), n1 = sobolev_norm(p.psi1, 0.0);
    if (n0 > 0.0 || n1 > 0.0) {
        LinearProblem data_only = p;
        data_only.source = nullptr;
        const double h = std::min(1e-4, 0.25 * t);
        auto at = [&](double tt) { return linear_solution(data_only, tt); };
        SpectralField fd = cplx(-1.0) * at(t + 2.0 * h) + cplx(8.0) * at(t + h);
        fd += cplx(-8.0) * at(t - h) + at(t - 2.0 * h);
        fd *= cplx(1.0 / (12.0 * h));
        if (have)
            acc += fd;
        else {
            acc = std::move(fd);
            have = true;
        }
    }

    if (!have) return SpectralField(p.psi0.grid());
    return acc;
}

}  // namespace dskg
