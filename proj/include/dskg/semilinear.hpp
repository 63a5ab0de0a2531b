#pragma once

// Semilinear layer: the nonlinearity catalog (signed power, absolute power,
// cubic), an empirical Lipschitz-constant probe, Picard iteration on the
// integral equation psi = psi0 + G[F(psi)], and the blow-up lifespan sweep.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dskg/errors.hpp"
#include "dskg/evolution.hpp"
#include "dskg/field.hpp"
#include "dskg/parallel.hpp"
#include "dskg/transform.hpp"

namespace dskg {

enum class NonlinearKind { power_signed, power_abs, cubic };

// F(0) = 0 for every kind:
//   power_signed: sign |psi|^alpha psi
//   power_abs:    sign |psi|^{alpha+1}
//   cubic:        -lambda psi^3      (Higgs-type coupling, lambda > 0)
struct NonlinearSpec {
    NonlinearKind kind = NonlinearKind::cubic;
    double sign = 1.0;
    double alpha = 2.0;
    double lambda = 1.0;

    void validate() const {
        if (kind != NonlinearKind::cubic && !(alpha > 0.0))
            throw config_error("nonlinearity.alpha must be > 0");
        if (sign != 1.0 && sign != -1.0)
            throw config_error("nonlinearity.sign must be +1 or -1");
    }

    // exponent in the Lipschitz condition ||F(u)-F(v)|| <= C||u-v||(||u||^a+||v||^a)
    double condition_exponent() const {
        return kind == NonlinearKind::cubic ? 2.0 : alpha;
    }

    bool polynomial() const {
        if (kind == NonlinearKind::cubic) return true;
        return std::abs(alpha - std::round(alpha)) < 1e-12;
    }
};

inline SpectralField eval_nonlinearity(const NonlinearSpec& F, const SpectralField& psi) {
    const auto& v = psi.values();
    std::vector<cplx> out(v.size());
    switch (F.kind) {
        case NonlinearKind::power_signed:
            for (std::size_t i = 0; i < v.size(); ++i)
                out[i] = F.sign * std::pow(std::abs(v[i]), F.alpha) * v[i];
            break;
        case NonlinearKind::power_abs:
            for (std::size_t i = 0; i < v.size(); ++i)
                out[i] = F.sign * std::pow(std::abs(v[i]), F.alpha + 1.0);
            break;
        case NonlinearKind::cubic:
            for (std::size_t i = 0; i < v.size(); ++i)
                out[i] = -F.lambda * v[i] * v[i] * v[i];
            break;
    }
    SpectralField r = SpectralField::from_values(psi.grid(), std::move(out));
    if (F.polynomial()) dealias(r);
    return r;
}

inline NonlinearFn to_nonlinear_fn(const NonlinearSpec& F) {
    return [F](const SpectralField& psi, double) { return eval_nonlinearity(F, psi); };
}

// ---------------------------------------------------------------------------
// empirical Lipschitz probe

struct LipschitzProbe {
    double C_emp = 0.0;      // max observed constant in the Lipschitz bound
    double alpha_emp = 0.0;  // log-log slope of the difference quotient
};

inline LipschitzProbe lipschitz_probe(const NonlinearSpec& F, const PeriodicGrid& g,
                                      double s, int n_samples, double radius,
                                      std::uint64_t seed = 0) {
    F.validate();
    Rng rng(seed + 1);
    const double a = F.condition_exponent();
    LipschitzProbe probe;
    double slope_acc = 0.0;
    int slope_cnt = 0;

    for (int trial = 0; trial < n_samples; ++trial) {
        auto u = random_field(g, g.npts / 4, s, rng);
        auto w = random_field(g, g.npts / 4, s, rng);
        double nu = sobolev_norm(u, s), nw = sobolev_norm(w, s);
        u *= cplx(radius * (0.25 + 0.75 * rng.uniform()) / nu);
        w *= cplx(radius * (0.25 + 0.75 * rng.uniform()) / nw);

        SpectralField diff = u;
        diff -= w;
        double dn = sobolev_norm(diff, s);
        if (dn < 1e-14) continue;
        nu = sobolev_norm(u, s);
        nw = sobolev_norm(w, s);

        SpectralField fd = eval_nonlinearity(F, u);
        fd -= eval_nonlinearity(F, w);
        double num = sobolev_norm(fd, s);
        probe.C_emp = std::max(probe.C_emp,
                               num / (dn * (std::pow(nu, a) + std::pow(nw, a))));

        // scaling slope: N(lam) = ||F(lam u)-F(lam w)|| / ||lam u - lam w||
        // behaves like lam^a near the origin
        std::vector<double> lx, ly;
        for (double lam : {0.25, 0.5, 1.0}) {
            SpectralField ul = cplx(lam) * u, wl = cplx(lam) * w;
            SpectralField d2 = eval_nonlinearity(F, ul);
            d2 -= eval_nonlinearity(F, wl);
            double q = sobolev_norm(d2, s) / (lam * dn);
            if (q > 0.0) {
                lx.push_back(std::log(lam));
                ly.push_back(std::log(q));
            }
        }
        if (lx.size() >= 2) {
            double mx = 0.0, my = 0.0;
            for (std::size_t i = 0; i < lx.size(); ++i) {
                mx += lx[i];
                my += ly[i];
            }
            mx /= lx.size();
            my /= ly.size();
            double sxy = 0.0, sxx = 0.0;
            for (std::size_t i = 0; i < lx.size(); ++i) {
                sxy += (lx[i] - mx) * (ly[i] - my);
                sxx += (lx[i] - mx) * (lx[i] - mx);
            }
            slope_acc += sxy / sxx;
            ++slope_cnt;
        }
    }
    if (slope_cnt > 0) probe.alpha_emp = slope_acc / slope_cnt;
    return probe;
}

// ---------------------------------------------------------------------------
// Picard iteration

struct PicardConfig {
    double eps = 1e-3;       // data size (reported, drives defaults)
    double R = 0.0;          // ball radius; defaults to 2*eps
    double gamma = 1.0;      // weight of the X norm
    double tol = 1e-11;      // fixed-point tolerance in the X norm
    int max_iter = 25;
    double T = 8.0;          // time horizon truncating the sup over [0,inf)
    QuadratureSpec quad{48, 48, 48};
    int n_time_samples = 32;

    void validate() const {
        if (!(tol > 0.0)) throw config_error("picard.tol must be > 0");
        if (!(T > 0.0)) throw config_error("picard.T must be > 0");
        if (n_time_samples < 4) throw config_error("picard.n_time_samples too small");
    }

    double ball_radius() const { return R > 0.0 ? R : 2.0 * eps; }
};

// geometric time grid on [0,T], dense near 0, including t = 0
inline std::vector<double> picard_time_grid(double T, int n) {
    std::vector<double> ts{0.0};
    const double c = 2.5;
    for (int i = 1; i <= n; ++i)
        ts.push_back(T * (std::exp(c * i / n) - 1.0) / (std::exp(c) - 1.0));
    return ts;
}

// free linear solution sampled on a grid that includes t = 0
inline Trajectory free_solution_trajectory(const LinearProblem& p,
                                           const std::vector<double>& times) {
    Trajectory traj;
    traj.params = p.params;
    for (double t : times) {
        if (t == 0.0)
            traj.push(0.0, p.psi0);
        else
            traj.push(t, linear_solution(p, t));
    }
    return traj;
}

struct PicardReport {
    bool converged = false;
    int iterations = 0;
    std::vector<double> distances;  // weighted X distances between iterates
    double contraction_ratio = 0.0; // last observed d_{k+1}/d_k
    double weighted_norm = 0.0;     // X norm of the converged trajectory
    double residual = 0.0;          // ||psi - psi0 - G[F(psi)]||_X
    double truncation_T = 0.0;
    double tail_weighted_norm = 0.0;  // e^{gamma T}||psi(T)|| (horizon check)
};

namespace detail {

// linear interpolation of nonlinearity snapshots in time, coefficient-wise
inline SpectralField interp_fields(const std::vector<double>& ts,
                                   const std::vector<SpectralField>& fs, double b) {
    if (b <= ts.front()) return fs.front();
    if (b >= ts.back()) return fs.back();
    std::size_t hi = 1;
    while (ts[hi] < b) ++hi;
    const double w = (b - ts[hi - 1]) / (ts[hi] - ts[hi - 1]);
    const auto& ca = fs[hi - 1].coeffs();
    const auto& cb = fs[hi].coeffs();
    std::vector<cplx> out(ca.size());
    for (std::size_t i = 0; i < ca.size(); ++i)
        out[i] = (1.0 - w) * ca[i] + w * cb[i];
    return SpectralField::from_coeffs(fs.front().grid(), std::move(out));
}

inline double x_distance(const Trajectory& a, const Trajectory& b, double gamma,
                         double s) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.times.size(); ++i) {
        SpectralField d = a.fields[i];
        d -= b.fields[i];
        m = std::max(m, std::exp(gamma * a.times[i]) * sobolev_norm(d, s));
    }
    return m;
}

}  // namespace detail

// Successive substitution psi^{k+1} = psi0 + G[F(psi^k)] on the sample grid
// of psi0_free.  The kernel quadrature plans are built once and reused; each
// iteration only re-evaluates the nonlinearity and the wave solves.
inline std::pair<Trajectory, PicardReport> picard_solve(const Trajectory& psi0_free,
                                                        const NonlinearSpec& F,
                                                        const PicardConfig& cfg,
                                                        const ModelParams& params) {
    cfg.validate();
    F.validate();
    if (psi0_free.times.empty())
        throw config_error("picard_solve: empty free trajectory");

    const auto& ts = psi0_free.times;
    const double s = params.s;
    const std::size_t nt = ts.size();

    // kernel plans per sample time (t = 0 contributes nothing)
    std::vector<std::optional<KPlan>> plans(nt);
    for (std::size_t i = 0; i < nt; ++i)
        if (ts[i] > 0.0) plans[i] = KPlan::build(ts[i], params.M, params.n, cfg.quad);

    Trajectory psi = psi0_free;
    PicardReport rep;
    rep.truncation_T = ts.back();

    auto apply_S = [&](const Trajectory& cur) {
        // nonlinearity snapshots, coefficient arrays pre-synchronized for the
        // concurrent interpolation reads inside apply_G_plan
        std::vector<SpectralField> fsnap(nt);
        for (std::size_t j = 0; j < nt; ++j) {
            fsnap[j] = eval_nonlinearity(F, cur.fields[j]);
            fsnap[j].coeffs();
        }
        auto f_interp = [&](double b) { return detail::interp_fields(ts, fsnap, b); };

        Trajectory next;
        next.params = cur.params;
        for (std::size_t i = 0; i < nt; ++i) {
            if (!plans[i]) {
                next.push(ts[i], psi0_free.fields[i]);
            } else {
                SpectralField g = apply_G_plan(*plans[i], f_interp);
                g += psi0_free.fields[i];
                next.push(ts[i], std::move(g));
            }
        }
        return next;
    };

    double prev_d = -1.0;
    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
        Trajectory next = apply_S(psi);
        double d = detail::x_distance(next, psi, cfg.gamma, s);
        rep.distances.push_back(d);
        rep.iterations = iter;
        if (prev_d > 0.0) rep.contraction_ratio = d / prev_d;
        prev_d = d;
        psi = std::move(next);
        if (!std::isfinite(d) || d > 1e8 * cfg.ball_radius()) {
            rep.converged = false;
            rep.weighted_norm = weighted_sup_norm(psi, cfg.gamma);
            return {std::move(psi), rep};
        }
        if (d < cfg.tol) {
            rep.converged = true;
            break;
        }
    }

    rep.weighted_norm = weighted_sup_norm(psi, cfg.gamma);
    rep.tail_weighted_norm =
        std::exp(cfg.gamma * ts.back()) * psi.hs_norms.back();
    // residual of the integral equation at the final iterate
    Trajectory once_more = apply_S(psi);
    rep.residual = detail::x_distance(once_more, psi, cfg.gamma, s);
    return {std::move(psi), rep};
}

// ---------------------------------------------------------------------------
// lifespan sweep

enum class LifespanSolver { direct, picard };

struct LifespanConfig {
    std::vector<double> eps_values{1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
    double T_horizon = 30.0;
    double blowup_threshold = 1e8;
    double rtol = 1e-8;
    double atol = 1e-12;
    LifespanSolver solver = LifespanSolver::direct;
    PeriodicGrid grid{1, 64};
};

struct LifespanResult {
    std::vector<double> eps_values;
    std::vector<double> T_blowup;   // finite entries only where !censored
    std::vector<bool> censored;
    double slope_fit = 0.0;
    double intercept_fit = 0.0;     // the empirical constant of the bound
    double theory_slope = 0.0;      // 1/(Re M - n/2)
};

// For each eps: evolve eps * bump data under F and record the threshold
// crossing time; then least-squares T against ln(1/eps) over the
// uncensored entries.
inline LifespanResult lifespan_sweep(const NonlinearSpec& F, const ModelParams& params,
                                     const LifespanConfig& cfg) {
    F.validate();
    if (!(params.M.real() > 0.5 * params.n))
        throw config_error("lifespan_sweep: requires Re M > n/2");

    LifespanResult res;
    res.eps_values = cfg.eps_values;
    res.T_blowup.assign(cfg.eps_values.size(), 0.0);
    res.censored.assign(cfg.eps_values.size(), true);
    res.theory_slope = 1.0 / (params.M.real() - 0.5 * params.n);

    std::vector<double> tls(cfg.eps_values.size(), -1.0);
    parallel_for(cfg.eps_values.size(), [&](std::size_t i) {
        const double eps = cfg.eps_values[i];
        auto psi0 = field_bump(cfg.grid, eps);
        SpectralField psi1(cfg.grid);

        if (cfg.solver == LifespanSolver::direct) {
            DirectSolveConfig dc;
            dc.params = params;
            dc.T = cfg.T_horizon;
            dc.rtol = cfg.rtol;
            dc.atol = cfg.atol;
            dc.blowup_threshold = cfg.blowup_threshold;
            dc.nonlinearity = to_nonlinear_fn(F);
            dc.output_times = {cfg.T_horizon};
            auto out = solve_desitter_direct(psi0, psi1, dc);
            if (out.status == SolveStatus::blowup) tls[i] = out.t_blowup;
        } else {
            // integral-equation estimate: first time the weighted norm of the
            // Picard iterates leaves the 2*eps ball
            const double gamma =
                0.5 * (0.5 * params.n - params.M.real());  // < 0 here
            LinearProblem lp{params, psi0, psi1, nullptr, QuadratureSpec{32, 32, 32}};
            auto ts = picard_time_grid(cfg.T_horizon, 48);
            auto free = free_solution_trajectory(lp, ts);
            PicardConfig pc;
            pc.eps = eps;
            pc.gamma = gamma;
            pc.tol = 1e-10 * eps;
            pc.max_iter = 12;
            pc.T = cfg.T_horizon;
            pc.quad = lp.quad;
            auto [traj, rep] = picard_solve(free, F, pc, params);
            for (std::size_t j = 0; j < traj.times.size(); ++j) {
                if (std::exp(gamma * traj.times[j]) * traj.hs_norms[j] >= 2.0 * eps) {
                    tls[i] = traj.times[j];
                    break;
                }
            }
        }
    });

    for (std::size_t i = 0; i < tls.size(); ++i) {
        if (tls[i] > 0.0) {
            res.T_blowup[i] = tls[i];
            res.censored[i] = false;
        }
    }

    // least squares T = slope * ln(1/eps) + intercept over uncensored entries
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int nfit = 0;
    for (std::size_t i = 0; i < tls.size(); ++i) {
        if (res.censored[i]) continue;
        double x = std::log(1.0 / res.eps_values[i]);
        sx += x;
        sy += res.T_blowup[i];
        sxx += x * x;
        sxy += x * res.T_blowup[i];
        ++nfit;
    }
    if (nfit >= 2) {
        double denom = nfit * sxx - sx * sx;
        res.slope_fit = (nfit * sxy - sx * sy) / denom;
        res.intercept_fit = (sy - res.slope_fit * sx) / nfit;
    }
    return res;
}

}  // namespace dskg
