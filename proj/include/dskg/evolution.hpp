#pragma once

// Time steppers: (a) the auxiliary constant-coefficient wave problem, solved
// exactly per Fourier mode for A = Laplacian and by RK4 method-of-lines for
// the 1-D variable-coefficient operator; (b) an adaptive Dormand-Prince 5(4)
// pseudo-spectral integrator for the full damped equation
//   psi_tt + n psi_t - e^{-2t} A psi + m^2 psi = F(psi),
// used as the independent oracle against the transform path.  The damping is
// removed exactly by the change of unknown u = e^{nt/2} psi.

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "dskg/errors.hpp"
#include "dskg/field.hpp"
#include "dskg/parallel.hpp"

namespace dskg {

// ---------------------------------------------------------------------------
// adaptive Dormand-Prince 5(4)

enum class SolveStatus { completed, blowup, step_underflow };

struct OdeReport {
    SolveStatus status = SolveStatus::completed;
    double t_end = 0.0;
    double err_accum = 0.0;  // sum of weighted local-error estimates
    std::size_t n_steps = 0;
};

// Integrates y' = rhs(t,y) from t0 through the sorted checkpoint list (the
// last checkpoint is the final time).  at_checkpoint(i,t,y) fires exactly at
// each checkpoint; monitor(t,y) fires after every accepted step and may stop
// the run (returns true to halt -> status blowup).  err_weight(t) scales the
// per-step local error estimate accumulated into err_accum.
template <typename Rhs, typename AtCheckpoint, typename Monitor, typename ErrWeight>
OdeReport rk45(std::vector<cplx>& y, double t0, const std::vector<double>& checkpoints,
               double rtol, double atol, double dt_init, Rhs&& rhs,
               AtCheckpoint&& at_checkpoint, Monitor&& monitor, ErrWeight&& err_weight) {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                            e3 = 500.0 / 1113 - 7571.0 / 16695,
                            e4 = 125.0 / 192 - 393.0 / 640,
                            e5 = -2187.0 / 6784 + 92097.0 / 339200,
                            e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;
    static constexpr double c2 = 0.2, c3 = 0.3, c4 = 0.8, c5 = 8.0 / 9;

    const std::size_t n = y.size();
    std::vector<cplx> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);

    OdeReport rep;
    double t = t0;
    double dt = dt_init;
    std::size_t next_cp = 0;
    const double t_final = checkpoints.empty() ? t0 : checkpoints.back();

    auto stage = [&](const std::vector<cplx>& base, std::vector<cplx>& out,
                     double tt) { rhs(tt, base, out); };

    stage(y, k1, t);
    while (t < t_final) {
        while (next_cp < checkpoints.size() && checkpoints[next_cp] <= t + 1e-14) {
            at_checkpoint(next_cp, t, y);
            ++next_cp;
        }
        if (next_cp >= checkpoints.size()) break;

        bool clipped = false;
        double dt_step = dt;
        if (t + dt_step >= checkpoints[next_cp]) {
            dt_step = checkpoints[next_cp] - t;
            clipped = true;
        }
        if (dt_step < 1e-12) {
            rep.status = SolveStatus::step_underflow;
            rep.t_end = t;
            return rep;
        }

        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + dt_step * a21 * k1[i];
        stage(ytmp, k2, t + c2 * dt_step);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + dt_step * (a31 * k1[i] + a32 * k2[i]);
        stage(ytmp, k3, t + c3 * dt_step);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + dt_step * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        stage(ytmp, k4, t + c4 * dt_step);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + dt_step * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] +
                                        a54 * k4[i]);
        stage(ytmp, k5, t + c5 * dt_step);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + dt_step * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                                        a64 * k4[i] + a65 * k5[i]);
        stage(ytmp, k6, t + dt_step);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + dt_step * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                                        b5 * k5[i] + b6 * k6[i]);
        stage(ynew, k7, t + dt_step);

        double err = 0.0, raw = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cplx e = dt_step * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                e6 * k6[i] + e7 * k7[i]);
            double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            double r = std::abs(e) / sc;
            err += r * r;
            raw += std::norm(e);
        }
        err = std::sqrt(err / n);

        if (err <= 1.0 || !std::isfinite(err)) {
            if (!std::isfinite(err)) {
                // a non-finite stage: shrink and retry unless hopeless
                dt *= 0.25;
                if (dt < 1e-12) {
                    rep.status = SolveStatus::step_underflow;
                    rep.t_end = t;
                    return rep;
                }
                stage(y, k1, t);
                continue;
            }
            t += dt_step;
            y.swap(ynew);
            k1.swap(k7);  // FSAL
            rep.n_steps++;
            rep.err_accum += std::sqrt(raw) * err_weight(t);
            if (monitor(t, y)) {
                rep.status = SolveStatus::blowup;
                rep.t_end = t;
                while (next_cp < checkpoints.size() && checkpoints[next_cp] <= t + 1e-14) {
                    at_checkpoint(next_cp, t, y);
                    ++next_cp;
                }
                return rep;
            }
            double grow = err > 1e-30 ? 0.9 * std::pow(err, -0.2) : 5.0;
            double dt_next = dt_step * std::min(5.0, std::max(0.2, grow));
            dt = clipped ? std::max(dt, dt_next) : dt_next;
        } else {
            dt = dt_step * std::max(0.2, 0.9 * std::pow(err, -0.2));
            if (dt < 1e-12) {
                rep.status = SolveStatus::step_underflow;
                rep.t_end = t;
                return rep;
            }
        }
    }
    while (next_cp < checkpoints.size() && checkpoints[next_cp] <= t + 1e-14) {
        at_checkpoint(next_cp, t, y);
        ++next_cp;
    }
    rep.t_end = t;
    return rep;
}

// ---------------------------------------------------------------------------
// auxiliary wave problem  v_tt = A v,  v(0) = f,  v_t(0) = 0

enum class SpatialOperator { laplacian, variable_1d };

struct WaveProblem {
    SpectralField initial;
    SpatialOperator op = SpatialOperator::laplacian;
    std::vector<double> coeff;  // c(x) > 0 for variable_1d: A = d/dx(c(x) d/dx)
};

namespace detail {

// RK4 method-of-lines for the 1-D variable-coefficient operator; second-order
// centered fluxes, CFL-limited fixed step.
inline void wave_variable_1d(const PeriodicGrid& g, const std::vector<double>& c,
                             std::vector<cplx>& v, std::vector<cplx>& w, double r) {
    const int n = g.npts;
    if (static_cast<int>(c.size()) != n)
        throw config_error("variable_1d: coefficient array must match the grid");
    double cmax = 0.0;
    for (double ci : c) {
        if (!(ci > 0.0))
            throw config_error("variable_1d: coefficients must be strictly positive");
        cmax = std::max(cmax, ci);
    }
    const double h = PeriodicGrid::length / n;
    if (r <= 0.0) return;
    const double dt_cfl = 0.4 * h / std::sqrt(cmax);
    const int nsteps = std::max(1, static_cast<int>(std::ceil(r / dt_cfl)));
    const double dt = r / nsteps;

    auto apply_A = [&](const std::vector<cplx>& u, std::vector<cplx>& out) {
        for (int i = 0; i < n; ++i) {
            int ip = (i + 1) % n, im = (i + n - 1) % n;
            double cp = 0.5 * (c[i] + c[ip]), cm = 0.5 * (c[i] + c[im]);
            out[i] = (cp * (u[ip] - u[i]) - cm * (u[i] - u[im])) / (h * h);
        }
    };

    std::vector<cplx> av(n), k1v(n), k1w(n), k2v(n), k2w(n), k3v(n), k3w(n),
        k4v(n), k4w(n), tv(n), tw(n);
    for (int s = 0; s < nsteps; ++s) {
        apply_A(v, k1w);
        k1v = w;
        for (int i = 0; i < n; ++i) {
            tv[i] = v[i] + 0.5 * dt * k1v[i];
            tw[i] = w[i] + 0.5 * dt * k1w[i];
        }
        apply_A(tv, k2w);
        k2v = tw;
        for (int i = 0; i < n; ++i) {
            tv[i] = v[i] + 0.5 * dt * k2v[i];
            tw[i] = w[i] + 0.5 * dt * k2w[i];
        }
        apply_A(tv, k3w);
        k3v = tw;
        for (int i = 0; i < n; ++i) {
            tv[i] = v[i] + dt * k3v[i];
            tw[i] = w[i] + dt * k3w[i];
        }
        apply_A(tv, k4w);
        k4v = tw;
        for (int i = 0; i < n; ++i) {
            v[i] += dt / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
            w[i] += dt / 6.0 * (k1w[i] + 2.0 * k2w[i] + 2.0 * k3w[i] + k4w[i]);
        }
    }
    for (const auto& z : v)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw numerical_error("variable_1d wave solve went non-finite (CFL instability)");
}

}  // namespace detail

inline SpectralField solve_wave_with_velocity(const SpectralField& v0,
                                              const SpectralField& v1, double r,
                                              SpatialOperator op = SpatialOperator::laplacian,
                                              const std::vector<double>& coeff = {}) {
    const auto& g = v0.grid();
    if (op == SpatialOperator::laplacian) {
        const auto& c0 = v0.coeffs();
        const auto& c1 = v1.coeffs();
        std::vector<cplx> out(c0.size());
        for (std::size_t i = 0; i < c0.size(); ++i) {
            double k = std::sqrt(g.k_squared(i));
            if (k == 0.0)
                out[i] = c0[i] + c1[i] * r;  // sin(kr)/k -> r
            else
                out[i] = c0[i] * std::cos(k * r) + c1[i] * std::sin(k * r) / k;
        }
        return SpectralField::from_coeffs(g, std::move(out));
    }
    if (g.d != 1) throw config_error("variable_1d operator requires d=1");
    std::vector<cplx> v = v0.values();
    std::vector<cplx> w = v1.values();
    detail::wave_variable_1d(g, coeff, v, w, r);
    return SpectralField::from_values(g, std::move(v));
}

inline SpectralField solve_wave(const WaveProblem& p, double r) {
    SpectralField zero(p.initial.grid());
    return solve_wave_with_velocity(p.initial, zero, r, p.op, p.coeff);
}

// ---------------------------------------------------------------------------
// direct pseudo-spectral solve of the full equation

// right-hand side F(psi, t): a nonlinearity, a time-dependent source, or both
using NonlinearFn = std::function<SpectralField(const SpectralField&, double)>;

struct DirectSolveConfig {
    ModelParams params;
    double T = 4.0;
    double rtol = 1e-8;
    double atol = 1e-12;
    double dt_init = 1e-3;
    double blowup_threshold = 1e8;
    std::optional<NonlinearFn> nonlinearity;
    std::vector<double> output_times;  // default: 25 uniform samples
    bool record_dt = false;            // also sample psi_t

    void validate() const {
        if (!(T > 0.0)) throw config_error("direct.T must be > 0");
        if (!(rtol > 0.0) || !(atol > 0.0))
            throw config_error("direct.rtol and direct.atol must be > 0");
    }
};

struct DirectResult {
    Trajectory traj;
    Trajectory traj_dt;  // populated when record_dt
    SolveStatus status = SolveStatus::completed;
    double t_blowup = 0.0;
    double err_accum = 0.0;
    std::size_t n_steps = 0;
};

namespace detail {

inline std::vector<double> default_outputs(double T, int n = 25) {
    std::vector<double> out;
    out.reserve(n);
    for (int i = 1; i <= n; ++i) out.push_back(T * i / n);
    return out;
}

}  // namespace detail

// The change of unknown u = e^{nt/2} psi turns the equation into
//   u'' = (M^2 - e^{-2t}|k|^2) u + e^{nt/2} F(e^{-nt/2} u),
// removing the stiff damping term exactly.  Linear runs (no F) integrate each
// mode independently with its own adaptive step.
inline DirectResult solve_desitter_direct(const SpectralField& psi0,
                                          const SpectralField& psi1,
                                          const DirectSolveConfig& cfg) {
    cfg.validate();
    const auto& g = psi0.grid();
    if (!(g == psi1.grid()))
        throw config_error("solve_desitter_direct: psi0/psi1 grid mismatch");
    const double n_half = 0.5 * cfg.params.n;
    const cplx M2 = cfg.params.M * cfg.params.M;
    const std::size_t nm = g.size();

    std::vector<double> outs =
        cfg.output_times.empty() ? detail::default_outputs(cfg.T) : cfg.output_times;
    for (std::size_t i = 0; i + 1 < outs.size(); ++i)
        if (outs[i + 1] <= outs[i])
            throw config_error("direct.output_times must be strictly increasing");
    if (outs.back() > cfg.T + 1e-12)
        throw config_error("direct.output_times exceed T");

    DirectResult res;
    res.traj.params = cfg.params;
    res.traj_dt.params = cfg.params;

    const auto& c0 = psi0.coeffs();
    const auto& c1 = psi1.coeffs();

    if (!cfg.nonlinearity) {
        // diagonal fast path: per-mode independent integration
        std::vector<std::vector<cplx>> snap(outs.size(), std::vector<cplx>(nm));
        std::vector<std::vector<cplx>> snap_dt(cfg.record_dt ? outs.size() : 0,
                                               std::vector<cplx>(cfg.record_dt ? nm : 0));
        std::vector<double> errs(nm, 0.0);
        std::vector<std::size_t> steps(nm, 0);

        parallel_for(nm, [&](std::size_t idx) {
            const double k2 = g.k_squared(idx);
            // u = e^{nt/2} psi_k, state (u, u')
            std::vector<cplx> y{c0[idx], n_half * c0[idx] + c1[idx]};
            auto rhs = [&](double t, const std::vector<cplx>& yy, std::vector<cplx>& dy) {
                dy[0] = yy[1];
                dy[1] = (M2 - k2 * std::exp(-2.0 * t)) * yy[0];
            };
            auto at_cp = [&](std::size_t i, double t, const std::vector<cplx>& yy) {
                double damp = std::exp(-n_half * t);
                snap[i][idx] = damp * yy[0];
                if (cfg.record_dt)
                    snap_dt[i][idx] = damp * (yy[1] - n_half * yy[0]);
            };
            auto weight = [&](double t) { return std::exp(-n_half * t); };
            OdeReport rep = rk45(y, 0.0, outs, cfg.rtol, cfg.atol, cfg.dt_init, rhs,
                                 at_cp, [](double, const std::vector<cplx>&) { return false; },
                                 weight);
            if (rep.status != SolveStatus::completed)
                throw numerical_error("linear mode integration failed (step underflow)");
            errs[idx] = rep.err_accum;
            steps[idx] = rep.n_steps;
        });

        double err2 = 0.0;
        for (std::size_t idx = 0; idx < nm; ++idx) {
            double wk = std::pow(1.0 + g.k_squared(idx), cfg.params.s);
            err2 += wk * errs[idx] * errs[idx];
            res.n_steps += steps[idx];
        }
        res.err_accum = std::sqrt(err2 * std::pow(PeriodicGrid::length, g.d));
        for (std::size_t i = 0; i < outs.size(); ++i) {
            res.traj.push(outs[i], SpectralField::from_coeffs(g, std::move(snap[i])));
            if (cfg.record_dt)
                res.traj_dt.push(outs[i],
                                 SpectralField::from_coeffs(g, std::move(snap_dt[i])));
        }
        return res;
    }

    // coupled path: state is all modes (u, u') with pseudo-spectral F
    std::vector<cplx> y(2 * nm);
    for (std::size_t i = 0; i < nm; ++i) {
        y[i] = c0[i];
        y[nm + i] = n_half * c0[i] + c1[i];
    }
    const NonlinearFn& F = *cfg.nonlinearity;

    auto rhs = [&](double t, const std::vector<cplx>& yy, std::vector<cplx>& dy) {
        const double damp = std::exp(-n_half * t);
        std::vector<cplx> psi_c(nm);
        for (std::size_t i = 0; i < nm; ++i) psi_c[i] = damp * yy[i];
        SpectralField psi = SpectralField::from_coeffs(g, std::move(psi_c));
        SpectralField f = F(psi, t);
        const auto& fc = f.coeffs();
        const double boost = std::exp(n_half * t);
        for (std::size_t i = 0; i < nm; ++i) {
            dy[i] = yy[nm + i];
            dy[nm + i] = (M2 - g.k_squared(i) * std::exp(-2.0 * t)) * yy[i] +
                         boost * fc[i];
        }
    };

    auto linf_psi = [&](double t, const std::vector<cplx>& yy) {
        const double damp = std::exp(-n_half * t);
        std::vector<cplx> psi_c(nm);
        for (std::size_t i = 0; i < nm; ++i) psi_c[i] = damp * yy[i];
        SpectralField psi = SpectralField::from_coeffs(g, std::move(psi_c));
        return linf_norm(psi);
    };

    std::vector<std::vector<cplx>> snap(outs.size());
    std::vector<std::vector<cplx>> snap_dt(outs.size());
    std::vector<double> hit(outs.size(), -1.0);
    auto at_cp = [&](std::size_t i, double t, const std::vector<cplx>& yy) {
        const double damp = std::exp(-n_half * t);
        snap[i].resize(nm);
        if (cfg.record_dt) snap_dt[i].resize(nm);
        for (std::size_t j = 0; j < nm; ++j) {
            snap[i][j] = damp * yy[j];
            if (cfg.record_dt) snap_dt[i][j] = damp * (yy[nm + j] - n_half * yy[j]);
        }
        hit[i] = t;
    };
    auto monitor = [&](double t, const std::vector<cplx>& yy) {
        return linf_psi(t, yy) > cfg.blowup_threshold;
    };
    auto weight = [&](double t) { return std::exp(-n_half * t); };

    OdeReport rep =
        rk45(y, 0.0, outs, cfg.rtol, cfg.atol, cfg.dt_init, rhs, at_cp, monitor, weight);
    res.status = rep.status;
    res.err_accum = rep.err_accum;
    res.n_steps = rep.n_steps;
    if (rep.status == SolveStatus::blowup) res.t_blowup = rep.t_end;
    if (rep.status == SolveStatus::step_underflow) {
        // distinguish threshold-driven collapse from a genuine failure
        double l = linf_psi(rep.t_end, y);
        if (l > 0.01 * cfg.blowup_threshold) {
            res.status = SolveStatus::blowup;
            res.t_blowup = rep.t_end;
        }
    }
    for (std::size_t i = 0; i < outs.size(); ++i) {
        if (hit[i] < 0.0) break;  // run stopped before this sample
        res.traj.push(hit[i], SpectralField::from_coeffs(g, std::move(snap[i])));
        if (cfg.record_dt)
            res.traj_dt.push(hit[i], SpectralField::from_coeffs(g, std::move(snap_dt[i])));
    }
    return res;
}

// L2-based wave energy ||v_t||^2 + ||grad v||^2 (conservation check helper)
inline double wave_energy(const SpectralField& v, const SpectralField& vt) {
    const auto& g = v.grid();
    const auto& cv = v.coeffs();
    const auto& ct = vt.coeffs();
    double acc = 0.0;
    for (std::size_t i = 0; i < cv.size(); ++i)
        acc += std::norm(ct[i]) + g.k_squared(i) * std::norm(cv[i]);
    return acc * std::pow(PeriodicGrid::length, g.d);
}

}  // namespace dskg
