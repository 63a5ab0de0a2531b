#pragma once

// Experiment orchestration: dispatches a validated config to the solvers and
// writes deterministic CSV/JSON/SVG artifacts into output_dir.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "dskg/config.hpp"
#include "dskg/output.hpp"

namespace dskg {

namespace rundetail {

inline std::filesystem::path outpath(const ExperimentConfig& cfg,
                                     const std::string& name) {
    return std::filesystem::path(cfg.output_dir) / name;
}

inline void run_kernel_eval(const ExperimentConfig& cfg, std::ostream& log) {
    const auto& k = cfg.kernel;
    KernelEval ev;
    if (k.kind == "E")
        ev = kernel_E_diag({k.r, k.t, k.t0}, cfg.model.M);
    else if (k.kind == "K1")
        ev = kernel_K1_diag(k.r, k.t, cfg.model.M);
    else if (k.kind == "K0")
        ev = kernel_K0_diag(k.r, k.t, cfg.model.M);
    else
        ev = kernel_dE_dt_diag(k.r, k.t, k.t0, cfg.model.M);

    log << k.kind << "(r=" << fmt_double(k.r) << ", t=" << fmt_double(k.t)
        << ", t0=" << fmt_double(k.t0) << "; M=" << fmt_double(cfg.model.M.real())
        << (cfg.model.M.imag() >= 0 ? "+" : "") << fmt_double(cfg.model.M.imag())
        << "i) = " << fmt_double(ev.value.real())
        << (ev.value.imag() >= 0 ? " + " : " - ")
        << fmt_double(std::abs(ev.value.imag())) << "i\n";
    log << "  hypergeometric branch: " << to_string(ev.branch)
        << ", est_abs_error: " << fmt_double(ev.f_est_abs_error) << "\n";

    CsvWriter csv(outpath(cfg, "kernel_eval.csv"), cfg.comment(),
                  {"kind", "M_re", "M_im", "t", "t0", "r", "value_re", "value_im",
                   "branch", "f_est_abs_error"});
    csv.row({k.kind, fmt_double(cfg.model.M.real()), fmt_double(cfg.model.M.imag()),
             fmt_double(k.t), fmt_double(k.t0), fmt_double(k.r),
             fmt_double(ev.value.real()), fmt_double(ev.value.imag()),
             to_string(ev.branch), fmt_double(ev.f_est_abs_error)});
}

inline void run_solve_linear(const ExperimentConfig& cfg, std::ostream& log) {
    Rng rng(cfg.seed);
    LinearProblem p;
    p.params = cfg.model;
    p.psi0 = cfg.psi0.build(cfg.grid, rng);
    p.psi1 = cfg.psi1.build(cfg.grid, rng);
    p.quad = cfg.quad;

    const bool want_transform = cfg.linear.method != "direct";
    const bool want_direct = cfg.linear.method != "transform";

    Trajectory tr_transform, tr_direct;
    tr_transform.params = cfg.model;
    if (want_transform) {
        for (double t : cfg.linear.t_values)
            tr_transform.push(t, linear_solution(p, t));
        write_trajectory_csv(outpath(cfg, "trajectory_transform.csv"), cfg.comment(),
                             tr_transform);
    }
    if (want_direct) {
        DirectSolveConfig dc;
        dc.params = cfg.model;
        dc.T = cfg.linear.t_values.back();
        dc.rtol = cfg.direct.rtol;
        dc.atol = cfg.direct.atol;
        dc.dt_init = cfg.direct.dt_init;
        dc.output_times = cfg.linear.t_values;
        auto res = solve_desitter_direct(p.psi0, p.psi1, dc);
        tr_direct = std::move(res.traj);
        write_trajectory_csv(outpath(cfg, "trajectory_direct.csv"), cfg.comment(),
                             tr_direct);
    }

    if (want_transform && want_direct) {
        CsvWriter csv(outpath(cfg, "discrepancy.csv"), cfg.comment(), {"t", "rel_err"});
        double max_rel = 0.0;
        PlotSeries ser{"rel_err", {}, {}};
        for (std::size_t i = 0; i < tr_direct.size(); ++i) {
            SpectralField d = tr_transform.fields[i];
            d -= tr_direct.fields[i];
            double rel = sobolev_norm(d, cfg.model.s) / tr_direct.hs_norms[i];
            max_rel = std::max(max_rel, rel);
            csv.row({fmt_double(tr_direct.times[i]), fmt_double(rel)});
            ser.x.push_back(tr_direct.times[i]);
            ser.y.push_back(rel);
        }
        write_svg_plot(outpath(cfg, "discrepancy.svg"), "transform vs direct", {ser},
                       true);
        log << "max relative H_s discrepancy: " << fmt_double(max_rel) << "\n";
    }
    if (want_transform || want_direct) {
        const Trajectory& tr = want_direct ? tr_direct : tr_transform;
        PlotSeries ser{"hs_norm", tr.times, tr.hs_norms};
        write_svg_plot(outpath(cfg, "hs_norm.svg"), "H_s norm", {ser}, true);
    }
}

inline void run_solve_direct(const ExperimentConfig& cfg, std::ostream& log) {
    Rng rng(cfg.seed);
    auto psi0 = cfg.psi0.build(cfg.grid, rng);
    auto psi1 = cfg.psi1.build(cfg.grid, rng);
    DirectSolveConfig dc;
    dc.params = cfg.model;
    dc.T = cfg.direct.T;
    dc.rtol = cfg.direct.rtol;
    dc.atol = cfg.direct.atol;
    dc.dt_init = cfg.direct.dt_init;
    dc.blowup_threshold = cfg.direct.blowup_threshold;
    dc.record_dt = cfg.direct.record_dt;
    for (int i = 1; i <= cfg.direct.n_outputs; ++i)
        dc.output_times.push_back(cfg.direct.T * i / cfg.direct.n_outputs);
    if (cfg.nonlinearity) dc.nonlinearity = to_nonlinear_fn(*cfg.nonlinearity);

    auto res = solve_desitter_direct(psi0, psi1, dc);
    write_trajectory_csv(outpath(cfg, "trajectory.csv"), cfg.comment(), res.traj);
    if (cfg.direct.record_dt)
        write_trajectory_csv(outpath(cfg, "trajectory_dt.csv"), cfg.comment(),
                             res.traj_dt);
    if (!res.traj.fields.empty())
        write_snapshot_csv(outpath(cfg, "final_snapshot.csv"), cfg.comment(),
                           res.traj.fields.back());
    PlotSeries ser{"hs_norm", res.traj.times, res.traj.hs_norms};
    write_svg_plot(outpath(cfg, "hs_norm.svg"), "H_s norm", {ser}, true);

    switch (res.status) {
        case SolveStatus::completed:
            log << "completed to T=" << fmt_double(dc.T) << "\n";
            break;
        case SolveStatus::blowup:
            log << "blowup at t=" << fmt_double(res.t_blowup) << "\n";
            break;
        case SolveStatus::step_underflow:
            throw numerical_error("direct solve: step underflow without blowup");
    }
}

inline void run_solve_semilinear(const ExperimentConfig& cfg, std::ostream& log) {
    if (!cfg.nonlinearity)
        throw config_error("config field nonlinearity: required for solve_semilinear");
    Rng rng(cfg.seed);
    LinearProblem lp;
    lp.params = cfg.model;
    lp.psi0 = cfg.psi0.build(cfg.grid, rng);
    lp.psi1 = cfg.psi1.build(cfg.grid, rng);
    lp.quad = cfg.quad;

    PicardConfig pc;
    pc.eps = cfg.picard.eps;
    pc.R = cfg.picard.R;
    pc.gamma = cfg.picard.gamma;
    pc.tol = cfg.picard.tol;
    pc.max_iter = cfg.picard.max_iter;
    pc.T = cfg.picard.T;
    pc.quad = cfg.quad;
    pc.n_time_samples = cfg.picard.n_time_samples;

    auto free = free_solution_trajectory(
        lp, picard_time_grid(pc.T, pc.n_time_samples));
    auto [traj, rep] = picard_solve(free, *cfg.nonlinearity, pc, cfg.model);

    write_trajectory_csv(outpath(cfg, "trajectory.csv"), cfg.comment(), traj);
    {
        CsvWriter csv(outpath(cfg, "picard_iterations.csv"), cfg.comment(),
                      {"iteration", "x_distance"});
        for (std::size_t i = 0; i < rep.distances.size(); ++i)
            csv.row({std::to_string(i + 1), fmt_double(rep.distances[i])});
    }
    json summary{{"converged", rep.converged},
                 {"iterations", rep.iterations},
                 {"contraction_ratio", rep.contraction_ratio},
                 {"weighted_norm", rep.weighted_norm},
                 {"residual", rep.residual},
                 {"truncation_T", rep.truncation_T},
                 {"tail_weighted_norm", rep.tail_weighted_norm},
                 {"gamma", pc.gamma},
                 {"tol", pc.tol}};
    std::ofstream js(outpath(cfg, "picard_report.json"));
    js << summary.dump(2) << "\n";

    log << (rep.converged ? "converged" : "did not converge") << " in "
        << rep.iterations << " iterations; contraction ratio "
        << fmt_double(rep.contraction_ratio) << "; weighted norm "
        << fmt_double(rep.weighted_norm) << "\n";
    if (!rep.converged)
        throw nonconvergence_error("picard iteration did not converge (ratio " +
                                   fmt_double(rep.contraction_ratio) + ")");
}

inline void run_lifespan_sweep(const ExperimentConfig& cfg, std::ostream& log) {
    if (!cfg.nonlinearity)
        throw config_error("config field nonlinearity: required for lifespan_sweep");
    LifespanConfig lc;
    lc.eps_values = cfg.lifespan.eps_values;
    lc.T_horizon = cfg.lifespan.T_horizon;
    lc.blowup_threshold = cfg.direct.blowup_threshold;
    lc.rtol = cfg.direct.rtol;
    lc.atol = cfg.direct.atol;
    lc.solver = cfg.lifespan.solver == "picard" ? LifespanSolver::picard
                                                : LifespanSolver::direct;
    lc.grid = cfg.grid;

    auto res = lifespan_sweep(*cfg.nonlinearity, cfg.model, lc);

    CsvWriter csv(outpath(cfg, "lifespan.csv"), cfg.comment(),
                  {"eps", "T_blowup", "censored"});
    PlotSeries ser{"T_blowup", {}, {}};
    for (std::size_t i = 0; i < res.eps_values.size(); ++i) {
        csv.row({fmt_double(res.eps_values[i]), fmt_double(res.T_blowup[i]),
                 res.censored[i] ? "1" : "0"});
        if (!res.censored[i]) {
            ser.x.push_back(std::log(1.0 / res.eps_values[i]));
            ser.y.push_back(res.T_blowup[i]);
        }
    }
    write_svg_plot(outpath(cfg, "lifespan.svg"), "T_blowup vs ln(1/eps)", {ser});
    json summary{{"slope", res.slope_fit},
                 {"intercept", res.intercept_fit},
                 {"theory_slope", res.theory_slope}};
    std::ofstream js(outpath(cfg, "lifespan_fit.json"));
    js << summary.dump(2) << "\n";
    log << "slope " << fmt_double(res.slope_fit) << " vs theory "
        << fmt_double(res.theory_slope) << "; intercept "
        << fmt_double(res.intercept_fit) << "\n";
}

inline void run_verify_decay(const ExperimentConfig& cfg, std::ostream& log) {
    CsvWriter csv(outpath(cfg, "decay.csv"), cfg.comment(),
                  {"case", "M_re", "M_im", "theory_rate", "gamma_fit", "r_squared",
                   "rel_dev", "window_lo", "window_hi"});
    bool all_ok = true;
    for (const auto& name : cfg.verify.cases) {
        DecayCase dcase;
        double tol;
        if (name == "homogeneous_i") {
            dcase = DecayCase::homogeneous_i;
            tol = 0.10;
        } else if (name == "homogeneous_ii") {
            dcase = DecayCase::homogeneous_ii;
            tol = 0.15;
        } else if (name == "derivative") {
            dcase = DecayCase::derivative;
            tol = 0.0;  // upper-bound semantics, reported only
        } else {
            throw config_error("config field verify.cases: unknown case '" + name + "'");
        }
        DecayCheckConfig dcc;
        dcc.window_lo = cfg.verify.window_lo;
        dcc.window_hi = cfg.verify.window_hi;
        dcc.seed = cfg.seed;
        auto fit = check_decay_theorem(cfg.model, dcase, dcc);
        csv.row({name, fmt_double(cfg.model.M.real()), fmt_double(cfg.model.M.imag()),
                 fmt_double(fit.theory_rate), fmt_double(fit.gamma_fit),
                 fmt_double(fit.r_squared), fmt_double(fit.rel_dev),
                 fmt_double(fit.t_min), fmt_double(fit.t_max)});
        bool ok = tol > 0.0 ? fit.rel_dev <= tol
                            : fit.gamma_fit >= fit.theory_rate * 0.9;
        all_ok = all_ok && ok;
        log << name << ": gamma_fit=" << fmt_double(fit.gamma_fit) << " theory="
            << fmt_double(fit.theory_rate) << " rel_dev=" << fmt_double(fit.rel_dev)
            << (tol > 0.0 ? " tol=" + fmt_double(tol) : " (upper bound)")
            << (ok ? "  [pass]" : "  [FAIL]") << "\n";
    }
    log << (all_ok ? "decay checks: pass" : "decay checks: FAIL") << "\n";
    if (!all_ok) throw numerical_error("verify decay: a case exceeded its tolerance");
}

inline BoundCheckSpec default_bound_spec(const std::string& lemma) {
    BoundCheckSpec spec;
    std::vector<std::pair<double, double>> tb{
        {0.5, 0.1}, {1.0, 0.2}, {2.0, 0.5}, {4.0, 1.0}, {4.0, 3.0}};
    if (lemma == "L2.3") {
        spec.lemma = LemmaId::L2_3;
        spec.M_grid = {cplx(0.3), cplx(0.5), cplx(1.0, 0.5), cplx(1.7)};
        spec.t_grid = {0.5, 1.0, 2.0, 4.0, 8.0};
    } else if (lemma == "K0-lemma") {
        spec.lemma = LemmaId::L_K0;
        spec.M_grid = {cplx(0.3), cplx(1.2)};
        spec.t_grid = {0.5, 1.0, 2.0, 4.0};
    } else if (lemma == "zone-proposition") {
        spec.lemma = LemmaId::Prop_zones;
        spec.M_grid = {cplx(0.3), cplx(1.2)};
        spec.z_grid = {1.5, 2.0, 5.0, 10.0, 50.0};
    } else if (lemma == "P2.2") {
        spec.lemma = LemmaId::P2_2;
        spec.M_grid = {cplx(0.3), cplx(2.0)};
        spec.tb_grid = tb;
    } else if (lemma == "A2-L1.9") {
        spec.lemma = LemmaId::A2_L1_9;
        spec.a = 0.7;
        spec.M_grid = {cplx(1.0)};
        spec.tb_grid = tb;
    } else if (lemma == "A3-LA2b") {
        spec.lemma = LemmaId::A3_LA2b;
        spec.M_grid = {cplx(0.5, 0.8), cplx(1.3)};
        spec.tb_grid = tb;
    } else if (lemma == "A4-L1.9b") {
        spec.lemma = LemmaId::A4_L1_9b;
        spec.M_grid = {cplx(1.5, 0.5), cplx(2.2)};
        spec.tb_grid = tb;
    } else if (lemma == "A5-LA.5") {
        spec.lemma = LemmaId::A5_LA_5;
        spec.a = 0.5;
        spec.M_grid = {cplx(0.3), cplx(1.2)};
        spec.z_grid = {1.5, 2.0, 5.0, 20.0, 100.0};
    } else {
        throw config_error("config field verify.lemmas: unknown lemma '" + lemma + "'");
    }
    return spec;
}

inline void run_verify_bounds(const ExperimentConfig& cfg, std::ostream& log) {
    CsvWriter csv(outpath(cfg, "bounds.csv"), cfg.comment(),
                  {"lemma", "M_re", "M_im", "a", "t", "b", "z", "lhs", "rhs", "ratio"});
    CsvWriter sum(outpath(cfg, "bounds_summary.csv"), cfg.comment(),
                  {"lemma", "max_ratio", "refine_delta", "growth_flag", "stable"});
    bool all_ok = true;
    for (const auto& lemma : cfg.verify.lemmas) {
        auto spec = default_bound_spec(lemma);
        auto rep = check_kernel_integral_bound(spec);
        for (const auto& e : rep.entries)
            csv.row({lemma, fmt_double(e.M.real()), fmt_double(e.M.imag()),
                     fmt_double(e.a), fmt_double(e.t), fmt_double(e.b),
                     fmt_double(e.z), fmt_double(e.lhs), fmt_double(e.rhs),
                     fmt_double(e.ratio)});
        bool stable = std::isfinite(rep.max_ratio) &&
                      rep.refine_delta <= cfg.verify.stability_tol;
        sum.row({lemma, fmt_double(rep.max_ratio), fmt_double(rep.refine_delta),
                 rep.diverged ? "1" : "0", stable ? "1" : "0"});
        all_ok = all_ok && stable;
        log << lemma << ": max_ratio=" << fmt_double(rep.max_ratio)
            << " refine_delta=" << fmt_double(rep.refine_delta) << " (tol "
            << fmt_double(cfg.verify.stability_tol) << ")"
            << (rep.diverged ? " growth-flag" : "") << (stable ? "  [pass]" : "  [FAIL]")
            << "\n";
    }
    log << (all_ok ? "bound checks: pass" : "bound checks: FAIL") << "\n";
    if (!all_ok) throw numerical_error("verify bounds: stability tolerance exceeded");
}

inline void run_verify_appendix(const ExperimentConfig& cfg, std::ostream& log) {
    CsvWriter csv(outpath(cfg, "appendix_limits.csv"), cfg.comment(),
                  {"case", "M_re", "M_im", "a", "z", "deviation"});
    struct Probe { double a; cplx M; };
    std::vector<Probe> probes{{0.0, cplx(1.5)}, {0.0, cplx(0.25)}, {0.0, cplx(0.5)}};
    bool all_ok = true;
    for (const auto& pr : probes) {
        auto e = check_appendix_limits(pr.a, pr.M, cfg.verify.z_limits);
        for (std::size_t i = 0; i < e.z_grid.size(); ++i)
            csv.row({e.case_name, fmt_double(pr.M.real()), fmt_double(pr.M.imag()),
                     fmt_double(pr.a), fmt_double(e.z_grid[i]),
                     fmt_double(e.deviation[i])});
        bool ok = e.monotone && e.final_dev <= cfg.verify.limit_tol;
        all_ok = all_ok && ok;
        log << e.case_name << " (M=" << fmt_double(pr.M.real())
            << "): final deviation " << fmt_double(e.final_dev) << " (tol "
            << fmt_double(cfg.verify.limit_tol) << ")"
            << (e.monotone ? ", monotone" : ", NOT monotone")
            << (ok ? "  [pass]" : "  [FAIL]") << "\n";
    }
    log << (all_ok ? "appendix limit checks: pass" : "appendix limit checks: FAIL")
        << "\n";
    if (!all_ok)
        throw numerical_error("verify appendix: a limit check exceeded its tolerance");
}

}  // namespace rundetail

// Runs one experiment; artifacts land in cfg.output_dir.  Throws typed errors
// that the CLI maps onto exit codes (config=2, numerical=3, nonconvergence=4).
inline void run_experiment(const ExperimentConfig& cfg, std::ostream& log = std::cout) {
    std::filesystem::create_directories(cfg.output_dir);
    switch (cfg.run) {
        case RunKind::kernel_eval: rundetail::run_kernel_eval(cfg, log); break;
        case RunKind::solve_linear: rundetail::run_solve_linear(cfg, log); break;
        case RunKind::solve_direct: rundetail::run_solve_direct(cfg, log); break;
        case RunKind::solve_semilinear: rundetail::run_solve_semilinear(cfg, log); break;
        case RunKind::lifespan_sweep: rundetail::run_lifespan_sweep(cfg, log); break;
        case RunKind::verify_decay: rundetail::run_verify_decay(cfg, log); break;
        case RunKind::verify_bounds: rundetail::run_verify_bounds(cfg, log); break;
        case RunKind::verify_appendix: rundetail::run_verify_appendix(cfg, log); break;
    }
}

}  // namespace dskg
