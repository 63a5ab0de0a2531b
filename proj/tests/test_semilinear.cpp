#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "dskg/semilinear.hpp"
#include "scalar_blowup_oracle.hpp"

using dskg::cplx;
using dskg::NonlinearKind;
using dskg::NonlinearSpec;
using dskg::PeriodicGrid;
using dskg::SpectralField;

TEST_CASE("nonlinearity vanishes at zero", "[semilinear]") {
    PeriodicGrid g{1, 32};
    NonlinearSpec F{NonlinearKind::cubic, 1.0, 2.0, 1.0};
    auto out = dskg::eval_nonlinearity(F, SpectralField(g));
    CHECK(dskg::sobolev_norm(out, 0.0) == 0.0);
}

TEST_CASE("cubic nonlinearity is pointwise -lambda psi^3", "[semilinear]") {
    PeriodicGrid g{1, 32};
    NonlinearSpec F{NonlinearKind::cubic, 1.0, 2.0, 2.0};
    auto out = dskg::eval_nonlinearity(F, dskg::field_constant(g, cplx(1.0)));
    for (const auto& z : out.values()) CHECK(std::abs(z - cplx(-2.0)) < 1e-13);
}

TEST_CASE("signed power matches a pointwise oracle", "[semilinear]") {
    PeriodicGrid g{1, 64};
    dskg::Rng rng(3);
    auto psi = dskg::random_field(g, 10, 1.0, rng);
    NonlinearSpec F{NonlinearKind::power_signed, -1.0, 1.5, 1.0};
    auto out = dskg::eval_nonlinearity(F, psi);
    const auto& v = psi.values();
    const auto& w = out.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
        cplx want = -std::pow(std::abs(v[i]), 1.5) * v[i];
        CHECK(std::abs(w[i] - want) < 1e-13);
    }
}

TEST_CASE("lipschitz probe recovers the condition exponent", "[semilinear]") {
    PeriodicGrid g{1, 64};
    NonlinearSpec cubic{NonlinearKind::cubic, 1.0, 2.0, 1.0};
    auto pc = dskg::lipschitz_probe(cubic, g, 2.0, 12, 0.1, 101);
    CHECK(std::abs(pc.alpha_emp - 2.0) < 0.2);
    INFO("cubic C_emp at radius 0.1: " << pc.C_emp);
    CHECK(std::isfinite(pc.C_emp));
    CHECK(pc.C_emp > 0.0);
    CHECK(pc.C_emp < 100.0);

    NonlinearSpec p1{NonlinearKind::power_signed, 1.0, 1.0, 1.0};
    auto pp = dskg::lipschitz_probe(p1, g, 2.0, 12, 0.1, 102);
    CHECK(std::abs(pp.alpha_emp - 1.0) < 0.2);
}

namespace {

dskg::Trajectory make_free(const dskg::ModelParams& params, const PeriodicGrid& g,
                           double eps, double T, int nt,
                           const dskg::QuadratureSpec& quad) {
    auto psi0 = dskg::field_gaussian(g, 3.0);
    psi0 *= cplx(eps / dskg::sobolev_norm(psi0, params.s));
    dskg::LinearProblem lp{params, psi0, SpectralField(g), nullptr, quad};
    return dskg::free_solution_trajectory(lp, dskg::picard_time_grid(T, nt));
}

}  // namespace

TEST_CASE("picard with zero nonlinearity converges immediately", "[semilinear]") {
    PeriodicGrid g{1, 32};
    auto params = dskg::ModelParams::from_M(3, cplx(0.25), 2.0, 2.0);
    dskg::PicardConfig pc;
    pc.eps = 1e-3;
    pc.gamma = 1.0;
    pc.tol = 1e-14;
    pc.T = 4.0;
    pc.quad = dskg::QuadratureSpec{16, 16, 16};
    pc.n_time_samples = 8;
    auto free = make_free(params, g, pc.eps, pc.T, pc.n_time_samples, pc.quad);
    NonlinearSpec F{NonlinearKind::cubic, 1.0, 2.0, 0.0};  // lambda = 0
    auto [traj, rep] = dskg::picard_solve(free, F, pc, params);
    CHECK(rep.converged);
    CHECK(rep.iterations == 1);
    CHECK(rep.distances.front() == 0.0);
}

TEST_CASE("picard contraction for small cubic data", "[semilinear]") {
    PeriodicGrid g{1, 32};
    auto params = dskg::ModelParams::from_M(3, cplx(0.25), 2.0, 2.0);
    const double eps = 1e-3;
    dskg::PicardConfig pc;
    pc.eps = eps;
    pc.gamma = 1.0;  // = (n-1)/2
    pc.tol = 1e-8 * eps;
    pc.T = 8.0;
    pc.quad = dskg::QuadratureSpec{32, 32, 32};
    pc.n_time_samples = 20;
    auto free = make_free(params, g, eps, pc.T, pc.n_time_samples, pc.quad);
    NonlinearSpec F{NonlinearKind::cubic, 1.0, 2.0, 1.0};
    auto [traj, rep] = dskg::picard_solve(free, F, pc, params);

    CHECK(rep.converged);
    CHECK(rep.iterations <= 10);
    CHECK(rep.contraction_ratio < 0.5);
    CHECK(rep.weighted_norm <= 2.0 * eps);
    CHECK(rep.residual <= 2.0 * pc.tol);
}

TEST_CASE("picard reports non-convergence for large data", "[semilinear]") {
    PeriodicGrid g{1, 32};
    auto params = dskg::ModelParams::from_M(3, cplx(0.25), 2.0, 2.0);
    const double eps = 4.0;
    dskg::PicardConfig pc;
    pc.eps = eps;
    pc.gamma = 1.0;
    pc.tol = 1e-10;
    pc.max_iter = 12;
    pc.T = 6.0;
    pc.quad = dskg::QuadratureSpec{16, 16, 16};
    pc.n_time_samples = 10;
    auto free = make_free(params, g, eps, pc.T, pc.n_time_samples, pc.quad);
    NonlinearSpec F{NonlinearKind::cubic, 1.0, 2.0, 100.0};  // strong coupling
    auto [traj, rep] = dskg::picard_solve(free, F, pc, params);
    CHECK_FALSE(rep.converged);
    CHECK(rep.contraction_ratio >= 1.0);
    CHECK_FALSE(rep.distances.empty());
}

TEST_CASE("picard solution agrees with the direct solver", "[semilinear]") {
    PeriodicGrid g{1, 32};
    auto params = dskg::ModelParams::from_M(3, cplx(0.25), 2.0, 2.0);
    const double eps = 1e-3;
    dskg::PicardConfig pc;
    pc.eps = eps;
    pc.gamma = 1.0;
    pc.tol = 1e-8 * eps;
    pc.T = 4.0;
    pc.quad = dskg::QuadratureSpec{32, 32, 32};
    pc.n_time_samples = 16;
    auto psi0 = dskg::field_gaussian(g, 3.0);
    psi0 *= cplx(eps / dskg::sobolev_norm(psi0, 2.0));
    dskg::LinearProblem lp{params, psi0, SpectralField(g), nullptr, pc.quad};
    auto free = dskg::free_solution_trajectory(lp, dskg::picard_time_grid(pc.T, pc.n_time_samples));
    NonlinearSpec F{NonlinearKind::cubic, 1.0, 2.0, 1.0};
    auto [traj, rep] = dskg::picard_solve(free, F, pc, params);
    REQUIRE(rep.converged);

    dskg::DirectSolveConfig dc;
    dc.params = params;
    dc.T = pc.T;
    dc.rtol = 1e-9;
    dc.atol = 1e-14;
    dc.nonlinearity = dskg::to_nonlinear_fn(F);
    std::vector<double> outs(traj.times.begin() + 1, traj.times.end());
    dc.output_times = outs;
    auto res = dskg::solve_desitter_direct(psi0, SpectralField(g), dc);
    REQUIRE(res.status == dskg::SolveStatus::completed);
    for (std::size_t i = 0; i < res.traj.size(); ++i) {
        SpectralField d = res.traj.fields[i];
        d -= traj.fields[i + 1];
        double rel = dskg::sobolev_norm(d, 2.0) / res.traj.hs_norms[i];
        CHECK(rel < 1e-2);
    }
}

TEST_CASE("lifespan sweep requires a supercritical mass", "[semilinear]") {
    auto params = dskg::ModelParams::from_M(3, cplx(0.5), 2.0, 1.0);
    NonlinearSpec F{NonlinearKind::power_abs, 1.0, 1.0, 1.0};
    dskg::LifespanConfig cfg;
    CHECK_THROWS_AS(dskg::lifespan_sweep(F, params, cfg), dskg::config_error);
}

TEST_CASE("lifespan sweep: blowup times grow as data shrinks", "[semilinear]") {
    auto params = dskg::ModelParams::from_M(3, cplx(2.5), 2.0, 1.0);
    NonlinearSpec F{NonlinearKind::power_abs, 1.0, 1.0, 1.0};  // +|psi|^2
    dskg::LifespanConfig cfg;
    cfg.eps_values = {1e-2, 3e-3, 1e-3};
    cfg.T_horizon = 16.0;
    cfg.grid = PeriodicGrid{1, 32};
    auto res = dskg::lifespan_sweep(F, params, cfg);
    REQUIRE(res.eps_values.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        INFO("eps " << res.eps_values[i]);
        CHECK_FALSE(res.censored[i]);
    }
    CHECK(res.T_blowup[0] < res.T_blowup[1]);
    CHECK(res.T_blowup[1] < res.T_blowup[2]);
    CHECK(std::abs(res.theory_slope - 1.0) < 1e-12);
    CHECK(std::abs(res.slope_fit - 1.0) < 0.3);
}

TEST_CASE("constant-data blowup matches the scalar ODE oracle", "[semilinear]") {
    // constant field: only the zero mode is active and the PDE is an ODE
    auto params = dskg::ModelParams::from_M(3, cplx(2.5), 2.0, 1.0);
    const double eps = 1e-2;
    PeriodicGrid g{1, 32};
    dskg::DirectSolveConfig dc;
    dc.params = params;
    dc.T = 16.0;
    dc.rtol = 1e-9;
    dc.atol = 1e-13;
    dc.output_times = {16.0};
    NonlinearSpec F{NonlinearKind::power_abs, 1.0, 1.0, 1.0};
    dc.nonlinearity = dskg::to_nonlinear_fn(F);
    auto out = dskg::solve_desitter_direct(dskg::field_constant(g, cplx(eps)),
                                           SpectralField(g), dc);
    REQUIRE(out.status == dskg::SolveStatus::blowup);

    double oracle = test_oracle::scalar_blowup_time(3, -4.0, 1.0, 1.0, eps, 1e8, 16.0);
    REQUIRE(oracle > 0.0);
    CHECK(std::abs(out.t_blowup - oracle) / oracle < 0.01);
}
