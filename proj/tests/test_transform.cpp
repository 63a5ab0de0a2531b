#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <functional>

#include "dskg/quadrature.hpp"
#include "dskg/transform.hpp"

using dskg::cplx;
using dskg::PeriodicGrid;
using dskg::QuadratureSpec;
using dskg::SpectralField;

namespace {

double rel_hs_err(const SpectralField& a, const SpectralField& b, double s) {
    SpectralField d = a;
    d -= b;
    return dskg::sobolev_norm(d, s) / dskg::sobolev_norm(b, s);
}

}  // namespace

TEST_CASE("phi_of_t values", "[transform]") {
    CHECK(dskg::phi_of_t(0.0) == 0.0);
    CHECK(std::abs(dskg::phi_of_t(1.0) - 0.63212055883) < 1e-10);
    CHECK(std::abs(dskg::phi_of_t(60.0) - 1.0) < 1e-15);
    CHECK_THROWS_AS(dskg::phi_of_t(-0.1), dskg::domain_error);
}

TEST_CASE("gauss-legendre rule sanity", "[transform]") {
    // integrates polynomials up to degree 2n-1 exactly
    auto cube = [](double x) { return x * x * x + 0.5 * x * x; };
    double got = dskg::integrate_gl(cube, -1.0, 2.0, 8);
    double want = (16.0 - 1.0) / 4.0 + 0.5 * (8.0 + 1.0) / 3.0;
    CHECK(std::abs(got - want) < 1e-13);

    double smooth = dskg::integrate_adaptive(
        [](double x) { return std::exp(-x) * std::cos(5.0 * x); }, 0.0, 3.0, 1e-12);
    double exact = (1.0 - std::exp(-3.0) * (std::cos(15.0) - 5.0 * std::sin(15.0))) / 26.0;
    CHECK(std::abs(smooth - exact) < 1e-10);
}

TEST_CASE("apply_K of zero is zero", "[transform]") {
    PeriodicGrid g{1, 32};
    QuadratureSpec quad{16, 16, 16};
    auto zero = [&](double, double) { return SpectralField(g); };
    auto out = dskg::apply_K(zero, 1.0, cplx(0.4), 3, quad);
    CHECK(dskg::sobolev_norm(out, 0.0) == 0.0);
}

TEST_CASE("apply_K closed form at M=1/2 for (r,b)-constant input", "[transform]") {
    PeriodicGrid g{1, 32};
    QuadratureSpec quad{64, 64, 64};
    const double t = 2.0, c = 0.85;
    const int n = 3;
    auto v = [&](double, double) { return dskg::field_constant(g, cplx(c)); };
    auto out = dskg::apply_K(v, t, cplx(0.5), n, quad);
    // at M=1/2 the kernel is e^{(b+t)/2}/2 and the double integral collapses
    // to int_0^t e^{(n+1)b/2}(e^{-b}-e^{-t}) db = 2.7621956910836314596
    // (n=3, t=2; frozen from a 50-digit quadrature)
    const double I = 2.7621956910836314596;
    cplx want = c * std::exp(-0.5 * (n - 1) * t) * I;
    cplx got = out.coeffs()[0];
    CHECK(std::abs(got - want) < 1e-9 * std::abs(want));
}

TEST_CASE("apply_K converges under node doubling", "[transform]") {
    PeriodicGrid g{1, 32};
    const double t = 2.0;
    const cplx M(0.3);
    auto datum = dskg::field_gaussian(g, 4.0);
    auto v = [&](double r, double b) {
        (void)b;
        dskg::WaveProblem wp{datum, dskg::SpatialOperator::laplacian, {}};
        return dskg::solve_wave(wp, r);
    };
    auto coarse = dskg::apply_K(v, t, M, 3, QuadratureSpec{64, 64, 64});
    auto fine = dskg::apply_K(v, t, M, 3, QuadratureSpec{128, 128, 128});
    CHECK(rel_hs_err(coarse, fine, 2.0) < 1e-6);
}

TEST_CASE("apply_G of zero is zero", "[transform]") {
    PeriodicGrid g{1, 32};
    auto params = dskg::ModelParams::from_M(3, cplx(0.4), 2.0);
    auto zero = [&](double) { return SpectralField(g); };
    auto out = dskg::apply_G(zero, 1.5, params, QuadratureSpec{16, 16, 16});
    CHECK(dskg::sobolev_norm(out, 0.0) == 0.0);
}

TEST_CASE("apply_G against a scalar brute-force quadrature oracle", "[transform]") {
    // f(x,b) = e^{-lambda b} cos(kx): mode k evolves independently; the
    // oracle is a dense composite Gauss rule on the scalar double integral.
    PeriodicGrid g{1, 64};
    const int n = 3, k = 2;
    const double lambda = 0.7, t = 1.5;
    const cplx M(0.3);
    auto params = dskg::ModelParams::from_M(n, M, 2.0);

    auto f = [&](double b) { return dskg::field_cos(g, k, std::exp(-lambda * b)); };
    auto out = dskg::apply_G(f, t, params, QuadratureSpec{64, 64, 64});

    // scalar oracle: 2 e^{-nt/2} int db e^{(n/2-lambda)b} int dr cos(kr) E(r,t;0,b;M)
    auto inner = [&](double b) {
        double rmax = std::exp(-b) - std::exp(-t);
        return dskg::integrate_gl(
            [&](double r) {
                return std::cos(k * r) * dskg::kernel_E({r, t, b}, M);
            },
            0.0, rmax, 200);
    };
    cplx I = dskg::integrate_gl(
        [&](double b) { return std::exp((0.5 * n - lambda) * b) * inner(b); }, 0.0,
        t, 200);
    cplx want = 2.0 * std::exp(-0.5 * n * t) * I;

    // cos(kx) has coefficients 1/2 at +-k
    cplx got = out.coeffs()[k] * 2.0;
    CHECK(std::abs(got - want) < 1e-8 * std::abs(want));
}

TEST_CASE("apply_G constant source vs direct solver Duhamel", "[transform]") {
    // spatially constant source: the zero mode solves
    // psi'' + n psi' + m^2 psi = c with zero data
    PeriodicGrid g{1, 32};
    const double t = 2.0, c = 0.6;
    auto params = dskg::ModelParams::from_M(3, cplx(0.3), 2.0);

    auto f = [&](double) { return dskg::field_constant(g, cplx(c)); };
    auto out = dskg::apply_G(f, t, params, QuadratureSpec{64, 64, 64});

    dskg::DirectSolveConfig cfg;
    cfg.params = params;
    cfg.T = t;
    cfg.rtol = 1e-10;
    cfg.atol = 1e-14;
    cfg.output_times = {t};
    cfg.nonlinearity = [&](const SpectralField& psi, double) {
        (void)psi;
        return dskg::field_constant(g, cplx(c));
    };
    auto res = dskg::solve_desitter_direct(SpectralField(g), SpectralField(g), cfg);
    cplx want = res.traj.fields.back().coeffs()[0];
    cplx got = out.coeffs()[0];
    CHECK(std::abs(got - want) < 1e-6 * std::abs(want));
}

TEST_CASE("linear_solution is zero for zero data and source", "[transform]") {
    PeriodicGrid g{1, 32};
    dskg::LinearProblem p;
    p.params = dskg::ModelParams::from_M(3, cplx(0.3), 2.0);
    p.psi0 = SpectralField(g);
    p.psi1 = SpectralField(g);
    p.quad = QuadratureSpec{16, 16, 16};
    auto out = dskg::linear_solution(p, 1.0);
    CHECK(dskg::sobolev_norm(out, 2.0) == 0.0);
}

TEST_CASE("linear_solution matches the M=1/2 specialization", "[transform]") {
    PeriodicGrid g{1, 64};
    dskg::Rng rng(17);
    dskg::LinearProblem p;
    p.params = dskg::ModelParams::from_m2(3, cplx(2.0), 2.0);  // M = 1/2
    p.psi0 = dskg::random_field(g, 6, 2.0, rng);
    p.psi1 = dskg::random_field(g, 6, 2.0, rng);
    p.quad = QuadratureSpec{48, 48, 48};
    p.source = [&](double b) {
        return dskg::field_cos(g, 1, std::exp(-0.5 * b));
    };
    for (double t : {0.7, 2.1}) {
        auto generic = dskg::linear_solution(p, t);
        auto special = dskg::linear_solution_M_half(p, t);
        CHECK(rel_hs_err(generic, special, 2.0) < 1e-9);
    }
}

TEST_CASE("M=1/2 constant-data zero-mode closed forms", "[transform]") {
    PeriodicGrid g{1, 32};
    const double c = 0.9;
    dskg::LinearProblem p;
    p.params = dskg::ModelParams::from_m2(3, cplx(2.0), 2.0);
    p.quad = QuadratureSpec{32, 32, 32};

    SECTION("psi0 = c, psi1 = 0 -> c(2e^{-t} - e^{-2t})") {
        p.psi0 = dskg::field_constant(g, cplx(c));
        p.psi1 = SpectralField(g);
        for (double t : {0.5, 1.0, 3.0}) {
            cplx got = dskg::linear_solution_M_half(p, t).coeffs()[0];
            double want = c * (2.0 * std::exp(-t) - std::exp(-2.0 * t));
            CHECK(std::abs(got - cplx(want)) < 1e-10);
        }
    }

    SECTION("psi0 = 0, psi1 = c -> c(e^{-t} - e^{-2t})") {
        p.psi0 = SpectralField(g);
        p.psi1 = dskg::field_constant(g, cplx(c));
        for (double t : {0.5, 1.0, 3.0}) {
            cplx got = dskg::linear_solution_M_half(p, t).coeffs()[0];
            double want = c * (std::exp(-t) - std::exp(-2.0 * t));
            CHECK(std::abs(got - cplx(want)) < 1e-10);
        }
    }

    SECTION("gaussian data: specialized path vs direct solver") {
        p.psi0 = dskg::field_gaussian(g, 3.0, 0.5);
        p.psi1 = SpectralField(g);
        dskg::DirectSolveConfig cfg;
        cfg.params = p.params;
        cfg.T = 2.0;
        cfg.rtol = 1e-9;
        cfg.atol = 1e-13;
        cfg.output_times = {2.0};
        auto res = dskg::solve_desitter_direct(p.psi0, p.psi1, cfg);
        auto tr = dskg::linear_solution_M_half(p, 2.0);
        CHECK(rel_hs_err(tr, res.traj.fields.back(), 2.0) < 1e-6);
    }
}

TEST_CASE("transform vs direct solver across masses", "[transform]") {
    PeriodicGrid g{1, 64};
    dskg::Rng rng(29);
    auto psi0 = dskg::random_field(g, 5, 2.5, rng);
    auto psi1 = dskg::random_field(g, 5, 2.5, rng);
    for (double m : {0.25, 2.5}) {
        dskg::LinearProblem p;
        p.params = dskg::ModelParams::from_M(3, cplx(m), 2.0);
        p.psi0 = psi0;
        p.psi1 = psi1;
        p.quad = QuadratureSpec{64, 64, 64};

        dskg::DirectSolveConfig cfg;
        cfg.params = p.params;
        cfg.T = 2.0;
        cfg.rtol = 1e-9;
        cfg.atol = 1e-13;
        cfg.output_times = {1.0, 2.0};
        auto res = dskg::solve_desitter_direct(psi0, psi1, cfg);
        for (std::size_t i = 0; i < res.traj.size(); ++i) {
            auto tr = dskg::linear_solution(p, res.traj.times[i]);
            CHECK(rel_hs_err(tr, res.traj.fields[i], 2.0) < 1e-3);
        }
    }
}

TEST_CASE("linear_solution is additive in data and source", "[transform]") {
    PeriodicGrid g{1, 32};
    dskg::Rng rng(37);
    auto params = dskg::ModelParams::from_M(3, cplx(0.8), 2.0);
    QuadratureSpec quad{32, 32, 32};
    auto f1 = dskg::random_field(g, 4, 2.0, rng);
    auto f2 = dskg::random_field(g, 4, 2.0, rng);
    auto h1 = dskg::random_field(g, 4, 2.0, rng);
    auto h2 = dskg::random_field(g, 4, 2.0, rng);

    dskg::LinearProblem pa{params, f1, h1, nullptr, quad};
    dskg::LinearProblem pb{params, f2, h2, nullptr, quad};
    dskg::LinearProblem psum{params, f1 + f2, h1 + h2, nullptr, quad};

    double t = 1.3;
    auto sep = dskg::linear_solution(pa, t) + dskg::linear_solution(pb, t);
    auto tog = dskg::linear_solution(psum, t);
    CHECK(rel_hs_err(sep, tog, 2.0) < 1e-12);
}

TEST_CASE("quadrature convergence of the full representation", "[transform]") {
    PeriodicGrid g{1, 32};
    dskg::LinearProblem p;
    p.params = dskg::ModelParams::from_M(3, cplx(0.65), 2.0);
    p.psi0 = dskg::field_gaussian(g, 3.0);
    p.psi1 = dskg::field_cos(g, 1, 0.3);
    p.source = [&](double b) { return dskg::field_cos(g, 2, std::exp(-b)); };
    p.quad = QuadratureSpec{32, 32, 32};
    auto coarse = dskg::linear_solution(p, 2.0);
    p.quad = QuadratureSpec{64, 64, 64};
    auto fine = dskg::linear_solution(p, 2.0);
    CHECK(rel_hs_err(coarse, fine, 2.0) < 1e-6);
}

TEST_CASE("linear_solution_dt: source-only exact form at M=3/2", "[transform]") {
    PeriodicGrid g{1, 32};
    dskg::LinearProblem p;
    p.params = dskg::ModelParams::from_M(3, cplx(1.5), 2.0);
    p.psi0 = SpectralField(g);
    p.psi1 = SpectralField(g);
    p.quad = QuadratureSpec{48, 48, 48};
    p.source = [&](double b) { return dskg::field_gaussian(g, 3.0, std::exp(-0.3 * b)); };

    const double t = 1.5, h = 1e-4;
    auto dt_exact = dskg::linear_solution_dt(p, t);
    auto fd = cplx(1.0 / (12.0 * h)) *
              (cplx(-1.0) * dskg::linear_solution(p, t + 2 * h) +
               cplx(8.0) * dskg::linear_solution(p, t + h) +
               cplx(-8.0) * dskg::linear_solution(p, t - h) +
               dskg::linear_solution(p, t - 2 * h));
    CHECK(rel_hs_err(dt_exact, fd, 2.0) < 1e-4);
}

TEST_CASE("linear_solution_dt: generic M with data", "[transform]") {
    PeriodicGrid g{1, 32};
    dskg::Rng rng(41);
    dskg::LinearProblem p;
    p.params = dskg::ModelParams::from_M(3, cplx(0.3), 2.0);
    p.psi0 = dskg::random_field(g, 4, 2.0, rng);
    p.psi1 = dskg::random_field(g, 4, 2.0, rng);
    p.quad = QuadratureSpec{32, 32, 32};

    const double t = 1.2, h = 1e-3;
    auto dt_val = dskg::linear_solution_dt(p, t);
    auto fd = cplx(0.5 / h) *
              (dskg::linear_solution(p, t + h) - dskg::linear_solution(p, t - h));
    CHECK(rel_hs_err(dt_val, fd, 2.0) < 1e-4);

    dskg::LinearProblem zero = p;
    zero.psi0 = SpectralField(g);
    zero.psi1 = SpectralField(g);
    auto out = dskg::linear_solution_dt(zero, t);
    CHECK(dskg::sobolev_norm(out, 2.0) == 0.0);
}
