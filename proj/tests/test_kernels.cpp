#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "dskg/kernels.hpp"

using dskg::cplx;
using dskg::KernelArgs;
namespace cf = dskg::closed_form;

namespace {
double rel_err(cplx got, cplx want) {
    return std::abs(got - want) / std::max(1e-300, std::abs(want));
}
}  // namespace

TEST_CASE("model params principal root", "[kernels]") {
    auto p = dskg::ModelParams::from_m2(3, cplx(2.0), 2.0);
    CHECK(rel_err(p.M, cplx(0.5)) < 1e-14);
    p.validate();

    auto q = dskg::ModelParams::from_m2(3, cplx(-4.0), 2.0);
    CHECK(rel_err(q.M, cplx(2.5)) < 1e-14);

    auto c = dskg::ModelParams::from_m2(3, cplx(2.0, 1.0), 2.0);
    CHECK(c.M.real() >= 0.0);
    CHECK(rel_err(c.M * c.M, cplx(2.25) - cplx(2.0, 1.0)) < 1e-14);

    auto bad = dskg::ModelParams::from_m2(3, cplx(2.0), 2.0);
    bad.M = cplx(0.7);
    CHECK_THROWS_AS(bad.validate(), dskg::config_error);
}

TEST_CASE("kernel closed forms at M=1/2 over a grid", "[kernels]") {
    cplx M(0.5);
    for (int i = 0; i < 20; ++i) {
        for (int j = 0; j < 20; ++j) {
            double t = 0.15 + 0.3 * j;
            double t0 = 0.1 * t;
            double rmax = std::exp(-t0) - std::exp(-t);
            double r = rmax * i / 20.0;
            CHECK(rel_err(dskg::kernel_E({r, t, t0}, M), cf::E_half(t0, t)) < 1e-9);

            double z = (1.0 - std::exp(-t)) * i / 20.0;
            CHECK(rel_err(dskg::kernel_K1(z, t, M), cf::K1_half(t)) < 1e-9);
            CHECK(rel_err(dskg::kernel_K0(z, t, M), cf::K0_half(t)) < 1e-9);
        }
    }
}

TEST_CASE("kernel closed forms at M=3/2 over a grid", "[kernels]") {
    cplx M(1.5);
    for (int i = 0; i < 20; ++i) {
        for (int j = 0; j < 20; ++j) {
            double t = 0.2 + 0.25 * j;
            double b = 0.15 * t;
            double rmax = std::exp(-b) - std::exp(-t);
            double r = rmax * i / 20.0;
            CHECK(rel_err(dskg::kernel_E({r, t, b}, M), cf::E_threehalf(r, t, b)) < 1e-9);
            CHECK(rel_err(dskg::kernel_dE_dt(r, t, b, M), cf::dE_dt_threehalf(r, t, b)) < 1e-9);
        }
    }
}

TEST_CASE("characteristic boundary identity E = e^{(b+t)/2}/2", "[kernels]") {
    for (double re : {0.1, 0.45, 0.8, 1.2, 1.6, 2.0, 2.5}) {
        for (double im : {0.0, 0.5}) {
            cplx M(re, im);
            for (double t : {0.5, 1.0, 3.0}) {
                for (double b : {0.0, 0.2, 0.6 * t}) {
                    double r = std::exp(-b) - std::exp(-t);
                    cplx want = 0.5 * std::exp(0.5 * (b + t));
                    CHECK(rel_err(dskg::kernel_E({r, t, b}, M), want) < 1e-8);
                }
            }
        }
    }
}

TEST_CASE("kernel values against high-precision references", "[kernels]") {
    // mpmath (50 digits), frozen
    CHECK(rel_err(dskg::kernel_K1(0.3, 1.0, cplx(0.25)),
                  cplx(0.79511713303095865726)) < 1e-11);
    CHECK(rel_err(dskg::kernel_E({0.2, 1.5, 0.4}, cplx(0.3, 0.5)),
                  cplx(1.1687207225726813419, 0.087389869542299594567)) < 1e-11);
    CHECK(rel_err(dskg::kernel_K0(0.1, 2.0, cplx(1.25)),
                  cplx(0.76886121903342112632)) < 1e-10);
    CHECK(rel_err(dskg::kernel_K0(0.2, 1.0, cplx(0.3)),
                  cplx(-0.46188213640271182142)) < 1e-11);
    CHECK(rel_err(dskg::kernel_dE_dt(0.1, 1.0, 0.2, cplx(0.3)),
                  cplx(0.39067785299386861827)) < 1e-10);
    CHECK(rel_err(dskg::kernel_dE_dt(0.3, 2.0, 0.5, cplx(1.2)),
                  cplx(2.6997717516870679747)) < 1e-10);
}

TEST_CASE("K1 boundary value at z = 1-e^{-t}", "[kernels]") {
    for (double re : {0.3, 0.9, 1.7}) {
        cplx M(re, 0.25);
        for (double t : {0.5, 2.0}) {
            double z = 1.0 - std::exp(-t);
            cplx want = 0.5 * std::exp(0.5 * t);
            CHECK(rel_err(dskg::kernel_K1(z, t, M), want) < 1e-8);
        }
    }
}

TEST_CASE("K1 is E at t0=0 (same code path)", "[kernels]") {
    cplx M(0.8, 0.3);
    double z = 0.35, t = 1.2;
    CHECK(dskg::kernel_K1(z, t, M) == dskg::kernel_E({z, t, 0.0}, M));
}

TEST_CASE("K0 equals -dE/db at b=0", "[kernels]") {
    // one-sided second-order difference keeps b >= 0
    cplx M(0.3);
    double z = 0.2, t = 1.0, h = 1e-5;
    auto E = [&](double b) { return dskg::kernel_E({z, t, b}, M); };
    cplx dEdb = (-3.0 * E(0.0) + 4.0 * E(h) - E(2.0 * h)) / (2.0 * h);
    CHECK(rel_err(-dEdb, dskg::kernel_K0(z, t, M)) < 1e-5);
}

TEST_CASE("dE/dt matches finite differences of E", "[kernels]") {
    cplx M(0.3);
    double r = 0.1, b = 0.2, t = 1.0, h = 1e-5;
    cplx fd = (dskg::kernel_E({r, t + h, b}, M) - dskg::kernel_E({r, t - h, b}, M)) /
              (2.0 * h);
    CHECK(rel_err(fd, dskg::kernel_dE_dt(r, t, b, M)) < 1e-5);

    cplx Mc(1.4, 0.6);
    fd = (dskg::kernel_E({r, t + h, b}, Mc) - dskg::kernel_E({r, t - h, b}, Mc)) /
         (2.0 * h);
    CHECK(rel_err(fd, dskg::kernel_dE_dt(r, t, b, Mc)) < 1e-5);
}

TEST_CASE("dE/dt closed form at M=1/2", "[kernels]") {
    double r = 0.15, b = 0.3, t = 1.4;
    cplx want = 0.25 * std::exp(0.5 * (b + t));
    CHECK(rel_err(dskg::kernel_dE_dt(r, t, b, cplx(0.5)), want) < 1e-10);
}

TEST_CASE("conjugation symmetry in M", "[kernels]") {
    cplx M(0.7, 0.4);
    double r = 0.2, t = 1.1, b = 0.25;
    cplx e1 = dskg::kernel_E({r, t, b}, M);
    cplx e2 = dskg::kernel_E({r, t, b}, std::conj(M));
    CHECK(std::abs(e1 - std::conj(e2)) < 1e-12 * std::abs(e1));

    cplx k1 = dskg::kernel_K0(0.3, 1.5, M);
    cplx k2 = dskg::kernel_K0(0.3, 1.5, std::conj(M));
    CHECK(std::abs(k1 - std::conj(k2)) < 1e-12 * std::abs(k1));

    cplx d1 = dskg::kernel_dE_dt(r, t, b, M);
    cplx d2 = dskg::kernel_dE_dt(r, t, b, std::conj(M));
    CHECK(std::abs(d1 - std::conj(d2)) < 1e-12 * std::abs(d1));
}

TEST_CASE("kernel domain errors", "[kernels]") {
    cplx M(0.5);
    CHECK_THROWS_AS(dskg::kernel_E({0.9, 1.0, 0.5}, M), dskg::domain_error);
    CHECK_THROWS_AS(dskg::kernel_E({0.1, 0.5, 0.8}, M), dskg::domain_error);
    double t = 1.0;
    CHECK_THROWS_AS(dskg::kernel_K0(1.0 - std::exp(-t), t, M), dskg::domain_error);
    CHECK_THROWS_AS(dskg::kernel_K0((1.0 - std::exp(-t)) * (1.0 - 1e-14), t, M),
                    dskg::domain_error);
    CHECK_THROWS_AS(dskg::kernel_dE_dt(0.2, 0.5, 0.7, M), dskg::domain_error);
}
