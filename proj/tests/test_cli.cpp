#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dskg/config.hpp"
#include "dskg/runner.hpp"

using dskg::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("minimal config gets defaults", "[cli]") {
    json j{{"model", {{"n", 3}, {"m2", 2.0}}}};
    auto cfg = dskg::parse_config(j);
    CHECK(cfg.grid.npts == 256);
    CHECK(cfg.quad.nb == 64);
    CHECK(cfg.quad.nr == 64);
    CHECK(cfg.quad.ns == 64);
    CHECK(cfg.seed == 0);
    CHECK(std::abs(cfg.model.M - dskg::cplx(0.5)) < 1e-14);
    CHECK_FALSE(cfg.nonlinearity.has_value());
}

TEST_CASE("inconsistent M and m2 rejected with the invariant named", "[cli]") {
    json j{{"model", {{"n", 3}, {"m2", 2.0}, {"M", 0.7}}}};
    try {
        dskg::parse_config(j);
        FAIL("expected config_error");
    } catch (const dskg::config_error& e) {
        std::string msg = e.what();
        CHECK(msg.find("model.M") != std::string::npos);
        CHECK(msg.find("M^2 = n^2/4 - m2") != std::string::npos);
    }
}

TEST_CASE("field-path errors on malformed values", "[cli]") {
    json bad_n{{"model", {{"n", "three"}, {"m2", 2.0}}}};
    CHECK_THROWS_WITH(dskg::parse_config(bad_n),
                      Catch::Matchers::ContainsSubstring("model.n"));

    json bad_run{{"run", "fly"}, {"model", {{"n", 3}, {"m2", 2.0}}}};
    CHECK_THROWS_WITH(dskg::parse_config(bad_run),
                      Catch::Matchers::ContainsSubstring("run"));

    json bad_grid{{"model", {{"n", 3}, {"m2", 2.0}}}, {"grid", {{"d", 1}, {"npts", 100}}}};
    CHECK_THROWS_AS(dskg::parse_config(bad_grid), dskg::config_error);

    json no_model{{"run", "solve_linear"}};
    CHECK_THROWS_WITH(dskg::parse_config(no_model),
                      Catch::Matchers::ContainsSubstring("model"));
}

TEST_CASE("lifespan config round trip", "[cli]") {
    auto cfg = dskg::load_config(std::string(DSKG_SOURCE_DIR) + "/configs/lifespan.json");
    CHECK(cfg.run == dskg::RunKind::lifespan_sweep);
    CHECK(cfg.lifespan.eps_values.size() == 5);
    CHECK(cfg.lifespan.eps_values.front() == 1e-2);
    CHECK(cfg.lifespan.eps_values.back() == 1e-4);
    CHECK(cfg.lifespan.T_horizon == 25.0);
    CHECK(cfg.lifespan.solver == "direct");
    CHECK(std::abs(cfg.model.M - dskg::cplx(2.5)) < 1e-14);
    REQUIRE(cfg.nonlinearity.has_value());
    CHECK(cfg.nonlinearity->kind == dskg::NonlinearKind::power_abs);

    // parse -> dump -> parse is the identity on the parsed fields
    json j;
    std::ifstream in(std::string(DSKG_SOURCE_DIR) + "/configs/lifespan.json");
    in >> j;
    auto cfg2 = dskg::parse_config(json::parse(j.dump()));
    CHECK(cfg2.lifespan.eps_values == cfg.lifespan.eps_values);
    CHECK(cfg2.config_hash == cfg.config_hash);
}

TEST_CASE("missing config file raises config_error", "[cli]") {
    CHECK_THROWS_AS(dskg::load_config("/nonexistent/path.json"), dskg::config_error);
}

TEST_CASE("kernel eval run writes its CSV", "[cli]") {
    dskg::ExperimentConfig cfg;
    cfg.run = dskg::RunKind::kernel_eval;
    cfg.output_dir = (fs::temp_directory_path() / "dskg_test_kernel").string();
    cfg.model = dskg::ModelParams::from_M(3, dskg::cplx(0.5), 2.0);
    cfg.kernel = {"E", 1.5, 0.3, 0.2};
    std::ostringstream log;
    dskg::run_experiment(cfg, log);
    CHECK(log.str().find("direct_series") != std::string::npos);
    auto body = slurp(fs::path(cfg.output_dir) / "kernel_eval.csv");
    CHECK(body.find("1.2298015555784749") != std::string::npos);
    fs::remove_all(cfg.output_dir);
}

TEST_CASE("reruns with the same seed are byte-identical", "[cli]") {
    json j{{"run", "solve_linear"},
           {"seed", 42},
           {"model", {{"n", 3}, {"M", 0.8}, {"s", 2.0}}},
           {"grid", {{"d", 1}, {"npts", 64}}},
           {"quad", {{"nb", 24}, {"nr", 24}, {"ns", 24}}},
           {"data",
            {{"psi0", {{"profile", "random"}, {"kmax", 5}, {"s_weight", 2.0}}},
             {"psi1", {{"profile", "random"}, {"kmax", 3}, {"s_weight", 2.0}}}}},
           {"linear", {{"t_values", {0.5, 1.0}}, {"method", "both"}}}};

    auto run_into = [&](const std::string& dir) {
        auto cfg = dskg::parse_config(j);
        cfg.output_dir = dir;
        std::ostringstream log;
        dskg::run_experiment(cfg, log);
    };
    auto d1 = (fs::temp_directory_path() / "dskg_det_a").string();
    auto d2 = (fs::temp_directory_path() / "dskg_det_b").string();
    fs::remove_all(d1);
    fs::remove_all(d2);
    run_into(d1);
    run_into(d2);
    for (const char* name :
         {"trajectory_transform.csv", "trajectory_direct.csv", "discrepancy.csv"}) {
        INFO(name);
        auto a = slurp(fs::path(d1) / name);
        auto b = slurp(fs::path(d2) / name);
        CHECK(a.size() > 0);
        CHECK(a == b);
    }
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("per-criterion failure classes", "[cli]") {
    // non-convergence surfaces as nonconvergence_error from the runner
    json j{{"run", "solve_semilinear"},
           {"seed", 0},
           {"model", {{"n", 3}, {"M", 0.25}, {"s", 2.0}, {"alpha", 2.0}}},
           {"grid", {{"d", 1}, {"npts", 32}}},
           {"quad", {{"nb", 16}, {"nr", 16}, {"ns", 16}}},
           {"nonlinearity", {{"kind", "cubic"}, {"lambda", 100.0}}},
           {"data", {{"psi0", {{"profile", "gaussian"}, {"amplitude", 2.0}}}}},
           {"picard", {{"eps", 4.0}, {"gamma", 1.0}, {"tol", 1e-10},
                       {"max_iter", 6}, {"T", 6.0}, {"n_time_samples", 10}}}};
    auto cfg = dskg::parse_config(j);
    cfg.output_dir = (fs::temp_directory_path() / "dskg_nonconv").string();
    std::ostringstream log;
    CHECK_THROWS_AS(dskg::run_experiment(cfg, log), dskg::nonconvergence_error);
    fs::remove_all(cfg.output_dir);
}
