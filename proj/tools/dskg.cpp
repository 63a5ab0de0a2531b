// dskg: kernel evaluation, linear/semilinear solves, lifespan sweeps, and
// verification runs for the damped wave equation on an exponentially
// contracting background.  JSON configs are the source of truth; flags select
// the config path and a few overrides.

#include <complex>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dskg/dskg.hpp"

namespace {

dskg::ExperimentConfig load_with_overrides(const std::string& config_path,
                                           const std::string& output_dir) {
    auto cfg = dskg::load_config(config_path);
    if (!output_dir.empty()) cfg.output_dir = output_dir;
    return cfg;
}

int dispatch(dskg::RunKind kind, const std::string& config_path,
             const std::string& output_dir) {
    auto cfg = load_with_overrides(config_path, output_dir);
    cfg.run = kind;
    dskg::run_experiment(cfg);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"integral-transform and direct solvers for the damped wave "
                 "equation with complex mass on a periodic torus"};
    app.require_subcommand(1);

    std::string config_path, output_dir;

    // kernel eval: direct flags, no config required
    auto* kernel = app.add_subcommand("kernel", "kernel function evaluation");
    kernel->require_subcommand(1);
    auto* keval = kernel->add_subcommand("eval", "evaluate E, K0, K1 or dEdt");
    std::string kind = "E";
    std::pair<double, double> Mval{0.5, 0.0};
    double topt = 1.0, t0opt = 0.0, ropt = 0.1;
    keval->add_option("--kind", kind, "E|K0|K1|dEdt")->default_val("E");
    keval->add_option("--M", Mval, "mass parameter M as re,im")->delimiter(',');
    keval->add_option("--t", topt, "time t");
    keval->add_option("--t0", t0opt, "second time t0 (b for dEdt)");
    keval->add_option("--r", ropt, "spatial offset (z for K0/K1)");
    std::string keval_out = "out";
    keval->add_option("--output-dir", keval_out, "artifact directory");

    auto* solve = app.add_subcommand("solve", "linear / direct / semilinear solves");
    solve->require_subcommand(1);
    auto* slin = solve->add_subcommand("linear", "transform and/or direct linear solve");
    std::string method;
    slin->add_option("--config", config_path, "JSON config")->required();
    slin->add_option("--method", method, "transform|direct|both (override)");
    slin->add_option("--output-dir", output_dir, "artifact directory override");
    auto* sdir = solve->add_subcommand("direct", "direct pseudo-spectral solve");
    sdir->add_option("--config", config_path, "JSON config")->required();
    sdir->add_option("--output-dir", output_dir, "artifact directory override");
    auto* ssemi = solve->add_subcommand("semilinear", "Picard iteration solve");
    ssemi->add_option("--config", config_path, "JSON config")->required();
    ssemi->add_option("--output-dir", output_dir, "artifact directory override");

    auto* lifespan = app.add_subcommand("lifespan", "blow-up lifespan experiments");
    lifespan->require_subcommand(1);
    auto* lsweep = lifespan->add_subcommand("sweep", "blow-up time vs data size");
    lsweep->add_option("--config", config_path, "JSON config")->required();
    lsweep->add_option("--output-dir", output_dir, "artifact directory override");

    auto* verify = app.add_subcommand("verify", "theorem-to-numbers checks");
    verify->require_subcommand(1);
    auto* vdecay = verify->add_subcommand("decay", "decay-rate fits");
    vdecay->add_option("--config", config_path, "JSON config")->required();
    vdecay->add_option("--output-dir", output_dir, "artifact directory override");
    auto* vbounds = verify->add_subcommand("bounds", "kernel-integral bound ratios");
    vbounds->add_option("--config", config_path, "JSON config")->required();
    vbounds->add_option("--output-dir", output_dir, "artifact directory override");
    auto* vappendix = verify->add_subcommand("appendix", "hypergeometric limit checks");
    vappendix->add_option("--config", config_path, "JSON config")->required();
    vappendix->add_option("--output-dir", output_dir, "artifact directory override");

    CLI11_PARSE(app, argc, argv);

    try {
        if (keval->parsed()) {
            dskg::ExperimentConfig cfg;
            cfg.run = dskg::RunKind::kernel_eval;
            cfg.output_dir = keval_out;
            cfg.model = dskg::ModelParams::from_M(3, {Mval.first, Mval.second}, 2.0);
            cfg.kernel = {kind, topt, t0opt, ropt};
            if (kind != "E" && kind != "K0" && kind != "K1" && kind != "dEdt")
                throw dskg::config_error("--kind must be E|K0|K1|dEdt");
            cfg.config_hash = dskg::fnv1a_hash("kernel_eval:" + kind);
            dskg::run_experiment(cfg);
            return 0;
        }
        if (slin->parsed()) {
            auto cfg = load_with_overrides(config_path, output_dir);
            cfg.run = dskg::RunKind::solve_linear;
            if (!method.empty()) {
                if (method != "transform" && method != "direct" && method != "both")
                    throw dskg::config_error("--method must be transform|direct|both");
                cfg.linear.method = method;
            }
            dskg::run_experiment(cfg);
            return 0;
        }
        if (sdir->parsed()) return dispatch(dskg::RunKind::solve_direct, config_path, output_dir);
        if (ssemi->parsed())
            return dispatch(dskg::RunKind::solve_semilinear, config_path, output_dir);
        if (lsweep->parsed())
            return dispatch(dskg::RunKind::lifespan_sweep, config_path, output_dir);
        if (vdecay->parsed())
            return dispatch(dskg::RunKind::verify_decay, config_path, output_dir);
        if (vbounds->parsed())
            return dispatch(dskg::RunKind::verify_bounds, config_path, output_dir);
        if (vappendix->parsed())
            return dispatch(dskg::RunKind::verify_appendix, config_path, output_dir);
    } catch (const dskg::nonconvergence_error& e) {
        std::cerr << "non-convergence: " << e.what() << "\n";
        return 4;
    } catch (const dskg::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const dskg::numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
