#pragma once

// Experiment configuration: JSON file as the source of truth (flags only
// select the config path and overrides).  Validation errors carry the field
// path.  The canonical dump of the parsed JSON is hashed into every CSV so
// reruns are attributable.

#include <complex>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dskg/errors.hpp"
#include "dskg/evolution.hpp"
#include "dskg/field.hpp"
#include "dskg/kernels.hpp"
#include "dskg/output.hpp"
#include "dskg/semilinear.hpp"
#include "dskg/transform.hpp"
#include "dskg/verify.hpp"

namespace dskg {

using json = nlohmann::json;

enum class RunKind {
    kernel_eval,
    solve_linear,
    solve_direct,
    solve_semilinear,
    lifespan_sweep,
    verify_decay,
    verify_bounds,
    verify_appendix
};

inline RunKind run_kind_from_string(const std::string& s) {
    if (s == "kernel_eval") return RunKind::kernel_eval;
    if (s == "solve_linear") return RunKind::solve_linear;
    if (s == "solve_direct") return RunKind::solve_direct;
    if (s == "solve_semilinear") return RunKind::solve_semilinear;
    if (s == "lifespan_sweep") return RunKind::lifespan_sweep;
    if (s == "verify_decay") return RunKind::verify_decay;
    if (s == "verify_bounds") return RunKind::verify_bounds;
    if (s == "verify_appendix") return RunKind::verify_appendix;
    throw config_error("config field run: unknown kind '" + s + "'");
}

// Named initial-data profiles shared by the solve runs.
struct DataProfile {
    std::string profile = "zero";  // zero|constant|cos|gaussian|bump|random
    double amplitude = 1.0;
    double kappa = 8.0;   // gaussian sharpness
    int mode = 1;         // cos mode
    int kmax = 8;         // random band limit
    double s_weight = 2.0;

    SpectralField build(const PeriodicGrid& g, Rng& rng) const {
        if (profile == "zero") return SpectralField(g);
        if (profile == "constant") return field_constant(g, cplx(amplitude));
        if (profile == "cos") return field_cos(g, mode, amplitude);
        if (profile == "gaussian") return field_gaussian(g, kappa, amplitude);
        if (profile == "bump") return field_bump(g, amplitude);
        if (profile == "random") {
            auto f = random_field(g, kmax, s_weight, rng);
            f *= cplx(amplitude);
            return f;
        }
        throw config_error("data profile: unknown profile '" + profile + "'");
    }
};

struct KernelEvalCfg {
    std::string kind = "E";  // E|K0|K1|dEdt
    double t = 1.0, t0 = 0.0, r = 0.1;
};

struct LinearRunCfg {
    std::vector<double> t_values{1.0, 2.0, 4.0};
    std::string method = "both";  // transform|direct|both
};

struct DirectRunCfg {
    double T = 4.0;
    double rtol = 1e-8, atol = 1e-12, dt_init = 1e-3;
    double blowup_threshold = 1e8;
    int n_outputs = 25;
    bool record_dt = false;
};

struct PicardRunCfg {
    double eps = 1e-3;
    double R = 0.0;
    double gamma = 1.0;
    double tol = 1e-11;
    int max_iter = 25;
    double T = 8.0;
    int n_time_samples = 32;
};

struct LifespanRunCfg {
    std::vector<double> eps_values{1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
    double T_horizon = 30.0;
    std::string solver = "direct";  // direct|picard
};

struct VerifyRunCfg {
    double window_lo = 2.0, window_hi = 8.0;
    std::vector<std::string> cases{"homogeneous_i", "homogeneous_ii", "derivative"};
    std::vector<std::string> lemmas{"L2.3",    "K0-lemma", "zone-proposition",
                                    "P2.2",    "A2-L1.9",  "A3-LA2b",
                                    "A4-L1.9b", "A5-LA.5"};
    std::vector<double> z_limits{1e2, 1e3, 1e4};
    double limit_tol = 1e-3;
    double stability_tol = 0.02;
};

struct ExperimentConfig {
    RunKind run = RunKind::solve_linear;
    std::string output_dir = "out";
    std::uint64_t seed = 0;
    ModelParams model = ModelParams::from_m2(3, cplx(2.0), 2.0);
    PeriodicGrid grid{1, 256};
    QuadratureSpec quad{64, 64, 64};
    std::optional<NonlinearSpec> nonlinearity;
    DataProfile psi0{"gaussian", 0.1};
    DataProfile psi1{"zero"};
    KernelEvalCfg kernel;
    LinearRunCfg linear;
    DirectRunCfg direct;
    PicardRunCfg picard;
    LifespanRunCfg lifespan;
    VerifyRunCfg verify;
    std::uint64_t config_hash = 0;

    std::string comment() const {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "config_hash=%016llx",
                      static_cast<unsigned long long>(config_hash));
        return buf;
    }
};

namespace cfgdetail {

inline const json* find(const json& j, const std::string& key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

inline double num_at(const json& j, const std::string& path, double dflt) {
    if (!j.is_number())
        throw config_error("config field " + path + ": expected a number");
    (void)dflt;
    return j.get<double>();
}

inline double get_num(const json& j, const std::string& key, const std::string& path,
                      double dflt) {
    const json* v = find(j, key);
    if (!v) return dflt;
    if (!v->is_number())
        throw config_error("config field " + path + ": expected a number");
    return v->get<double>();
}

inline int get_int(const json& j, const std::string& key, const std::string& path,
                   int dflt) {
    const json* v = find(j, key);
    if (!v) return dflt;
    if (!v->is_number_integer())
        throw config_error("config field " + path + ": expected an integer");
    return v->get<int>();
}

inline bool get_bool(const json& j, const std::string& key, const std::string& path,
                     bool dflt) {
    const json* v = find(j, key);
    if (!v) return dflt;
    if (!v->is_boolean())
        throw config_error("config field " + path + ": expected a boolean");
    return v->get<bool>();
}

inline std::string get_str(const json& j, const std::string& key,
                           const std::string& path, const std::string& dflt) {
    const json* v = find(j, key);
    if (!v) return dflt;
    if (!v->is_string())
        throw config_error("config field " + path + ": expected a string");
    return v->get<std::string>();
}

// complex values: plain number or [re, im]
inline cplx get_cplx(const json& v, const std::string& path) {
    if (v.is_number()) return cplx(v.get<double>());
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return cplx(v[0].get<double>(), v[1].get<double>());
    throw config_error("config field " + path + ": expected a number or [re, im]");
}

inline std::vector<double> get_num_array(const json& j, const std::string& key,
                                         const std::string& path,
                                         std::vector<double> dflt) {
    const json* v = find(j, key);
    if (!v) return dflt;
    if (!v->is_array())
        throw config_error("config field " + path + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : *v) {
        if (!e.is_number())
            throw config_error("config field " + path + ": expected an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

inline DataProfile parse_profile(const json& j, const std::string& path) {
    DataProfile p;
    p.profile = get_str(j, "profile", path + ".profile", p.profile);
    p.amplitude = get_num(j, "amplitude", path + ".amplitude", p.amplitude);
    p.kappa = get_num(j, "kappa", path + ".kappa", p.kappa);
    p.mode = get_int(j, "mode", path + ".mode", p.mode);
    p.kmax = get_int(j, "kmax", path + ".kmax", p.kmax);
    p.s_weight = get_num(j, "s_weight", path + ".s_weight", p.s_weight);
    return p;
}

}  // namespace cfgdetail

inline ExperimentConfig parse_config(const json& root) {
    using namespace cfgdetail;
    if (!root.is_object()) throw config_error("config root: expected a JSON object");
    ExperimentConfig cfg;

    cfg.run = run_kind_from_string(get_str(root, "run", "run", "solve_linear"));
    cfg.output_dir = get_str(root, "output_dir", "output_dir", cfg.output_dir);
    cfg.seed = static_cast<std::uint64_t>(get_num(root, "seed", "seed", 0.0));

    const json* model = find(root, "model");
    if (!model) throw config_error("config field model: required");
    {
        int n = get_int(*model, "n", "model.n", 3);
        double s = get_num(*model, "s", "model.s", 2.0);
        double alpha = get_num(*model, "alpha", "model.alpha", 0.0);
        const json* m2 = find(*model, "m2");
        const json* M = find(*model, "M");
        if (!m2 && !M)
            throw config_error("config field model: one of m2 or M is required");
        if (m2 && M) {
            cfg.model.n = n;
            cfg.model.s = s;
            cfg.model.alpha = alpha;
            cfg.model.m2 = get_cplx(*m2, "model.m2");
            cfg.model.M = get_cplx(*M, "model.M");
            cplx resid = cfg.model.M * cfg.model.M -
                         (cplx(0.25 * n * n) - cfg.model.m2);
            if (std::abs(resid) > 1e-12 * (1.0 + std::abs(cfg.model.m2)))
                throw config_error(
                    "config field model.M: violates M^2 = n^2/4 - m2 (|residual| = " +
                    fmt_double(std::abs(resid)) + ")");
            if (cfg.model.M.real() < 0.0)
                throw config_error("config field model.M: Re M must be >= 0");
        } else if (m2) {
            cfg.model = ModelParams::from_m2(n, get_cplx(*m2, "model.m2"), s, alpha);
        } else {
            cfg.model = ModelParams::from_M(n, get_cplx(*M, "model.M"), s, alpha);
            if (cfg.model.M.real() < 0.0)
                throw config_error("config field model.M: Re M must be >= 0");
        }
        cfg.model.validate();
    }

    if (const json* grid = find(root, "grid")) {
        cfg.grid.d = get_int(*grid, "d", "grid.d", 1);
        cfg.grid.npts = get_int(*grid, "npts", "grid.npts", 256);
        cfg.grid.validate();
    }

    if (const json* quad = find(root, "quad")) {
        cfg.quad.nb = get_int(*quad, "nb", "quad.nb", 64);
        cfg.quad.nr = get_int(*quad, "nr", "quad.nr", 64);
        cfg.quad.ns = get_int(*quad, "ns", "quad.ns", 64);
        cfg.quad.validate();
    }

    if (const json* nl = find(root, "nonlinearity")) {
        NonlinearSpec F;
        std::string kind = get_str(*nl, "kind", "nonlinearity.kind", "cubic");
        if (kind == "power_signed")
            F.kind = NonlinearKind::power_signed;
        else if (kind == "power_abs")
            F.kind = NonlinearKind::power_abs;
        else if (kind == "cubic")
            F.kind = NonlinearKind::cubic;
        else
            throw config_error("config field nonlinearity.kind: unknown kind '" +
                               kind + "'");
        F.sign = get_num(*nl, "sign", "nonlinearity.sign", 1.0);
        F.alpha = get_num(*nl, "alpha", "nonlinearity.alpha", 2.0);
        F.lambda = get_num(*nl, "lambda", "nonlinearity.lambda", 1.0);
        F.validate();
        cfg.nonlinearity = F;
    }

    if (const json* data = find(root, "data")) {
        if (const json* p0 = find(*data, "psi0"))
            cfg.psi0 = parse_profile(*p0, "data.psi0");
        if (const json* p1 = find(*data, "psi1"))
            cfg.psi1 = parse_profile(*p1, "data.psi1");
    }

    if (const json* k = find(root, "kernel")) {
        cfg.kernel.kind = get_str(*k, "kind", "kernel.kind", "E");
        if (cfg.kernel.kind != "E" && cfg.kernel.kind != "K0" &&
            cfg.kernel.kind != "K1" && cfg.kernel.kind != "dEdt")
            throw config_error("config field kernel.kind: expected E|K0|K1|dEdt");
        cfg.kernel.t = get_num(*k, "t", "kernel.t", 1.0);
        cfg.kernel.t0 = get_num(*k, "t0", "kernel.t0", 0.0);
        cfg.kernel.r = get_num(*k, "r", "kernel.r", 0.1);
    }

    if (const json* l = find(root, "linear")) {
        cfg.linear.t_values =
            get_num_array(*l, "t_values", "linear.t_values", cfg.linear.t_values);
        cfg.linear.method = get_str(*l, "method", "linear.method", "both");
        if (cfg.linear.method != "transform" && cfg.linear.method != "direct" &&
            cfg.linear.method != "both")
            throw config_error("config field linear.method: expected transform|direct|both");
    }

    if (const json* d = find(root, "direct")) {
        cfg.direct.T = get_num(*d, "T", "direct.T", cfg.direct.T);
        cfg.direct.rtol = get_num(*d, "rtol", "direct.rtol", cfg.direct.rtol);
        cfg.direct.atol = get_num(*d, "atol", "direct.atol", cfg.direct.atol);
        cfg.direct.dt_init = get_num(*d, "dt_init", "direct.dt_init", cfg.direct.dt_init);
        cfg.direct.blowup_threshold = get_num(*d, "blowup_threshold",
                                              "direct.blowup_threshold",
                                              cfg.direct.blowup_threshold);
        cfg.direct.n_outputs = get_int(*d, "n_outputs", "direct.n_outputs",
                                       cfg.direct.n_outputs);
        cfg.direct.record_dt = get_bool(*d, "record_dt", "direct.record_dt",
                                        cfg.direct.record_dt);
        if (!(cfg.direct.T > 0.0))
            throw config_error("config field direct.T: must be > 0");
        if (!(cfg.direct.rtol > 0.0) || !(cfg.direct.atol > 0.0))
            throw config_error("config field direct.rtol/atol: must be > 0");
    }

    if (const json* p = find(root, "picard")) {
        cfg.picard.eps = get_num(*p, "eps", "picard.eps", cfg.picard.eps);
        cfg.picard.R = get_num(*p, "R", "picard.R", cfg.picard.R);
        cfg.picard.gamma = get_num(*p, "gamma", "picard.gamma", cfg.picard.gamma);
        cfg.picard.tol = get_num(*p, "tol", "picard.tol", cfg.picard.tol);
        cfg.picard.max_iter = get_int(*p, "max_iter", "picard.max_iter",
                                      cfg.picard.max_iter);
        cfg.picard.T = get_num(*p, "T", "picard.T", cfg.picard.T);
        cfg.picard.n_time_samples = get_int(*p, "n_time_samples",
                                            "picard.n_time_samples",
                                            cfg.picard.n_time_samples);
        if (!(cfg.picard.tol > 0.0))
            throw config_error("config field picard.tol: must be > 0");
        if (cfg.picard.R != 0.0 && cfg.picard.R <= cfg.picard.eps)
            throw config_error("config field picard.R: must exceed picard.eps");
    }

    if (const json* l = find(root, "lifespan")) {
        cfg.lifespan.eps_values = get_num_array(*l, "eps_values", "lifespan.eps_values",
                                                cfg.lifespan.eps_values);
        cfg.lifespan.T_horizon =
            get_num(*l, "T_horizon", "lifespan.T_horizon", cfg.lifespan.T_horizon);
        cfg.lifespan.solver = get_str(*l, "solver", "lifespan.solver", "direct");
        if (cfg.lifespan.solver != "direct" && cfg.lifespan.solver != "picard")
            throw config_error("config field lifespan.solver: expected direct|picard");
        for (double e : cfg.lifespan.eps_values)
            if (!(e > 0.0))
                throw config_error("config field lifespan.eps_values: must be > 0");
    }

    if (const json* v = find(root, "verify")) {
        if (const json* w = find(*v, "window")) {
            if (!w->is_array() || w->size() != 2)
                throw config_error("config field verify.window: expected [lo, hi]");
            cfg.verify.window_lo = (*w)[0].get<double>();
            cfg.verify.window_hi = (*w)[1].get<double>();
        }
        if (const json* c = find(*v, "cases")) {
            cfg.verify.cases.clear();
            for (const auto& e : *c) cfg.verify.cases.push_back(e.get<std::string>());
        }
        if (const json* lm = find(*v, "lemmas")) {
            cfg.verify.lemmas.clear();
            for (const auto& e : *lm) cfg.verify.lemmas.push_back(e.get<std::string>());
        }
        cfg.verify.z_limits = get_num_array(*v, "z_limits", "verify.z_limits",
                                            cfg.verify.z_limits);
        cfg.verify.limit_tol = get_num(*v, "limit_tol", "verify.limit_tol",
                                       cfg.verify.limit_tol);
        cfg.verify.stability_tol = get_num(*v, "stability_tol", "verify.stability_tol",
                                           cfg.verify.stability_tol);
    }

    cfg.config_hash = fnv1a_hash(root.dump());
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config file not found: " + path);
    json root;
    try {
        in >> root;
    } catch (const std::exception& e) {
        throw config_error("config file " + path + ": invalid JSON (" + e.what() + ")");
    }
    return parse_config(root);
}

}  // namespace dskg
