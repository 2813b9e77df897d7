#pragma once

#include <fstream>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "gsqg/common.hpp"
#include "gsqg/functional.hpp"
#include "gsqg/solver.hpp"

namespace gsqg {

using json = nlohmann::ordered_json;

enum class RunMode { spectrum, kr_critical, solve, validate };

struct PatchSpec {
    double kappa = kPi;
    Vec2 center_seed{0.0, 0.0};
};

struct RunConfig {
    RunMode mode = RunMode::solve;
    double gamma = 1.5;
    DomainTag domain = DomainTag::disc;
    double domain_radius = 1.0;
    std::vector<PatchSpec> patches{PatchSpec{}};
    int truncation = 64;
    QuadratureConfig quad;
    std::vector<double> eps_targets{0.01, 0.02, 0.04};
    double newton_tol = 1e-10;
    int newton_max_iter = 25;
    double kr_tol = 1e-11;
    std::string jacobian = "auto";  // auto | full | fast
    bool symmetrize = true;
    bool secant_predictor = false;
    std::string out_dir = "out";
    bool emit_timings = false;
    bool verify = false;
    int sigma_table_n = 50;

    SolverOptions solverOptions() const {
        SolverOptions o;
        o.tol = newton_tol;
        o.max_iter = newton_max_iter;
        o.jacobian = jacobian == "full"   ? JacobianMode::full
                     : jacobian == "fast" ? JacobianMode::fast
                                          : JacobianMode::automatic;
        o.symmetrize = symmetrize;
        o.secant_predictor = secant_predictor;
        return o;
    }

    GreenKernel kernel() const {
        const GammaParam gp = (mode == RunMode::validate) ? GammaParam::makeExtended(gamma)
                                                          : GammaParam::make(gamma);
        return domain == DomainTag::disc ? GreenKernel::disc(gp, domain_radius)
                                         : GreenKernel::free(gp);
    }

    VortexConfiguration seedConfiguration() const {
        VortexConfiguration c;
        for (const auto& p : patches) {
            c.points.push_back(p.center_seed);
            c.strengths.push_back(p.kappa);
        }
        return c;
    }
};

inline const char* mode_name(RunMode m) {
    switch (m) {
        case RunMode::spectrum: return "spectrum";
        case RunMode::kr_critical: return "kr-critical";
        case RunMode::solve: return "solve";
        case RunMode::validate: return "validate";
    }
    return "?";
}

inline RunMode parse_mode(const std::string& s) {
    if (s == "spectrum") return RunMode::spectrum;
    if (s == "kr-critical") return RunMode::kr_critical;
    if (s == "solve") return RunMode::solve;
    if (s == "validate") return RunMode::validate;
    throw config_error("mode: expected spectrum|kr-critical|solve|validate, got '" + s + "'");
}

inline json config_to_json(const RunConfig& c) {
    json j;
    j["schema_version"] = 1;
    j["mode"] = mode_name(c.mode);
    j["gamma"] = c.gamma;
    j["domain"] = {{"type", c.domain == DomainTag::disc ? "disc" : "free"},
                   {"radius", c.domain_radius}};
    j["patches"] = json::array();
    for (const auto& p : c.patches) {
        j["patches"].push_back(
            {{"kappa", p.kappa}, {"center_seed", {p.center_seed.x, p.center_seed.y}}});
    }
    j["truncation"] = c.truncation;
    j["quadrature"] = {{"eta_grid", c.quad.eta_grid},
                       {"graded_levels", c.quad.graded_levels},
                       {"graded_ratio", c.quad.graded_ratio},
                       {"panel_nodes", c.quad.panel_nodes},
                       {"g3_source_eta", c.quad.g3_source_eta},
                       {"radial_nodes", c.quad.radial_nodes},
                       {"verbatim_rho_in_g2", c.quad.verbatim_rho_in_g2}};
    j["eps_targets"] = c.eps_targets;
    j["tolerances"] = {{"newton_tol", c.newton_tol},
                       {"newton_max_iter", c.newton_max_iter},
                       {"kr_tol", c.kr_tol}};
    j["solver"] = {{"jacobian", c.jacobian},
                   {"symmetrize", c.symmetrize},
                   {"secant_predictor", c.secant_predictor}};
    j["output"] = {{"dir", c.out_dir}, {"emit_timings", c.emit_timings}};
    j["sigma_table_n"] = c.sigma_table_n;
    return j;
}

namespace detail {

template <typename T>
T get_or(const json& j, const std::string& key, const T& fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw config_error(where + "/" + key + ": " + e.what());
    }
}

}  // namespace detail

inline RunConfig config_from_json(const json& j) {
    RunConfig c;
    if (j.contains("mode")) c.mode = parse_mode(j.at("mode").get<std::string>());
    c.gamma = detail::get_or(j, "gamma", c.gamma, "");
    if (j.contains("domain")) {
        const auto& d = j.at("domain");
        const std::string t = detail::get_or<std::string>(d, "type", "disc", "domain");
        if (t == "disc") {
            c.domain = DomainTag::disc;
        } else if (t == "free") {
            c.domain = DomainTag::free_space;
        } else {
            throw config_error("domain/type: expected disc|free, got '" + t + "'");
        }
        c.domain_radius = detail::get_or(d, "radius", 1.0, "domain");
    }
    if (j.contains("patches")) {
        c.patches.clear();
        int idx = 0;
        for (const auto& p : j.at("patches")) {
            PatchSpec ps;
            ps.kappa = detail::get_or(p, "kappa", kPi, "patches[" + std::to_string(idx) + "]");
            if (p.contains("center_seed")) {
                const auto& cs = p.at("center_seed");
                if (!cs.is_array() || cs.size() != 2) {
                    throw config_error("patches[" + std::to_string(idx) +
                                       "]/center_seed: expected [x, y]");
                }
                ps.center_seed = {cs[0].get<double>(), cs[1].get<double>()};
            }
            c.patches.push_back(ps);
            ++idx;
        }
    }
    c.truncation = detail::get_or(j, "truncation", c.truncation, "");
    if (j.contains("quadrature")) {
        const auto& q = j.at("quadrature");
        c.quad.eta_grid = detail::get_or(q, "eta_grid", c.quad.eta_grid, "quadrature");
        c.quad.graded_levels = detail::get_or(q, "graded_levels", c.quad.graded_levels, "quadrature");
        c.quad.graded_ratio = detail::get_or(q, "graded_ratio", c.quad.graded_ratio, "quadrature");
        c.quad.panel_nodes = detail::get_or(q, "panel_nodes", c.quad.panel_nodes, "quadrature");
        c.quad.g3_source_eta =
            detail::get_or(q, "g3_source_eta", c.quad.g3_source_eta, "quadrature");
        c.quad.radial_nodes = detail::get_or(q, "radial_nodes", c.quad.radial_nodes, "quadrature");
        c.quad.verbatim_rho_in_g2 =
            detail::get_or(q, "verbatim_rho_in_g2", c.quad.verbatim_rho_in_g2, "quadrature");
    }
    if (j.contains("eps_targets")) c.eps_targets = j.at("eps_targets").get<std::vector<double>>();
    if (j.contains("tolerances")) {
        const auto& t = j.at("tolerances");
        c.newton_tol = detail::get_or(t, "newton_tol", c.newton_tol, "tolerances");
        c.newton_max_iter = detail::get_or(t, "newton_max_iter", c.newton_max_iter, "tolerances");
        c.kr_tol = detail::get_or(t, "kr_tol", c.kr_tol, "tolerances");
    }
    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        c.jacobian = detail::get_or<std::string>(s, "jacobian", c.jacobian, "solver");
        c.symmetrize = detail::get_or(s, "symmetrize", c.symmetrize, "solver");
        c.secant_predictor = detail::get_or(s, "secant_predictor", c.secant_predictor, "solver");
    }
    if (j.contains("output")) {
        const auto& o = j.at("output");
        c.out_dir = detail::get_or<std::string>(o, "dir", c.out_dir, "output");
        c.emit_timings = detail::get_or(o, "emit_timings", c.emit_timings, "output");
    }
    c.sigma_table_n = detail::get_or(j, "sigma_table_n", c.sigma_table_n, "");
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw config_error(path + ": " + e.what());
    }
    return config_from_json(j);
}

// Mode-dependent validation. Throws config_error with an attributed message.
inline void validate_config(const RunConfig& c) {
    const bool solveish = c.mode == RunMode::solve || c.mode == RunMode::kr_critical;
    if (c.mode == RunMode::validate) {
        if (!(c.gamma > 0.0 && c.gamma < 2.0)) {
            throw config_error("gamma: validate mode needs gamma in (0,2)");
        }
    } else if (!(c.gamma > 1.0 && c.gamma < 2.0)) {
        throw config_error("gamma: must lie in (1,2) for " + std::string(mode_name(c.mode)) +
                           " mode");
    }
    if (c.mode == RunMode::spectrum && c.sigma_table_n < 1) {
        throw config_error("sigma_table_n: must be >= 1");
    }
    if (solveish) {
        if (c.patches.empty()) throw config_error("patches: at least one patch required");
        for (size_t i = 0; i < c.patches.size(); ++i) {
            if (!(c.patches[i].kappa > 0.0)) {
                throw config_error("patches[" + std::to_string(i) + "]/kappa: must be positive");
            }
        }
    }
    if (c.mode == RunMode::solve) {
        if (c.eps_targets.empty()) throw config_error("eps_targets: must not be empty");
        double prev = 0.0;
        for (size_t i = 0; i < c.eps_targets.size(); ++i) {
            if (!(c.eps_targets[i] > prev)) {
                throw config_error("eps_targets[" + std::to_string(i) +
                                   "]: targets must be positive and strictly increasing");
            }
            prev = c.eps_targets[i];
        }
        if (c.truncation < 2) throw config_error("truncation: must be >= 2");
    }
}

}  // namespace gsqg
