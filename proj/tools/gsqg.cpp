// Command-line front end: sigma tables, Kirchhoff-Routh critical points,
// Newton continuation runs, and the cross-validation battery.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "gsqg/checks.hpp"
#include "gsqg/config.hpp"
#include "gsqg/contour.hpp"
#include "gsqg/kr.hpp"
#include "gsqg/solver.hpp"
#include "gsqg/special.hpp"

namespace fs = std::filesystem;
using namespace gsqg;
using Clock = std::chrono::steady_clock;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot write '" + path.string() + "'");
    out << content;
}

json vec2_json(const Vec2& v) { return json::array({v.x, v.y}); }

int run_spectrum(const RunConfig& cfg) {
    std::string csv = "j,sigma_j,sigma_j_times_j\n";
    for (int j = 1; j <= cfg.sigma_table_n; ++j) {
        const double s = sigma(j, cfg.gamma);
        csv += std::to_string(j) + "," + csv_num(s) + "," + csv_num(s * j) + "\n";
    }
    fs::create_directories(cfg.out_dir);
    const fs::path path = fs::path(cfg.out_dir) / "sigma_table.csv";
    write_file(path, csv);
    std::cout << "wrote " << path.string() << " (" << cfg.sigma_table_n << " rows)\n";
    return 0;
}

int run_kr_critical(const RunConfig& cfg) {
    const GreenKernel kernel = cfg.kernel();
    std::vector<double> strengths;
    for (const auto& p : cfg.patches) strengths.push_back(p.kappa);

    std::vector<VortexConfiguration> seeds = grid_seeds(kernel, strengths);
    seeds.push_back(cfg.seedConfiguration());
    const auto points = find_critical_points(kernel, seeds, cfg.kr_tol);

    json out;
    out["schema_version"] = 1;
    out["mode"] = "kr-critical";
    out["provenance"] = config_to_json(cfg);
    out["critical_points"] = json::array();
    for (const auto& cp : points) {
        json p;
        p["points"] = json::array();
        for (const auto& pt : cp.config.points) p["points"].push_back(vec2_json(pt));
        p["strengths"] = cp.config.strengths;
        p["grad_norm"] = cp.grad_norm;
        p["nondegenerate"] = cp.nondegenerate;
        p["index"] = cp.index;
        p["hessian_eigenvalues"] = json::array();
        for (int i = 0; i < cp.hess_eigenvalues.size(); ++i) {
            p["hessian_eigenvalues"].push_back(cp.hess_eigenvalues[i]);
        }
        out["critical_points"].push_back(p);
    }
    fs::create_directories(cfg.out_dir);
    const fs::path path = fs::path(cfg.out_dir) / "kr_critical.json";
    write_file(path, out.dump(2) + "\n");
    std::cout << "found " << points.size() << " critical point(s); wrote " << path.string()
              << "\n";
    return 0;
}

std::string boundary_csv(const ContinuationState& s, double gamma) {
    std::string csv = "patch_index,beta,x,y,curvature\n";
    const auto geoms = s.geometries(gamma);
    const int mgrid = 4 * s.truncation();
    for (int i = 0; i < s.patchCount(); ++i) {
        for (int k = 0; k < mgrid; ++k) {
            const double beta = kTwoPi * k / mgrid;
            const Vec2 z = geoms[i].boundaryPoint(beta);
            csv += std::to_string(i) + "," + csv_num(beta) + "," + csv_num(z.x) + "," +
                   csv_num(z.y) + "," + csv_num(signed_curvature(geoms[i], beta)) + "\n";
        }
    }
    return csv;
}

int run_solve(const RunConfig& cfg) {
    const auto t0 = Clock::now();
    const GreenKernel kernel = cfg.kernel();
    const VortexConfiguration seed = cfg.seedConfiguration();
    const SolverOptions opts = cfg.solverOptions();

    const auto t1 = Clock::now();
    const ContinuationResult res =
        continue_in_eps(kernel, seed, cfg.eps_targets, cfg.truncation, cfg.quad, opts);
    const auto t2 = Clock::now();

    json out;
    out["schema_version"] = 1;
    out["mode"] = "solve";
    out["provenance"] = config_to_json(cfg);
    out["norm_order_k"] = opts.sobolev_k;
    out["completed"] = res.completed;
    if (!res.message.empty()) out["message"] = res.message;
    out["warnings"] = res.warnings;
    out["base_centers"] = json::array();
    for (const auto& c : res.curve.front().centers) out["base_centers"].push_back(vec2_json(c));

    out["states"] = json::array();
    fs::create_directories(cfg.out_dir);
    for (size_t t = 1; t < res.curve.size(); ++t) {
        const ContinuationState& s = res.curve[t];
        json js;
        js["eps"] = s.eps;
        js["centers"] = json::array();
        for (const auto& c : s.centers) js["centers"].push_back(vec2_json(c));
        js["rhos"] = s.rhos;
        js["shapes"] = json::array();
        for (const auto& g : s.shapes) {
            js["shapes"].push_back({{"a", g.a}, {"b", g.b}});
        }
        const NewtonReport& rep = res.reports[t - 1];
        js["newton"] = {{"iterations", rep.iterations},
                        {"residual_norms", rep.residual_norms},
                        {"converged", rep.converged}};
        const VerificationReport v = verify_solution(kernel, s, cfg.quad);
        json jv;
        jv["residual_norm"] = v.residual_norm;
        jv["term_norms"] = {{"g1", v.g1_norm}, {"g2", v.g2_norm}, {"g3", v.g3_norm}};
        jv["mean_projection"] = v.mean_projection;
        jv["flux_rel_error"] = json::array();
        jv["radius_deviation"] = json::array();
        jv["min_curvature"] = json::array();
        jv["centroids"] = json::array();
        bool convex = true;
        for (const auto& pv : v.patches) {
            jv["flux_rel_error"].push_back(pv.flux_rel_error);
            jv["radius_deviation"].push_back(pv.radius_deviation);
            jv["min_curvature"].push_back(pv.min_curvature);
            jv["centroids"].push_back(vec2_json(pv.centroid));
            convex = convex && pv.min_curvature > 0.0;
        }
        jv["curvature_positive"] = convex;
        js["verification"] = jv;
        js["v1_norm_sum"] = s.shapeNormSum(opts.sobolev_k);
        out["states"].push_back(js);

        const fs::path bpath =
            fs::path(cfg.out_dir) / ("boundary_" + std::to_string(t - 1) + ".csv");
        write_file(bpath, boundary_csv(s, cfg.gamma));
    }

    if (cfg.verify && res.completed && !res.curve.empty() && res.curve.back().eps > 0.0) {
        // refinement cross-check: re-solve the final target with doubled
        // quadrature and report the coefficient shift in the X norm
        QuadratureConfig fine = cfg.quad;
        fine.eta_grid *= 2;
        fine.graded_levels *= 2;
        fine.g3_source_eta *= 2;
        ContinuationState refined = res.curve.back();
        SolverOptions vopts = opts;
        NewtonReport rrep = newton_solve(kernel, refined, fine, vopts);
        double shift = 0.0;
        for (int i = 0; i < refined.patchCount(); ++i) {
            FourierContour d = refined.shapes[i];
            for (int k = 0; k < d.modeCount(); ++k) {
                d.a[k] -= res.curve.back().shapes[i].a[k];
                d.b[k] -= res.curve.back().shapes[i].b[k];
            }
            shift = std::max(shift, norm_X(d, opts.sobolev_k, cfg.gamma));
        }
        out["refinement_check"] = {{"converged", rrep.converged},
                                   {"coefficient_shift_x_norm", shift}};
    }

    const auto t3 = Clock::now();
    if (cfg.emit_timings) {
        out["timings_seconds"] = {
            {"setup", std::chrono::duration<double>(t1 - t0).count()},
            {"continuation", std::chrono::duration<double>(t2 - t1).count()},
            {"verification", std::chrono::duration<double>(t3 - t2).count()}};
    }
    const fs::path path = fs::path(cfg.out_dir) / "solve_result.json";
    write_file(path, out.dump(2) + "\n");
    std::cout << (res.completed ? "continuation completed" : "continuation stopped early")
              << "; wrote " << path.string() << "\n";
    if (!res.message.empty()) std::cout << "note: " << res.message << "\n";
    for (const auto& w : res.warnings) std::cout << "warning: " << w << "\n";
    return res.completed ? 0 : kExitNumerical;
}

int run_validate(const RunConfig& cfg) {
    if (!(cfg.gamma > 1.0 && cfg.gamma < 2.0)) {
        std::cout << "warning: gamma=" << cfg.gamma
                  << " is outside (1,2); untested range, running the battery at reference "
                     "exponents\n";
    }
    const auto results = checks::validation_battery(cfg.gamma);
    json out;
    out["schema_version"] = 1;
    out["mode"] = "validate";
    out["gamma"] = cfg.gamma;
    out["checks"] = json::array();
    bool all = true;
    for (const auto& r : results) {
        std::printf("%s  %-55s measured %-10s  (%s)\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                    fmt(r.measured).c_str(), r.detail.c_str());
        out["checks"].push_back({{"name", r.name},
                                 {"pass", r.pass},
                                 {"measured", r.measured},
                                 {"threshold", r.threshold},
                                 {"detail", r.detail}});
        all = all && r.pass;
    }
    fs::create_directories(cfg.out_dir);
    write_file(fs::path(cfg.out_dir) / "validate_result.json", out.dump(2) + "\n");
    std::printf("%s\n", all ? "all checks passed" : "SOME CHECKS FAILED");
    return all ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stationary gSQG vortex patches: spectra, critical points, continuation"};
    std::string mode_str, config_path, out_dir;
    double gamma = -1.0;
    int n = -1;
    bool print_config = false, verify = false, timings = false;

    app.add_option("--mode", mode_str, "spectrum | kr-critical | solve | validate");
    app.add_option("--config", config_path, "config JSON path");
    app.add_option("--gamma", gamma, "override gamma");
    app.add_option("--n", n, "override truncation order / sigma table length");
    app.add_option("--out", out_dir, "override output directory");
    app.add_flag("--print-config", print_config, "print the effective config and exit");
    app.add_flag("--verify", verify, "extra cross-checks in solve mode");
    app.add_flag("--timings", timings, "include wall-clock timings in the result JSON");

    CLI11_PARSE(app, argc, argv);

    RunConfig cfg;
    try {
        if (!config_path.empty()) cfg = load_config(config_path);
        if (!mode_str.empty()) cfg.mode = parse_mode(mode_str);
        if (gamma > 0.0) cfg.gamma = gamma;
        if (n > 0) {
            cfg.truncation = n;
            cfg.sigma_table_n = n;
        }
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (verify) cfg.verify = true;
        if (timings) cfg.emit_timings = true;
        if (print_config) {
            std::cout << config_to_json(cfg).dump(2) << "\n";
            return 0;
        }
        validate_config(cfg);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        switch (cfg.mode) {
            case RunMode::spectrum: return run_spectrum(cfg);
            case RunMode::kr_critical: return run_kr_critical(cfg);
            case RunMode::solve: return run_solve(cfg);
            case RunMode::validate: return run_validate(cfg);
        }
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}
