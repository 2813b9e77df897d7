#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "gsqg/common.hpp"
#include "gsqg/contour.hpp"
#include "gsqg/functional.hpp"
#include "gsqg/green.hpp"
#include "gsqg/kr.hpp"
#include "gsqg/linop.hpp"

namespace gsqg {

// One point on the continuation curve. rho is never an unknown: it is
// re-eliminated through the flux constraint after every update, so the flux
// equations hold identically along the curve.
struct ContinuationState {
    double eps = 0.0;
    std::vector<Vec2> centers;
    std::vector<FourierContour> shapes;
    std::vector<double> rhos;
    std::vector<double> kappas;

    int patchCount() const { return static_cast<int>(centers.size()); }
    int truncation() const { return shapes.empty() ? 0 : shapes[0].n; }

    static ContinuationState base(const VortexConfiguration& cfg, int n_trunc) {
        ContinuationState s;
        s.eps = 0.0;
        s.centers = cfg.points;
        s.kappas = cfg.strengths;
        for (int i = 0; i < cfg.size(); ++i) {
            s.shapes.push_back(FourierContour::zero(n_trunc));
            s.rhos.push_back(std::sqrt(cfg.strengths[i] / kPi));
        }
        return s;
    }

    void eliminateRhos(double gamma) {
        for (int i = 0; i < patchCount(); ++i) {
            rhos[i] = rho_of(eps, shapes[i], kappas[i], gamma);
        }
    }

    std::vector<PatchGeometry> geometries(double gamma) const {
        std::vector<PatchGeometry> g;
        for (int i = 0; i < patchCount(); ++i) {
            PatchGeometry p;
            p.center = centers[i];
            p.rho = rhos[i];
            p.eps = eps;
            p.gamma = gamma;
            p.shape = shapes[i];
            g.push_back(std::move(p));
        }
        return g;
    }

    double shapeNormSum(int k = 3) const {
        double s = 0.0;
        for (const auto& g : shapes) s += norm_Y(g, k);
        return s;
    }
};

inline FunctionalContext make_context(const GreenKernel& kernel, const ContinuationState& s,
                                      const QuadratureConfig& quad) {
    FunctionalContext ctx;
    ctx.kernel = kernel;
    ctx.geoms = s.geometries(kernel.gamma_param().gamma);
    ctx.kappas = s.kappas;
    ctx.quad = quad;
    return ctx;
}

// State vector layout: per patch [a_2..a_N, b_2..b_N], then all centers
// [x_1, y_1, ..., x_m, y_m].
inline Eigen::VectorXd pack_state(const ContinuationState& s) {
    const int m = s.patchCount();
    const int nm = s.truncation() - 1;  // modes per trig family
    Eigen::VectorXd x(2 * nm * m + 2 * m);
    int at = 0;
    for (int i = 0; i < m; ++i) {
        for (int k = 0; k < nm; ++k) x[at++] = s.shapes[i].a[k];
        for (int k = 0; k < nm; ++k) x[at++] = s.shapes[i].b[k];
    }
    for (int i = 0; i < m; ++i) {
        x[at++] = s.centers[i].x;
        x[at++] = s.centers[i].y;
    }
    return x;
}

inline ContinuationState unpack_state(const Eigen::VectorXd& x, const ContinuationState& proto,
                                      double gamma) {
    ContinuationState s = proto;
    const int m = s.patchCount();
    const int nm = s.truncation() - 1;
    int at = 0;
    for (int i = 0; i < m; ++i) {
        for (int k = 0; k < nm; ++k) s.shapes[i].a[k] = x[at++];
        for (int k = 0; k < nm; ++k) s.shapes[i].b[k] = x[at++];
    }
    for (int i = 0; i < m; ++i) {
        s.centers[i].x = x[at++];
        s.centers[i].y = x[at++];
    }
    s.eliminateRhos(gamma);
    return s;
}

// Residual layout mirrors the state: per patch the Y0 projections
// [sin coefficients c_2..c_N, cos coefficients d_2..d_N] of G_i, then per
// patch the first-harmonic rows [int G_i sin, int G_i cos] (the center
// equations).
struct ResidualParts {
    std::vector<std::vector<double>> g1, g2, g3;  // [patch][grid]
};

struct RecomputePlan {
    int g1_patch = -1;  // -1: all patches, -2: none, >=0: only that patch
    bool g2 = true;
    bool g3 = true;
};

inline ResidualParts eval_parts(const FunctionalContext& ctx, const std::vector<double>& grid,
                                const ResidualParts* base = nullptr,
                                const RecomputePlan& plan = RecomputePlan{}) {
    const int m = ctx.patchCount();
    ResidualParts parts;
    parts.g1.resize(m);
    parts.g2.resize(m);
    parts.g3.resize(m);
    for (int i = 0; i < m; ++i) {
        const bool re1 = plan.g1_patch == -1 || plan.g1_patch == i;
        parts.g1[i] = (re1 || !base) ? eval_G1(ctx, i, grid) : base->g1[i];
        parts.g2[i] = (plan.g2 || !base) ? eval_G2(ctx, i, grid) : base->g2[i];
        parts.g3[i] = (plan.g3 || !base) ? eval_G3(ctx, i, grid) : base->g3[i];
    }
    return parts;
}

inline Eigen::VectorXd residual_from_parts(const ResidualParts& parts, int n_trunc,
                                           const std::vector<double>& grid) {
    const int m = static_cast<int>(parts.g1.size());
    const int nm = n_trunc - 1;
    Eigen::VectorXd r(2 * nm * m + 2 * m);
    std::vector<double> vals(grid.size());
    for (int i = 0; i < m; ++i) {
        for (size_t k = 0; k < grid.size(); ++k) {
            vals[k] = parts.g1[i][k] + parts.g2[i][k] + parts.g3[i][k];
        }
        const ModeSplit split = project_modes(vals, n_trunc);
        for (int j = 2; j <= n_trunc; ++j) {
            r[i * 2 * nm + (j - 2)] = split.rest.b[j - 2];        // sin coefficient
            r[i * 2 * nm + nm + (j - 2)] = split.rest.a[j - 2];   // cos coefficient
        }
        r[2 * nm * m + 2 * i] = kPi * split.c1_sin;      // int G sin(beta)
        r[2 * nm * m + 2 * i + 1] = kPi * split.c1_cos;  // int G cos(beta)
    }
    return r;
}

inline Eigen::VectorXd residual(const GreenKernel& kernel, const ContinuationState& s,
                                const QuadratureConfig& quad) {
    const FunctionalContext ctx = make_context(kernel, s, quad);
    const std::vector<double> grid = uniform_grid(4 * s.truncation());
    return residual_from_parts(eval_parts(ctx, grid), s.truncation(), grid);
}

enum class JacobianMode { full, fast, automatic };

struct SolverOptions {
    double tol = 1e-10;
    int max_iter = 25;
    JacobianMode jacobian = JacobianMode::automatic;
    bool central_differences = false;
    bool symmetrize = true;  // exploit x-axis reflection symmetry when the seed has it
    bool secant_predictor = false;
    double fd_shape_step = 1e-6;
    double fd_center_step = 1e-6;
    int sobolev_k = 3;
};

struct NewtonReport {
    bool converged = false;
    int iterations = 0;
    std::vector<double> residual_norms;  // includes the starting residual
    std::string message;
};

namespace detail {

// x-axis reflection symmetry: every center on the axis and every shape
// even in beta. Projecting each iterate onto this subspace both preserves
// the inherited symmetry and removes the rotational gauge mode of
// rotationally symmetric domains.
inline bool axis_symmetric(const ContinuationState& s, double tol = 1e-12) {
    for (const auto& c : s.centers) {
        if (std::fabs(c.y) > tol) return false;
    }
    for (const auto& g : s.shapes) {
        for (double b : g.b) {
            if (std::fabs(b) > tol) return false;
        }
    }
    return true;
}

inline void project_axis_symmetric(ContinuationState& s) {
    for (auto& c : s.centers) c.y = 0.0;
    for (auto& g : s.shapes) {
        for (double& b : g.b) b = 0.0;
    }
}

}  // namespace detail

// Finite-difference Jacobian of the residual map at the given state. In
// fast mode the boundary-influence term is frozen for shape columns (its
// shape derivative is O(eps)); center columns always recompute everything
// that moves.
inline Eigen::MatrixXd solver_jacobian(const GreenKernel& kernel, const ContinuationState& s,
                                       const QuadratureConfig& quad, const SolverOptions& opts,
                                       const ResidualParts& base_parts,
                                       const Eigen::VectorXd& base_r) {
    const double gamma = kernel.gamma_param().gamma;
    const int m = s.patchCount();
    const int nm = s.truncation() - 1;
    const int dim = 2 * nm * m + 2 * m;
    const std::vector<double> grid = uniform_grid(4 * s.truncation());
    const Eigen::VectorXd x0 = pack_state(s);

    const bool fast = opts.jacobian == JacobianMode::fast ||
                      (opts.jacobian == JacobianMode::automatic && m >= 2);

    Eigen::MatrixXd jac(dim, dim);
    const double domain_scale = kernel.tag() == DomainTag::disc ? kernel.radius() : 1.0;

    for (int col = 0; col < dim; ++col) {
        const bool is_center = col >= 2 * nm * m;
        const double h = is_center ? opts.fd_center_step * domain_scale
                                   : opts.fd_shape_step * std::max(1.0, std::fabs(x0[col]));
        RecomputePlan plan;
        if (fast) {
            if (is_center) {
                plan.g1_patch = -2;
                plan.g2 = true;
                plan.g3 = true;
            } else {
                plan.g1_patch = col / (2 * nm);
                plan.g2 = true;
                plan.g3 = false;
            }
        }
        auto column = [&](double step) {
            Eigen::VectorXd xp = x0;
            xp[col] += step;
            const ContinuationState sp = unpack_state(xp, s, gamma);
            const FunctionalContext ctxp = make_context(kernel, sp, quad);
            return residual_from_parts(eval_parts(ctxp, grid, &base_parts, plan),
                                       s.truncation(), grid);
        };
        if (opts.central_differences) {
            jac.col(col) = (column(h) - column(-h)) / (2.0 * h);
        } else {
            jac.col(col) = (column(h) - base_r) / h;
        }
    }
    return jac;
}

inline NewtonReport newton_solve(const GreenKernel& kernel, ContinuationState& s,
                                 const QuadratureConfig& quad, const SolverOptions& opts) {
    NewtonReport rep;
    const double gamma = kernel.gamma_param().gamma;
    const std::vector<double> grid = uniform_grid(4 * s.truncation());
    const bool symmetric = opts.symmetrize && detail::axis_symmetric(s);

    for (int it = 0;; ++it) {
        const FunctionalContext ctx = make_context(kernel, s, quad);
        const ResidualParts parts = eval_parts(ctx, grid);
        const Eigen::VectorXd r = residual_from_parts(parts, s.truncation(), grid);
        const double rn = r.norm();
        rep.residual_norms.push_back(rn);
        if (!(rn == rn)) {
            rep.message = "residual is NaN";
            return rep;
        }
        if (rn <= opts.tol) {
            rep.converged = true;
            rep.iterations = it;
            return rep;
        }
        if (it >= opts.max_iter) {
            rep.message = "max iterations exceeded";
            rep.iterations = it;
            return rep;
        }

        const Eigen::MatrixXd jac = solver_jacobian(kernel, s, quad, opts, parts, r);
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(jac);
        if (qr.rank() < jac.cols() - (symmetric ? jac.cols() / 2 : 0)) {
            rep.message = "Jacobian numerically singular (rank " + std::to_string(qr.rank()) +
                          " of " + std::to_string(jac.cols()) + ")";
            rep.iterations = it;
            return rep;
        }
        const Eigen::VectorXd step = qr.solve(-r);

        // Plain step with a short backtracking fallback.
        double lambda = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 8; ++bt) {
            ContinuationState trial = unpack_state(pack_state(s) + lambda * step, s, gamma);
            if (symmetric) detail::project_axis_symmetric(trial);
            try {
                trial.eliminateRhos(gamma);
                const double tn = residual(kernel, trial, quad).norm();
                if (tn < rn) {
                    s = trial;
                    accepted = true;
                    break;
                }
            } catch (const std::runtime_error&) {
            }
            lambda *= 0.5;
        }
        if (!accepted) {
            rep.message = "line search failed";
            rep.iterations = it;
            return rep;
        }
    }
}

struct ContinuationResult {
    std::vector<ContinuationState> curve;  // includes the eps = 0 base state
    std::vector<NewtonReport> reports;     // one per accepted eps target
    bool completed = false;
    std::string message;
    std::vector<std::string> warnings;
};

// Warm-started march over increasing eps targets from a Kirchhoff-Routh
// seed. The seed centers are first refined to the exact eps = 0 root of the
// center equations (the base point of the solution curve), then each target
// is solved by Newton starting from the previous state. A failed step is
// bisected once before giving up.
inline ContinuationResult continue_in_eps(const GreenKernel& kernel,
                                          const VortexConfiguration& seed,
                                          const std::vector<double>& eps_targets, int n_trunc,
                                          const QuadratureConfig& quad, const SolverOptions& opts) {
    ContinuationResult out;
    for (size_t k = 0; k + 1 < eps_targets.size(); ++k) {
        if (!(eps_targets[k] > 0.0) || eps_targets[k + 1] <= eps_targets[k]) {
            throw config_error("continue_in_eps: eps targets must be positive and increasing");
        }
    }
    const double gamma = kernel.gamma_param().gamma;

    VortexConfiguration refined = seed;
    {
        const bool sym = [&] {
            for (const auto& p : seed.points) {
                if (std::fabs(p.y) > 1e-12) return false;
            }
            return true;
        }();
        refined = find_center_zero(kernel, seed);
        if (sym) {
            for (auto& p : refined.points) p.y = 0.0;
        }
    }

    ContinuationState state = ContinuationState::base(refined, n_trunc);
    out.curve.push_back(state);

    // Trust region of the desingularization: centers must stay near the base
    // point and shapes inside the unit ball of the solution space.
    double rho0 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < refined.size(); ++i) {
        for (int j = i + 1; j < refined.size(); ++j) {
            rho0 = std::min(rho0, 0.25 * (refined.points[i] - refined.points[j]).norm());
        }
    }
    if (kernel.tag() == DomainTag::disc) {
        for (const auto& p : refined.points) {
            rho0 = std::min(rho0, 0.25 * (kernel.radius() - p.norm()));
        }
    }

    ContinuationState prev = state;
    double prev_eps = 0.0;
    for (size_t t = 0; t < eps_targets.size(); ++t) {
        const double target = eps_targets[t];
        auto attempt = [&](double eps_value, ContinuationState start) {
            start.eps = eps_value;
            start.eliminateRhos(gamma);
            NewtonReport rep = newton_solve(kernel, start, quad, opts);
            return std::make_pair(start, rep);
        };
        ContinuationState start = state;
        if (opts.secant_predictor && out.curve.size() >= 2 && target > prev_eps) {
            const Eigen::VectorXd xk = pack_state(state);
            const Eigen::VectorXd xkm = pack_state(prev);
            const double denom = state.eps - prev.eps;
            if (denom > 0.0) {
                const Eigen::VectorXd xp = xk + (xk - xkm) * ((target - state.eps) / denom);
                start = unpack_state(xp, state, gamma);
            }
        }
        auto [solved, rep] = attempt(target, start);
        if (!rep.converged) {
            // one bisection of the eps step
            const double mid = 0.5 * (state.eps + target);
            auto [mid_state, mid_rep] = attempt(mid, state);
            if (mid_rep.converged) {
                std::tie(solved, rep) = attempt(target, mid_state);
            }
        }
        if (!rep.converged) {
            out.message = (t == 0)
                              ? "first continuation step failed; try a smaller initial eps (" +
                                    rep.message + ")"
                              : "continuation stalled at eps=" + std::to_string(target) + " (" +
                                    rep.message + ")";
            return out;
        }
        // Invariants of the construction. The unit-ball membership of the
        // shapes is a hypothesis of the contraction argument, not a health
        // condition of the solve; with the H^3 weights it can be exceeded at
        // moderate eps while Newton still converges quadratically, so it is
        // recorded as a warning rather than an abort.
        const double norm_sum = solved.shapeNormSum(opts.sobolev_k);
        if (norm_sum >= 1.0) {
            out.warnings.push_back("shape norm sum " + std::to_string(norm_sum) +
                                   " left the unit ball at eps=" + std::to_string(target));
        }
        for (int i = 0; i < solved.patchCount(); ++i) {
            if ((solved.centers[i] - refined.points[i]).norm() > rho0) {
                out.message = "center drifted outside the trust ball";
                return out;
            }
        }
        prev = state;
        prev_eps = state.eps;
        state = solved;
        out.curve.push_back(state);
        out.reports.push_back(rep);
    }
    out.completed = true;
    return out;
}

// Post-solve verification of the construction: flux, boundary radius,
// convexity, centroid concentration, residual norms. Pure reporting.
struct PatchVerification {
    double flux_rel_error = 0.0;
    double radius_deviation = 0.0;
    double min_curvature = 0.0;
    Vec2 centroid;
    double centroid_offset = 0.0;  // |centroid - center|
};

struct VerificationReport {
    std::vector<PatchVerification> patches;
    double residual_norm = 0.0;
    double g1_norm = 0.0, g2_norm = 0.0, g3_norm = 0.0;
    double mean_projection = 0.0;  // largest |j=0 mode| of G over patches
};

inline VerificationReport verify_solution(const GreenKernel& kernel, const ContinuationState& s,
                                          const QuadratureConfig& quad) {
    if (s.eps <= 0.0) throw domain_error("verify_solution: state must have eps > 0");
    VerificationReport rep;
    const double gamma = kernel.gamma_param().gamma;
    const FunctionalContext ctx = make_context(kernel, s, quad);
    const int mgrid = std::max(1024, 4 * s.truncation());
    const std::vector<double> grid = uniform_grid(4 * s.truncation());

    const ResidualParts parts = eval_parts(ctx, grid);
    const Eigen::VectorXd r = residual_from_parts(parts, s.truncation(), grid);
    rep.residual_norm = r.norm();
    auto l2 = [&](const std::vector<std::vector<double>>& v) {
        double acc = 0.0;
        for (const auto& row : v) {
            for (double x : row) acc += x * x;
        }
        return std::sqrt(acc * kTwoPi / grid.size());
    };
    rep.g1_norm = l2(parts.g1);
    rep.g2_norm = l2(parts.g2);
    rep.g3_norm = l2(parts.g3);
    for (int i = 0; i < s.patchCount(); ++i) {
        std::vector<double> vals(grid.size());
        for (size_t k = 0; k < grid.size(); ++k) {
            vals[k] = parts.g1[i][k] + parts.g2[i][k] + parts.g3[i][k];
        }
        rep.mean_projection =
            std::max(rep.mean_projection, std::fabs(project_modes(vals, 2).c0));
    }

    for (int i = 0; i < s.patchCount(); ++i) {
        const PatchGeometry geom = ctx.geoms[i];
        PatchVerification pv;
        // Spectral boundary integrals in polar form about the center:
        // area = (eps^2/2) int R^2, first moment = (eps^3/3) int R^3 e_beta.
        double a2 = 0.0, mx = 0.0, my = 0.0, rdev = 0.0, minc = 1e300;
        for (int k = 0; k < mgrid; ++k) {
            const double beta = kTwoPi * k / mgrid;
            const double rr = geom.radius(beta);
            a2 += rr * rr;
            mx += rr * rr * rr * std::cos(beta);
            my += rr * rr * rr * std::sin(beta);
            rdev = std::max(rdev, std::fabs(rr - std::sqrt(s.kappas[i] / kPi)));
        }
        for (int k = 0; k < 4 * s.truncation(); ++k) {
            minc = std::min(minc, signed_curvature(geom, kTwoPi * k / (4 * s.truncation())));
        }
        const double area = 0.5 * s.eps * s.eps * a2 * kTwoPi / mgrid;
        const double e3 = s.eps * s.eps * s.eps / 3.0;
        pv.flux_rel_error = std::fabs(area / (s.eps * s.eps) - s.kappas[i]) / s.kappas[i];
        pv.radius_deviation = rdev;
        pv.min_curvature = minc;
        pv.centroid = geom.center + Vec2{mx, my} * (e3 * kTwoPi / mgrid / area);
        pv.centroid_offset = (pv.centroid - geom.center).norm();
        rep.patches.push_back(pv);
    }
    return rep;
}

}  // namespace gsqg
