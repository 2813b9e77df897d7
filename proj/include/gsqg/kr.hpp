#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <functional>
#include <cmath>
#include <vector>

#include "gsqg/common.hpp"
#include "gsqg/green.hpp"

namespace gsqg {

// m point vortices with positive strengths.
struct VortexConfiguration {
    std::vector<Vec2> points;
    std::vector<double> strengths;

    int size() const { return static_cast<int>(points.size()); }

    void validate(const GreenKernel& kernel) const {
        if (points.size() != strengths.size() || points.empty()) {
            throw domain_error("VortexConfiguration: size mismatch or empty");
        }
        for (double k : strengths) {
            if (!(k > 0.0)) throw domain_error("VortexConfiguration: strengths must be positive");
        }
        for (const Vec2& p : points) {
            if (!kernel.inside(p)) throw domain_error("VortexConfiguration: point outside domain");
        }
        for (size_t i = 0; i < points.size(); ++i) {
            for (size_t j = i + 1; j < points.size(); ++j) {
                if ((points[i] - points[j]).norm2() == 0.0) {
                    throw singularity_error("VortexConfiguration: coincident points");
                }
            }
        }
    }
};

// Kirchhoff-Routh function, sign convention as printed:
//   W_m(x) = - sum_{i != j} k_i k_j K1(x_i, x_j) + sum_i k_i^2 K0(x_i, x_i).
inline double w_m(const GreenKernel& kernel, const VortexConfiguration& cfg) {
    cfg.validate(kernel);
    const int m = cfg.size();
    double w = 0.0;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            w -= cfg.strengths[i] * cfg.strengths[j] * kernel.k1(cfg.points[i], cfg.points[j]);
        }
        w += cfg.strengths[i] * cfg.strengths[i] * kernel.k0(cfg.points[i], cfg.points[i]);
    }
    return w;
}

// Gradient of W_m. The K1 part differentiates in closed form,
//   d/dx_i [-2 k_i sum_j k_j C |x_i-x_j|^{-gamma}] =
//       2 gamma C k_i sum_j k_j (x_i-x_j) |x_i-x_j|^{-gamma-2};
// the diagonal K0 part uses the kernel gradient and the symmetry
// d/dx [K0(x,x)] = 2 grad_x K0(x,x).
inline std::vector<Vec2> grad_w_m(const GreenKernel& kernel, const VortexConfiguration& cfg) {
    cfg.validate(kernel);
    const int m = cfg.size();
    const double gamma = kernel.gamma_param().gamma;
    const double c = kernel.gamma_param().c;
    std::vector<Vec2> g(m);
    for (int i = 0; i < m; ++i) {
        Vec2 gi{0.0, 0.0};
        for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            const Vec2 d = cfg.points[i] - cfg.points[j];
            const double dist2 = d.norm2();
            gi += d * (2.0 * gamma * c * cfg.strengths[i] * cfg.strengths[j] *
                       std::pow(dist2, -0.5 * (gamma + 2.0)));
        }
        gi += kernel.grad_x_k0(cfg.points[i], cfg.points[i]) *
              (2.0 * cfg.strengths[i] * cfg.strengths[i]);
        g[i] = gi;
    }
    return g;
}

inline Eigen::VectorXd flatten(const std::vector<Vec2>& v) {
    Eigen::VectorXd out(2 * v.size());
    for (size_t i = 0; i < v.size(); ++i) {
        out[2 * i] = v[i].x;
        out[2 * i + 1] = v[i].y;
    }
    return out;
}

// Hessian by central differences of the gradient, symmetrized.
inline Eigen::MatrixXd hess_w_m(const GreenKernel& kernel, const VortexConfiguration& cfg,
                                double h = 1e-5) {
    const int m = cfg.size();
    Eigen::MatrixXd hess(2 * m, 2 * m);
    VortexConfiguration c = cfg;
    for (int col = 0; col < 2 * m; ++col) {
        double& coord = (col % 2 == 0) ? c.points[col / 2].x : c.points[col / 2].y;
        const double saved = coord;
        coord = saved + h;
        const Eigen::VectorXd gp = flatten(grad_w_m(kernel, c));
        coord = saved - h;
        const Eigen::VectorXd gm = flatten(grad_w_m(kernel, c));
        coord = saved;
        hess.col(col) = (gp - gm) / (2.0 * h);
    }
    return 0.5 * (hess + hess.transpose());
}

struct CriticalPoint {
    VortexConfiguration config;
    double grad_norm = 0.0;
    bool converged = false;
    bool nondegenerate = false;
    int index = 0;  // number of negative Hessian eigenvalues
    Eigen::VectorXd hess_eigenvalues;
};

// Damped Newton on grad W_m from each seed; converged points are
// deduplicated and labeled with the Hessian signature. Degenerate points
// (|det H| below threshold, e.g. rotational orbits in the disc) are
// reported but not certified.
inline std::vector<CriticalPoint> find_critical_points(const GreenKernel& kernel,
                                                       const std::vector<VortexConfiguration>& seeds,
                                                       double tol = 1e-10, int max_iter = 60) {
    std::vector<CriticalPoint> found;
    for (const auto& seed : seeds) {
        VortexConfiguration c = seed;
        bool ok = false;
        for (int it = 0; it < max_iter; ++it) {
            Eigen::VectorXd g;
            try {
                g = flatten(grad_w_m(kernel, c));
            } catch (const std::runtime_error&) {
                break;
            }
            if (g.norm() <= tol) {
                ok = true;
                break;
            }
            const Eigen::MatrixXd h = hess_w_m(kernel, c);
            Eigen::VectorXd step = h.colPivHouseholderQr().solve(-g);
            // Backtrack on the gradient norm; W_m has singular walls near
            // collisions and the boundary.
            double lambda = 1.0;
            bool accepted = false;
            for (int bt = 0; bt < 30; ++bt) {
                VortexConfiguration trial = c;
                bool feasible = true;
                for (int i = 0; i < c.size(); ++i) {
                    trial.points[i].x += lambda * step[2 * i];
                    trial.points[i].y += lambda * step[2 * i + 1];
                    if (!kernel.inside(trial.points[i])) feasible = false;
                }
                if (feasible) {
                    try {
                        const double gn = flatten(grad_w_m(kernel, trial)).norm();
                        if (gn < g.norm()) {
                            c = trial;
                            accepted = true;
                            break;
                        }
                    } catch (const std::runtime_error&) {
                    }
                }
                lambda *= 0.5;
            }
            if (!accepted) break;
        }
        if (!ok) continue;

        bool dup = false;
        for (const auto& f : found) {
            double dist = 0.0;
            for (int i = 0; i < c.size(); ++i) {
                dist = std::max(dist, (f.config.points[i] - c.points[i]).norm());
            }
            if (dist < 1e-6) {
                dup = true;
                break;
            }
        }
        if (dup) continue;

        CriticalPoint cp;
        cp.config = c;
        cp.converged = true;
        cp.grad_norm = flatten(grad_w_m(kernel, c)).norm();
        const Eigen::MatrixXd h = hess_w_m(kernel, c);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
        cp.hess_eigenvalues = es.eigenvalues();
        cp.nondegenerate = std::fabs(h.determinant()) > 1e-10;
        cp.index = 0;
        for (int i = 0; i < cp.hess_eigenvalues.size(); ++i) {
            if (cp.hess_eigenvalues[i] < 0.0) ++cp.index;
        }
        found.push_back(std::move(cp));
    }
    std::sort(found.begin(), found.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
        const auto& pa = a.config.points;
        const auto& pb = b.config.points;
        for (size_t i = 0; i < pa.size(); ++i) {
            if (pa[i].x != pb[i].x) return pa[i].x < pb[i].x;
            if (pa[i].y != pb[i].y) return pa[i].y < pb[i].y;
        }
        return false;
    });
    return found;
}

// Default seed generation: tensor grid over the safety-shrunk domain with
// collision-filtered tuples.
inline std::vector<VortexConfiguration> grid_seeds(const GreenKernel& kernel,
                                                   const std::vector<double>& strengths,
                                                   int per_axis = 5, double shrink = 0.8) {
    const int m = static_cast<int>(strengths.size());
    const double r = (kernel.tag() == DomainTag::disc) ? kernel.radius() * shrink : shrink;
    std::vector<Vec2> pts;
    for (int i = 0; i < per_axis; ++i) {
        for (int j = 0; j < per_axis; ++j) {
            Vec2 p{-r + 2.0 * r * i / (per_axis - 1), -r + 2.0 * r * j / (per_axis - 1)};
            if (kernel.tag() == DomainTag::disc && p.norm() > r) continue;
            pts.push_back(p);
        }
    }
    std::vector<VortexConfiguration> seeds;
    std::vector<int> idx(m, 0);
    const int n = static_cast<int>(pts.size());
    std::function<void(int)> rec = [&](int depth) {
        if (depth == m) {
            VortexConfiguration c;
            c.strengths = strengths;
            for (int i = 0; i < m; ++i) c.points.push_back(pts[idx[i]]);
            seeds.push_back(std::move(c));
            return;
        }
        const int start = (depth == 0) ? 0 : idx[depth - 1] + 1;
        for (int i = start; i < n; ++i) {
            bool clash = false;
            for (int d = 0; d < depth; ++d) {
                if ((pts[idx[d]] - pts[i]).norm() < 0.15 * r) clash = true;
            }
            if (clash) continue;
            idx[depth] = i;
            rec(depth + 1);
        }
    };
    rec(0);
    return seeds;
}

// Leading-order center equations of the contour functional: the eps -> 0
// limit of the first-harmonic projections is
//   (1/pi) int G_i sin(beta)  =  E_i . e1,
//  -(1/pi) int G_i cos(beta)  =  E_i . e2,
// with
//   E_i = (gamma C /(2 pi)) sum_{j != i} k_j (x_i-x_j)|x_i-x_j|^{-gamma-2}
//         + sum_j k_j grad_x K0(x_i, x_j).
// For free space E_i = grad_{x_i} W_m / (4 pi k_i); for a single patch
// in the disc E_1 = grad W_1 / (2 k_1). This is the dictionary between the
// first-harmonic residual rows and the Kirchhoff-Routh landscape.
inline std::vector<Vec2> center_field(const GreenKernel& kernel, const VortexConfiguration& cfg) {
    cfg.validate(kernel);
    const int m = cfg.size();
    const double gamma = kernel.gamma_param().gamma;
    const double c = kernel.gamma_param().c;
    std::vector<Vec2> e(m);
    for (int i = 0; i < m; ++i) {
        Vec2 ei{0.0, 0.0};
        for (int j = 0; j < m; ++j) {
            if (j != i) {
                const Vec2 d = cfg.points[i] - cfg.points[j];
                ei += d * (gamma * c / kTwoPi * cfg.strengths[j] *
                           std::pow(d.norm2(), -0.5 * (gamma + 2.0)));
            }
            ei += kernel.grad_x_k0(cfg.points[i], cfg.points[j]) * cfg.strengths[j];
        }
        e[i] = ei;
    }
    return e;
}

// Newton on center_field; locates the eps = 0 base point of the
// continuation curve near a seed configuration.
inline VortexConfiguration find_center_zero(const GreenKernel& kernel,
                                            const VortexConfiguration& seed, double tol = 1e-12,
                                            int max_iter = 60) {
    VortexConfiguration c = seed;
    const int m = c.size();
    const double h = 1e-6;
    for (int it = 0; it < max_iter; ++it) {
        const Eigen::VectorXd f = flatten(center_field(kernel, c));
        if (f.norm() <= tol) return c;
        Eigen::MatrixXd jac(2 * m, 2 * m);
        for (int col = 0; col < 2 * m; ++col) {
            VortexConfiguration cp = c;
            double& coord = (col % 2 == 0) ? cp.points[col / 2].x : cp.points[col / 2].y;
            coord += h;
            jac.col(col) = (flatten(center_field(kernel, cp)) - f) / h;
        }
        const Eigen::VectorXd step = jac.colPivHouseholderQr().solve(-f);
        double lambda = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 30; ++bt) {
            VortexConfiguration trial = c;
            bool feasible = true;
            for (int i = 0; i < m; ++i) {
                trial.points[i].x += lambda * step[2 * i];
                trial.points[i].y += lambda * step[2 * i + 1];
                if (!kernel.inside(trial.points[i])) feasible = false;
            }
            if (feasible && flatten(center_field(kernel, trial)).norm() < f.norm()) {
                c = trial;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) break;
    }
    throw geometry_error("find_center_zero: Newton did not converge");
}

}  // namespace gsqg
