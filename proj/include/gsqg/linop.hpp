#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "gsqg/common.hpp"
#include "gsqg/contour.hpp"
#include "gsqg/special.hpp"

namespace gsqg {

// Element of Y0: sin/cos modes j >= 2 (the range of the linearized
// self-interaction operator; no translation modes).
struct Y0Element {
    int n = 0;
    std::vector<double> sin_c;  // sin_c[j-2]
    std::vector<double> cos_c;  // cos_c[j-2]

    static Y0Element zero(int n) {
        Y0Element e;
        e.n = n;
        e.sin_c.assign(n >= 2 ? n - 1 : 0, 0.0);
        e.cos_c.assign(n >= 2 ? n - 1 : 0, 0.0);
        return e;
    }

    double norm() const {
        double s = 0.0;
        for (size_t i = 0; i < sin_c.size(); ++i) {
            s += sin_c[i] * sin_c[i] + cos_c[i] * cos_c[i];
        }
        return std::sqrt(s);
    }
};

// The linearization of the functional at (0, rho, x, 0): block-diagonal
// across patches and, within a patch, diagonal over Fourier modes,
//   cos(j b) |-> (sigma_j j / rho^gamma) sin(j b),
//   sin(j b) |-> -(sigma_j j / rho^gamma) cos(j b).
struct SpectralOperator {
    double gamma = 0.0;
    std::vector<double> rho;
    SigmaSpectrum spectrum;
    int n = 0;

    static SpectralOperator make(double gamma, std::vector<double> rho, int n) {
        SpectralOperator op;
        op.gamma = gamma;
        op.rho = std::move(rho);
        op.n = n;
        op.spectrum = SigmaSpectrum::make(gamma, n);
        return op;
    }

    double multiplier(int i, int j) const {
        return spectrum.at(j) * j / std::pow(rho[i], gamma);
    }
};

inline Y0Element apply_L0(const SpectralOperator& op, int i, const FourierContour& g) {
    if (g.n > op.n) throw domain_error("apply_L0: contour exceeds operator truncation");
    Y0Element out = Y0Element::zero(g.n);
    for (int j = 2; j <= g.n; ++j) {
        const double s = op.multiplier(i, j);
        out.sin_c[j - 2] = s * g.a[j - 2];
        out.cos_c[j - 2] = -s * g.b[j - 2];
    }
    return out;
}

// Diagonal inverse on Y0; apply_L0(invert_L0(p)) == p on truncations.
inline FourierContour invert_L0(const SpectralOperator& op, int i, const Y0Element& p) {
    if (p.n > op.n) throw domain_error("invert_L0: element exceeds operator truncation");
    FourierContour g = FourierContour::zero(p.n);
    for (int j = 2; j <= p.n; ++j) {
        const double s = op.multiplier(i, j);
        g.a[j - 2] = p.sin_c[j - 2] / s;
        g.b[j - 2] = -p.cos_c[j - 2] / s;
    }
    return g;
}

// Grid-sample inversion; rejects content outside Y0 (the sigma_1 = 0 modes
// are the kernel/cokernel directions, so j = 0, 1 content is not in range).
inline FourierContour invert_L0_samples(const SpectralOperator& op, int i,
                                        const std::vector<double>& samples, int n_trunc,
                                        double tol = 1e-10) {
    const ModeSplit split = project_modes(samples, n_trunc);
    double scale = split.c0 * split.c0 + split.c1_cos * split.c1_cos +
                   split.c1_sin * split.c1_sin;
    for (int j = 2; j <= n_trunc; ++j) {
        scale += split.rest.a[j - 2] * split.rest.a[j - 2] +
                 split.rest.b[j - 2] * split.rest.b[j - 2];
    }
    scale = std::sqrt(scale);
    if (std::fabs(split.c0) > tol * std::max(1.0, scale) ||
        std::fabs(split.c1_cos) > tol * std::max(1.0, scale) ||
        std::fabs(split.c1_sin) > tol * std::max(1.0, scale)) {
        throw not_in_range_error("invert_L0: input carries j=0 or j=1 content");
    }
    Y0Element p = Y0Element::zero(n_trunc);
    // project_modes returns cos coefficients in rest.a and sin in rest.b.
    for (int j = 2; j <= n_trunc; ++j) {
        p.cos_c[j - 2] = split.rest.a[j - 2];
        p.sin_c[j - 2] = split.rest.b[j - 2];
    }
    return invert_L0(op, i, p);
}

// Finite-difference Jacobian of a residual map. Step per variable is
// step_scale[k]; one-sided by default, central behind the flag.
template <typename ResidualFn>
Eigen::MatrixXd assemble_jacobian(ResidualFn&& residual, const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& step_scale, bool central = false) {
    const Eigen::VectorXd r0 = residual(x);
    Eigen::MatrixXd jac(r0.size(), x.size());
    for (int k = 0; k < x.size(); ++k) {
        const double h = step_scale[k];
        Eigen::VectorXd xp = x;
        xp[k] += h;
        if (central) {
            Eigen::VectorXd xm = x;
            xm[k] -= h;
            jac.col(k) = (residual(xp) - residual(xm)) / (2.0 * h);
        } else {
            jac.col(k) = (residual(xp) - r0) / h;
        }
    }
    return jac;
}

}  // namespace gsqg
