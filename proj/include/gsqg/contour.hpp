#pragma once

#include <cmath>
#include <vector>

#include "gsqg/common.hpp"
#include "gsqg/special.hpp"

namespace gsqg {

// Shape perturbation g(beta) = sum_{j=2}^{N} a_j cos(j beta) + b_j sin(j beta).
// Modes j=0,1 are excluded by construction (the X-space constraint), so the
// mean over a period vanishes identically.
struct FourierContour {
    int n = 0;                 // truncation order N (highest mode)
    std::vector<double> a;     // a[j-2] = cos coefficient of mode j
    std::vector<double> b;     // b[j-2] = sin coefficient of mode j

    static FourierContour zero(int n) {
        FourierContour c;
        c.n = n;
        c.a.assign(n >= 2 ? n - 1 : 0, 0.0);
        c.b.assign(n >= 2 ? n - 1 : 0, 0.0);
        return c;
    }

    int modeCount() const { return static_cast<int>(a.size()); }

    double value(double beta) const {
        double s = 0.0;
        for (int j = 2; j <= n; ++j) {
            s += a[j - 2] * std::cos(j * beta) + b[j - 2] * std::sin(j * beta);
        }
        return s;
    }
    double deriv(double beta) const {
        double s = 0.0;
        for (int j = 2; j <= n; ++j) {
            s += j * (-a[j - 2] * std::sin(j * beta) + b[j - 2] * std::cos(j * beta));
        }
        return s;
    }
    double deriv2(double beta) const {
        double s = 0.0;
        for (int j = 2; j <= n; ++j) {
            s -= j * j * (a[j - 2] * std::cos(j * beta) + b[j - 2] * std::sin(j * beta));
        }
        return s;
    }

    // g(beta) - g(beta-u) in product form,
    //   cos(jb)-cos(jb-ju) = -2 sin(jb-ju/2) sin(ju/2),
    //   sin(jb)-sin(jb-ju) =  2 cos(jb-ju/2) sin(ju/2),
    // which stays accurate down to arbitrarily small u.
    double diff(double beta, double u) const {
        double s = 0.0;
        for (int j = 2; j <= n; ++j) {
            const double sj = std::sin(0.5 * j * u);
            const double arg = j * beta - 0.5 * j * u;
            s += 2.0 * sj * (-a[j - 2] * std::sin(arg) + b[j - 2] * std::cos(arg));
        }
        return s;
    }

    // g'(beta) - g'(beta-u), same product form.
    double derivDiff(double beta, double u) const {
        double s = 0.0;
        for (int j = 2; j <= n; ++j) {
            const double sj = std::sin(0.5 * j * u);
            const double arg = j * beta - 0.5 * j * u;
            s += 2.0 * j * sj * (-a[j - 2] * std::cos(arg) - b[j - 2] * std::sin(arg));
        }
        return s;
    }

    // Parseval: int_0^{2pi} g^2 = pi sum (a_j^2 + b_j^2).
    double squareIntegral() const {
        double s = 0.0;
        for (size_t i = 0; i < a.size(); ++i) s += a[i] * a[i] + b[i] * b[i];
        return kPi * s;
    }

    double maxAbsCoefficient() const {
        double m = 0.0;
        for (size_t i = 0; i < a.size(); ++i) {
            m = std::max(m, std::max(std::fabs(a[i]), std::fabs(b[i])));
        }
        return m;
    }
};

// Sobolev-type norms computed from coefficients.
// norm_Y is the plain H^k Fourier sum; norm_X carries the extra gamma-1
// weight, the computable equivalent of the singular-difference norm (the
// multiplier-exact variant is normXExact below).
inline double norm_Y(const FourierContour& g, int k) {
    double s = 0.0;
    for (int j = 2; j <= g.n; ++j) {
        s += std::pow(1.0 + double(j) * j, k) *
             (g.a[j - 2] * g.a[j - 2] + g.b[j - 2] * g.b[j - 2]);
    }
    return std::sqrt(s);
}

inline double norm_X(const FourierContour& g, int k, double gamma) {
    double s = 0.0;
    for (int j = 2; j <= g.n; ++j) {
        s += std::pow(1.0 + double(j) * j, k + gamma - 1.0) *
             (g.a[j - 2] * g.a[j - 2] + g.b[j - 2] * g.b[j - 2]);
    }
    return std::sqrt(s);
}

// Diagnostic: the norm with the literal singular-difference term. For
// band-limited g the difference convolution is diagonal with multipliers
// cos_diff_multiplier, so
//   || int (d^k g(b-e) - d^k g(b)) |sin(e/2)|^{-gamma} de ||_{L2}
// is an exact coefficient sum.
inline double normXExact(const FourierContour& g, int k, double gamma) {
    double hk = 0.0, sing = 0.0;
    for (int j = 2; j <= g.n; ++j) {
        const double c2 = g.a[j - 2] * g.a[j - 2] + g.b[j - 2] * g.b[j - 2];
        hk += std::pow(1.0 + double(j) * j, k) * c2;
        const double mj = cos_diff_multiplier(j, gamma);
        const double amp = kTwoPi * mj * std::pow(double(j), k);
        sing += amp * amp * c2 * kPi;  // ||cos(j.)||_{L2}^2 = pi
    }
    return std::sqrt(hk) + std::sqrt(sing);
}

// One patch: boundary z(beta) = center + eps R(beta) (cos beta, sin beta)
// with R(beta) = rho + eps|eps|^gamma g(beta).
struct PatchGeometry {
    Vec2 center;
    double rho = 0.0;
    double eps = 0.0;
    double gamma = 0.0;
    FourierContour shape;

    double weight() const { return shape_weight(eps, gamma); }

    double radius(double beta) const { return rho + weight() * shape.value(beta); }
    double radiusDeriv(double beta) const { return weight() * shape.deriv(beta); }
    double radiusDeriv2(double beta) const { return weight() * shape.deriv2(beta); }

    Vec2 boundaryPoint(double beta) const {
        const double r = radius(beta);
        return center + Vec2{std::cos(beta), std::sin(beta)} * (eps * r);
    }

    // Positivity of R on a verification grid.
    bool radiusPositive(int grid = 512) const {
        for (int k = 0; k < grid; ++k) {
            if (radius(kTwoPi * k / grid) <= 0.0) return false;
        }
        return true;
    }
};

// Flux constraint F(eps, rho, g) = pi rho^2 + (eps^{2+2gamma}/2) int g^2 - kappa.
inline double flux_residual(const PatchGeometry& geom, double kappa) {
    const double w = geom.weight();
    return kPi * geom.rho * geom.rho + 0.5 * w * w * geom.shape.squareIntegral() - kappa;
}

// Unique positive root of the flux constraint:
//   rho(eps,g) = sqrt( kappa/pi - (eps^{2+2gamma}/(2 pi)) int g^2 ).
inline double rho_of(double eps, const FourierContour& g, double kappa, double gamma) {
    if (!(kappa > 0.0)) throw domain_error("rho_of: kappa must be positive");
    const double w = shape_weight(eps, gamma);
    const double arg = kappa / kPi - 0.5 * w * w * g.squareIntegral() / kPi;
    if (arg <= 0.0) {
        throw infeasible_flux_error("rho_of: flux constraint has no positive solution");
    }
    return std::sqrt(arg);
}

// Signed curvature of the boundary curve at beta; positive for a
// counterclockwise convex boundary. For g == 0 this is 1/(eps rho).
inline double signed_curvature(const PatchGeometry& geom, double beta) {
    const double r = geom.radius(beta);
    const double rp = geom.radiusDeriv(beta);
    const double rpp = geom.radiusDeriv2(beta);
    const double num = r * r + 2.0 * rp * rp - r * rpp;
    const double den = std::pow(r * r + rp * rp, 1.5);
    return num / (geom.eps * den);
}

// Discrete Fourier analysis of samples on the uniform grid
// beta_k = 2 pi k / M: mean, first harmonics, and the j>=2 remainder.
struct ModeSplit {
    double c0 = 0.0;      // mean
    double c1_cos = 0.0;  // coefficient of cos(beta)
    double c1_sin = 0.0;  // coefficient of sin(beta)
    FourierContour rest;  // modes 2..N
};

inline ModeSplit project_modes(const std::vector<double>& samples, int n_trunc) {
    const int m = static_cast<int>(samples.size());
    if (m < 2 * n_trunc + 2) {
        throw domain_error("project_modes: grid too small for the truncation order");
    }
    ModeSplit out;
    out.rest = FourierContour::zero(n_trunc);
    for (int k = 0; k < m; ++k) out.c0 += samples[k];
    out.c0 /= m;
    for (int j = 1; j <= n_trunc; ++j) {
        double ac = 0.0, as = 0.0;
        for (int k = 0; k < m; ++k) {
            const double bk = kTwoPi * k / m;
            ac += samples[k] * std::cos(j * bk);
            as += samples[k] * std::sin(j * bk);
        }
        ac *= 2.0 / m;
        as *= 2.0 / m;
        if (j == 1) {
            out.c1_cos = ac;
            out.c1_sin = as;
        } else {
            out.rest.a[j - 2] = ac;
            out.rest.b[j - 2] = as;
        }
    }
    return out;
}

inline std::vector<double> uniform_grid(int m) {
    std::vector<double> g(m);
    for (int k = 0; k < m; ++k) g[k] = kTwoPi * k / m;
    return g;
}

}  // namespace gsqg
