#pragma once

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gsqg/common.hpp"
#include "gsqg/contour.hpp"
#include "gsqg/functional.hpp"
#include "gsqg/green.hpp"
#include "gsqg/kr.hpp"
#include "gsqg/linop.hpp"
#include "gsqg/quadrature.hpp"
#include "gsqg/solver.hpp"
#include "gsqg/special.hpp"

namespace gsqg {

struct CheckResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double threshold = 0.0;
    std::string detail;
};

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

// Least-squares slope of log|y| against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const int n = static_cast<int>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        const double lx = std::log(x[i]), ly = std::log(std::fabs(y[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace checks {

// The linearized self-interaction operator applied to a single trig mode,
// by direct tanh-sinh quadrature of the Gateaux-derivative integrals.
// Independent of the closed-form sigma path; the trig differences use exact
// product forms so the double-exponential nodes stay accurate.
inline double gateaux_mode_quadrature(int j, double gamma, double rho, double beta,
                                      bool cosine_mode) {
    const double cg = c_gamma(gamma);
    auto kernel = [&](double e) { return std::pow(std::fabs(2.0 * std::sin(0.5 * e)), -gamma); };
    auto h = [&](double b) { return cosine_mode ? std::cos(j * b) : std::sin(j * b); };
    auto dhp = [&](double e) {
        // h'(beta) - h'(beta - e) in product form
        const double s = std::sin(0.5 * j * e);
        const double arg = j * beta - 0.5 * j * e;
        return cosine_mode ? -2.0 * j * std::cos(arg) * s : -2.0 * j * std::sin(arg) * s;
    };
    auto f1 = [&](double e, double) { return h(beta - e) * std::sin(e) * kernel(e); };
    auto f2 = [&](double e, double) { return dhp(e) * std::cos(e) * kernel(e); };
    const double i1 = (tanh_sinh(f1, 0.0, kPi) + tanh_sinh(f1, -kPi, 0.0)) / kTwoPi;
    const double i2 = (tanh_sinh(f2, 0.0, kPi) + tanh_sinh(f2, -kPi, 0.0)) / kTwoPi;
    return cg / std::pow(rho, gamma) * ((1.0 - 0.5 * gamma) * i1 - i2);
}

inline CheckResult sigma_vs_quadrature(const std::vector<double>& gammas, int jmax,
                                       double tol = 1e-6) {
    CheckResult r;
    r.name = "sigma closed form vs gateaux quadrature";
    r.threshold = tol;
    const double beta = 0.37, rho = 1.0;
    double worst = 0.0, sigma1 = 0.0;
    for (double g : gammas) {
        for (int j = 2; j <= jmax; ++j) {
            for (bool cosm : {true, false}) {
                const double got = gateaux_mode_quadrature(j, g, rho, beta, cosm);
                const double want = sigma(j, g) * j *
                                    (cosm ? std::sin(j * beta) : -std::cos(j * beta));
                worst = std::max(worst, std::fabs(got - want) / std::fabs(want));
            }
        }
        sigma1 = std::max(sigma1, std::fabs(gateaux_mode_quadrature(1, g, rho, beta, true)));
        sigma1 = std::max(sigma1, std::fabs(gateaux_mode_quadrature(1, g, rho, beta, false)));
    }
    r.measured = worst;
    r.pass = worst <= tol && sigma1 <= 1e-10;
    r.detail = "worst rel err " + fmt(worst) + ", |sigma_1 quadrature| " + fmt(sigma1);
    return r;
}

inline CheckResult trig_moment_vs_quadrature(const std::vector<double>& gammas, int jmax,
                                             double tol = 1e-10) {
    CheckResult r;
    r.name = "trig moment identity vs quadrature";
    r.threshold = tol;
    double worst = 0.0;
    for (double g : gammas) {
        for (int j = 0; j <= jmax; ++j) {
            const std::complex<double> closed = trig_moment(j, g);
            auto fre = [&](double e, double) {
                return std::pow(std::sin(e), 2.0 - g) * std::cos(2.0 * j * e);
            };
            auto fim = [&](double e, double) {
                return std::pow(std::sin(e), 2.0 - g) * std::sin(2.0 * j * e);
            };
            const std::complex<double> quad(tanh_sinh(fre, 0.0, kPi),
                                            tanh_sinh(fim, 0.0, kPi));
            worst = std::max(worst, std::abs(closed - quad) / std::abs(quad));
        }
    }
    r.measured = worst;
    r.pass = worst <= tol;
    r.detail = "worst rel err " + fmt(worst);
    return r;
}

inline CheckResult sigma_monotonicity(const std::vector<double>& gammas) {
    CheckResult r;
    r.name = "sigma monotone, positive, slope gamma-1";
    r.threshold = 0.05;
    bool ok = true;
    double worst_slope_err = 0.0;
    for (double g : gammas) {
        double prev = 0.0;
        for (int j = 2; j <= 200; ++j) {
            const double s = sigma(j, g);
            if (!(s > 0.0) || (j > 2 && !(s > prev))) ok = false;
            prev = s;
        }
        std::vector<double> js, ss;
        for (int j = 50; j <= 400; j += 10) {
            js.push_back(j);
            ss.push_back(sigma(j, g));
        }
        const double slope = loglog_slope(js, ss);
        worst_slope_err = std::max(worst_slope_err, std::fabs(slope - (g - 1.0)));
    }
    r.measured = worst_slope_err;
    r.pass = ok && worst_slope_err <= 0.05;
    r.detail = std::string(ok ? "monotone+positive" : "ORDER VIOLATION") + ", worst slope err " +
               fmt(worst_slope_err);
    return r;
}

// A fixed non-critical two-patch disc configuration used by the expansion
// checks.
inline ContinuationState expansion_state(double gamma) {
    ContinuationState st;
    st.centers = {{0.35, 0.1}, {-0.4, -0.15}};
    st.kappas = {kPi, 0.8 * kPi};
    st.shapes = {FourierContour::zero(16), FourierContour::zero(16)};
    st.shapes[0].a[0] = 0.3;
    st.shapes[0].b[1] = 0.2;
    st.shapes[1].a[2] = -0.25;
    st.rhos = {1.0, 1.0};
    st.eps = 0.0;
    st.eliminateRhos(gamma);
    return st;
}

inline CheckResult leading_order_expansions(const GreenKernel& kernel, double tol_window = 0.2) {
    CheckResult r;
    r.name = "leading-order expansions of the functional";
    r.threshold = tol_window;
    const double gamma = kernel.gamma_param().gamma;
    QuadratureConfig quad;
    ContinuationState st = expansion_state(gamma);
    const std::vector<double> grid = uniform_grid(32);
    const std::vector<double> epses{1e-2, 5e-3, 2.5e-3};
    std::vector<double> e1, e2, e3;
    for (double eps : epses) {
        st.eps = eps;
        st.eliminateRhos(gamma);
        const FunctionalContext ctx = make_context(kernel, st, quad);
        auto maxdiff = [&](const std::vector<double>& a, const std::vector<double>& b) {
            double m = 0.0;
            for (size_t k = 0; k < a.size(); ++k) m = std::max(m, std::fabs(a[k] - b[k]));
            return m;
        };
        e1.push_back(maxdiff(eval_G1(ctx, 0, grid), eval_G1_limit(ctx, 0, grid)));
        e2.push_back(maxdiff(eval_G2(ctx, 0, grid), eval_G2_limit(ctx, 0, grid)));
        e3.push_back(maxdiff(eval_G3(ctx, 0, grid), eval_G3_limit(ctx, 0, grid)));
    }
    const double s1 = loglog_slope(epses, e1);
    const double s2 = loglog_slope(epses, e2);
    const double s3 = loglog_slope(epses, e3);
    const double err = std::max({std::fabs(s1 - (1.0 + gamma)), std::fabs(s2 - 1.0),
                                 std::fabs(s3 - 1.0)});
    r.measured = err;
    r.pass = err <= tol_window;
    r.detail = "G1 slope " + fmt(s1) + " (want " + fmt(1.0 + gamma) + "), G2 " + fmt(s2) +
               ", G3 " + fmt(s3) + " (want 1)";
    return r;
}

// Residual vanishes at the Kirchhoff-Routh critical point and only there;
// the first-harmonic rows at perturbed centers reproduce the gradient
// dictionary (single patch in the disc: E = grad W / (2 kappa); free-space
// pair: E_i = grad_i W / (4 pi kappa_i)).
inline CheckResult lemma_equivalence(double gamma, double tol_res = 1e-8, double tol_dict = 1e-6) {
    CheckResult r;
    r.name = "residual zero iff KR critical; first-harmonic dictionary";
    r.threshold = tol_dict;
    const GammaParam gp = GammaParam::make(gamma);
    const GreenKernel disc = GreenKernel::disc(gp);
    QuadratureConfig quad;

    VortexConfiguration seed;
    seed.points = {{0.2, 0.1}};
    seed.strengths = {kPi};
    const auto cps = find_critical_points(disc, {seed}, 1e-12);
    if (cps.empty()) {
        r.detail = "no critical point found";
        return r;
    }
    ContinuationState at = ContinuationState::base(cps[0].config, 16);
    const double res_at = residual(disc, at, quad).norm();

    VortexConfiguration off = cps[0].config;
    off.points[0] = {0.31, 0.22};
    ContinuationState away = ContinuationState::base(off, 16);
    const double res_away = residual(disc, away, quad).norm();

    // dictionary at the perturbed center (m=1 disc)
    const Eigen::VectorXd raway = residual(disc, away, quad);
    const auto gw = grad_w_m(disc, off);
    const double k1v = off.strengths[0];
    const double dict_sin = kPi * gw[0].x / (2.0 * k1v);
    const double dict_cos = -kPi * gw[0].y / (2.0 * k1v);
    const int n = raway.size();
    double dict_err = std::max(std::fabs(raway[n - 2] - dict_sin),
                               std::fabs(raway[n - 1] - dict_cos));

    // free-space pair dictionary
    {
        const GreenKernel freek = GreenKernel::free(gp);
        VortexConfiguration pair;
        pair.points = {{0.3, 0.05}, {-0.25, -0.1}};
        pair.strengths = {kPi, 0.7 * kPi};
        ContinuationState st = ContinuationState::base(pair, 16);
        const Eigen::VectorXd rv = residual(freek, st, quad);
        const auto gwp = grad_w_m(freek, pair);
        const int nn = rv.size();
        for (int i = 0; i < 2; ++i) {
            const double ds = kPi * gwp[i].x / (4.0 * kPi * pair.strengths[i]);
            const double dc = -kPi * gwp[i].y / (4.0 * kPi * pair.strengths[i]);
            dict_err = std::max(dict_err, std::fabs(rv[nn - 4 + 2 * i] - ds));
            dict_err = std::max(dict_err, std::fabs(rv[nn - 4 + 2 * i + 1] - dc));
        }
    }

    r.measured = std::max(res_at, dict_err);
    r.pass = res_at <= tol_res && res_away > tol_res && dict_err <= tol_dict;
    r.detail = "residual at critical " + fmt(res_at) + ", away " + fmt(res_away) +
               ", dictionary err " + fmt(dict_err);
    return r;
}

// Superposition of eval_G in the shape at eps = 0 (the map is exactly the
// diagonal linear operator there).
inline CheckResult linearity_at_eps0(double gamma, double tol = 1e-8) {
    CheckResult r;
    r.name = "linearity of the shape map at eps = 0";
    r.threshold = tol;
    const GammaParam gp = GammaParam::make(gamma);
    const GreenKernel disc = GreenKernel::disc(gp);
    QuadratureConfig quad;
    ContinuationState st = expansion_state(gamma);
    st.eps = 0.0;
    st.eliminateRhos(gamma);
    const std::vector<double> grid = uniform_grid(64);

    auto eval_with = [&](const FourierContour& s0, const FourierContour& s1) {
        ContinuationState t = st;
        t.shapes[0] = s0;
        t.shapes[1] = s1;
        const FunctionalContext ctx = make_context(disc, t, quad);
        return eval_G(ctx, 0, grid);
    };
    FourierContour za = FourierContour::zero(16), zb = FourierContour::zero(16);
    za.a[0] = 0.4;
    za.b[3] = -0.3;
    zb.a[2] = 0.2;
    const auto v0 = eval_with(FourierContour::zero(16), FourierContour::zero(16));
    const auto va = eval_with(za, zb);
    FourierContour za2 = za;
    for (auto& x : za2.a) x *= 0.5;
    for (auto& x : za2.b) x *= 0.5;
    FourierContour zb2 = zb;
    for (auto& x : zb2.a) x *= 0.5;
    for (auto& x : zb2.b) x *= 0.5;
    const auto vh = eval_with(za2, zb2);
    double worst = 0.0;
    for (size_t k = 0; k < grid.size(); ++k) {
        worst = std::max(worst, std::fabs((va[k] - v0[k]) - 2.0 * (vh[k] - v0[k])));
    }
    r.measured = worst;
    r.pass = worst <= tol;
    r.detail = "superposition defect " + fmt(worst);
    return r;
}

// Measured operator-norm stability of the diagonal inverse over truncations.
inline CheckResult inverse_bound_stability(double gamma, int k_sob = 3, double tol = 0.10) {
    CheckResult r;
    r.name = "inverse bound stable under truncation";
    r.threshold = tol;
    std::vector<double> worst_ratio;
    for (int n : {32, 64, 128}) {
        const SpectralOperator op = SpectralOperator::make(gamma, {1.0}, n);
        std::mt19937 rng(12345);
        std::normal_distribution<double> dist;
        double wr = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            Y0Element p = Y0Element::zero(n);
            double ynorm2 = 0.0;
            for (int j = 2; j <= n; ++j) {
                p.sin_c[j - 2] = dist(rng);
                p.cos_c[j - 2] = dist(rng);
                ynorm2 += std::pow(1.0 + double(j) * j, k_sob - 1) *
                          (p.sin_c[j - 2] * p.sin_c[j - 2] + p.cos_c[j - 2] * p.cos_c[j - 2]);
            }
            const FourierContour h = invert_L0(op, 0, p);
            const double ratio = norm_X(h, k_sob, gamma) / std::sqrt(ynorm2);
            wr = std::max(wr, ratio);
        }
        worst_ratio.push_back(wr);
    }
    double lo = worst_ratio[0], hi = worst_ratio[0];
    for (double v : worst_ratio) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    r.measured = (hi - lo) / lo;
    r.pass = r.measured <= tol;
    r.detail = "ratios " + fmt(worst_ratio[0]) + ", " + fmt(worst_ratio[1]) + ", " +
               fmt(worst_ratio[2]) + "; variation " + fmt(r.measured);
    return r;
}

inline std::vector<CheckResult> validation_battery(double gamma) {
    std::vector<CheckResult> out;
    const std::vector<double> gammas = (gamma > 1.0 && gamma < 2.0)
                                           ? std::vector<double>{gamma}
                                           : std::vector<double>{1.25, 1.5, 1.75};
    out.push_back(sigma_vs_quadrature(gammas, 20));
    out.push_back(trig_moment_vs_quadrature(gammas, 10));
    out.push_back(sigma_monotonicity(gammas));
    const double g = gammas[0];
    out.push_back(leading_order_expansions(GreenKernel::disc(GammaParam::make(g))));
    out.push_back(lemma_equivalence(g));
    out.push_back(linearity_at_eps0(g));
    out.push_back(inverse_bound_stability(g));
    return out;
}

}  // namespace checks
}  // namespace gsqg
