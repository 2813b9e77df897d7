#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "gsqg/common.hpp"

namespace gsqg {

// Euler Gamma. libm's tgamma is accurate to a few ulp over the range we use
// (|z| <= 50); we only add pole detection.
inline double gamma_fn(double z) {
    if (z <= 0.0 && z == std::floor(z)) {
        throw pole_error("gamma_fn: pole at nonpositive integer z=" + std::to_string(z));
    }
    return std::tgamma(z);
}

// Gamma(a)/Gamma(b) for positive a, b; goes through lgamma so large-j
// sigma evaluations never overflow.
inline double gamma_ratio(double a, double b) {
    if (a > 0.0 && b > 0.0) {
        return std::exp(std::lgamma(a) - std::lgamma(b));
    }
    return gamma_fn(a) / gamma_fn(b);
}

// C_gamma = 2^{gamma-1} Gamma(gamma/2) / Gamma(1-gamma/2).
// Both spellings in circulation (2^{gamma-1}* and /2^{1-gamma}) are the
// same expression; we evaluate the first.
inline double c_gamma(double gamma) {
    if (!(gamma > 0.0 && gamma < 2.0)) {
        throw domain_error("c_gamma: gamma must lie in (0,2), got " + std::to_string(gamma));
    }
    return std::pow(2.0, gamma - 1.0) * gamma_fn(gamma / 2.0) / gamma_fn(1.0 - gamma / 2.0);
}

// Exponent gamma plus the derived constants used everywhere downstream.
struct GammaParam {
    double gamma = 0.0;
    double c = 0.0;    // C_gamma
    double s = 0.0;    // 1 - gamma/2, order of the inverse fractional Laplacian

    // Solver range: gamma strictly inside (1,2).
    static GammaParam make(double gamma) {
        if (!(gamma > 1.0 && gamma < 2.0)) {
            throw domain_error("GammaParam: gamma must lie in (1,2), got " + std::to_string(gamma));
        }
        return makeExtended(gamma);
    }

    // Evaluation range (0,2); used by kernel-only paths and validate mode.
    static GammaParam makeExtended(double gamma) {
        if (!(gamma > 0.0 && gamma < 2.0)) {
            throw domain_error("GammaParam: gamma must lie in (0,2), got " + std::to_string(gamma));
        }
        GammaParam p;
        p.gamma = gamma;
        p.c = c_gamma(gamma);
        p.s = 1.0 - gamma / 2.0;
        return p;
    }
};

// Fourier multipliers of the linearized self-interaction operator:
//   sigma_j = 2^{gamma-1} Gamma(1-gamma)/Gamma(1-gamma/2)^2
//             * ( Gamma(1+gamma/2)/Gamma(2-gamma/2) - Gamma(j+gamma/2)/Gamma(1+j-gamma/2) ),
// for j >= 2, and sigma_1 = 0 (the translation mode).
inline double sigma(int j, double gamma) {
    if (j < 1) throw domain_error("sigma: j must be >= 1");
    if (!(gamma > 1.0 && gamma < 2.0)) {
        throw domain_error("sigma: gamma must lie in (1,2)");
    }
    if (j == 1) return 0.0;
    const double front = std::pow(2.0, gamma - 1.0) * gamma_fn(1.0 - gamma) /
                         std::pow(gamma_fn(1.0 - gamma / 2.0), 2);
    const double base = gamma_ratio(1.0 + gamma / 2.0, 2.0 - gamma / 2.0);
    const double rj = gamma_ratio(j + gamma / 2.0, 1.0 + j - gamma / 2.0);
    return front * (base - rj);
}

// Cached sigma_1..sigma_N for one gamma. Immutable after construction.
struct SigmaSpectrum {
    double gamma = 0.0;
    std::vector<double> values;  // values[j-1] = sigma_j

    static SigmaSpectrum make(double gamma, int n) {
        SigmaSpectrum s;
        s.gamma = gamma;
        s.values.resize(n);
        for (int j = 1; j <= n; ++j) s.values[j - 1] = sigma(j, gamma);
        return s;
    }

    double at(int j) const {
        if (j < 1 || j > static_cast<int>(values.size())) {
            throw domain_error("SigmaSpectrum: j out of cached range");
        }
        return values[j - 1];
    }
};

// int_0^pi sin(eta)^{2-gamma} e^{2 i j eta} d eta
//   = pi e^{i j pi} Gamma(3-gamma) / ( 2^{2-gamma} Gamma(2+j-gamma/2) Gamma(2-j-gamma/2) ).
// This is the half-angle moment behind the mode-wise reduction of the
// singular convolution: the mean of cos(j eta) |sin(eta/2)|^{2-gamma}
// over a period equals Re of this integral divided by pi.
inline std::complex<double> trig_moment(double j, double gamma) {
    if (!(gamma < 3.0)) throw domain_error("trig_moment: gamma must be < 3");
    const double a1 = 2.0 + j - gamma / 2.0;
    const double a2 = 2.0 - j - gamma / 2.0;
    for (double a : {a1, a2}) {
        if (a <= 0.0 && a == std::floor(a)) {
            throw pole_error("trig_moment: Gamma pole at argument " + std::to_string(a));
        }
    }
    const std::complex<double> phase(std::cos(j * kPi), std::sin(j * kPi));
    const double mag = kPi * gamma_fn(3.0 - gamma) /
                       (std::pow(2.0, 2.0 - gamma) * gamma_fn(a1) * gamma_fn(a2));
    return phase * mag;
}

// Multiplier m_j of the singular difference convolution:
//   (1/2pi) int_0^{2pi} (cos(j b) - cos(j b - j eta)) |sin(eta/2)|^{-gamma} d eta
//     = m_j cos(j b),
// and the same multiplier maps sin(j b) -> m_j sin(j b). m_0 = 0.
inline double cos_diff_multiplier(int j, double gamma) {
    if (j < 0) throw domain_error("cos_diff_multiplier: j must be >= 0");
    if (!(gamma > 1.0 && gamma < 2.0)) {
        throw domain_error("cos_diff_multiplier: gamma must lie in (1,2)");
    }
    if (j == 0) return 0.0;
    const double front = std::pow(2.0, gamma) * gamma_fn(1.0 - gamma) /
                         (gamma_fn(gamma / 2.0) * gamma_fn(1.0 - gamma / 2.0));
    const double base = gamma_ratio(gamma / 2.0, 1.0 - gamma / 2.0);
    const double rj = gamma_ratio(j + gamma / 2.0, 1.0 + j - gamma / 2.0);
    return front * (base - rj);
}

}  // namespace gsqg
