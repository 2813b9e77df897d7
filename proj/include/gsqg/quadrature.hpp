#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "gsqg/common.hpp"

namespace gsqg {

struct QuadRule {
    std::vector<double> nodes;    // on [-1,1]
    std::vector<double> weights;
};

// Gauss-Legendre rule by Newton iteration on P_n; machine precision for the
// small n used here.
inline QuadRule gauss_legendre(int n) {
    static std::map<int, QuadRule> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    QuadRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it2 = 0; it2 < 100; ++it2) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    cache[n] = r;
    return r;
}

// Composite Gauss-Legendre over [a,b].
template <typename F>
double gl_integrate(F&& f, double a, double b, const QuadRule& rule) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double sum = 0.0;
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    }
    return half * sum;
}

// Nodes and weights of the two-sided geometrically graded mesh on
// (-outer, outer) with the grading accumulating at 0. The innermost panel
// touches 0; its Gauss nodes are open, so 0 itself is never a node.
struct GradedMesh {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline GradedMesh graded_mesh(double outer, int levels, double ratio, int panel_nodes) {
    const QuadRule rule = gauss_legendre(panel_nodes);
    GradedMesh mesh;
    mesh.nodes.reserve(2 * (levels + 1) * panel_nodes);
    mesh.weights.reserve(mesh.nodes.capacity());
    for (int side = 0; side < 2; ++side) {
        const double sgn = side == 0 ? 1.0 : -1.0;
        double hi = outer;
        for (int k = 0; k <= levels; ++k) {
            const double lo = (k == levels) ? 0.0 : hi * ratio;
            const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
            for (size_t q = 0; q < rule.nodes.size(); ++q) {
                mesh.nodes.push_back(sgn * (mid + half * rule.nodes[q]));
                mesh.weights.push_back(half * rule.weights[q]);
            }
            hi = lo;
        }
    }
    return mesh;
}

// Integrate f over (-outer, outer) when f has an integrable singularity at 0
// (after the caller's first-order subtraction the integrand is
// O(|u|^{2-gamma})).
template <typename F>
double graded_singular_integral(F&& f, double outer, int levels, double ratio, int panel_nodes) {
    const GradedMesh mesh = graded_mesh(outer, levels, ratio, panel_nodes);
    double total = 0.0;
    for (size_t i = 0; i < mesh.nodes.size(); ++i) total += mesh.weights[i] * f(mesh.nodes[i]);
    return total;
}

// Tanh-sinh (double-exponential) quadrature on (a,b); admits algebraic
// endpoint singularities up to and beyond |u|^{-1+delta}. f is called with
// two arguments: the node and its distance to the nearer endpoint, so
// integrands can form differences like g(beta)-g(beta-u) without
// cancellation at double-exponentially small offsets.
template <typename F>
double tanh_sinh(F&& f, double a, double b, double step = 0.0078125, double tmax = 5.0,
                 double dl_min = 1e-80) {
    const double half = 0.5 * (b - a);
    double total = 0.0;
    for (int k = 0;; ++k) {
        const double t = k * step;
        const double z = 0.5 * kPi * std::sinh(t);
        const double w = 0.5 * kPi * std::cosh(t) / std::pow(std::cosh(z), 2);
        const double dl = 2.0 / (1.0 + std::exp(2.0 * z));  // 1 - tanh(z), stable
        if (dl * half < dl_min || t > tmax) break;
        if (k == 0) {
            total += f(a + half, half) * w;
        } else {
            total += (f(a + half * dl, half * dl) + f(b - half * dl, half * dl)) * w;
        }
    }
    return total * half * step;
}

// Convenience: integrand given only as f(u). Distance argument dropped.
template <typename F>
double tanh_sinh_plain(F&& f, double a, double b, double step = 0.0078125) {
    return tanh_sinh([&](double u, double) { return f(u); }, a, b, step);
}

// Periodic trapezoid rule on [0, 2pi) with m nodes (spectrally accurate for
// smooth periodic integrands).
template <typename F>
double periodic_trapezoid(F&& f, int m) {
    double sum = 0.0;
    for (int k = 0; k < m; ++k) sum += f(kTwoPi * k / m);
    return sum * kTwoPi / m;
}

}  // namespace gsqg
