#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gsqg/common.hpp"
#include "gsqg/quadrature.hpp"
#include "gsqg/special.hpp"

namespace gsqg {

enum class DomainTag { disc, free_space };

namespace detail {

// Chebyshev fit of a function on [lo,hi]; evaluation by Clenshaw.
struct ChebFit {
    double lo = 0.0, hi = 1.0;
    std::vector<double> coef;

    template <typename F>
    static ChebFit build(F&& f, double lo, double hi, int n) {
        ChebFit c;
        c.lo = lo;
        c.hi = hi;
        std::vector<double> fv(n);
        for (int k = 0; k < n; ++k) {
            const double t = std::cos(kPi * (k + 0.5) / n);
            fv[k] = f(0.5 * (lo + hi) + 0.5 * (hi - lo) * t);
        }
        c.coef.resize(n);
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += fv[k] * std::cos(kPi * j * (k + 0.5) / n);
            c.coef[j] = 2.0 * s / n;
        }
        return c;
    }

    double operator()(double x) const {
        const double t = (2.0 * x - lo - hi) / (hi - lo);
        double b1 = 0.0, b2 = 0.0;
        for (int j = static_cast<int>(coef.size()) - 1; j >= 1; --j) {
            const double b0 = 2.0 * t * b1 - b2 + coef[j];
            b2 = b1;
            b1 = b0;
        }
        return t * b1 - b2 + 0.5 * coef[0];
    }
};

}  // namespace detail

// Green kernel of the fractional Laplacian velocity law:
//   K_gamma(x,y) = C_gamma |x-y|^{-gamma} + K0_gamma(x,y),
// with the smooth remainder K0 available in closed form on the disc and
// identically zero in free space.
//
// On the unit disc, with s = 1-gamma/2 and r0 = (1-|x|^2)(1-|y|^2)/|x-y|^2,
//   K(x,y) = kappa_s |x-y|^{-gamma} int_0^{r0} t^{s-1}/(1+t) dt,
// and kappa_s = C_gamma / B(s,1-s) pins the singular part to C_gamma exactly.
// A disc of radius Rd rescales as K_Rd(x,y) = Rd^{-gamma} K_1(x/Rd, y/Rd).
class GreenKernel {
public:
    static GreenKernel disc(const GammaParam& gp, double radius = 1.0) {
        if (!(radius > 0.0)) throw domain_error("GreenKernel: radius must be positive");
        GreenKernel k;
        k.tag_ = DomainTag::disc;
        k.radius_ = radius;
        k.gp_ = gp;
        k.beta_ss_ = gamma_fn(gp.s) * gamma_fn(1.0 - gp.s);  // B(s,1-s) = pi/sin(pi s)
        k.kappa_s_ = gp.c / k.beta_ss_;
        // F(r0)/r0^s is analytic on [0,2]; 40 Chebyshev coefficients reach
        // machine precision. Built once via slow quadrature.
        const double s = gp.s;
        k.profile_ = detail::ChebFit::build(
            [&](double r0) {
                if (r0 <= 0.0) return 1.0 / s;
                if (r0 < 0.25) {
                    double sum = 0.0, p = 1.0;
                    for (int n = 0; n < 80; ++n) {
                        const double term = p / (s + n);
                        sum += (n % 2 == 0 ? term : -term);
                        p *= r0;
                        if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
                    }
                    return sum;
                }
                const double F = tanh_sinh_plain(
                    [&](double t) { return std::pow(t, s - 1.0) / (1.0 + t); }, 0.0, r0, 0.004);
                return F / std::pow(r0, s);
            },
            0.0, 2.0, 40);
        return k;
    }

    static GreenKernel free(const GammaParam& gp) {
        GreenKernel k;
        k.tag_ = DomainTag::free_space;
        k.gp_ = gp;
        return k;
    }

    DomainTag tag() const { return tag_; }
    double radius() const { return radius_; }
    const GammaParam& gamma_param() const { return gp_; }

    bool inside(const Vec2& x) const {
        return tag_ == DomainTag::free_space || x.norm() < radius_;
    }

    // Singular part C_gamma |x-y|^{-gamma}.
    double k1(const Vec2& x, const Vec2& y) const {
        const double d2 = (x - y).norm2();
        if (d2 == 0.0) throw singularity_error("k1: coincident points");
        return gp_.c * std::pow(d2, -0.5 * gp_.gamma);
    }

    // Full Green function (disc only).
    double green(const Vec2& x, const Vec2& y) const {
        requireInterior(x, "green");
        requireInterior(y, "green");
        if (tag_ == DomainTag::free_space) return k1(x, y);
        const Vec2 X = x / radius_, Y = y / radius_;
        const double d2 = (X - Y).norm2();
        if (d2 == 0.0) throw singularity_error("green: coincident points");
        const double r0 = (1.0 - X.norm2()) * (1.0 - Y.norm2()) / d2;
        const double val = kappa_s_ * std::pow(d2, -0.5 * gp_.gamma) * profileF(r0);
        return val * std::pow(radius_, -gp_.gamma);
    }

    // Smooth remainder K0 = green - k1, evaluated without cancellation:
    // near the diagonal (r0 >= 2) by the interior power series, elsewhere by
    // the tail-integral form. Diagonal x == y returns the Robin-type limit.
    double k0(const Vec2& x, const Vec2& y) const {
        requireInterior(x, "k0");
        requireInterior(y, "k0");
        if (tag_ == DomainTag::free_space) return 0.0;
        double v, gx, gy;
        k0Unit(x / radius_, y / radius_, v, gx, gy, false);
        return v * std::pow(radius_, -gp_.gamma);
    }

    // Gradient of K0 in the first argument (analytic; see gradX_fd for the
    // stencil variant used as a cross-check).
    Vec2 grad_x_k0(const Vec2& x, const Vec2& y) const {
        requireInterior(x, "grad_x_k0");
        requireInterior(y, "grad_x_k0");
        if (tag_ == DomainTag::free_space) return {0.0, 0.0};
        double v, gx, gy;
        k0Unit(x / radius_, y / radius_, v, gx, gy, true);
        const double scale = std::pow(radius_, -gp_.gamma) / radius_;
        return {gx * scale, gy * scale};
    }

    // k0 and its x-gradient in one evaluation (hot path of the boundary
    // influence term).
    void k0_and_grad(const Vec2& x, const Vec2& y, double& value, Vec2& grad) const {
        if (tag_ == DomainTag::free_space) {
            value = 0.0;
            grad = {0.0, 0.0};
            return;
        }
        double v, gx, gy;
        k0Unit(x / radius_, y / radius_, v, gx, gy, true);
        const double sv = std::pow(radius_, -gp_.gamma);
        value = v * sv;
        grad = {gx * sv / radius_, gy * sv / radius_};
    }

    // Central-difference gradient with one Richardson level; step h in
    // domain-length units.
    Vec2 grad_x_k0_fd(const Vec2& x, const Vec2& y, double h = 1e-4) const {
        auto d1 = [&](double hh) {
            const Vec2 ex{hh, 0.0}, ey{0.0, hh};
            return Vec2{(k0(x + ex, y) - k0(x - ex, y)) / (2.0 * hh),
                        (k0(x + ey, y) - k0(x - ey, y)) / (2.0 * hh)};
        };
        const Vec2 g1 = d1(h), g2 = d1(0.5 * h);
        return (g2 * 4.0 - g1) / 3.0;  // Richardson: cancels the h^2 term
    }

private:
    void requireInterior(const Vec2& p, const char* who) const {
        if (!inside(p)) {
            throw domain_error(std::string(who) + ": point outside the domain");
        }
    }

    // F(r0) = int_0^{r0} t^{s-1}/(1+t) dt, cancellation-free on both branches.
    double profileF(double r0) const {
        if (r0 <= 2.0) return std::pow(r0, gp_.s) * profile_(r0);
        return beta_ss_ - tailT(r0);
    }

    // T(r0) = int_{r0}^inf t^{s-1}/(1+t) dt for r0 >= 2 (alternating series
    // in 1/r0, ratio <= 1/2).
    double tailT(double r0) const {
        const double s = gp_.s;
        const double v = 1.0 / r0;
        double sum = 0.0, p = 1.0;
        for (int k = 0; k < 80; ++k) {
            const double term = p / (k + 1.0 - s);
            sum += (k % 2 == 0 ? term : -term);
            p *= v;
            if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
        }
        return std::pow(r0, s - 1.0) * sum;
    }

    // Unit-disc K0 and gradient. Branches:
    //   diagonal        : closed form,
    //   r0 >= 2         : interior power series in |x-y|^2 (smooth terms),
    //   r0 <  2         : tail form with closed-form derivative.
    void k0Unit(const Vec2& X, const Vec2& Y, double& val, double& gx, double& gy,
                bool want_grad) const {
        const double s = gp_.s;
        const Vec2 dvec = X - Y;
        const double d2 = dvec.norm2();
        const double a = 1.0 - X.norm2();
        const double b = 1.0 - Y.norm2();
        if (d2 == 0.0) {
            val = -kappa_s_ * std::pow(a, -gp_.gamma) / (1.0 - s);
            const Vec2 g = X * (-2.0 * kappa_s_ * std::pow(a, -gp_.gamma - 1.0));
            gx = g.x;
            gy = g.y;
            return;
        }
        const double ab = a * b;
        const double r0 = ab / d2;
        if (r0 >= 2.0) {
            // k0 = -kappa_s sum_k (-1)^k (ab)^{s-1-k} d2^k / (k+1-s)
            double sum = 0.0, sum_da = 0.0, sum_dd2 = 0.0;
            double pab = std::pow(ab, s - 1.0);  // (ab)^{s-1-k} iteratively
            double pd2 = 1.0;                    // d2^k iteratively
            for (int k = 0; k < 80; ++k) {
                const double sg = (k % 2 == 0) ? 1.0 : -1.0;
                const double ck = sg / (k + 1.0 - s);
                const double term = ck * pab * pd2;
                sum += term;
                if (want_grad) {
                    sum_da += term * (s - 1.0 - k) / ab;   // d/d(ab) accumulated
                    if (k > 0) sum_dd2 += ck * pab * k * pd2 / d2;
                }
                if (std::fabs(term) < 1e-17 * (std::fabs(sum) + 1e-300) && k > 2) break;
                pab /= ab;
                pd2 *= d2;
            }
            val = -kappa_s_ * sum;
            if (want_grad) {
                // d(ab)/dX = -2X b ; d(d2)/dX = 2 dvec
                const Vec2 g = (X * (-2.0 * b * sum_da) + dvec * (2.0 * sum_dd2)) * -kappa_s_;
                gx = g.x;
                gy = g.y;
            } else {
                gx = gy = 0.0;
            }
            return;
        }
        const double T = beta_ss_ - profileF(r0);
        const double dg2 = std::pow(d2, -0.5 * gp_.gamma);
        val = -kappa_s_ * dg2 * T;
        if (want_grad) {
            const double dT = -std::pow(r0, s - 1.0) / (1.0 + r0);
            const Vec2 dr0 = (X * (-2.0 * b * d2) - dvec * (2.0 * ab)) / (d2 * d2);
            const Vec2 g =
                (dvec * (-gp_.gamma * dg2 / d2 * T) + dr0 * (dg2 * dT)) * -kappa_s_;
            gx = g.x;
            gy = g.y;
        } else {
            gx = gy = 0.0;
        }
    }

    DomainTag tag_ = DomainTag::free_space;
    double radius_ = 1.0;
    GammaParam gp_{};
    double beta_ss_ = 0.0;
    double kappa_s_ = 0.0;
    detail::ChebFit profile_;
};

}  // namespace gsqg
