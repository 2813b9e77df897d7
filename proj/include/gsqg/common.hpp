#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace gsqg {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

// Error taxonomy. Every throwing operation uses one of these so callers can
// attribute failures to a domain violation vs. a numerical breakdown.
struct domain_error : std::runtime_error {
    explicit domain_error(const std::string& m) : std::runtime_error(m) {}
};
struct pole_error : domain_error {
    explicit pole_error(const std::string& m) : domain_error(m) {}
};
struct singularity_error : domain_error {
    explicit singularity_error(const std::string& m) : domain_error(m) {}
};
struct infeasible_flux_error : domain_error {
    explicit infeasible_flux_error(const std::string& m) : domain_error(m) {}
};
struct geometry_error : std::runtime_error {
    explicit geometry_error(const std::string& m) : std::runtime_error(m) {}
};
struct not_in_range_error : std::runtime_error {
    explicit not_in_range_error(const std::string& m) : std::runtime_error(m) {}
};
struct config_error : std::runtime_error {
    explicit config_error(const std::string& m) : std::runtime_error(m) {}
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    Vec2 operator-() const { return {-x, -y}; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm2() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm2()); }
    // 90-degree counterclockwise rotation.
    Vec2 perp() const { return {-y, x}; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

// eps * |eps|^gamma, the shape-perturbation weight. Odd in eps; equals
// eps^{1+gamma} for eps >= 0 and extends it smoothly to eps < 0.
inline double shape_weight(double eps, double gamma) {
    if (eps == 0.0) return 0.0;
    return eps * std::pow(std::fabs(eps), gamma);
}

}  // namespace gsqg
