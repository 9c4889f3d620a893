#pragma once

#include <cmath>
#include <ostream>

#include "flatlab/errors.hpp"

namespace flatlab {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    bool operator==(const Vec2&) const = default;

    double norm() const { return std::hypot(x, y); }
    double norm2() const { return x * x + y * y; }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

inline std::ostream& operator<<(std::ostream& os, Vec2 v) {
    return os << "(" << v.x << ", " << v.y << ")";
}

// Row-major 2x2 matrix (a b; c d).
struct Mat2 {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    Mat2() = default;
    Mat2(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) {}

    double det() const { return a * d - b * c; }

    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d,
                c * o.a + d * o.c, c * o.b + d * o.d};
    }

    Mat2 inverse() const {
        double dt = det();
        if (std::abs(dt) < 1e-300) throw InvalidParameter("singular matrix has no inverse");
        return {d / dt, -b / dt, -c / dt, a / dt};
    }

    bool operator==(const Mat2&) const = default;
};

inline Vec2 mat_apply(const Mat2& m, Vec2 v) {
    return {m.a * v.x + m.b * v.y, m.c * v.x + m.d * v.y};
}

inline Mat2 identity_mat() { return {}; }

inline Mat2 horocycle(double s) { return {1.0, s, 0.0, 1.0}; }

inline Mat2 geodesic(double t) { return {std::exp(t), 0.0, 0.0, std::exp(-t)}; }

inline Mat2 rescale(double c) {
    if (!(c > 0.0)) throw InvalidParameter("rescale needs c > 0");
    return {c, 0.0, 0.0, c};
}

// Rotation by theta. Entries snap to exact 0/±1 when theta is within 1e-12 of a
// multiple of pi/2, so quarter-turn frame changes round-trip without drift.
inline Mat2 rotate(double theta) {
    constexpr double half_pi = 1.57079632679489661923;
    double k = std::round(theta / half_pi);
    if (std::abs(theta - k * half_pi) <= 1e-12) {
        int q = static_cast<int>(std::llround(k)) & 3;
        if (q < 0) q += 4;
        switch (q) {
            case 0: return {1, 0, 0, 1};
            case 1: return {0, -1, 1, 0};
            case 2: return {-1, 0, 0, -1};
            default: return {0, 1, -1, 0};
        }
    }
    double cs = std::cos(theta), sn = std::sin(theta);
    return {cs, -sn, sn, cs};
}

// Shared numeric tolerances, injected everywhere (no global mutable state).
struct NumericPolicy {
    double eps_glue = 1e-9;   // gluing / vertex-class angle checks
    double eps_hit = 1e-9;    // near-vertex passage in tracing
    double eps_dedup = 1e-9;  // saddle-connection dedup snap

    void check() const {
        if (!(eps_glue > 0) || !(eps_hit > 0) || !(eps_dedup > 0))
            throw InvalidParameter("NumericPolicy tolerances must be positive");
        if (eps_hit > eps_glue)
            throw InvalidParameter("NumericPolicy requires eps_hit <= eps_glue");
    }
};

}  // namespace flatlab
