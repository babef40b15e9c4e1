#pragma once

// First Heisenberg group H = R^2 x R with product
//   (v,z)*(v',z') = (v+v', z+z' + omega(v,v')/2),  omega(v,w) = v.x*w.y - v.y*w.x,
// dilations delta_t(v,z) = (t*v, t^2*z), inverse p^{-1} = -p.

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace heis {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {
        if (!std::isfinite(x_) || !std::isfinite(y_))
            throw std::invalid_argument("Vec2: non-finite component");
    }

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return Vec2{unchecked{}, a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return Vec2{unchecked{}, a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator-(Vec2 a) { return Vec2{unchecked{}, -a.x, -a.y}; }
    friend constexpr Vec2 operator*(double t, Vec2 a) { return Vec2{unchecked{}, t * a.x, t * a.y}; }
    friend constexpr bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }

    double norm() const { return std::hypot(x, y); }
    constexpr double norm2() const { return x * x + y * y; }

    struct unchecked {};
    constexpr Vec2(unchecked, double x_, double y_) : x(x_), y(y_) {}
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

// Symplectic form omega(v,w) = v1*w2 - v2*w1.
constexpr double omega(Vec2 v, Vec2 w) { return v.x * w.y - v.y * w.x; }

struct GroupPoint {
    Vec2 v;
    double z = 0.0;

    constexpr GroupPoint() = default;
    GroupPoint(Vec2 v_, double z_) : v(v_), z(z_) {
        if (!std::isfinite(z_)) throw std::invalid_argument("GroupPoint: non-finite z");
    }
    GroupPoint(double x, double y, double z_) : GroupPoint(Vec2(x, y), z_) {}

    friend constexpr bool operator==(GroupPoint a, GroupPoint b) { return a.v == b.v && a.z == b.z; }
};

// Tangent vector of R^3 at a group point, used for pushforwards and cone tests.
struct Tangent {
    Vec2 v;
    double z = 0.0;
};

constexpr GroupPoint group_mul(GroupPoint p, GroupPoint q) {
    GroupPoint r;
    r.v = p.v + q.v;
    r.z = p.z + q.z + 0.5 * omega(p.v, q.v);
    return r;
}

constexpr GroupPoint group_inv(GroupPoint p) {
    GroupPoint r;
    r.v = -p.v;
    r.z = -p.z;
    return r;
}

constexpr GroupPoint operator*(GroupPoint p, GroupPoint q) { return group_mul(p, q); }

inline GroupPoint dilate(double t, GroupPoint p) {
    if (!(t >= 0.0)) throw std::domain_error("dilate: t must be non-negative");
    GroupPoint r;
    r.v = t * p.v;
    r.z = t * t * p.z;
    return r;
}

// Differential of left translation by q applied to a horizontal vector:
// (tau_q)_*(v) = (v, omega(pi(q), v)/2).
constexpr Tangent translate_pushforward(GroupPoint q, Vec2 v) {
    return Tangent{v, 0.5 * omega(q.v, v)};
}

// Unoriented angle in [0,pi]; the arccos argument is clamped against rounding.
inline double unoriented_angle(Vec2 v, Vec2 w) {
    const double nv = v.norm(), nw = w.norm();
    if (nv == 0.0 || nw == 0.0) throw std::domain_error("unoriented_angle: zero vector");
    double c = dot(v, w) / (nv * nw);
    c = std::clamp(c, -1.0, 1.0);
    return std::acos(c);
}

// Signed angle in (-pi,pi); undefined (error) for antiparallel inputs.
inline double oriented_angle(Vec2 v, Vec2 w) {
    const double a = unoriented_angle(v, w);
    const double om = omega(v, w);
    if (om > 0.0) return a;
    if (om < 0.0) return -a;
    if (dot(v, w) > 0.0) return 0.0;
    throw std::domain_error("oriented_angle: antiparallel inputs");
}

}  // namespace heis
