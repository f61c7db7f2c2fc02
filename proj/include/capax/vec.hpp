#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace capax {

// Small fixed-capacity vector for points/directions in R^n, n <= 4.
// The runtime dimension lives in the surrounding object (grid, body); Vec
// itself always stores 4 doubles and the unused tail stays zero.
struct Vec {
    std::array<double, 4> v{0.0, 0.0, 0.0, 0.0};

    double& operator[](int i) { return v[i]; }
    double operator[](int i) const { return v[i]; }

    Vec() = default;
    Vec(double x, double y) : v{x, y, 0.0, 0.0} {}
    Vec(double x, double y, double z) : v{x, y, z, 0.0} {}
    Vec(double x, double y, double z, double w) : v{x, y, z, w} {}

    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < 4; ++i) v[i] += o.v[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (int i = 0; i < 4; ++i) v[i] -= o.v[i];
        return *this;
    }
    Vec& operator*=(double s) {
        for (int i = 0; i < 4; ++i) v[i] *= s;
        return *this;
    }
};

inline Vec operator+(Vec a, const Vec& b) { return a += b; }
inline Vec operator-(Vec a, const Vec& b) { return a -= b; }
inline Vec operator*(double s, Vec a) { return a *= s; }
inline Vec operator*(Vec a, double s) { return a *= s; }

inline double dot(const Vec& a, const Vec& b) {
    return a.v[0] * b.v[0] + a.v[1] * b.v[1] + a.v[2] * b.v[2] + a.v[3] * b.v[3];
}
inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }
inline double dist(const Vec& a, const Vec& b) { return norm(a - b); }

inline Vec normalized(const Vec& a) {
    double s = norm(a);
    if (s == 0.0) throw std::invalid_argument("cannot normalize zero vector");
    return (1.0 / s) * a;
}

// Cross product, meaningful for dimension 3 inputs.
inline Vec cross(const Vec& a, const Vec& b) {
    return Vec(a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
               a[0] * b[1] - a[1] * b[0]);
}

} // namespace capax
