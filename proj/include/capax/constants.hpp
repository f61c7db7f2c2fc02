#pragma once

#include <cmath>

namespace capax {

// Surface area of the unit sphere S^{n-1} in R^n: 2 pi^{n/2} / Gamma(n/2).
inline double sphere_area(int n) {
    return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

// Volume of the unit ball B^n.
inline double ball_volume(int n) { return sphere_area(n) / n; }

// Capacity of the concentric condenser (R*B^n, r*B^n): sigma_{n-1} (ln R/r)^{1-n}.
inline double annulus_capacity(int n, double r, double R) {
    return sphere_area(n) * std::pow(std::log(R / r), 1 - n);
}

} // namespace capax
