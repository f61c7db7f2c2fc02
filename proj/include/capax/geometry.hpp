#pragma once

#include "capax/body.hpp"

namespace capax::geom {

// Boundary quadrature sample: point on dK, outward unit normal, area weight.
struct BoundarySample {
    Vec x;
    Vec normal;
    double dS;
};

double support(const ConvexBody& K, const Vec& xi, bool homogeneous = true);
double diameter(const ConvexBody& K);
double volume(const ConvexBody& K);
double surface_area(const ConvexBody& K);
double mean_width(const ConvexBody& K, const SphereGrid& grid);

// Support values of t0*K0 + t1*K1 on the grid, convexified.
ConvexBody minkowski_combine(double t0, const ConvexBody& K0, double t1, const ConvexBody& K1,
                             std::shared_ptr<const SphereGrid> grid);

// sup over the grid of |h_A - h_B| (exact metric for convex bodies up to
// grid resolution).
double hausdorff_distance(const ConvexBody& A, const ConvexBody& B, const SphereGrid& grid);

// Area of the outer parallel surface at distance t >= 0.
double steiner_area(const ConvexBody& K, double t);

// M_k(K) = int_{dK} m_k dS. Smooth bodies only (ball/ellipsoid); polytopes
// throw for k >= 1 (exposed via steiner_area fits instead).
double integral_mean_curvature(const ConvexBody& K, int k);

// Steiner surface-area polynomial coefficients c[k] of t^k, degree n-1,
// with c[n-1] = sigma_{n-1} for every convex body. Polytopes and support
// bodies are fitted from parallel-body areas with the leading term pinned.
std::vector<double> steiner_coefficients(const ConvexBody& K);

// Support values of the halfspace intersection cap_i {x.xi_i <= h_i}
// evaluated back on the grid directions. Idempotent.
std::vector<double> convexify(const SphereGrid& grid, const std::vector<double>& values);

// Radial-map boundary quadrature built over a sphere grid:
// x = r(theta) theta,  dS = r^{n-1} w / (normal . theta).
std::vector<BoundarySample> boundary_samples(const ConvexBody& K, const SphereGrid& grid);

// Principal curvatures at a boundary point of a smooth implicit body.
std::vector<double> principal_curvatures(const ConvexBody& K, const Vec& x);

} // namespace capax::geom
