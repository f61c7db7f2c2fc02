#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "capax/capmeasure.hpp"

namespace capax::shape {

using capm::SphericalMeasure;
using geom::ConvexBody;
using geom::SphereGrid;

// P_mu(xi) = int max(0, xi.eta) dmu(eta), atomic sum.
double pmu(const SphericalMeasure& mu, const Vec& xi);

struct AdmissibilityReport {
    double min_pmu = 0.0;
    double max_pmu = 0.0;
    double asymmetry_defect = 0.0; // max |P(xi) - P(-xi)|
    bool admissible = false;
};

AdmissibilityReport check_mu_admissible(const SphericalMeasure& mu, const SphereGrid& grid);

struct MinkowskiParams {
    pde::SolveOptions solve;
    int max_iters = 40;
    int polish_iters = 10; // extra iterations at one finer solver level
    double objective_tol = 1e-6;
    int multistarts = 3;
    std::uint64_t seed = 11;
};

struct MinkowskiResult {
    ConvexBody body;          // recentered minimizer, ncap = 1
    double objective = 0.0;   // int h dmu at the minimizer
    std::vector<double> objective_history;
    double capacity = 0.0;            // ncap of the returned body (~1)
    double multistart_spread = 0.0;   // pairwise Hausdorff after recentering
    double thinness = 0.0;            // inradius / circumradius diagnostic
    double prescribed_measure_gap = 0.0; // weak gap between g*(...) and mu
};

// inf { int h_K dmu : ncap(K) >= 1 } by projected support-vector descent
// with convexify projection and exact constraint rescaling.
MinkowskiResult minkowski_minimize(const SphericalMeasure& mu, const MinkowskiParams& p);

// Positive continuous integrable density with named closed forms.
struct Density {
    std::string kind; // "exp_decay": amplitude * exp(-rate |x|)
    double amplitude = 1.0;
    double rate = 1.0;
    double operator()(const Vec& x) const;
    double ball_integral(int n, double r) const; // int over |x| <= r
};

enum class YauFamily { Balls, Ellipsoids, SupportGrid };

struct YauParams {
    pde::SolveOptions solve;
    int dim = 3;
    double radius_lo = 0.1;
    double radius_hi = 6.0;
    int prescan = 16;
    double tol = 1e-4;
    int max_iters = 80;
};

struct YauResult {
    bool degenerate = false; // no family member with objective <= 0
    ConvexBody body;
    double objective = 0.0; // ncap - int_K J
    double ncap = 0.0;
    double density_integral = 0.0;
    std::vector<double> objective_history;
};

YauResult yau_minimize(const Density& J, YauFamily family, const YauParams& p);

struct CurvatureResidualReport {
    double sup_rel = 0.0;  // sup |(ncap/sigma)|grad u|^n - J| / sup J on dK
    double weak_max = 0.0; // max over dictionary of the weak-form residual
    std::vector<double> pointwise;
};

// Residual of the capacitary curvature equation on boundary samples and
// against the harmonic dictionary.
CurvatureResidualReport capacitary_curvature_residual(const ConvexBody& K, const Density& J,
                                                      const pde::EquilibriumSolution& sol);

} // namespace capax::shape
