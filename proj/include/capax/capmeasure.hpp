#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "capax/equilibrium.hpp"

namespace capax::capm {

using geom::ConvexBody;
using geom::SphereGrid;

// Atomic measure on S^{n-1} (push-forward of |grad u|^n dS by the Gauss map).
struct SphericalMeasure {
    std::shared_ptr<const SphereGrid> grid;
    std::vector<double> weights;
    std::string provenance;

    double mass() const;
    Vec barycenter() const; // weighted node sum, not normalized
};

// Bin each boundary sample's |grad u_K|^n dS onto the grid node nearest its
// outward normal. The solution must be the equilibrium-normalized one
// (mode Equilibrium); gradients are rescaled by the fitted log-slope.
SphericalMeasure capacitary_measure(const ConvexBody& K, const pde::EquilibriumSolution& sol,
                                    std::shared_ptr<const SphereGrid> grid);

// |int h_K dmu - sigma_{n-1}| / sigma_{n-1}
double support_identity_residual(const ConvexBody& K, const SphericalMeasure& mu);

struct FluxIdentityReport {
    double support_residual = 0.0;    // |int h_K(g)|grad u|^n dS - sigma| / sigma
    double barycenter_residual = 0.0; // |int g |grad u|^n dS| / mass
    double layer_drift = 0.0;         // spread of the flux across layers
    double mass = 0.0;                // int |grad u|^n dS (boundary quadrature)
};

// Same integrals evaluated through the divergence-free fields
// X = n (x.grad u)|grad u|^{n-2} grad u - |grad u|^n x   (support pairing)
// Y_c = |grad u|^n c - n (c.grad u)|grad u|^{n-2} grad u (barycenter),
// as interior-surface fluxes: robust for Lipschitz bodies whose boundary
// gradient is singular along edges. The cross-layer drift is reported.
FluxIdentityReport support_identity_flux(const ConvexBody& K, const pde::EquilibriumSolution& sol);

// sigma^{-1} int_{dK0} h_{K1}(g) |grad u_{K0}|^n dS  (d/dt ln ncap(K0+tK1) at 0)
double hadamard_derivative(const ConvexBody& K0, const ConvexBody& K1,
                           const pde::EquilibriumSolution& sol0);

struct LowerBoundReport {
    double lhs = 0.0; // sigma / ncap(K0)
    double rhs = 0.0; // int |grad u|^n dS
    double slack = 0.0;
    bool holds = false;
};

// sigma/ncap(K0) <= int |grad u_{K0}|^n dS, with numerical slack.
LowerBoundReport variational_lower_bound_check(const ConvexBody& K0,
                                               const pde::EquilibriumSolution& sol0, double ncap,
                                               double slack);

// Continuous test functions on the sphere: low-order harmonics
// (Fourier modes for n=2, solid harmonics through degree 4 for n=3).
std::vector<std::function<double(const Vec&)>> harmonic_dictionary(int n);

struct ProbeRow {
    double hausdorff = 0.0;       // d_H(K_j, K)
    double max_discrepancy = 0.0; // max over dictionary of |int f dmu_j - int f dmu|
    double mass_gap = 0.0;        // |mu_j(S) - mu(S)|
};

// Weak-convergence probe for a family K_j -> K.
std::vector<ProbeRow> weak_convergence_probe(const ConvexBody& K,
                                             const std::vector<ConvexBody>& family,
                                             const pde::SolveOptions& opt);

struct GradientReport {
    std::vector<double> min_gradient; // one entry per refinement level
    bool positive = false;
    double max_rel_variation = 0.0;
};

// min_{dK} |grad u_K| across a mesh refinement ladder; asserts positivity.
GradientReport gradient_lower_bound_report(const ConvexBody& K, const pde::SolveOptions& base,
                                           int refinements);

struct RrrScanRow {
    double formula_value = 0.0; // exp(sigma^{-1} int ln|x| |grad u|^{n-1} dS)
    double ncap = 0.0;
    double ratio = 0.0;
};

// Boundary-integral capacity formula: asserted only at n=2 by callers,
// recorded as a conjecture ledger entry for n >= 3.
RrrScanRow conjecture_rrr_scan(const ConvexBody& K, const pde::EquilibriumSolution& sol);

} // namespace capax::capm
