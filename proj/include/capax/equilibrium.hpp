#pragma once

#include <memory>
#include <string>
#include <vector>

#include "capax/estimate.hpp"
#include "capax/mesh.hpp"

namespace capax::pde {

using capax::CapacityEstimate;

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolveOptions {
    double outer_radius_factor = 8.0;
    int layers = 0;      // 0 = auto from sphere resolution and ln(R/r)
    int sphere_level = 3; // icosphere level (n=3) / 16-cell level (n=4)
    int sphere_nodes = 256; // circle nodes (n=2)
    std::vector<double> epsilon_schedule{1e-2, 1e-4, 1e-6};
    int max_iters = 60;
    double energy_tol = 1e-10;
    double grad_tol = 1e-8;
    bool allow_dim4 = false;
    double radius_agreement_tol = 0.05; // ncap2 cross-radius sanity
};

enum class OuterBC {
    Condenser,   // u = 0 on dK, u = 1 on |x| = R; capacity = energy
    Equilibrium, // u = 0 on dK, u = ln R on |x| = R (truncated exterior problem)
};

struct EquilibriumSolution {
    std::shared_ptr<AnnulusMesh> mesh;
    OuterBC mode{};
    double outer_value = 0.0;
    std::vector<double> u;

    double energy = 0.0;          // int |grad u|^n at eps = 0
    double capacity_energy = 0.0; // condenser mode: = energy
    double capacity_flux = 0.0;   // median of the level-surface fluxes
    std::vector<double> flux_per_layer;
    double flux_drift = 0.0; // max/min - 1 over interior layers

    // Equilibrium mode: far-field fit u ~ a ln|x| + b over the outer window.
    double log_slope = 1.0;  // a
    double log_offset = 0.0; // b
    double fit_residual = 0.0;
    // asymptotic constant of u/a ~ ln|x| + alpha
    double alpha() const { return log_offset / log_slope; }

    std::vector<double> boundary_gradient; // |grad u| per sphere node, raw scale
    // Flux-consistent gradient: patch value recovered from the energy
    // residual at the inner Dirichlet nodes. Integrates the edge/corner
    // singularities of non-smooth bodies conservatively.
    std::vector<double> flux_boundary_gradient;
    std::vector<double> boundary_patch_area; // lumped dS per sphere node
    int iterations = 0;
    double final_residual = 0.0;
    double epsilon_used = 0.0;
    std::vector<double> energy_history;
    double max_principle_violation = 0.0;

    // |grad u_K| in the u ~ ln|x| normalization (equilibrium mode).
    std::vector<double> normalized_boundary_gradient() const;
    std::vector<double> normalized_flux_gradient() const;
};

// Minimize the regularized n-energy on the annular mesh with Dirichlet data.
EquilibriumSolution solve_condenser(const ConvexBody& K, double R, const SolveOptions& opt,
                                    OuterBC bc = OuterBC::Condenser);

// (cap / sigma_{n-1})^{1/(1-n)}; throws for cap <= 0.
double conformal_modulus(int n, double cap);

// Reduced-modulus route: d(R) = nmod(R B^n, K) - ln R on an increasing
// schedule, extrapolated. Throws SolverError if the sequence decreases
// beyond the noise band (mesh too coarse).
CapacityEstimate capacity_ncap1(const ConvexBody& K, const SolveOptions& opt,
                                const std::vector<double>& radius_factors = {4, 8, 16, 32});

// Asymptotic-constant route at two outer radii, Richardson-extrapolated.
CapacityEstimate capacity_ncap2(const ConvexBody& K, const SolveOptions& opt);

// Convenience: the equilibrium-normalized solution used downstream
// (capacitary measures, Hadamard derivatives).
EquilibriumSolution solve_equilibrium(const ConvexBody& K, const SolveOptions& opt);

} // namespace capax::pde
