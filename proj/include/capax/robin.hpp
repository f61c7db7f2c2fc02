#pragma once

#include <cstdint>
#include <vector>

#include "capax/body.hpp"
#include "capax/estimate.hpp"

namespace capax::robin {

using geom::ConvexBody;

// Nonnegative weighted point set of total mass 1 supported on K.
struct DiscreteMeasure {
    std::vector<Vec> points;
    std::vector<double> weights;
    void check_invariants() const; // mass 1 within 1e-12, weights >= 0
};

enum class DiagonalRule { Exclude, LocalCell };

// Point cloud with per-point local-cell self-energies ln(1/size)+c.
struct Cloud {
    std::vector<Vec> points;
    std::vector<double> self_energy;
};

struct CloudParams {
    int size = 800;
    double boundary_fraction = 0.9;
    std::uint64_t seed = 1;
};

struct OptimParams {
    int max_iters = 6000;
    double gap_tol = 1e-10;
    int restarts = 10;
    std::uint64_t seed = 7;
};

struct LadderEntry {
    int size = 0;
    double energy = 0.0;
};

struct RobinResult {
    DiscreteMeasure measure; // minimizer on the largest cloud
    double energy = 0.0;     // extrapolated nrob estimate
    std::vector<LadderEntry> ladder;
    double ncap3 = 0.0; // exp(-energy)
    double uncertainty = 0.0;
    double multistart_spread = 0.0;       // reported, not resolved
    double stationarity_violation = 0.0;  // simplex first-order optimality
};

// Discrete logarithmic energy. With DiagonalRule::Exclude, self terms are
// dropped; LocalCell adds w_i^2 * self_energy_i (cell model of the diagonal).
// Coincident points with both weights positive are rejected.
double log_energy(const DiscreteMeasure& mu, DiagonalRule rule,
                  const std::vector<double>& self_energy = {});

// Boundary-biased cloud on K with local-cell self-energies.
Cloud boundary_cloud(const ConvexBody& K, int size, double boundary_fraction, std::uint64_t seed);

// Degenerate compacts are accepted here (robin only): a segment cloud.
Cloud segment_cloud(const Vec& a, const Vec& b, int size);

// Minimize the discrete energy over the weight simplex on a refinement
// ladder of cloud sizes; extrapolate energy = a + b/m.
RobinResult robin_mass(const ConvexBody& K, const CloudParams& cp, const OptimParams& op);
RobinResult robin_mass_clouds(const std::vector<Cloud>& ladder, const OptimParams& op);

CapacityEstimate capacity_ncap3(const ConvexBody& K, const CloudParams& cp, const OptimParams& op);

// Closed-form ball capacity by adaptive quadrature:
// ncap3(r B^n) = r * exp(+(sigma_{n-2}/(2 sigma_{n-1})) I_n),
// I_n = int_0^pi sin^{n-2} ln(2(1-cos)) dtheta. The + sign is forced by the
// consistency of the transfinite-modulus identities; see also the n=2
// degeneration (I_2 = 0 so the value is r).
double ball_ncap3_quadrature(int n, double r);

// Quadrature of the concentric-pair transfinite modulus formula:
// nmd(R B^n, B^n) = ln R + (sigma_{n-2}/sigma_{n-1}) *
//   int sin^{n-2} ln((1+R^2-2Rcos)/(2R^2(1-cos))) dtheta.
double ball_pair_nmd_quadrature(int n, double R);

struct TransfiniteResult {
    double value = 0.0;
    double stationarity_violation = 0.0;
    double multistart_spread = 0.0;
};

// Signed-measure energy minimized jointly over unit measures on K and on
// the sphere |x| = R (the outer plate of the condenser).
TransfiniteResult transfinite_modulus(double R, const ConvexBody& K, const CloudParams& cp,
                                      const OptimParams& op);

struct Thm22iReport {
    double lhs = 0.0; // ncap3(K) from robin_mass
    double rhs = 0.0; // exp(-lim(nmd(rB,K) - ln r)) / ncap3(B^n)
    double rel_discrepancy = 0.0;
    std::vector<double> schedule_values; // nmd(r_k B, K) - ln r_k
};

Thm22iReport thm22i_identity_check(const ConvexBody& K, const std::vector<double>& radius_factors,
                                   const CloudParams& cp, const OptimParams& op);
Thm22iReport thm22i_identity_check_cloud(const std::vector<Cloud>& ladder, double circumradius,
                                         int dim, const std::vector<double>& radius_factors,
                                         const CloudParams& cp, const OptimParams& op);

} // namespace capax::robin
