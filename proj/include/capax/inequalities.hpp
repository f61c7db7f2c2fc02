#pragma once

#include <string>
#include <vector>

#include "capax/equilibrium.hpp"
#include "capax/estimate.hpp"

namespace capax::ineq {

using geom::ConvexBody;
using pde::SolveOptions;

enum class Verdict { Holds, HoldsWithSlack, Violated };

std::string to_string(Verdict v);

struct Relation {
    std::string name;
    double lhs = 0.0; // asserted lhs <= rhs
    double rhs = 0.0;
    double slack = 0.0;
    Verdict verdict = Verdict::Holds;
};

struct InequalityReport {
    std::string body;
    std::vector<Relation> relations;
    Verdict verdict = Verdict::Holds; // worst of the relations
};

// Verdict for lhs <= rhs with combined uncertainty as slack.
Verdict classify(double lhs, double rhs, double slack);
void finalize(InequalityReport& rep);

// (V/omega_n)^{1/n} <= ncap <= min(diam/2, b/2)   (slack = capacity noise)
InequalityReport verify_chain(const ConvexBody& K, const CapacityEstimate& cap,
                              double tolerance_scale = 1.0);

// exp-limit of the parallel-surface bound, evaluated from the Steiner
// polynomial with tail quadrature. Equals the body radius for balls and
// S/(2 pi) for every planar convex body.
double gehring_upper_bound(const ConvexBody& K);

// Mean-curvature form of the bound; +infinity (with the diagnostic
// coefficient in *divergence_coef) when the integrand's asymptotic
// coefficient falls below 1.
double mean_curvature_upper_bound(const ConvexBody& K, double* divergence_coef = nullptr);

struct ScanRow {
    std::string body;
    double ncap = 0.0;
    double bound = 0.0;
    double ratio = 0.0; // ncap / bound, asserted <= 1 only for n = 2
};

ScanRow polya_szego_row(const ConvexBody& K, const CapacityEstimate& cap);

// ncap(t K1 + (1-t) K2) >= t ncap(K1) + (1-t) ncap(K2) on a t-grid.
InequalityReport brunn_minkowski_check(const ConvexBody& K1, const ConvexBody& K2,
                                       const std::vector<double>& ts, const SolveOptions& opt,
                                       double tolerance_scale = 1.0);

// Two-step split of the iso-mean-width inequality.
InequalityReport uryson_split_check(const ConvexBody& K, const CapacityEstimate& cap,
                                    double tolerance_scale = 1.0);

} // namespace capax::ineq
