#include "capax/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "capax/constants.hpp"
#include "capax/geometry.hpp"
#include "capax/quadrature.hpp"

namespace capax::ineq {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Holds: return "holds";
        case Verdict::HoldsWithSlack: return "holds-with-slack";
        case Verdict::Violated: return "violated";
    }
    return "?";
}

Verdict classify(double lhs, double rhs, double slack) {
    double margin = rhs - lhs;
    if (margin >= slack) return Verdict::Holds;
    if (margin >= -slack) return Verdict::HoldsWithSlack;
    return Verdict::Violated;
}

void finalize(InequalityReport& rep) {
    rep.verdict = Verdict::Holds;
    for (const Relation& r : rep.relations)
        if (static_cast<int>(r.verdict) > static_cast<int>(rep.verdict)) rep.verdict = r.verdict;
}

namespace {

const geom::SphereGrid& width_grid(int n) {
    static const geom::SphereGrid g2 = geom::circle_grid(1024);
    static const geom::SphereGrid g3 = geom::fibonacci_grid(4096);
    static const geom::SphereGrid g4 = geom::product4_grid(16, 32);
    switch (n) {
        case 2: return g2;
        case 3: return g3;
        default: return g4;
    }
}

// J = int_0^inf [ (S(t)/sigma)^{1/(1-n)} - 1/(1+t) ] dt; bound = exp(-J).
// Split at T with the 1/t substitution on the tail; T doubles until the
// estimate moves less than 1e-6.
double exp_limit_bound(const std::vector<double>& coef, int n, double scale) {
    double sigma = sphere_area(n);
    auto f = [&](double t) {
        double s = 0.0, tp = 1.0;
        for (double c : coef) {
            s += c * tp;
            tp *= t;
        }
        return std::pow(s / sigma, 1.0 / (1.0 - n));
    };
    auto h = [&](double t) { return f(t) - 1.0 / (1.0 + t); };
    double prev = 0.0;
    for (double T = 10.0 * std::max(scale, 1.0);; T *= 2.0) {
        double head = adaptive_simpson(h, 0.0, T, 1e-10);
        double tail = adaptive_simpson([&](double s) { return h(1.0 / s) / (s * s); }, 1e-9, 1.0 / T,
                                       1e-10);
        double J = head + tail;
        if (std::abs(J - prev) < 1e-6 || T > 1e9 * scale) return std::exp(-J);
        prev = J;
    }
}

} // namespace

double gehring_upper_bound(const ConvexBody& K) {
    std::vector<double> coef = geom::steiner_coefficients(K);
    if (K.dimension() == 2) return coef[0] / (2.0 * M_PI); // S/(2 pi), exact form of the limit
    return exp_limit_bound(coef, K.dimension(), K.circumradius());
}

double mean_curvature_upper_bound(const ConvexBody& K, double* divergence_coef) {
    const int n = K.dimension();
    if (K.kind() == geom::BodyKind::Polytope || K.kind() == geom::BodyKind::SupportSamples)
        throw std::invalid_argument("mean-curvature bound needs a smooth body");
    if (n == 2) {
        if (divergence_coef) *divergence_coef = 1.0;
        return geom::surface_area(K) / (2.0 * M_PI);
    }
    // Q(t) = int (1 + t H)^{n-1} dS expanded in t
    double sigma = sphere_area(n);
    std::vector<double> coef(n, 0.0);
    if (K.kind() == geom::BodyKind::Ball) {
        coef = geom::steiner_coefficients(K);
    } else {
        const geom::SphereGrid& g = width_grid(n);
        ConvexBody Kc = K.translated(-1.0 * K.center());
        auto samples = geom::boundary_samples(Kc, g);
        for (const auto& s : samples) {
            std::vector<double> kap = geom::principal_curvatures(Kc, s.x);
            double H = 0.0;
            for (double k : kap) H += k;
            H /= kap.size();
            double hp = 1.0;
            for (int k = 0; k < n; ++k) {
                double b = 1.0;
                for (int i = 1; i <= k; ++i) b = b * (n - 1 - k + i) / i; // C(n-1, k)
                coef[k] += b * hp * s.dS;
                hp *= H;
            }
        }
    }
    double lead = coef[n - 1] / sigma;
    if (divergence_coef) *divergence_coef = std::pow(lead, 1.0 / (1.0 - n));
    if (lead > 1.0 + 1e-9) return std::numeric_limits<double>::infinity();
    coef[n - 1] = sigma; // ball case up to quadrature noise
    return exp_limit_bound(coef, n, K.circumradius());
}

InequalityReport verify_chain(const ConvexBody& K, const CapacityEstimate& cap,
                              double tolerance_scale) {
    const int n = K.dimension();
    InequalityReport rep;
    rep.body = K.describe();
    double lhs = std::pow(geom::volume(K) / ball_volume(n), 1.0 / n);
    double dia = geom::diameter(K) / 2.0;
    double bw = geom::mean_width(K, width_grid(n)) / 2.0;
    double slack = tolerance_scale * (cap.uncertainty + 1e-3 * cap.value);
    rep.relations.push_back({"volume_le_ncap", lhs, cap.value, slack, classify(lhs, cap.value, slack)});
    rep.relations.push_back({"ncap_le_half_diameter", cap.value, dia, slack, classify(cap.value, dia, slack)});
    rep.relations.push_back({"ncap_le_half_mean_width", cap.value, bw, slack, classify(cap.value, bw, slack)});
    double geh = gehring_upper_bound(K);
    rep.relations.push_back({"ncap_le_gehring", cap.value, geh, slack, classify(cap.value, geh, slack)});
    finalize(rep);
    return rep;
}

ScanRow polya_szego_row(const ConvexBody& K, const CapacityEstimate& cap) {
    const int n = K.dimension();
    ScanRow row;
    row.body = K.describe();
    row.ncap = cap.value;
    row.bound = std::pow(geom::surface_area(K) / sphere_area(n), 1.0 / (n - 1));
    row.ratio = row.ncap / row.bound;
    return row;
}

InequalityReport brunn_minkowski_check(const ConvexBody& K1, const ConvexBody& K2,
                                       const std::vector<double>& ts, const SolveOptions& opt,
                                       double tolerance_scale) {
    if (K1.dimension() != K2.dimension()) throw std::invalid_argument("dimension mismatch");
    const int n = K1.dimension();
    auto grid = std::make_shared<const geom::SphereGrid>(
        n == 2 ? geom::circle_grid(512) : geom::fibonacci_grid(1024));
    InequalityReport rep;
    rep.body = K1.describe() + " / " + K2.describe();
    CapacityEstimate c1 = pde::capacity_ncap2(K1, opt);
    CapacityEstimate c2 = pde::capacity_ncap2(K2, opt);
    for (double t : ts) {
        ConvexBody M = geom::minkowski_combine(t, K1, 1.0 - t, K2, grid);
        CapacityEstimate cm = pde::capacity_ncap2(M, opt);
        double lhs = t * c1.value + (1.0 - t) * c2.value;
        double slack =
            tolerance_scale * (cm.uncertainty + t * c1.uncertainty + (1.0 - t) * c2.uncertainty +
                               5e-3 * cm.value);
        rep.relations.push_back({"bm_t=" + std::to_string(t), lhs, cm.value, slack,
                                 classify(lhs, cm.value, slack)});
    }
    finalize(rep);
    return rep;
}

InequalityReport uryson_split_check(const ConvexBody& K, const CapacityEstimate& cap,
                                    double tolerance_scale) {
    const int n = K.dimension();
    InequalityReport rep;
    rep.body = K.describe();
    double lhs = std::pow(geom::volume(K) / ball_volume(n), 1.0 / n);
    double bw = geom::mean_width(K, width_grid(n)) / 2.0;
    double slack = tolerance_scale * (cap.uncertainty + 1e-3 * cap.value);
    rep.relations.push_back({"volume_le_ncap", lhs, cap.value, slack, classify(lhs, cap.value, slack)});
    rep.relations.push_back({"ncap_le_half_mean_width", cap.value, bw, slack,
                             classify(cap.value, bw, slack)});
    rep.relations.push_back({"classical_iso_mean_width", lhs, bw, slack, classify(lhs, bw, slack)});
    finalize(rep);
    return rep;
}

} // namespace capax::ineq
