#include "capax/capmeasure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "capax/constants.hpp"
#include "capax/geometry.hpp"
#include "capax/kernels.hpp"

namespace capax::capm {

double SphericalMeasure::mass() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

Vec SphericalMeasure::barycenter() const {
    Vec b;
    for (size_t i = 0; i < weights.size(); ++i) b += weights[i] * grid->nodes[i];
    return b;
}

namespace {

struct BoundaryData {
    std::vector<geom::BoundarySample> samples;
    std::vector<double> grad; // normalized |grad u_K| per sample
};

BoundaryData boundary_data(const ConvexBody& K, const pde::EquilibriumSolution& sol) {
    if (sol.boundary_gradient.empty()) throw std::runtime_error("solution has no boundary gradient");
    if (sol.mode != pde::OuterBC::Equilibrium)
        throw std::invalid_argument("capacitary data needs the equilibrium-normalized solution");
    BoundaryData bd;
    bd.samples = geom::boundary_samples(K, *sol.mesh->sphere);
    bd.grad = sol.normalized_flux_gradient();
    if (bd.samples.size() != bd.grad.size()) throw std::runtime_error("sample/gradient size mismatch");
    return bd;
}

} // namespace

SphericalMeasure capacitary_measure(const ConvexBody& K, const pde::EquilibriumSolution& sol,
                                    std::shared_ptr<const SphereGrid> grid) {
    if (!grid || grid->dimension != K.dimension()) throw std::invalid_argument("grid mismatch");
    BoundaryData bd = boundary_data(K, sol);
    const int n = K.dimension();
    SphericalMeasure mu;
    mu.grid = grid;
    mu.weights.assign(grid->size(), 0.0);
    mu.provenance = K.describe() + " via " + sol.mesh->sphere->kind;
    for (size_t i = 0; i < bd.samples.size(); ++i) {
        const Vec& nu = bd.samples[i].normal;
        int best = 0;
        double bd_dot = -2.0;
        for (int j = 0; j < grid->size(); ++j) {
            double d = dot(nu, grid->nodes[j]);
            if (d > bd_dot) {
                bd_dot = d;
                best = j;
            }
        }
        mu.weights[best] += std::pow(bd.grad[i], n) * bd.samples[i].dS;
    }
    return mu;
}

double support_identity_residual(const ConvexBody& K, const SphericalMeasure& mu) {
    if (K.dimension() != mu.grid->dimension) throw std::invalid_argument("dimension mismatch");
    double s = 0.0;
    for (int i = 0; i < mu.grid->size(); ++i)
        if (mu.weights[i] != 0.0) s += K.support(mu.grid->nodes[i]) * mu.weights[i];
    double sigma = sphere_area(K.dimension());
    return std::abs(s - sigma) / sigma;
}

namespace {

// Area and outward unit normal of the (n-1)-simplex mid cross-section.
void patch_geometry(int n, const Vec* p, double& area, Vec& normal) {
    if (n == 2) {
        Vec e = p[1] - p[0];
        area = norm(e);
        normal = normalized(Vec(e[1], -e[0]));
    } else {
        Vec c = cross(p[1] - p[0], p[2] - p[0]);
        area = 0.5 * norm(c);
        normal = (area > 0) ? (1.0 / (2.0 * area)) * c : Vec(1, 0, 0);
    }
    Vec mid;
    for (int k = 0; k < n; ++k) mid += (1.0 / n) * p[k];
    if (dot(normal, mid) < 0) normal = -1.0 * normal;
}

} // namespace

FluxIdentityReport support_identity_flux(const ConvexBody& K, const pde::EquilibriumSolution& sol) {
    if (sol.mode != pde::OuterBC::Equilibrium)
        throw std::invalid_argument("flux identity needs the equilibrium-normalized solution");
    const pde::AnnulusMesh& mesh = *sol.mesh;
    const int n = mesh.dim;
    const int npe = n + 1;
    std::vector<double> eg;
    par::element_gradients(n, npe, mesh.elems, mesh.elem_grad, sol.u, eg);
    const double a = sol.log_slope;
    const double sigma = sphere_area(n);
    const size_t prisms = mesh.sphere->simplices.size();

    std::vector<double> support_vals;
    std::vector<Vec> bary_vals;
    int j0 = 1, j1 = std::max(j0, mesh.layers - 2);
    for (int j = j0; j <= j1; ++j) {
        double xflux = 0.0;
        Vec yflux;
        for (size_t s = 0; s < prisms; ++s) {
            size_t base = (static_cast<size_t>(j) * prisms + s) * n;
            double gacc[4] = {0, 0, 0, 0};
            double vol = 0.0;
            for (int k = 0; k < n; ++k) {
                double v = mesh.elem_vol[base + k];
                vol += v;
                for (int d = 0; d < n; ++d) gacc[d] += v * eg[(base + k) * n + d];
            }
            Vec g;
            for (int d = 0; d < n; ++d) g[d] = gacc[d] / (vol * a); // slope-normalized
            const auto& simp = mesh.sphere->simplices[s];
            Vec mids[4];
            Vec xbar;
            for (int k = 0; k < n; ++k) {
                int i = simp[k];
                mids[k] = 0.5 * (mesh.coords[mesh.node(j, i)] + mesh.coords[mesh.node(j + 1, i)]);
                xbar += (1.0 / n) * mids[k];
            }
            double area;
            Vec nu;
            patch_geometry(n, mids, area, nu);
            double gn2 = norm2(g);
            if (gn2 <= 0.0) continue;
            double gn = std::sqrt(gn2);
            double gnu = dot(g, nu);
            double xg = dot(xbar, g);
            double gpow = std::pow(gn, n - 2);
            // X = n (x.g)|g|^{n-2} g - |g|^n x
            xflux += (n * xg * gpow * gnu - gpow * gn2 * dot(xbar, nu)) * area;
            // Y_c.nu for unit vectors c, assembled as a vector
            for (int d = 0; d < n; ++d)
                yflux[d] += (gpow * gn2 * nu[d] - n * g[d] * gpow * gnu) * area;
        }
        support_vals.push_back(xflux / (n - 1.0));
        bary_vals.push_back((1.0 / (1.0 - n)) * yflux);
    }
    std::vector<double> sorted = support_vals;
    std::sort(sorted.begin(), sorted.end());
    double med = sorted[sorted.size() / 2];
    FluxIdentityReport rep;
    rep.support_residual = std::abs(med - sigma) / sigma;
    rep.layer_drift = (sorted.back() - sorted.front()) / sigma;
    Vec bmed = bary_vals[bary_vals.size() / 2];
    // boundary-quadrature mass (conservative flux recovery)
    auto grad = sol.normalized_flux_gradient();
    double mass = 0.0;
    for (size_t i = 0; i < grad.size(); ++i)
        mass += std::pow(grad[i], n) * sol.boundary_patch_area[i];
    rep.mass = mass;
    rep.barycenter_residual = norm(bmed) / mass;
    return rep;
}

double hadamard_derivative(const ConvexBody& K0, const ConvexBody& K1,
                           const pde::EquilibriumSolution& sol0) {
    if (K0.dimension() != K1.dimension()) throw std::invalid_argument("dimension mismatch");
    BoundaryData bd = boundary_data(K0, sol0);
    const int n = K0.dimension();
    double s = 0.0;
    for (size_t i = 0; i < bd.samples.size(); ++i)
        s += K1.support(bd.samples[i].normal) * std::pow(bd.grad[i], n) * bd.samples[i].dS;
    return s / sphere_area(n);
}

LowerBoundReport variational_lower_bound_check(const ConvexBody& K0,
                                               const pde::EquilibriumSolution& sol0, double ncap,
                                               double slack) {
    BoundaryData bd = boundary_data(K0, sol0);
    const int n = K0.dimension();
    LowerBoundReport rep;
    rep.lhs = sphere_area(n) / ncap;
    rep.rhs = 0.0;
    for (size_t i = 0; i < bd.samples.size(); ++i)
        rep.rhs += std::pow(bd.grad[i], n) * bd.samples[i].dS;
    rep.slack = slack;
    rep.holds = rep.lhs <= rep.rhs * (1.0 + slack) + slack;
    return rep;
}

std::vector<std::function<double(const Vec&)>> harmonic_dictionary(int n) {
    std::vector<std::function<double(const Vec&)>> fs;
    fs.push_back([](const Vec&) { return 1.0; });
    if (n == 2) {
        for (int k = 1; k <= 8; ++k) {
            fs.push_back([k](const Vec& p) { return std::cos(k * std::atan2(p[1], p[0])); });
            fs.push_back([k](const Vec& p) { return std::sin(k * std::atan2(p[1], p[0])); });
        }
        return fs;
    }
    if (n != 3) throw std::invalid_argument("dictionary implemented for n = 2, 3");
    auto X = [](const Vec& p) { return p[0]; };
    auto Y = [](const Vec& p) { return p[1]; };
    auto Z = [](const Vec& p) { return p[2]; };
    // degree 1
    fs.push_back(X);
    fs.push_back(Y);
    fs.push_back(Z);
    // degree 2
    fs.push_back([](const Vec& p) { return p[0] * p[1]; });
    fs.push_back([](const Vec& p) { return p[1] * p[2]; });
    fs.push_back([](const Vec& p) { return p[2] * p[0]; });
    fs.push_back([](const Vec& p) { return p[0] * p[0] - p[1] * p[1]; });
    fs.push_back([](const Vec& p) { return 2 * p[2] * p[2] - p[0] * p[0] - p[1] * p[1]; });
    // degree 3
    fs.push_back([](const Vec& p) { return p[2] * (2 * p[2] * p[2] - 3 * p[0] * p[0] - 3 * p[1] * p[1]); });
    fs.push_back([](const Vec& p) { return p[0] * (4 * p[2] * p[2] - p[0] * p[0] - p[1] * p[1]); });
    fs.push_back([](const Vec& p) { return p[1] * (4 * p[2] * p[2] - p[0] * p[0] - p[1] * p[1]); });
    fs.push_back([](const Vec& p) { return p[2] * (p[0] * p[0] - p[1] * p[1]); });
    fs.push_back([](const Vec& p) { return p[0] * p[1] * p[2]; });
    fs.push_back([](const Vec& p) { return p[0] * (p[0] * p[0] - 3 * p[1] * p[1]); });
    fs.push_back([](const Vec& p) { return p[1] * (3 * p[0] * p[0] - p[1] * p[1]); });
    // degree 4
    fs.push_back([](const Vec& p) {
        double z2 = p[2] * p[2];
        return 35 * z2 * z2 - 30 * z2 + 3;
    });
    fs.push_back([](const Vec& p) { return p[0] * p[2] * (7 * p[2] * p[2] - 3); });
    fs.push_back([](const Vec& p) { return p[1] * p[2] * (7 * p[2] * p[2] - 3); });
    fs.push_back([](const Vec& p) { return (p[0] * p[0] - p[1] * p[1]) * (7 * p[2] * p[2] - 1); });
    fs.push_back([](const Vec& p) { return p[0] * p[1] * (7 * p[2] * p[2] - 1); });
    fs.push_back([](const Vec& p) { return p[0] * p[2] * (p[0] * p[0] - 3 * p[1] * p[1]); });
    fs.push_back([](const Vec& p) { return p[1] * p[2] * (3 * p[0] * p[0] - p[1] * p[1]); });
    fs.push_back([](const Vec& p) {
        double x2 = p[0] * p[0], y2 = p[1] * p[1];
        return x2 * x2 - 6 * x2 * y2 + y2 * y2;
    });
    fs.push_back([](const Vec& p) { return p[0] * p[1] * (p[0] * p[0] - p[1] * p[1]); });
    return fs;
}

std::vector<ProbeRow> weak_convergence_probe(const ConvexBody& K,
                                             const std::vector<ConvexBody>& family,
                                             const pde::SolveOptions& opt) {
    const int n = K.dimension();
    auto dict = harmonic_dictionary(n);
    pde::EquilibriumSolution sol = pde::solve_equilibrium(K, opt);
    auto grid = sol.mesh->sphere;
    SphericalMeasure mu = capacitary_measure(K, sol, grid);
    std::vector<double> ref(dict.size(), 0.0);
    for (size_t f = 0; f < dict.size(); ++f)
        for (int i = 0; i < grid->size(); ++i) ref[f] += dict[f](grid->nodes[i]) * mu.weights[i];

    const SphereGrid& hgrid = (n == 2) ? geom::circle_grid(512) : geom::fibonacci_grid(2048);
    std::vector<ProbeRow> rows;
    for (const ConvexBody& Kj : family) {
        pde::EquilibriumSolution sj = pde::solve_equilibrium(Kj, opt);
        SphericalMeasure mj = capacitary_measure(Kj, sj, grid);
        ProbeRow row;
        row.hausdorff = geom::hausdorff_distance(Kj, K, hgrid);
        row.mass_gap = std::abs(mj.mass() - mu.mass());
        for (size_t f = 0; f < dict.size(); ++f) {
            double v = 0.0;
            for (int i = 0; i < grid->size(); ++i) v += dict[f](grid->nodes[i]) * mj.weights[i];
            row.max_discrepancy = std::max(row.max_discrepancy, std::abs(v - ref[f]));
        }
        rows.push_back(row);
    }
    return rows;
}

GradientReport gradient_lower_bound_report(const ConvexBody& K, const pde::SolveOptions& base,
                                           int refinements) {
    GradientReport rep;
    for (int k = 0; k <= refinements; ++k) {
        pde::SolveOptions opt = base;
        opt.sphere_level = base.sphere_level + k;
        opt.sphere_nodes = base.sphere_nodes << k;
        pde::EquilibriumSolution sol = pde::solve_equilibrium(K, opt);
        std::vector<double> g = sol.normalized_boundary_gradient();
        rep.min_gradient.push_back(*std::min_element(g.begin(), g.end()));
    }
    rep.positive = true;
    for (double g : rep.min_gradient)
        if (!(g > 0.0)) rep.positive = false;
    for (size_t k = 1; k < rep.min_gradient.size(); ++k) {
        double rel = std::abs(rep.min_gradient[k] - rep.min_gradient[k - 1]) /
                     std::max(rep.min_gradient[k], rep.min_gradient[k - 1]);
        rep.max_rel_variation = std::max(rep.max_rel_variation, rel);
    }
    return rep;
}

RrrScanRow conjecture_rrr_scan(const ConvexBody& K, const pde::EquilibriumSolution& sol) {
    BoundaryData bd = boundary_data(K, sol);
    const int n = K.dimension();
    double s = 0.0;
    for (size_t i = 0; i < bd.samples.size(); ++i)
        s += std::log(norm(bd.samples[i].x)) * std::pow(bd.grad[i], n - 1) * bd.samples[i].dS;
    RrrScanRow row;
    row.formula_value = std::exp(s / sphere_area(n));
    row.ncap = std::exp(-sol.alpha());
    row.ratio = row.formula_value / row.ncap;
    return row;
}

} // namespace capax::capm
