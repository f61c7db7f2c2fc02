#include "capax/equilibrium.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "capax/constants.hpp"
#include "capax/kernels.hpp"

namespace capax::pde {

namespace {

struct Dirichlet {
    std::vector<int> free_of_node;  // -1 for constrained nodes
    std::vector<int> node_of_free;
};

Dirichlet split_dofs(const AnnulusMesh& mesh) {
    Dirichlet d;
    d.free_of_node.assign(mesh.node_count(), -1);
    const int S = mesh.sphere_size();
    for (int j = 1; j < mesh.layers; ++j)
        for (int i = 0; i < S; ++i) {
            d.free_of_node[mesh.node(j, i)] = static_cast<int>(d.node_of_free.size());
            d.node_of_free.push_back(mesh.node(j, i));
        }
    return d;
}

// Area and outward unit normal of the (n-1)-simplex with vertices p[0..n-1].
void surface_patch(int n, const Vec* p, double& area, Vec& normal) {
    if (n == 2) {
        Vec e = p[1] - p[0];
        area = norm(e);
        normal = normalized(Vec(e[1], -e[0]));
    } else if (n == 3) {
        Vec c = cross(p[1] - p[0], p[2] - p[0]);
        area = 0.5 * norm(c);
        normal = (area > 0) ? (1.0 / (2.0 * area)) * c : Vec(1, 0, 0);
    } else {
        // generalized cross product of three edge vectors in R^4
        Vec a = p[1] - p[0], b = p[2] - p[0], c = p[3] - p[0];
        Vec nrm;
        for (int i = 0; i < 4; ++i) {
            double m[3][3];
            int col = 0;
            for (int j = 0; j < 4; ++j) {
                if (j == i) continue;
                m[0][col] = a[j];
                m[1][col] = b[j];
                m[2][col] = c[j];
                ++col;
            }
            double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
            nrm[i] = ((i % 2) ? -1.0 : 1.0) * det;
        }
        double s = norm(nrm);
        area = s / 6.0;
        normal = (s > 0) ? (1.0 / s) * nrm : Vec(1, 0, 0, 0);
    }
    Vec mid;
    for (int k = 0; k < n; ++k) mid += (1.0 / n) * p[k];
    if (dot(normal, mid) < 0) normal = -1.0 * normal;
}

// Flux of |grad u|^{n-2} grad u through the mid-surface of each radial layer
// of prisms, by direct quadrature; this is the discrete version of the
// level-surface flux and genuinely drifts with discretization error.
void layer_fluxes(const AnnulusMesh& mesh, const std::vector<double>& u,
                  std::vector<double>& flux) {
    const int n = mesh.dim;
    const int npe = n + 1;
    std::vector<double> eg;
    par::element_gradients(n, npe, mesh.elems, mesh.elem_grad, u, eg);
    flux.assign(mesh.layers, 0.0);
    const int per_prism = n; // simplices per prism
    const size_t prisms_per_layer = mesh.sphere->simplices.size();
    for (int j = 0; j < mesh.layers; ++j) {
        double f = 0.0;
        for (size_t s = 0; s < prisms_per_layer; ++s) {
            size_t base = (static_cast<size_t>(j) * prisms_per_layer + s) * per_prism;
            // prism-average gradient, volume weighted
            double g[4] = {0, 0, 0, 0};
            double vol = 0.0;
            for (int k = 0; k < per_prism; ++k) {
                double v = mesh.elem_vol[base + k];
                vol += v;
                for (int d = 0; d < n; ++d) g[d] += v * eg[(base + k) * n + d];
            }
            Vec gv;
            for (int d = 0; d < n; ++d) gv[d] = g[d] / vol;
            // mid cross-section vertices
            const auto& simp = mesh.sphere->simplices[s];
            Vec mids[4];
            for (int k = 0; k < n; ++k) {
                int i = simp[k];
                mids[k] = 0.5 * (mesh.coords[mesh.node(j, i)] + mesh.coords[mesh.node(j + 1, i)]);
            }
            double area;
            Vec nrm;
            surface_patch(n, mids, area, nrm);
            double gn = norm(gv);
            if (gn > 0.0) f += std::pow(gn, n - 2) * dot(gv, nrm) * area;
        }
        flux[j] = f;
    }
}

} // namespace

std::vector<double> EquilibriumSolution::normalized_boundary_gradient() const {
    std::vector<double> g = boundary_gradient;
    double s = (mode == OuterBC::Equilibrium) ? log_slope : 1.0;
    for (double& v : g) v /= s; // sign cancels: raw gradient carries sign(log_slope)
    return g;
}

std::vector<double> EquilibriumSolution::normalized_flux_gradient() const {
    std::vector<double> g = flux_boundary_gradient; // stored as a magnitude
    double s = (mode == OuterBC::Equilibrium) ? std::abs(log_slope) : 1.0;
    for (double& v : g) v /= s;
    return g;
}

EquilibriumSolution solve_condenser(const ConvexBody& K, double R, const SolveOptions& opt,
                                    OuterBC bc) {
    const int n = K.dimension();
    if (n == 4 && !opt.allow_dim4) throw SolverError("dimension 4 solves are disabled (allow_dim4)");
    if (!K.origin_interior()) throw SolverError("origin must be interior to the body");

    std::shared_ptr<const SphereGrid> sphere;
    if (n == 2)
        sphere = std::make_shared<SphereGrid>(geom::circle_grid(opt.sphere_nodes));
    else if (n == 3)
        sphere = std::make_shared<SphereGrid>(geom::icosphere_grid(opt.sphere_level));
    else
        sphere = std::make_shared<SphereGrid>(geom::cell16_grid(std::min(opt.sphere_level, 2)));

    int layers = opt.layers;
    if (layers <= 0) {
        // keep the radial step in ln(rho) comparable to the angular step
        double lnspan = std::log(R / std::max(1e-12, K.inradius_lower_bound()));
        int base = (n == 2) ? opt.sphere_nodes / 6 : 14 + 10 * opt.sphere_level;
        layers = std::max(8, static_cast<int>(std::lround(base * lnspan / std::log(8.0))));
        layers = std::min(layers, 160);
    }

    auto mesh = build_annulus_mesh(K, R, sphere, layers);
    const int npe = n + 1;
    const int S = mesh->sphere_size();
    const double outer_value = (bc == OuterBC::Condenser) ? 1.0 : std::log(R);

    EquilibriumSolution sol;
    sol.mesh = mesh;
    sol.mode = bc;
    sol.outer_value = outer_value;
    sol.u.assign(mesh->node_count(), 0.0);
    // radial harmonic start: linear in the layer index on the log-graded mesh
    for (int j = 0; j <= layers; ++j)
        for (int i = 0; i < S; ++i)
            sol.u[mesh->node(j, i)] = outer_value * static_cast<double>(j) / layers;

    Dirichlet dofs = split_dofs(*mesh);
    const int nfree = static_cast<int>(dofs.node_of_free.size());

    // sparse pattern is fixed; assemble once, refill values per iteration
    std::vector<Eigen::Triplet<double>> trips;
    Eigen::SparseMatrix<double> H(nfree, nfree);
    Eigen::VectorXd rhs(nfree), du(nfree);
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                             Eigen::IncompleteCholesky<double>>
        cg;
    cg.setTolerance(1e-9);
    cg.setMaxIterations(4000);

    std::vector<double> grad, hvals;
    std::vector<double> eps_list = opt.epsilon_schedule;
    if (n == 2) eps_list = {0.0}; // quadratic energy, regularization is a constant shift
    if (eps_list.empty()) eps_list = {1e-6};

    double energy = 0.0;
    int total_iters = 0;
    double gscale = 1.0;
    for (double eps : eps_list) {
        for (int it = 0; it < opt.max_iters; ++it) {
            energy = par::element_energy_grad(n, npe, mesh->elems, mesh->elem_vol, mesh->elem_grad,
                                              sol.u, eps, grad);
            sol.energy_history.push_back(energy);
            double gmax = 0.0;
            for (int f = 0; f < nfree; ++f) gmax = std::max(gmax, std::abs(grad[dofs.node_of_free[f]]));
            if (it == 0 && total_iters == 0) gscale = std::max(1.0, gmax);
            sol.final_residual = gmax / gscale;
            if (gmax <= opt.grad_tol * gscale) break;

            par::element_hessian(n, npe, mesh->elems, mesh->elem_vol, mesh->elem_grad, sol.u, eps,
                                 hvals);
            trips.clear();
            trips.reserve(mesh->elems.size() * npe * npe);
            for (size_t e = 0; e < mesh->elems.size(); ++e)
                for (int a = 0; a < npe; ++a) {
                    int fa = dofs.free_of_node[mesh->elems[e][a]];
                    if (fa < 0) continue;
                    for (int b = 0; b < npe; ++b) {
                        int fb = dofs.free_of_node[mesh->elems[e][b]];
                        if (fb < 0) continue;
                        trips.emplace_back(fa, fb, hvals[(e * npe + a) * npe + b]);
                    }
                }
            H.setFromTriplets(trips.begin(), trips.end());
            cg.compute(H);
            if (cg.info() != Eigen::Success) throw SolverError("Hessian preconditioning failed");
            for (int f = 0; f < nfree; ++f) rhs[f] = -grad[dofs.node_of_free[f]];
            du = cg.solve(rhs);
            if (cg.info() != Eigen::Success && cg.error() > 1e-6)
                throw SolverError("inner linear solve failed to converge");

            // backtracking on the energy
            double gd = 0.0;
            for (int f = 0; f < nfree; ++f) gd += grad[dofs.node_of_free[f]] * du[f];
            double step = 1.0;
            std::vector<double> trial = sol.u;
            bool accepted = false;
            for (int ls = 0; ls < 40; ++ls) {
                for (int f = 0; f < nfree; ++f)
                    trial[dofs.node_of_free[f]] = sol.u[dofs.node_of_free[f]] + step * du[f];
                double etrial = par::element_energy(n, npe, mesh->elems, mesh->elem_vol,
                                                    mesh->elem_grad, trial, eps);
                if (etrial <= energy + 1e-4 * step * gd) {
                    sol.u.swap(trial);
                    accepted = true;
                    // converged when the decrement stalls
                    if (energy - etrial <= opt.energy_tol * std::abs(energy)) it = opt.max_iters;
                    break;
                }
                step *= 0.5;
            }
            ++total_iters;
            if (!accepted) break; // line search exhausted: gradient check decides
            if (total_iters > 500) throw SolverError("solver failed to converge");
        }
    }
    sol.iterations = total_iters;
    sol.epsilon_used = eps_list.back();
    if (sol.final_residual > 1e-4)
        throw SolverError("solver did not reach the gradient tolerance");

    // capacity at eps = 0
    sol.energy = par::element_energy(n, npe, mesh->elems, mesh->elem_vol, mesh->elem_grad, sol.u, 0.0);
    double scale = (bc == OuterBC::Condenser) ? 1.0 : std::abs(outer_value);
    sol.capacity_energy = sol.energy / std::pow(scale, n);

    // maximum principle bookkeeping (u between 0 and the outer value)
    double vmin = std::min(0.0, outer_value), vmax = std::max(0.0, outer_value);
    double lo = 0.0, hi = 0.0;
    for (double v : sol.u) {
        lo = std::min(lo, v - vmin);
        hi = std::max(hi, v - vmax);
    }
    sol.max_principle_violation = std::max(-lo, hi);

    layer_fluxes(*mesh, sol.u, sol.flux_per_layer);
    {
        std::vector<double> f = sol.flux_per_layer;
        for (double& v : f) v /= std::pow(scale, n - 1);
        std::vector<double> interior(f.begin() + 1, f.end() - (f.size() > 2 ? 1 : 0));
        if (interior.empty()) interior = f;
        std::vector<double> s = interior;
        std::sort(s.begin(), s.end());
        sol.capacity_flux = s[s.size() / 2];
        double fmin = s.front(), fmax = s.back();
        sol.flux_drift = (fmin > 0) ? fmax / fmin - 1.0 : 1e300;
    }

    // one-sided 3-point radial difference quotient at the inner boundary
    sol.boundary_gradient.resize(S);
    sol.boundary_patch_area.resize(S);
    for (int i = 0; i < S; ++i) {
        const Vec& th = sphere->nodes[i];
        double r0 = norm(mesh->coords[mesh->node(0, i)]);
        double r1 = norm(mesh->coords[mesh->node(1, i)]);
        double r2 = norm(mesh->coords[mesh->node(2, i)]);
        double h1 = r1 - r0, h2 = r2 - r1;
        double u1 = sol.u[mesh->node(1, i)], u2 = sol.u[mesh->node(2, i)];
        double dudr = u1 * (h1 + h2) / (h1 * h2) - u2 * h1 / (h2 * (h1 + h2));
        Vec nu = K.normal_on_ray(th);
        sol.boundary_gradient[i] = dudr / dot(nu, th);
        sol.boundary_patch_area[i] =
            std::pow(r0, n - 1) / dot(nu, th) * sphere->weights[i];
    }

    // flux-consistent gradient: at the solution the energy gradient vanishes
    // at interior nodes, so its value at an inner Dirichlet node equals
    // n * int |grad u|^{n-2} du/dnu phi_a dS over the node patch
    {
        std::vector<double> res;
        par::element_energy_grad(n, npe, mesh->elems, mesh->elem_vol, mesh->elem_grad, sol.u, 0.0,
                                 res);
        sol.flux_boundary_gradient.resize(S);
        for (int i = 0; i < S; ++i) {
            double f = std::abs(res[mesh->node(0, i)]) / n; // |grad u|^{n-1} dS lumped
            sol.flux_boundary_gradient[i] = std::pow(f / sol.boundary_patch_area[i], 1.0 / (n - 1));
        }
    }

    // far-field fit u ~ a ln|x| + b over the outer 20% of layers,
    // discarding the outermost (Dirichlet) layer
    if (bc == OuterBC::Equilibrium) {
        int j0 = std::max(1, static_cast<int>(std::floor(0.8 * layers)));
        int j1 = layers - 1;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int cnt = 0;
        for (int j = j0; j <= j1; ++j)
            for (int i = 0; i < S; ++i) {
                double x = std::log(norm(mesh->coords[mesh->node(j, i)]));
                double y = sol.u[mesh->node(j, i)];
                sx += x;
                sy += y;
                sxx += x * x;
                sxy += x * y;
                ++cnt;
            }
        double det = cnt * sxx - sx * sx;
        if (std::abs(det) < 1e-14) throw SolverError("degenerate far-field fit window");
        sol.log_slope = (cnt * sxy - sx * sy) / det;
        sol.log_offset = (sy * sxx - sx * sxy) / det;
        double ss = 0.0;
        for (int j = j0; j <= j1; ++j)
            for (int i = 0; i < S; ++i) {
                double x = std::log(norm(mesh->coords[mesh->node(j, i)]));
                double y = sol.u[mesh->node(j, i)];
                double r = y - (sol.log_slope * x + sol.log_offset);
                ss += r * r;
            }
        sol.fit_residual = std::sqrt(ss / cnt);
    }

    // the solution scale carries sign(outer value); the physical gradient
    // magnitude must be bounded away from zero either way
    double expected = (bc == OuterBC::Condenser) ? 1.0 : (sol.log_slope >= 0 ? 1.0 : -1.0);
    for (double g : sol.boundary_gradient)
        if (!(g * expected > 0.0)) throw SolverError("nonpositive extrapolated boundary gradient");

    return sol;
}

double conformal_modulus(int n, double cap) {
    if (!(cap > 0.0)) throw std::invalid_argument("capacity must be positive");
    return std::pow(cap / sphere_area(n), 1.0 / (1.0 - n));
}

CapacityEstimate capacity_ncap1(const ConvexBody& K, const SolveOptions& opt,
                                const std::vector<double>& radius_factors) {
    const int n = K.dimension();
    const double c = K.circumradius();
    std::vector<double> ds, radii;
    double split = 0.0;
    for (double f : radius_factors) {
        double R = f * c;
        EquilibriumSolution sol = solve_condenser(K, R, opt, OuterBC::Condenser);
        double d = conformal_modulus(n, sol.capacity_energy) - std::log(R);
        ds.push_back(d);
        radii.push_back(R);
        split = std::max(split, std::abs(sol.capacity_flux / sol.capacity_energy - 1.0));
    }
    // monotone nondecreasing within solver noise
    double noise = std::max(2e-3, 2.0 * split);
    for (size_t k = 1; k < ds.size(); ++k)
        if (ds[k] < ds[k - 1] - noise)
            throw SolverError("reduced modulus sequence decreases: mesh too coarse");

    double d_inf = ds.back();
    if (ds.size() >= 3) {
        double d1 = ds[ds.size() - 3], d2 = ds[ds.size() - 2], d3 = ds.back();
        double den = (d2 - d1) - (d3 - d2);
        if (std::abs(den) > 1e-12 && std::abs(d3 - d2) < std::abs(d2 - d1))
            d_inf = d3 + (d3 - d2) * (d3 - d2) / den; // Aitken extrapolation
    }
    CapacityEstimate est;
    est.value = std::exp(-d_inf);
    est.method = "ncap1";
    est.uncertainty = std::abs(est.value - std::exp(-ds.back())) + est.value * split;
    est.diagnostics["schedule_last_increment"] = ds.size() > 1 ? ds.back() - ds[ds.size() - 2] : 0.0;
    est.diagnostics["energy_flux_split"] = split;
    est.diagnostics["outer_radius_max"] = radii.back();
    return est;
}

CapacityEstimate capacity_ncap2(const ConvexBody& K, const SolveOptions& opt) {
    const double c = K.circumradius();
    double v[2], resid[2];
    for (int k = 0; k < 2; ++k) {
        double R = opt.outer_radius_factor * c * (k ? 2.0 : 1.0);
        EquilibriumSolution sol = solve_condenser(K, R, opt, OuterBC::Equilibrium);
        v[k] = std::exp(-sol.alpha());
        resid[k] = sol.fit_residual;
    }
    if (std::abs(v[1] - v[0]) > opt.radius_agreement_tol * std::max(v[0], v[1]))
        throw SolverError("asymptotic-constant estimates disagree across radii");
    CapacityEstimate est;
    est.value = v[1] + (v[1] - v[0]) / 3.0; // far-field error ~ R^{-2}
    est.uncertainty = std::abs(v[1] - v[0]) / 3.0 + 0.5 * (resid[0] + resid[1]);
    est.method = "ncap2";
    est.diagnostics["value_R"] = v[0];
    est.diagnostics["value_2R"] = v[1];
    est.diagnostics["fit_residual"] = resid[1];
    return est;
}

EquilibriumSolution solve_equilibrium(const ConvexBody& K, const SolveOptions& opt) {
    double R = opt.outer_radius_factor * K.circumradius();
    return solve_condenser(K, R, opt, OuterBC::Equilibrium);
}

} // namespace capax::pde
