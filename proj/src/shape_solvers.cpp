#include "capax/shape_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "capax/constants.hpp"
#include "capax/geometry.hpp"
#include "capax/quadrature.hpp"

namespace capax::shape {

double pmu(const SphericalMeasure& mu, const Vec& xi) {
    if (std::abs(norm(xi) - 1.0) > 1e-12) throw std::invalid_argument("pmu needs a unit direction");
    double s = 0.0;
    for (int i = 0; i < mu.grid->size(); ++i) {
        double d = dot(xi, mu.grid->nodes[i]);
        if (d > 0.0) s += d * mu.weights[i];
    }
    return s;
}

AdmissibilityReport check_mu_admissible(const SphericalMeasure& mu, const SphereGrid& grid) {
    AdmissibilityReport rep;
    rep.min_pmu = 1e300;
    for (int i = 0; i < grid.size(); ++i) {
        double p = pmu(mu, grid.nodes[i]);
        rep.min_pmu = std::min(rep.min_pmu, p);
        rep.max_pmu = std::max(rep.max_pmu, p);
        double q = pmu(mu, -1.0 * grid.nodes[i]);
        rep.asymmetry_defect = std::max(rep.asymmetry_defect, std::abs(p - q));
    }
    rep.admissible = rep.min_pmu > 1e-9 && rep.max_pmu < 1e300 &&
                     rep.asymmetry_defect <= 0.05 * std::max(rep.max_pmu, 1e-300);
    return rep;
}

namespace {

struct CapacityEval {
    double ncap = 0.0;
    pde::EquilibriumSolution sol;
};

CapacityEval eval_support_body(const ConvexBody& K, const pde::SolveOptions& opt) {
    CapacityEval ev;
    ev.sol = pde::solve_equilibrium(K, opt);
    ev.ncap = std::exp(-ev.sol.alpha());
    return ev;
}

// Steiner-point recentering of support values: h <- h - s.xi
std::vector<double> recenter_support(const SphereGrid& g, std::vector<double> h, int n) {
    Vec s;
    for (int i = 0; i < g.size(); ++i) s += (h[i] * g.weights[i]) * g.nodes[i];
    s *= static_cast<double>(n) / sphere_area(n);
    for (int i = 0; i < g.size(); ++i) h[i] -= dot(s, g.nodes[i]);
    return h;
}

} // namespace

MinkowskiResult minkowski_minimize(const SphericalMeasure& mu, const MinkowskiParams& p) {
    auto grid = mu.grid;
    const int n = grid->dimension;
    const int m = grid->size();
    {
        AdmissibilityReport adm = check_mu_admissible(mu, *grid);
        if (!adm.admissible) throw std::invalid_argument("measure fails the admissibility conditions");
    }
    const double sigma = sphere_area(n);
    std::mt19937_64 rng(p.seed);
    std::normal_distribution<double> nd(0.0, 1.0);

    struct Candidate {
        std::vector<double> h;
        double objective = 1e300;
        std::vector<double> history;
        double ncap = 0.0;
    };

    auto project = [&](std::vector<double>& v) {
        v = geom::convexify(*grid, v);
        v = recenter_support(*grid, std::move(v), n);
        for (double& x : v)
            if (x < 1e-6) x = 1e-6;
    };

    auto run_from = [&](std::vector<double> h) {
        Candidate cand;
        project(h);
        ConvexBody K = ConvexBody::support_samples(grid, h);
        double obj = 1e300;

        auto descend = [&](const pde::SolveOptions& opt, int iters) {
            CapacityEval ev = eval_support_body(K, opt);
            for (double& x : h) x /= ev.ncap; // capacity constraint binds exactly
            K = K.scaled(1.0 / ev.ncap);
            obj = 0.0;
            for (int i = 0; i < m; ++i) obj += mu.weights[i] * h[i];
            cand.history.push_back(obj);
            for (int it = 0; it < iters; ++it) {
                // gradient of ln ncap in support coordinates = capacitary atoms / sigma
                pde::EquilibriumSolution sol = pde::solve_equilibrium(K, opt);
                capm::SphericalMeasure cm = capm::capacitary_measure(K, sol, grid);
                std::vector<double> grad(m), c(m);
                double cc = 0.0, mc = 0.0;
                for (int i = 0; i < m; ++i) {
                    c[i] = cm.weights[i] / sigma;
                    cc += c[i] * c[i];
                    mc += mu.weights[i] * c[i];
                }
                double lambda = (cc > 0) ? mc / cc : 0.0;
                for (int i = 0; i < m; ++i) grad[i] = mu.weights[i] - lambda * c[i];
                double gnorm = 0.0, hnorm = 0.0;
                for (int i = 0; i < m; ++i) {
                    gnorm = std::max(gnorm, std::abs(grad[i]));
                    hnorm = std::max(hnorm, std::abs(h[i]));
                }
                if (gnorm == 0.0) break;
                double step = 0.25 * hnorm / gnorm;
                bool accepted = false;
                for (int ls = 0; ls < 10; ++ls) {
                    std::vector<double> trial = h;
                    for (int i = 0; i < m; ++i) trial[i] -= step * grad[i];
                    try {
                        std::vector<double> tp = trial;
                        project(tp);
                        ConvexBody Kt = ConvexBody::support_samples(grid, tp);
                        CapacityEval evt = eval_support_body(Kt, opt);
                        for (double& x : tp) x /= evt.ncap;
                        Kt = Kt.scaled(1.0 / evt.ncap);
                        double objt = 0.0;
                        for (int i = 0; i < m; ++i) objt += mu.weights[i] * tp[i];
                        if (objt < obj - 1e-12) {
                            h = std::move(tp);
                            K = std::move(Kt);
                            obj = objt;
                            cand.ncap = 1.0;
                            accepted = true;
                            break;
                        }
                    } catch (const std::exception&) {
                        // projection or solve failed at this step size; shrink
                    }
                    step *= 0.5;
                }
                cand.history.push_back(obj);
                if (!accepted) break;
                size_t hs = cand.history.size();
                if (hs >= 2 && std::abs(cand.history[hs - 2] - obj) <= p.objective_tol * std::abs(obj))
                    break;
            }
        };

        descend(p.solve, p.max_iters);
        if (p.polish_iters > 0) {
            pde::SolveOptions fine = p.solve;
            fine.sphere_level = p.solve.sphere_level + 1;
            fine.sphere_nodes = 2 * p.solve.sphere_nodes;
            descend(fine, p.polish_iters);
        }
        cand.h = h;
        cand.objective = obj;
        return cand;
    };

    std::vector<Candidate> cands;
    for (int s = 0; s < std::max(1, p.multistarts); ++s) {
        std::vector<double> h0(m, 1.0);
        if (s > 0) {
            // smooth random perturbation of the ball start
            Vec a, b;
            for (int d = 0; d < n; ++d) {
                a[d] = nd(rng);
                b[d] = nd(rng);
            }
            for (int i = 0; i < m; ++i) {
                const Vec& x = grid->nodes[i];
                h0[i] = 1.0 + 0.15 * dot(a, x) * dot(b, x) / (1.0 + norm2(a));
            }
        }
        cands.push_back(run_from(std::move(h0)));
    }
    std::sort(cands.begin(), cands.end(),
              [](const Candidate& a, const Candidate& b) { return a.objective < b.objective; });

    MinkowskiResult res{ConvexBody::support_samples(grid, cands.front().h), cands.front().objective,
                        cands.front().history, 0.0, 0.0, 0.0, 0.0};
    for (size_t i = 1; i < cands.size(); ++i) {
        ConvexBody Ki = ConvexBody::support_samples(grid, cands[i].h);
        res.multistart_spread =
            std::max(res.multistart_spread, geom::hausdorff_distance(res.body, Ki, *grid));
    }
    res.thinness = res.body.inradius_lower_bound() / res.body.circumradius();
    {
        pde::SolveOptions fine = p.solve;
        if (p.polish_iters > 0) {
            fine.sphere_level = p.solve.sphere_level + 1;
            fine.sphere_nodes = 2 * p.solve.sphere_nodes;
        }
        pde::EquilibriumSolution sol = pde::solve_equilibrium(res.body, fine);
        res.capacity = std::exp(-sol.alpha());
        capm::SphericalMeasure cm = capm::capacitary_measure(res.body, sol, grid);
        auto dict = capm::harmonic_dictionary(n);
        for (const auto& f : dict) {
            double d = 0.0;
            for (int i = 0; i < m; ++i) d += f(grid->nodes[i]) * (cm.weights[i] - mu.weights[i]);
            res.prescribed_measure_gap = std::max(res.prescribed_measure_gap, std::abs(d));
        }
    }
    return res;
}

double Density::operator()(const Vec& x) const {
    if (kind == "exp_decay") return amplitude * std::exp(-rate * norm(x));
    throw std::invalid_argument("unknown density kind: " + kind);
}

double Density::ball_integral(int n, double r) const {
    if (kind == "exp_decay") {
        double sigma = sphere_area(n);
        return sigma * adaptive_simpson(
                           [&](double s) { return amplitude * std::exp(-rate * s) * std::pow(s, n - 1); },
                           0.0, r, 1e-12);
    }
    throw std::invalid_argument("unknown density kind: " + kind);
}

namespace {

double yau_objective_ball(const Density& J, double r, const YauParams& p, int n) {
    ConvexBody B = ConvexBody::ball(n, Vec{}, r);
    pde::EquilibriumSolution sol = pde::solve_equilibrium(B, p.solve);
    return std::exp(-sol.alpha()) - J.ball_integral(n, r);
}

// int_K J dV by the radial-spherical product rule (64 radial x grid nodes).
double body_density_integral(const ConvexBody& K, const Density& J, const SphereGrid& g) {
    const int n = K.dimension();
    Vec c = K.interior_point();
    ConvexBody Kc = K.translated(-1.0 * c);
    double total = 0.0;
    const int nr = 64;
    for (int i = 0; i < g.size(); ++i) {
        double rmax = Kc.radial(g.nodes[i]);
        double acc = 0.0;
        for (int k = 0; k < nr; ++k) {
            double r = rmax * (k + 0.5) / nr;
            acc += J(c + r * g.nodes[i]) * std::pow(r, n - 1);
        }
        total += acc * (rmax / nr) * g.weights[i];
    }
    return total;
}

} // namespace

YauResult yau_minimize(const Density& J, YauFamily family, const YauParams& p) {
    const int n = p.dim;
    YauResult res;
    // pre-scan over balls: Theorem-style degenerate verdict when J(.) > 0
    double best_r = 0.0, best_v = 1e300;
    for (int k = 0; k < p.prescan; ++k) {
        double r = p.radius_lo * std::pow(p.radius_hi / p.radius_lo, double(k) / (p.prescan - 1));
        double v = yau_objective_ball(J, r, p, n);
        res.objective_history.push_back(v);
        if (v < best_v) {
            best_v = v;
            best_r = r;
        }
    }
    if (best_v > 0.0) {
        res.degenerate = true;
        res.objective = 0.0;
        res.body = ConvexBody::ball(n, Vec{}, p.radius_lo);
        return res;
    }
    // golden-section refinement around the bracket
    double ratio = std::pow(p.radius_hi / p.radius_lo, 1.0 / (p.prescan - 1));
    double lo = best_r / ratio, hi = best_r * ratio;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = yau_objective_ball(J, x1, p, n), f2 = yau_objective_ball(J, x2, p, n);
    for (int it = 0; it < p.max_iters && (b - a) > p.tol * best_r; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = yau_objective_ball(J, x1, p, n);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = yau_objective_ball(J, x2, p, n);
        }
        res.objective_history.push_back(std::min(f1, f2));
    }
    double rstar = 0.5 * (a + b);
    ConvexBody B = ConvexBody::ball(n, Vec{}, rstar);

    if (family == YauFamily::Balls) {
        res.body = B;
    } else {
        // warm-started Nelder-Mead over log-semiaxes, rotation frozen
        const SphereGrid& g = geom::fibonacci_grid(512);
        auto eval = [&](const std::vector<double>& la) {
            std::vector<double> ax(n);
            for (int d = 0; d < n; ++d) ax[d] = std::exp(la[d]);
            ConvexBody E = ConvexBody::ellipsoid(n, Vec{}, ax);
            pde::EquilibriumSolution sol = pde::solve_equilibrium(E, p.solve);
            return std::exp(-sol.alpha()) - body_density_integral(E, J, g);
        };
        std::vector<std::vector<double>> simplex(n + 1, std::vector<double>(n, std::log(rstar)));
        std::vector<double> fv(n + 1);
        for (int d = 0; d < n; ++d) simplex[d + 1][d] += 0.08;
        for (int k = 0; k <= n; ++k) fv[k] = eval(simplex[k]);
        for (int it = 0; it < p.max_iters; ++it) {
            // order
            std::vector<int> idx(n + 1);
            for (int k = 0; k <= n; ++k) idx[k] = k;
            std::sort(idx.begin(), idx.end(), [&](int a2, int b2) { return fv[a2] < fv[b2]; });
            if (std::abs(fv[idx[n]] - fv[idx[0]]) < 1e-7 * std::max(1.0, std::abs(fv[idx[0]]))) break;
            std::vector<double> cen(n, 0.0);
            for (int k = 0; k < n; ++k)
                for (int d = 0; d < n; ++d) cen[d] += simplex[idx[k]][d] / n;
            std::vector<double> refl(n);
            for (int d = 0; d < n; ++d) refl[d] = cen[d] + (cen[d] - simplex[idx[n]][d]);
            double fr = eval(refl);
            if (fr < fv[idx[0]]) {
                std::vector<double> exp2(n);
                for (int d = 0; d < n; ++d) exp2[d] = cen[d] + 2.0 * (cen[d] - simplex[idx[n]][d]);
                double fe = eval(exp2);
                if (fe < fr) {
                    simplex[idx[n]] = exp2;
                    fv[idx[n]] = fe;
                } else {
                    simplex[idx[n]] = refl;
                    fv[idx[n]] = fr;
                }
            } else if (fr < fv[idx[n - 1]]) {
                simplex[idx[n]] = refl;
                fv[idx[n]] = fr;
            } else {
                std::vector<double> con(n);
                for (int d = 0; d < n; ++d) con[d] = cen[d] + 0.5 * (simplex[idx[n]][d] - cen[d]);
                double fc = eval(con);
                if (fc < fv[idx[n]]) {
                    simplex[idx[n]] = con;
                    fv[idx[n]] = fc;
                } else {
                    for (int k = 1; k <= n; ++k) {
                        for (int d = 0; d < n; ++d)
                            simplex[idx[k]][d] = 0.5 * (simplex[idx[k]][d] + simplex[idx[0]][d]);
                        fv[idx[k]] = eval(simplex[idx[k]]);
                    }
                }
            }
            res.objective_history.push_back(*std::min_element(fv.begin(), fv.end()));
        }
        int bi = 0;
        for (int k = 1; k <= n; ++k)
            if (fv[k] < fv[bi]) bi = k;
        std::vector<double> ax(n);
        for (int d = 0; d < n; ++d) ax[d] = std::exp(simplex[bi][d]);
        res.body = ConvexBody::ellipsoid(n, Vec{}, ax);
    }

    pde::EquilibriumSolution sol = pde::solve_equilibrium(res.body, p.solve);
    res.ncap = std::exp(-sol.alpha());
    res.density_integral = (res.body.kind() == geom::BodyKind::Ball)
                               ? J.ball_integral(n, res.body.radius())
                               : body_density_integral(res.body, J, geom::fibonacci_grid(2048));
    res.objective = res.ncap - res.density_integral;
    return res;
}

CurvatureResidualReport capacitary_curvature_residual(const ConvexBody& K, const Density& J,
                                                      const pde::EquilibriumSolution& sol) {
    const int n = K.dimension();
    const double sigma = sphere_area(n);
    double ncap = std::exp(-sol.alpha());
    auto samples = geom::boundary_samples(K, *sol.mesh->sphere);
    // smooth bodies: the pointwise difference quotient avoids the lumping
    // noise of the patch-flux recovery; Lipschitz bodies need the latter
    bool smooth = K.kind() == geom::BodyKind::Ball || K.kind() == geom::BodyKind::Ellipsoid;
    auto grad = smooth ? sol.normalized_boundary_gradient() : sol.normalized_flux_gradient();
    CurvatureResidualReport rep;
    double jmax = 0.0;
    for (size_t i = 0; i < samples.size(); ++i) {
        double lhs = ncap / sigma * std::pow(grad[i], n);
        double rhs = J(samples[i].x);
        rep.pointwise.push_back(lhs - rhs);
        jmax = std::max(jmax, rhs);
    }
    for (double r : rep.pointwise) rep.sup_rel = std::max(rep.sup_rel, std::abs(r) / jmax);
    // weak form against the dictionary: both sides as sphere measures
    auto dict = capm::harmonic_dictionary(n);
    for (const auto& f : dict) {
        double d = 0.0;
        for (size_t i = 0; i < samples.size(); ++i) {
            double atom = (ncap / sigma * std::pow(grad[i], n) - J(samples[i].x)) * samples[i].dS;
            d += f(samples[i].normal) * atom;
        }
        rep.weak_max = std::max(rep.weak_max, std::abs(d));
    }
    return rep;
}

} // namespace capax::shape
