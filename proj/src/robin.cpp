#include "capax/robin.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "capax/constants.hpp"
#include "capax/geometry.hpp"
#include "capax/kernels.hpp"
#include "capax/quadrature.hpp"

namespace capax::robin {

void DiscreteMeasure::check_invariants() const {
    if (points.size() != weights.size()) throw std::invalid_argument("measure size mismatch");
    double s = 0.0;
    for (double w : weights) {
        if (w < -1e-15) throw std::runtime_error("negative measure weight");
        s += w;
    }
    if (std::abs(s - 1.0) > 1e-12) throw std::runtime_error("measure mass must be 1");
}

double log_energy(const DiscreteMeasure& mu, DiagonalRule rule,
                  const std::vector<double>& self_energy) {
    mu.check_invariants();
    const int m = static_cast<int>(mu.points.size());
    if (m < 2) throw std::invalid_argument("log energy needs >= 2 points");
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if (dist(mu.points[i], mu.points[j]) < 1e-14 && mu.weights[i] * mu.weights[j] > 0.0)
                throw std::runtime_error("coincident points with positive weights");
    if (rule == DiagonalRule::LocalCell && static_cast<int>(self_energy.size()) != m)
        throw std::invalid_argument("LocalCell rule needs one self-energy per point");
    std::vector<double> diag;
    if (rule == DiagonalRule::LocalCell) diag = self_energy;
    return par::log_energy(mu.points, mu.weights, diag);
}

namespace {

// ---- Frank-Wolfe with away steps on a product of simplices ----
// Minimizes z^T A z, A dense symmetric row-major m x m, blocks = index
// ranges each constrained to its own probability simplex.

struct Block {
    int start, len;
};

struct FWState {
    std::vector<double> z;
    std::vector<std::vector<double>> Ub; // A * z restricted to each block
    double energy = 0.0;
};

void recompute(const std::vector<double>& A, int m, const std::vector<Block>& blocks, FWState& st) {
    st.Ub.assign(blocks.size(), std::vector<double>(m, 0.0));
    for (size_t b = 0; b < blocks.size(); ++b) {
        for (int j = blocks[b].start; j < blocks[b].start + blocks[b].len; ++j) {
            double wj = st.z[j];
            if (wj == 0.0) continue;
            const double* row = A.data() + static_cast<size_t>(j) * m;
            for (int i = 0; i < m; ++i) st.Ub[b][i] += wj * row[i];
        }
    }
    st.energy = 0.0;
    for (size_t b = 0; b < blocks.size(); ++b)
        for (int i = 0; i < m; ++i) st.energy += st.z[i] * st.Ub[b][i];
}

struct FWResult {
    std::vector<double> z;
    double energy = 0.0;
    double gap = 0.0;
    int iters = 0;
};

FWResult fw_minimize(const std::vector<double>& A, int m, const std::vector<Block>& blocks,
                     const std::vector<double>& z0, int max_iters, double tol) {
    FWState st;
    st.z = z0;
    recompute(A, m, blocks, st);
    std::vector<double> U(m), Ad(m);
    double gap = 0.0;
    int it = 0;
    for (; it < max_iters; ++it) {
        for (int i = 0; i < m; ++i) {
            double s = 0.0;
            for (size_t b = 0; b < blocks.size(); ++b) s += st.Ub[b][i];
            U[i] = s;
        }
        // joint FW vertex per block
        double fw_gap = 0.0;
        std::vector<int> svert(blocks.size());
        for (size_t b = 0; b < blocks.size(); ++b) {
            const Block& B = blocks[b];
            int s = B.start;
            for (int i = B.start; i < B.start + B.len; ++i)
                if (U[i] < U[s]) s = i;
            svert[b] = s;
            double zu = 0.0;
            for (int i = B.start; i < B.start + B.len; ++i) zu += st.z[i] * U[i];
            fw_gap += 2.0 * (zu - U[s]);
        }
        // best single-block away vertex
        double away_gap = -1.0;
        int ablk = -1, avert = -1;
        for (size_t b = 0; b < blocks.size(); ++b) {
            const Block& B = blocks[b];
            int a = -1;
            for (int i = B.start; i < B.start + B.len; ++i)
                if (st.z[i] > 1e-14 && (a < 0 || U[i] > U[a])) a = i;
            if (a < 0) continue;
            double zu = 0.0;
            for (int i = B.start; i < B.start + B.len; ++i) zu += st.z[i] * U[i];
            double g = 2.0 * (U[a] - zu);
            if (g > away_gap) {
                away_gap = g;
                ablk = static_cast<int>(b);
                avert = a;
            }
        }
        gap = std::max(fw_gap, 0.0);
        if (gap <= tol * std::max(1.0, std::abs(st.energy))) break;

        bool use_away = away_gap > fw_gap && ablk >= 0;
        if (use_away) {
            const Block& B = blocks[ablk];
            double wa = st.z[avert];
            double gmax = wa / std::max(1e-300, 1.0 - wa);
            // d = z_b - e_a ; Ad = Ub[ablk] - A[:,a]
            const double* row = A.data() + static_cast<size_t>(avert) * m;
            for (int i = 0; i < m; ++i) Ad[i] = st.Ub[ablk][i] - row[i];
            double dAd = 0.0;
            for (int i = B.start; i < B.start + B.len; ++i) dAd += st.z[i] * Ad[i];
            dAd -= Ad[avert];
            double step = gmax;
            if (dAd > 0.0) step = std::min(gmax, away_gap / (2.0 * dAd));
            if (step <= 0.0) break;
            for (int i = B.start; i < B.start + B.len; ++i) st.z[i] *= (1.0 + step);
            st.z[avert] -= step;
            if (st.z[avert] < 0.0) st.z[avert] = 0.0;
            for (int i = 0; i < m; ++i) st.Ub[ablk][i] = (1.0 + step) * st.Ub[ablk][i] - step * row[i];
            st.energy += -step * away_gap + step * step * dAd;
        } else {
            // d = v - z jointly; Ad = sum_b A[:,s_b] - U
            for (int i = 0; i < m; ++i) Ad[i] = -U[i];
            for (size_t b = 0; b < blocks.size(); ++b) {
                const double* row = A.data() + static_cast<size_t>(svert[b]) * m;
                for (int i = 0; i < m; ++i) Ad[i] += row[i];
            }
            double dAd = 0.0;
            for (size_t b = 0; b < blocks.size(); ++b) dAd += Ad[svert[b]];
            for (int i = 0; i < m; ++i) dAd -= st.z[i] * Ad[i];
            double step = 1.0;
            if (dAd > 0.0) step = std::min(1.0, fw_gap / (2.0 * dAd));
            if (step <= 0.0) break;
            for (size_t b = 0; b < blocks.size(); ++b) {
                const Block& B = blocks[b];
                for (int i = B.start; i < B.start + B.len; ++i) st.z[i] *= (1.0 - step);
                st.z[svert[b]] += step;
                const double* row = A.data() + static_cast<size_t>(svert[b]) * m;
                for (int i = 0; i < m; ++i) st.Ub[b][i] = (1.0 - step) * st.Ub[b][i] + step * row[i];
            }
            st.energy += -step * fw_gap + step * step * dAd;
        }
        if ((it & 63) == 63) recompute(A, m, blocks, st); // kill incremental drift
    }
    recompute(A, m, blocks, st);
    FWResult res;
    res.z = std::move(st.z);
    res.energy = st.energy;
    res.gap = gap;
    res.iters = it;
    return res;
}

struct MinimizeOut {
    std::vector<double> z;
    double energy = 0.0;
    double spread = 0.0;
    double stationarity = 0.0;
};

MinimizeOut minimize_with_restarts(const std::vector<double>& A, int m,
                                   const std::vector<Block>& blocks, const OptimParams& op) {
    std::mt19937_64 rng(op.seed);
    MinimizeOut best;
    best.energy = 1e300;
    double worst = -1e300;
    for (int r = 0; r < std::max(1, op.restarts); ++r) {
        std::vector<double> z0(m, 0.0);
        if (r == 0) {
            for (const Block& B : blocks)
                for (int i = B.start; i < B.start + B.len; ++i) z0[i] = 1.0 / B.len;
        } else {
            std::exponential_distribution<double> ed(1.0);
            for (const Block& B : blocks) {
                double s = 0.0;
                for (int i = B.start; i < B.start + B.len; ++i) {
                    z0[i] = ed(rng);
                    s += z0[i];
                }
                for (int i = B.start; i < B.start + B.len; ++i) z0[i] /= s;
            }
        }
        FWResult fr = fw_minimize(A, m, blocks, z0, op.max_iters, op.gap_tol);
        worst = std::max(worst, fr.energy);
        if (fr.energy < best.energy) {
            best.energy = fr.energy;
            best.z = fr.z;
        }
    }
    best.spread = worst - best.energy;
    // first-order optimality on each simplex
    FWState st;
    st.z = best.z;
    recompute(A, m, blocks, st);
    double viol = 0.0;
    for (size_t b = 0; b < blocks.size(); ++b) {
        const Block& B = blocks[b];
        double zu = 0.0;
        for (int i = B.start; i < B.start + B.len; ++i) {
            double s = 0.0;
            for (size_t c = 0; c < blocks.size(); ++c) s += st.Ub[c][i];
            zu += st.z[i] * s;
        }
        for (int i = B.start; i < B.start + B.len; ++i) {
            double Ui = 0.0;
            for (size_t c = 0; c < blocks.size(); ++c) Ui += st.Ub[c][i];
            if (st.z[i] > 1e-10) viol = std::max(viol, std::abs(Ui - zu));
            else viol = std::max(viol, std::max(0.0, zu - Ui));
        }
    }
    best.stationarity = viol;
    return best;
}

Cloud sphere_plate_cloud(int n, double R, int size) {
    geom::SphereGrid g = geom::default_quadrature_grid(n, size);
    Cloud c;
    c.points.reserve(g.size());
    c.self_energy.reserve(g.size());
    for (int i = 0; i < g.size(); ++i) {
        c.points.push_back(R * g.nodes[i]);
        double dS = std::pow(R, n - 1) * g.weights[i];
        if (n == 2) c.self_energy.push_back(-std::log(dS) + 1.5);
        else c.self_energy.push_back(-std::log(std::sqrt(dS / M_PI)) + 0.25);
    }
    return c;
}

} // namespace

Cloud boundary_cloud(const ConvexBody& K, int size, double boundary_fraction, std::uint64_t seed) {
    if (size < 8) throw std::invalid_argument("cloud too small");
    const int n = K.dimension();
    Vec c0 = K.interior_point();
    ConvexBody Kc = K.translated(-1.0 * c0);
    int mb = std::max(4, static_cast<int>(std::lround(boundary_fraction * size)));
    geom::SphereGrid g = geom::default_quadrature_grid(n, mb);
    Cloud cl;
    for (int i = 0; i < g.size(); ++i) {
        double r = Kc.radial(g.nodes[i]);
        Vec nu = Kc.normal_on_ray(g.nodes[i]);
        double dS = std::pow(r, n - 1) / dot(nu, g.nodes[i]) * g.weights[i];
        cl.points.push_back(c0 + r * g.nodes[i]);
        if (n == 2) cl.self_energy.push_back(-std::log(dS) + 1.5);
        else cl.self_energy.push_back(-std::log(std::sqrt(dS / M_PI)) + 0.25);
    }
    int mi = size - g.size();
    if (mi > 0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> nd(0.0, 1.0);
        std::uniform_real_distribution<double> ud(0.05, 0.9);
        double vol = geom::volume(K);
        double cell = std::pow(vol / std::max(1, mi), 1.0 / n);
        for (int k = 0; k < mi; ++k) {
            Vec th;
            for (int d = 0; d < n; ++d) th[d] = nd(rng);
            th = normalized(th);
            double r = Kc.radial(th) * std::pow(ud(rng), 1.0 / n);
            cl.points.push_back(c0 + r * th);
            cl.self_energy.push_back(-std::log(cell) + 0.75);
        }
    }
    return cl;
}

Cloud segment_cloud(const Vec& a, const Vec& b, int size) {
    if (size < 4) throw std::invalid_argument("segment cloud too small");
    double len = dist(a, b);
    if (!(len > 0.0)) throw std::invalid_argument("degenerate segment");
    Cloud c;
    double cell = len / size;
    for (int i = 0; i < size; ++i) {
        double t = (i + 0.5) / size;
        c.points.push_back(a + t * (b - a));
        c.self_energy.push_back(-std::log(cell) + 1.5);
    }
    return c;
}

RobinResult robin_mass_clouds(const std::vector<Cloud>& ladder, const OptimParams& op) {
    if (ladder.empty()) throw std::invalid_argument("empty cloud ladder");
    RobinResult res;
    std::vector<double> A;
    MinimizeOut last;
    for (const Cloud& cl : ladder) {
        int m = static_cast<int>(cl.points.size());
        par::log_kernel_matrix(cl.points, cl.self_energy, A);
        last = minimize_with_restarts(A, m, {{0, m}}, op);
        res.ladder.push_back({m, last.energy});
    }
    const Cloud& top = ladder.back();
    res.measure.points = top.points;
    res.measure.weights = last.z;
    res.multistart_spread = last.spread;
    res.stationarity_violation = last.stationarity;

    // energy = a + b/m least squares
    double s1 = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const LadderEntry& e : res.ladder) {
        double x = 1.0 / e.size;
        s1 += 1;
        sx += x;
        sy += e.energy;
        sxx += x * x;
        sxy += x * e.energy;
    }
    double det = s1 * sxx - sx * sx;
    double a, b;
    if (res.ladder.size() >= 2 && std::abs(det) > 1e-300) {
        a = (sy * sxx - sx * sxy) / det;
        b = (s1 * sxy - sx * sy) / det;
    } else {
        a = res.ladder.back().energy;
        b = 0.0;
    }
    // Cauchy-ish ladder check: successive gaps should shrink
    for (size_t k = 2; k < res.ladder.size(); ++k) {
        double g1 = std::abs(res.ladder[k - 1].energy - res.ladder[k - 2].energy);
        double g2 = std::abs(res.ladder[k].energy - res.ladder[k - 1].energy);
        if (g2 > std::max(1.5 * g1, 0.05)) throw std::runtime_error("robin ladder not converging");
    }
    res.energy = a;
    res.ncap3 = std::exp(-a);
    res.uncertainty =
        std::abs(a - res.ladder.back().energy) * 0.5 + std::abs(b) / (4.0 * res.ladder.back().size);
    res.uncertainty = std::max(res.uncertainty, 1e-6) + res.multistart_spread;
    return res;
}

RobinResult robin_mass(const ConvexBody& K, const CloudParams& cp, const OptimParams& op) {
    std::vector<Cloud> ladder;
    for (int div : {8, 4, 2, 1})
        ladder.push_back(boundary_cloud(K, cp.size / div, cp.boundary_fraction, cp.seed + div));
    return robin_mass_clouds(ladder, op);
}

CapacityEstimate capacity_ncap3(const ConvexBody& K, const CloudParams& cp, const OptimParams& op) {
    RobinResult r = robin_mass(K, cp, op);
    CapacityEstimate est;
    est.value = r.ncap3;
    est.uncertainty = r.ncap3 * r.uncertainty; // d(exp(-a)) = exp(-a) da
    est.method = "ncap3";
    est.diagnostics["nrob"] = r.energy;
    est.diagnostics["multistart_spread"] = r.multistart_spread;
    est.diagnostics["stationarity"] = r.stationarity_violation;
    return est;
}

double ball_ncap3_quadrature(int n, double r) {
    if (n < 2) throw std::invalid_argument("dimension must be >= 2");
    if (!(r > 0.0)) throw std::invalid_argument("radius must be positive");
    // substitution u = 1 - cos(theta) removes the endpoint log singularity:
    // I = int_0^2 (2u - u^2)^{(n-3)/2} ln(2u) du
    double I = adaptive_simpson(
        [n](double u) { return std::pow(std::max(0.0, 2.0 * u - u * u), 0.5 * (n - 3)) * std::log(2.0 * u); },
        1e-13, 2.0 - 1e-13, 1e-12);
    double coef = sphere_area(n - 1) / (2.0 * sphere_area(n));
    return r * std::exp(coef * I);
}

double ball_pair_nmd_quadrature(int n, double R) {
    if (R <= 1.0) throw std::invalid_argument("outer radius must exceed 1");
    double I = adaptive_simpson(
        [n, R](double u) {
            double s2 = std::max(0.0, 2.0 * u - u * u); // sin^2 theta
            double num = 1.0 + R * R - 2.0 * R * (1.0 - u);
            double den = 2.0 * R * R * u;
            return std::pow(s2, 0.5 * (n - 3)) * std::log(num / den);
        },
        1e-13, 2.0 - 1e-13, 1e-12);
    return std::log(R) + sphere_area(n - 1) / sphere_area(n) * I;
}

TransfiniteResult transfinite_modulus(double R, const ConvexBody& K, const CloudParams& cp,
                                      const OptimParams& op) {
    const int n = K.dimension();
    if (K.circumradius() >= R) throw std::invalid_argument("body must lie inside the outer sphere");
    Cloud ck = boundary_cloud(K, cp.size, cp.boundary_fraction, cp.seed);
    Cloud co = sphere_plate_cloud(n, R, cp.size);
    int mk = static_cast<int>(ck.points.size());
    int mo = static_cast<int>(co.points.size());
    int m = mk + mo;
    std::vector<Vec> pts;
    pts.reserve(m);
    for (const Vec& p : ck.points) pts.push_back(p);
    for (const Vec& p : co.points) pts.push_back(p);
    std::vector<double> diag;
    diag.reserve(m);
    for (double d : ck.self_energy) diag.push_back(d);
    for (double d : co.self_energy) diag.push_back(d);
    std::vector<double> A;
    par::log_kernel_matrix(pts, diag, A);
    // signed measure nu = nu_K - nu_O: flip the off-block sign
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if ((i < mk) != (j < mk)) A[static_cast<size_t>(i) * m + j] *= -1.0;
    MinimizeOut mo2 = minimize_with_restarts(A, m, {{0, mk}, {mk, mo}}, op);
    TransfiniteResult tr;
    tr.value = mo2.energy;
    tr.stationarity_violation = mo2.stationarity;
    tr.multistart_spread = mo2.spread;
    return tr;
}

Thm22iReport thm22i_identity_check(const ConvexBody& K, const std::vector<double>& radius_factors,
                                   const CloudParams& cp, const OptimParams& op) {
    RobinResult rm = robin_mass(K, cp, op);
    Thm22iReport rep;
    rep.lhs = rm.ncap3;
    const int n = K.dimension();
    double c = std::max(1.0, K.circumradius());
    for (double f : radius_factors) {
        double R = f * c;
        TransfiniteResult tr = transfinite_modulus(R, K, cp, op);
        rep.schedule_values.push_back(tr.value - std::log(R));
    }
    double lim = rep.schedule_values.back();
    size_t s = rep.schedule_values.size();
    if (s >= 3) {
        double d1 = rep.schedule_values[s - 3], d2 = rep.schedule_values[s - 2],
               d3 = rep.schedule_values[s - 1];
        double den = (d2 - d1) - (d3 - d2);
        if (std::abs(den) > 1e-12 && std::abs(d3 - d2) < std::abs(d2 - d1))
            lim = d3 + (d3 - d2) * (d3 - d2) / den;
    }
    rep.rhs = std::exp(-lim) / ball_ncap3_quadrature(n, 1.0);
    rep.rel_discrepancy = std::abs(rep.lhs - rep.rhs) / std::max(rep.lhs, rep.rhs);
    return rep;
}

Thm22iReport thm22i_identity_check_cloud(const std::vector<Cloud>& ladder, double circumradius,
                                         int dim, const std::vector<double>& radius_factors,
                                         const CloudParams& cp, const OptimParams& op) {
    RobinResult rm = robin_mass_clouds(ladder, op);
    Thm22iReport rep;
    rep.lhs = rm.ncap3;
    double c = std::max(1.0, circumradius);
    const Cloud& top = ladder.back();
    for (double f : radius_factors) {
        double R = f * c;
        Cloud co = sphere_plate_cloud(dim, R, cp.size);
        int mk = static_cast<int>(top.points.size());
        int mo = static_cast<int>(co.points.size());
        int m = mk + mo;
        std::vector<Vec> pts = top.points;
        for (const Vec& p : co.points) pts.push_back(p);
        std::vector<double> diag = top.self_energy;
        for (double d : co.self_energy) diag.push_back(d);
        std::vector<double> A;
        par::log_kernel_matrix(pts, diag, A);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                if ((i < mk) != (j < mk)) A[static_cast<size_t>(i) * m + j] *= -1.0;
        MinimizeOut out = minimize_with_restarts(A, m, {{0, mk}, {mk, mo}}, op);
        rep.schedule_values.push_back(out.energy - std::log(R));
    }
    double lim = rep.schedule_values.back();
    size_t s = rep.schedule_values.size();
    if (s >= 3) {
        double d1 = rep.schedule_values[s - 3], d2 = rep.schedule_values[s - 2],
               d3 = rep.schedule_values[s - 1];
        double den = (d2 - d1) - (d3 - d2);
        if (std::abs(den) > 1e-12 && std::abs(d3 - d2) < std::abs(d2 - d1))
            lim = d3 + (d3 - d2) * (d3 - d2) / den;
    }
    rep.rhs = std::exp(-lim) / ball_ncap3_quadrature(dim, 1.0);
    rep.rel_discrepancy = std::abs(rep.lhs - rep.rhs) / std::max(rep.lhs, rep.rhs);
    return rep;
}

} // namespace capax::robin
