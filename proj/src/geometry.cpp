#include "capax/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "capax/constants.hpp"
#include "capax/hull.hpp"

namespace capax::geom {

namespace {

void check_same_dim(const ConvexBody& A, const ConvexBody& B) {
    if (A.dimension() != B.dimension()) throw std::invalid_argument("dimension mismatch");
}

const SphereGrid& internal_grid(int dim) {
    static const SphereGrid g2 = circle_grid(2048);
    static const SphereGrid g3 = fibonacci_grid(8192);
    static const SphereGrid g4 = product4_grid(24, 48);
    switch (dim) {
        case 2: return g2;
        case 3: return g3;
        default: return g4;
    }
}

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Eigenvalues of a small symmetric matrix (size 1..3) by cyclic Jacobi.
std::vector<double> sym_eigenvalues(std::vector<std::vector<double>> a) {
    int n = static_cast<int>(a.size());
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
        if (off < 1e-26) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-18) continue;
                double phi = 0.5 * std::atan2(2 * a[p][q], a[q][q] - a[p][p]);
                double c = std::cos(phi), s = std::sin(phi);
                for (int k = 0; k < n; ++k) {
                    double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = a[i][i];
    std::sort(ev.begin(), ev.end());
    return ev;
}

} // namespace

double support(const ConvexBody& K, const Vec& xi, bool homogeneous) {
    return K.support(xi, homogeneous);
}

double diameter(const ConvexBody& K) {
    switch (K.kind()) {
        case BodyKind::Ball:
            return 2.0 * K.radius();
        case BodyKind::Ellipsoid: {
            double a = 0.0;
            for (double s : K.semiaxes()) a = std::max(a, s);
            return 2.0 * a;
        }
        case BodyKind::Polytope:
        case BodyKind::SupportSamples: {
            double d = 0.0;
            const auto& v = K.vertices();
            for (size_t i = 0; i < v.size(); ++i)
                for (size_t j = i + 1; j < v.size(); ++j) d = std::max(d, dist(v[i], v[j]));
            return d;
        }
    }
    throw std::logic_error("unreachable");
}

double volume(const ConvexBody& K) {
    int n = K.dimension();
    switch (K.kind()) {
        case BodyKind::Ball:
            return ball_volume(n) * std::pow(K.radius(), n);
        case BodyKind::Ellipsoid: {
            double v = ball_volume(n);
            for (double a : K.semiaxes()) v *= a;
            return v;
        }
        case BodyKind::Polytope: {
            const auto& verts = K.vertices();
            if (n == 2) {
                double a2 = 0.0;
                int m = static_cast<int>(verts.size());
                for (int i = 0; i < m; ++i) {
                    const Vec& p = verts[i];
                    const Vec& q = verts[(i + 1) % m];
                    a2 += p[0] * q[1] - p[1] * q[0];
                }
                return 0.5 * a2;
            }
            // fan of tetrahedra over hull facets from the vertex centroid
            Vec c = K.interior_point();
            std::vector<HullFacet> fs = hull3d(verts);
            double v = 0.0;
            for (const HullFacet& f : fs) {
                Vec u1 = verts[f.b] - verts[f.a], u2 = verts[f.c] - verts[f.a];
                double area = 0.5 * norm(cross(u1, u2));
                double h = dot(f.normal, verts[f.a] - c);
                v += area * h / 3.0;
            }
            return v;
        }
        case BodyKind::SupportSamples: {
            // radial quadrature about an interior point
            ConvexBody Kc = K.translated(-1.0 * K.interior_point());
            const SphereGrid& g = K.grid();
            double v = 0.0;
            for (int i = 0; i < g.size(); ++i) v += std::pow(Kc.radial(g.nodes[i]), n) * g.weights[i];
            return v / n;
        }
    }
    throw std::logic_error("unreachable");
}

double surface_area(const ConvexBody& K) {
    int n = K.dimension();
    switch (K.kind()) {
        case BodyKind::Ball:
            return sphere_area(n) * std::pow(K.radius(), n - 1);
        case BodyKind::Ellipsoid: {
            ConvexBody Kc = K.translated(-1.0 * K.center());
            const SphereGrid& g = internal_grid(n);
            double s = 0.0;
            for (int i = 0; i < g.size(); ++i) {
                double r = Kc.radial(g.nodes[i]);
                Vec nu = Kc.normal_on_ray(g.nodes[i]);
                s += std::pow(r, n - 1) / dot(nu, g.nodes[i]) * g.weights[i];
            }
            return s;
        }
        case BodyKind::Polytope: {
            const auto& verts = K.vertices();
            if (n == 2) {
                double p = 0.0;
                int m = static_cast<int>(verts.size());
                for (int i = 0; i < m; ++i) p += dist(verts[i], verts[(i + 1) % m]);
                return p;
            }
            std::vector<HullFacet> fs = hull3d(verts);
            double s = 0.0;
            for (const HullFacet& f : fs)
                s += 0.5 * norm(cross(verts[f.b] - verts[f.a], verts[f.c] - verts[f.a]));
            return s;
        }
        case BodyKind::SupportSamples: {
            ConvexBody Kc = K.translated(-1.0 * K.interior_point());
            const SphereGrid& g = K.grid();
            double s = 0.0;
            for (int i = 0; i < g.size(); ++i) {
                double r = Kc.radial(g.nodes[i]);
                Vec nu = Kc.normal_on_ray(g.nodes[i]);
                s += std::pow(r, n - 1) / dot(nu, g.nodes[i]) * g.weights[i];
            }
            return s;
        }
    }
    throw std::logic_error("unreachable");
}

double mean_width(const ConvexBody& K, const SphereGrid& grid) {
    if (K.dimension() != grid.dimension) throw std::invalid_argument("dimension mismatch");
    double s = 0.0;
    for (int i = 0; i < grid.size(); ++i) s += K.support(grid.nodes[i]) * grid.weights[i];
    return 2.0 * s / sphere_area(K.dimension());
}

ConvexBody minkowski_combine(double t0, const ConvexBody& K0, double t1, const ConvexBody& K1,
                             std::shared_ptr<const SphereGrid> grid) {
    check_same_dim(K0, K1);
    if (t0 < 0.0 || t1 < 0.0) throw std::invalid_argument("coefficients must be nonnegative");
    if (t0 == 0.0 && t1 == 0.0) throw std::invalid_argument("both coefficients zero");
    if (!grid || grid->dimension != K0.dimension()) throw std::invalid_argument("grid mismatch");
    std::vector<double> h(grid->size());
    for (int i = 0; i < grid->size(); ++i)
        h[i] = t0 * K0.support(grid->nodes[i]) + t1 * K1.support(grid->nodes[i]);
    return ConvexBody::support_samples(std::move(grid), std::move(h));
}

double hausdorff_distance(const ConvexBody& A, const ConvexBody& B, const SphereGrid& grid) {
    check_same_dim(A, B);
    if (A.dimension() != grid.dimension) throw std::invalid_argument("dimension mismatch");
    double d = 0.0;
    for (const Vec& xi : grid.nodes) d = std::max(d, std::abs(A.support(xi) - B.support(xi)));
    return d;
}

std::vector<double> principal_curvatures(const ConvexBody& K, const Vec& x) {
    int n = K.dimension();
    switch (K.kind()) {
        case BodyKind::Ball:
            return std::vector<double>(n - 1, 1.0 / K.radius());
        case BodyKind::Ellipsoid: {
            // implicit F = |diag(1/a) R^T (x-c)|^2, shape operator = P Hess(F) P / |grad F|
            Vec y = K.rotation().apply_transposed(x - K.center());
            Vec grad_local;
            for (int i = 0; i < n; ++i) grad_local[i] = 2.0 * y[i] / (K.semiaxes()[i] * K.semiaxes()[i]);
            Vec grad = K.rotation().apply(grad_local);
            double gn = norm(grad);
            Vec nu = (1.0 / gn) * grad;
            // orthonormal tangent basis by Gram-Schmidt against nu
            std::vector<Vec> basis;
            for (int i = 0; i < n && static_cast<int>(basis.size()) < n - 1; ++i) {
                Vec e;
                e[i] = 1.0;
                Vec t = e - dot(e, nu) * nu;
                for (const Vec& b : basis) t -= dot(t, b) * b;
                double tn = norm(t);
                if (tn > 1e-8) basis.push_back((1.0 / tn) * t);
            }
            // Hess(F) = 2 R diag(1/a^2) R^T
            auto hess_apply = [&](const Vec& v) {
                Vec u = K.rotation().apply_transposed(v);
                for (int i = 0; i < n; ++i) u[i] *= 2.0 / (K.semiaxes()[i] * K.semiaxes()[i]);
                return K.rotation().apply(u);
            };
            int m = static_cast<int>(basis.size());
            std::vector<std::vector<double>> T(m, std::vector<double>(m));
            for (int i = 0; i < m; ++i) {
                Vec hv = hess_apply(basis[i]);
                for (int j = 0; j < m; ++j) T[i][j] = dot(basis[j], hv) / gn;
            }
            return sym_eigenvalues(std::move(T));
        }
        default:
            throw std::invalid_argument("principal curvatures need a smooth body");
    }
}

double integral_mean_curvature(const ConvexBody& K, int k) {
    int n = K.dimension();
    if (k < 0 || k > n - 1) throw std::invalid_argument("curvature order out of range");
    if (k == 0) return surface_area(K);
    if (K.kind() == BodyKind::Polytope || K.kind() == BodyKind::SupportSamples)
        throw std::invalid_argument("integral mean curvature of order >= 1 needs a smooth body");
    if (K.kind() == BodyKind::Ball)
        return sphere_area(n) * std::pow(K.radius(), n - 1 - k);
    const SphereGrid& g = internal_grid(n);
    std::vector<BoundarySample> bs = boundary_samples(K.translated(-1.0 * K.center()), g);
    double mk = 0.0;
    for (const BoundarySample& s : bs) {
        std::vector<double> kappa = principal_curvatures(K.translated(-1.0 * K.center()), s.x);
        // normalized elementary symmetric function of the curvatures
        double e = 0.0;
        int m = static_cast<int>(kappa.size());
        if (k == 1) {
            for (double c : kappa) e += c;
        } else if (k == 2 && m >= 2) {
            for (int i = 0; i < m; ++i)
                for (int j = i + 1; j < m; ++j) e += kappa[i] * kappa[j];
        } else if (k == 3 && m >= 3) {
            e = kappa[0] * kappa[1] * kappa[2];
        }
        mk += e / binom(n - 1, k) * s.dS;
    }
    return mk;
}

namespace {

// Direct parallel-body surface area for non-smooth bodies: support values
// h + t on a dense grid, then exact area of the halfspace intersection.
double parallel_area_nonsmooth(const ConvexBody& K, double t) {
    int n = K.dimension();
    const SphereGrid& g = internal_grid(n);
    Vec c = K.interior_point();
    ConvexBody Kc = K.translated(-1.0 * c);
    std::vector<double> h(g.size());
    for (int i = 0; i < g.size(); ++i) h[i] = Kc.support(g.nodes[i]) + t;
    std::vector<Vec> verts = halfspace_intersection_vertices(n, g.nodes, h);
    if (n == 2) {
        std::vector<int> hull = hull2d(verts);
        double p = 0.0;
        int m = static_cast<int>(hull.size());
        for (int i = 0; i < m; ++i) p += dist(verts[hull[i]], verts[hull[(i + 1) % m]]);
        return p;
    }
    std::vector<HullFacet> fs = hull3d(verts);
    double s = 0.0;
    for (const HullFacet& f : fs)
        s += 0.5 * norm(cross(verts[f.b] - verts[f.a], verts[f.c] - verts[f.a]));
    return s;
}

} // namespace

double steiner_area(const ConvexBody& K, double t) {
    if (t < 0.0) throw std::invalid_argument("parallel distance must be nonnegative");
    int n = K.dimension();
    if (K.kind() == BodyKind::Ball)
        return sphere_area(n) * std::pow(K.radius() + t, n - 1);
    if (n == 2) return surface_area(K) + 2.0 * M_PI * t; // M_1 = 2 pi for every convex planar body
    if (K.kind() == BodyKind::Ellipsoid) {
        std::vector<double> c = steiner_coefficients(K);
        double s = 0.0, tp = 1.0;
        for (double ck : c) {
            s += ck * tp;
            tp *= t;
        }
        return s;
    }
    return parallel_area_nonsmooth(K, t);
}

std::vector<double> steiner_coefficients(const ConvexBody& K) {
    int n = K.dimension();
    double sigma = sphere_area(n);
    if (K.kind() == BodyKind::Ball) {
        std::vector<double> c(n);
        for (int k = 0; k < n; ++k) c[k] = sigma * binom(n - 1, k) * std::pow(K.radius(), n - 1 - k);
        return c;
    }
    if (n == 2) return {surface_area(K), 2.0 * M_PI};
    if (K.kind() == BodyKind::Ellipsoid) {
        if (n == 3) return {surface_area(K), 2.0 * integral_mean_curvature(K, 1), sigma};
        return {surface_area(K), 3.0 * integral_mean_curvature(K, 1), 3.0 * integral_mean_curvature(K, 2),
                sigma};
    }
    if (n != 3) throw std::invalid_argument("steiner coefficients for non-smooth bodies need n<=3");
    // fit the middle coefficient from parallel areas, leading term pinned
    double s0 = surface_area(K);
    double rs = K.circumradius() - norm(K.interior_point());
    double num = 0.0, den = 0.0;
    for (double f : {0.25, 0.5, 1.0, 2.0}) {
        double t = f * rs;
        double resid = parallel_area_nonsmooth(K, t) - s0 - sigma * t * t;
        num += resid * t;
        den += t * t;
    }
    return {s0, num / den, sigma};
}

std::vector<double> convexify(const SphereGrid& grid, const std::vector<double>& values) {
    if (static_cast<int>(values.size()) != grid.size())
        throw std::invalid_argument("one value per grid node required");
    for (double h : values)
        if (!(h > 0.0)) throw std::invalid_argument("support values must be positive");
    std::vector<Vec> verts = halfspace_intersection_vertices(grid.dimension, grid.nodes, values);
    std::vector<double> out(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        double h = -1e300;
        for (const Vec& v : verts) h = std::max(h, dot(grid.nodes[i], v));
        out[i] = h;
    }
    return out;
}

std::vector<BoundarySample> boundary_samples(const ConvexBody& K, const SphereGrid& grid) {
    if (K.dimension() != grid.dimension) throw std::invalid_argument("dimension mismatch");
    if (!K.origin_interior())
        throw std::runtime_error("boundary samples need the origin in the interior");
    int n = K.dimension();
    std::vector<BoundarySample> out(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        const Vec& th = grid.nodes[i];
        double r = K.radial(th);
        Vec nu = K.normal_on_ray(th);
        out[i].x = r * th;
        out[i].normal = nu;
        out[i].dS = std::pow(r, n - 1) / dot(nu, th) * grid.weights[i];
    }
    return out;
}

} // namespace capax::geom
