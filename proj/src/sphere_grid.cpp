#include "capax/sphere_grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "capax/constants.hpp"

namespace capax::geom {

double SphereGrid::total_weight() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

void SphereGrid::check_invariants() const {
    if (dimension < 2 || dimension > 4) throw std::invalid_argument("grid dimension must be 2..4");
    if (nodes.size() != weights.size()) throw std::invalid_argument("node/weight size mismatch");
    for (const Vec& x : nodes)
        if (std::abs(norm(x) - 1.0) > 1e-12) throw std::runtime_error("grid node not on unit sphere");
    double sigma = sphere_area(dimension);
    if (std::abs(total_weight() - sigma) > 1e-10 * sigma)
        throw std::runtime_error("grid weights do not sum to sigma_{n-1}");
    Vec bary;
    for (int i = 0; i < size(); ++i) bary += weights[i] * nodes[i];
    if (norm(bary) > 1e-8 * sigma) throw std::runtime_error("grid barycenter not at origin");
    for (double w : weights)
        if (!(w > 0.0)) throw std::runtime_error("nonpositive grid weight");
}

SphereGrid circle_grid(int count) {
    if (count < 4) throw std::invalid_argument("circle grid needs >= 4 nodes");
    SphereGrid g;
    g.dimension = 2;
    g.kind = "circle/" + std::to_string(count);
    g.nodes.reserve(count);
    double w = 2.0 * M_PI / count;
    for (int i = 0; i < count; ++i) {
        double a = 2.0 * M_PI * i / count;
        g.nodes.push_back(Vec(std::cos(a), std::sin(a)));
        g.weights.push_back(w);
    }
    for (int i = 0; i < count; ++i) g.simplices.push_back({i, (i + 1) % count});
    return g;
}

SphereGrid fibonacci_grid(int count) {
    if (count < 8) throw std::invalid_argument("fibonacci grid needs >= 8 nodes");
    if (count % 2) ++count; // antipodal closure needs an even count
    int half = count / 2;
    SphereGrid g;
    g.dimension = 3;
    g.kind = "fibonacci/" + std::to_string(count);
    const double golden = M_PI * (1.0 + std::sqrt(5.0));
    for (int k = 0; k < half; ++k) {
        double z = 1.0 - (2.0 * k + 1.0) / (2.0 * half); // open hemisphere-ish ladder
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        double phi = golden * k;
        Vec p(r * std::cos(phi), r * std::sin(phi), z);
        g.nodes.push_back(p);
        g.nodes.push_back(-1.0 * p);
    }
    g.weights.assign(g.nodes.size(), 4.0 * M_PI / g.nodes.size());
    return g;
}

namespace {

// Midpoint cache for subdivision so shared edges reuse the same new vertex.
int midpoint(std::vector<Vec>& verts, std::map<std::pair<int, int>, int>& cache, int a, int b) {
    auto key = std::minmax(a, b);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    Vec m = normalized(verts[a] + verts[b]);
    verts.push_back(m);
    int id = static_cast<int>(verts.size()) - 1;
    cache.emplace(key, id);
    return id;
}

double triangle_area3(const Vec& a, const Vec& b, const Vec& c) {
    return 0.5 * norm(cross(b - a, c - a));
}

// Volume of a tetrahedron embedded in R^4 spanned by three edge vectors
// (Gram determinant route).
double tet_volume4(const Vec& a, const Vec& b, const Vec& c, const Vec& d) {
    Vec u = b - a, v = c - a, w = d - a;
    double g11 = dot(u, u), g12 = dot(u, v), g13 = dot(u, w);
    double g22 = dot(v, v), g23 = dot(v, w), g33 = dot(w, w);
    double det = g11 * (g22 * g33 - g23 * g23) - g12 * (g12 * g33 - g13 * g23) +
                 g13 * (g12 * g23 - g13 * g22);
    return std::sqrt(std::max(0.0, det)) / 6.0;
}

void lump_weights(SphereGrid& g) {
    g.weights.assign(g.nodes.size(), 0.0);
    for (const auto& s : g.simplices) {
        double a = 0.0;
        if (g.dimension == 3)
            a = triangle_area3(g.nodes[s[0]], g.nodes[s[1]], g.nodes[s[2]]);
        else
            a = tet_volume4(g.nodes[s[0]], g.nodes[s[1]], g.nodes[s[2]], g.nodes[s[3]]);
        for (int v : s) g.weights[v] += a / s.size();
    }
    // Rescale flat-element areas to the exact sphere measure.
    double sigma = sphere_area(g.dimension);
    double tot = g.total_weight();
    for (double& w : g.weights) w *= sigma / tot;
}

} // namespace

SphereGrid icosphere_grid(int level) {
    if (level < 0 || level > 6) throw std::invalid_argument("icosphere level out of range");
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec> v = {
        Vec(-1, t, 0), Vec(1, t, 0), Vec(-1, -t, 0), Vec(1, -t, 0),
        Vec(0, -1, t), Vec(0, 1, t), Vec(0, -1, -t), Vec(0, 1, -t),
        Vec(t, 0, -1), Vec(t, 0, 1), Vec(-t, 0, -1), Vec(-t, 0, 1)};
    for (Vec& x : v) x = normalized(x);
    std::vector<std::array<int, 3>> f = {
        {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
        {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
        {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
    for (int l = 0; l < level; ++l) {
        std::map<std::pair<int, int>, int> cache;
        std::vector<std::array<int, 3>> nf;
        nf.reserve(4 * f.size());
        for (auto& tr : f) {
            int a = midpoint(v, cache, tr[0], tr[1]);
            int b = midpoint(v, cache, tr[1], tr[2]);
            int c = midpoint(v, cache, tr[2], tr[0]);
            nf.push_back({tr[0], a, c});
            nf.push_back({tr[1], b, a});
            nf.push_back({tr[2], c, b});
            nf.push_back({a, b, c});
        }
        f.swap(nf);
    }
    SphereGrid g;
    g.dimension = 3;
    g.kind = "icosphere/" + std::to_string(level);
    g.nodes = std::move(v);
    for (auto& tr : f) g.simplices.push_back({tr[0], tr[1], tr[2]});
    lump_weights(g);
    return g;
}

namespace {

// Gauss-Legendre nodes/weights on [-1,1] via Newton on Legendre polynomials.
void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w) {
    x.resize(m);
    w.resize(m);
    for (int i = 0; i < m; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (m + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= m; ++k) {
                double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = m * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= m; ++k) {
            double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = m * (t * p1 - p0) / (t * t - 1.0);
        x[i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
}

} // namespace

SphereGrid product4_grid(int polar, int azimuthal) {
    if (polar < 2 || azimuthal < 4) throw std::invalid_argument("product grid too small");
    if (azimuthal % 2) ++azimuthal;
    SphereGrid g;
    g.dimension = 4;
    g.kind = "product4/" + std::to_string(polar) + "x" + std::to_string(azimuthal);
    // S^3: x = (cos a, sin a cos b, sin a sin b cos phi, sin a sin b sin phi),
    // dsigma = sin^2 a * sin b * da db dphi.
    std::vector<double> ta, wa;
    gauss_legendre(polar, ta, wa); // substitution c1 = cos a over [-1,1] keeps sin a factor
    std::vector<double> tb, wb;
    gauss_legendre(polar, tb, wb);
    for (int i = 0; i < polar; ++i) {
        double ca = ta[i], sa = std::sqrt(1 - ca * ca);
        for (int j = 0; j < polar; ++j) {
            double cb = tb[j], sb = std::sqrt(1 - cb * cb);
            for (int k = 0; k < azimuthal; ++k) {
                double phi = 2.0 * M_PI * k / azimuthal;
                g.nodes.push_back(Vec(ca, sa * cb, sa * sb * std::cos(phi), sa * sb * std::sin(phi)));
                // dsigma = sin^2 a sin b da db dphi = sin a * dc1 * dc2 * dphi
                g.weights.push_back(sa * wa[i] * wb[j] * (2.0 * M_PI / azimuthal));
            }
        }
    }
    double sigma = sphere_area(4), tot = g.total_weight();
    for (double& w : g.weights) w *= sigma / tot;
    return g;
}

SphereGrid cell16_grid(int level) {
    if (level < 0 || level > 4) throw std::invalid_argument("cell16 level out of range");
    std::vector<Vec> v;
    for (int i = 0; i < 4; ++i)
        for (int s = -1; s <= 1; s += 2) {
            Vec e;
            e[i] = s;
            v.push_back(e);
        }
    // Facets of the 16-cell: one tetrahedron per sign pattern.
    std::vector<std::array<int, 4>> f;
    for (int s0 = 0; s0 < 2; ++s0)
        for (int s1 = 0; s1 < 2; ++s1)
            for (int s2 = 0; s2 < 2; ++s2)
                for (int s3 = 0; s3 < 2; ++s3)
                    f.push_back({0 + s0, 2 + s1, 4 + s2, 6 + s3});
    for (int l = 0; l < level; ++l) {
        std::map<std::pair<int, int>, int> cache;
        std::vector<std::array<int, 4>> nf;
        for (auto& tt : f) {
            // red refinement of a tetrahedron into 8, all vertices projected
            int a = tt[0], b = tt[1], c = tt[2], d = tt[3];
            int ab = midpoint(v, cache, a, b), ac = midpoint(v, cache, a, c), ad = midpoint(v, cache, a, d);
            int bc = midpoint(v, cache, b, c), bd = midpoint(v, cache, b, d), cd = midpoint(v, cache, c, d);
            nf.push_back({a, ab, ac, ad});
            nf.push_back({b, ab, bc, bd});
            nf.push_back({c, ac, bc, cd});
            nf.push_back({d, ad, bd, cd});
            nf.push_back({ab, ac, ad, cd});
            nf.push_back({ab, ac, bc, cd});
            nf.push_back({ab, ad, bd, cd});
            nf.push_back({ab, bc, bd, cd});
        }
        f.swap(nf);
    }
    SphereGrid g;
    g.dimension = 4;
    g.kind = "cell16/" + std::to_string(level);
    g.nodes = std::move(v);
    for (auto& tt : f) g.simplices.push_back({tt[0], tt[1], tt[2], tt[3]});
    lump_weights(g);
    return g;
}

SphereGrid default_quadrature_grid(int n, int count) {
    switch (n) {
        case 2: return circle_grid(count);
        case 3: return fibonacci_grid(count);
        case 4: {
            int m = std::max(4, static_cast<int>(std::cbrt(static_cast<double>(count))));
            return product4_grid(m, 2 * m);
        }
        default: throw std::invalid_argument("unsupported dimension");
    }
}

SphereGrid default_mesh_grid(int n, int level) {
    switch (n) {
        case 2: return circle_grid(std::max(16, 32 << level));
        case 3: return icosphere_grid(level);
        case 4: return cell16_grid(level);
        default: throw std::invalid_argument("unsupported dimension");
    }
}

} // namespace capax::geom
