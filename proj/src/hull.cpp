#include "capax/hull.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace capax::geom {

std::vector<int> hull2d(const std::vector<Vec>& pts) {
    int n = static_cast<int>(pts.size());
    if (n < 3) throw std::invalid_argument("hull2d needs >= 3 points");
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int i, int j) {
        if (pts[i][0] != pts[j][0]) return pts[i][0] < pts[j][0];
        return pts[i][1] < pts[j][1];
    });
    auto cr = [&](int o, int a, int b) {
        return (pts[a][0] - pts[o][0]) * (pts[b][1] - pts[o][1]) -
               (pts[a][1] - pts[o][1]) * (pts[b][0] - pts[o][0]);
    };
    std::vector<int> h(2 * n);
    int k = 0;
    for (int ii = 0; ii < n; ++ii) {
        int i = idx[ii];
        while (k >= 2 && cr(h[k - 2], h[k - 1], i) <= 0) --k;
        h[k++] = i;
    }
    int lower = k + 1;
    for (int ii = n - 2; ii >= 0; --ii) {
        int i = idx[ii];
        while (k >= lower && cr(h[k - 2], h[k - 1], i) <= 0) --k;
        h[k++] = i;
    }
    h.resize(k - 1);
    if (h.size() < 3) throw std::runtime_error("degenerate 2-d point set");
    return h;
}

namespace {

struct Face {
    int a, b, c;
    Vec n; // not normalized during construction
    double off;
    bool alive = true;
};

Vec face_normal(const std::vector<Vec>& p, int a, int b, int c) {
    return cross(p[b] - p[a], p[c] - p[a]);
}

} // namespace

std::vector<HullFacet> hull3d(const std::vector<Vec>& pts) {
    int n = static_cast<int>(pts.size());
    if (n < 4) throw std::invalid_argument("hull3d needs >= 4 points");

    double scale = 0.0;
    for (const Vec& p : pts) scale = std::max(scale, norm(p));
    if (scale == 0.0) throw std::invalid_argument("all points at origin");
    const double eps = 1e-10 * scale;

    // initial simplex: extreme pair, then max-area, then max-volume
    int i0 = 0, i1 = 0;
    double best = -1.0;
    for (int d = 0; d < 3; ++d) {
        int lo = 0, hi = 0;
        for (int i = 1; i < n; ++i) {
            if (pts[i][d] < pts[lo][d]) lo = i;
            if (pts[i][d] > pts[hi][d]) hi = i;
        }
        double w = pts[hi][d] - pts[lo][d];
        if (w > best) {
            best = w;
            i0 = lo;
            i1 = hi;
        }
    }
    if (dist(pts[i0], pts[i1]) < eps) throw std::runtime_error("degenerate 3-d point set");
    int i2 = -1;
    best = eps;
    for (int i = 0; i < n; ++i) {
        double a = norm(cross(pts[i1] - pts[i0], pts[i] - pts[i0]));
        if (a > best) {
            best = a;
            i2 = i;
        }
    }
    if (i2 < 0) throw std::runtime_error("collinear 3-d point set");
    int i3 = -1;
    best = eps * scale;
    Vec nrm = face_normal(pts, i0, i1, i2);
    for (int i = 0; i < n; ++i) {
        double v = std::abs(dot(nrm, pts[i] - pts[i0]));
        if (v > best) {
            best = v;
            i3 = i;
        }
    }
    if (i3 < 0) throw std::runtime_error("coplanar 3-d point set");

    std::vector<Face> faces;
    auto add_face = [&](int a, int b, int c, const Vec& inside) {
        Face f{a, b, c, face_normal(pts, a, b, c), 0.0, true};
        if (dot(f.n, inside - pts[a]) > 0) {
            std::swap(f.b, f.c);
            f.n = -1.0 * f.n;
        }
        f.off = dot(f.n, pts[f.a]);
        faces.push_back(f);
    };
    Vec centroid = 0.25 * (pts[i0] + pts[i1] + pts[i2] + pts[i3]);
    add_face(i0, i1, i2, centroid);
    add_face(i0, i1, i3, centroid);
    add_face(i0, i2, i3, centroid);
    add_face(i1, i2, i3, centroid);

    for (int i = 0; i < n; ++i) {
        if (i == i0 || i == i1 || i == i2 || i == i3) continue;
        // collect visible faces
        std::vector<int> vis;
        for (int fi = 0; fi < static_cast<int>(faces.size()); ++fi) {
            Face& f = faces[fi];
            if (!f.alive) continue;
            if (dot(f.n, pts[i]) - f.off > eps * std::max(1.0, norm(f.n)))
                vis.push_back(fi);
        }
        if (vis.empty()) continue;
        // horizon = edges of visible faces shared with exactly one visible face
        std::map<std::pair<int, int>, int> edge_count;
        auto bump = [&](int a, int b) {
            auto key = std::minmax(a, b);
            edge_count[key]++;
        };
        for (int fi : vis) {
            Face& f = faces[fi];
            bump(f.a, f.b);
            bump(f.b, f.c);
            bump(f.c, f.a);
            f.alive = false;
        }
        for (int fi : vis) {
            Face f = faces[fi];
            std::array<std::pair<int, int>, 3> es = {
                std::make_pair(f.a, f.b), std::make_pair(f.b, f.c), std::make_pair(f.c, f.a)};
            for (auto& e : es) {
                auto key = std::minmax(e.first, e.second);
                if (edge_count[key] == 1) add_face(e.first, e.second, i, centroid);
            }
        }
    }

    std::vector<HullFacet> out;
    for (const Face& f : faces) {
        if (!f.alive) continue;
        double s = norm(f.n);
        if (s < eps * eps) continue;
        HullFacet hf;
        hf.a = f.a;
        hf.b = f.b;
        hf.c = f.c;
        hf.normal = (1.0 / s) * f.n;
        hf.offset = dot(hf.normal, pts[f.a]);
        out.push_back(hf);
    }
    if (out.size() < 4) throw std::runtime_error("hull3d produced a degenerate hull");
    return out;
}

std::vector<Vec> halfspace_intersection_vertices(int dim, const std::vector<Vec>& dirs,
                                                 const std::vector<double>& offs) {
    if (dirs.size() != offs.size()) throw std::invalid_argument("dirs/offs size mismatch");
    int m = static_cast<int>(dirs.size());
    for (double h : offs)
        if (!(h > 0.0)) throw std::runtime_error("halfspace intersection: origin not strictly interior");
    // duality: vertex of the intersection <-> facet of hull{dirs_i / offs_i}
    std::vector<Vec> dual(m);
    for (int i = 0; i < m; ++i) dual[i] = (1.0 / offs[i]) * dirs[i];
    std::vector<Vec> verts;
    if (dim == 2) {
        std::vector<int> h = hull2d(dual);
        int k = static_cast<int>(h.size());
        for (int i = 0; i < k; ++i) {
            const Vec& p = dual[h[i]];
            const Vec& q = dual[h[(i + 1) % k]];
            // primal vertex x with p.x = 1, q.x = 1
            double det = p[0] * q[1] - p[1] * q[0];
            if (std::abs(det) < 1e-14) continue;
            verts.push_back(Vec((q[1] - p[1]) / det, (p[0] - q[0]) / det));
        }
    } else if (dim == 3) {
        std::vector<HullFacet> fs = hull3d(dual);
        for (const HullFacet& f : fs) {
            const Vec &p = dual[f.a], &q = dual[f.b], &r = dual[f.c];
            // solve [p;q;r] x = 1 via cross products
            Vec n1 = cross(q - p, r - p);
            double den = dot(n1, p);
            if (std::abs(den) < 1e-14) continue;
            // x = (cross(q,r) + cross(r,p) + cross(p,q)) / det[p q r]
            Vec x = cross(q, r) + cross(r, p) + cross(p, q);
            double det = dot(p, cross(q, r));
            if (std::abs(det) < 1e-14) continue;
            verts.push_back((1.0 / det) * x);
        }
    } else {
        throw std::invalid_argument("halfspace intersection supports dimensions 2 and 3");
    }
    if (verts.empty()) throw std::runtime_error("empty halfspace intersection");
    return verts;
}

} // namespace capax::geom
