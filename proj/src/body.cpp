#include "capax/body.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "capax/constants.hpp"
#include "capax/hull.hpp"

namespace capax::geom {

namespace {

void check_dim(int dim) {
    if (dim < 2 || dim > 4) throw std::invalid_argument("body dimension must be 2..4");
}

std::vector<Vec> dedup_points(std::vector<Vec> pts, double tol) {
    std::vector<Vec> out;
    for (const Vec& p : pts) {
        bool dup = false;
        for (const Vec& q : out)
            if (dist(p, q) < tol) {
                dup = true;
                break;
            }
        if (!dup) out.push_back(p);
    }
    return out;
}

} // namespace

ConvexBody ConvexBody::ball(int dim, const Vec& center, double radius) {
    check_dim(dim);
    if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
    ConvexBody b;
    b.kind_ = BodyKind::Ball;
    b.dim_ = dim;
    b.center_ = center;
    b.radius_ = radius;
    return b;
}

ConvexBody ConvexBody::ellipsoid(int dim, const Vec& center, const std::vector<double>& semiaxes,
                                 const Mat& rotation) {
    check_dim(dim);
    if (static_cast<int>(semiaxes.size()) != dim)
        throw std::invalid_argument("ellipsoid needs one semiaxis per dimension");
    for (double a : semiaxes)
        if (!(a > 0.0)) throw std::invalid_argument("semiaxes must be positive");
    ConvexBody b;
    b.kind_ = BodyKind::Ellipsoid;
    b.dim_ = dim;
    b.center_ = center;
    b.semiaxes_ = semiaxes;
    b.rotation_ = rotation;
    return b;
}

ConvexBody ConvexBody::polytope(int dim, const std::vector<Vec>& vertices) {
    check_dim(dim);
    if (dim == 4) throw std::invalid_argument("polytope bodies support dimensions 2 and 3");
    if (static_cast<int>(vertices.size()) < dim + 1)
        throw std::invalid_argument("polytope needs at least n+1 vertices");
    ConvexBody b;
    b.kind_ = BodyKind::Polytope;
    b.dim_ = dim;
    double scale = 0.0;
    for (const Vec& v : vertices) scale = std::max(scale, norm(v));
    if (dim == 2) {
        std::vector<int> h = hull2d(vertices);
        int k = static_cast<int>(h.size());
        double area2 = 0.0;
        for (int i = 0; i < k; ++i) {
            const Vec& p = vertices[h[i]];
            const Vec& q = vertices[h[(i + 1) % k]];
            area2 += p[0] * q[1] - p[1] * q[0];
        }
        if (area2 <= 1e-12 * scale * scale)
            throw std::runtime_error("degenerate polytope (empty interior)");
        for (int i : h) b.vertices_.push_back(vertices[i]);
        for (int i = 0; i < k; ++i) {
            const Vec& p = b.vertices_[i];
            const Vec& q = b.vertices_[(i + 1) % k];
            Vec e = q - p;
            Vec nrm = normalized(Vec(e[1], -e[0])); // outward for ccw order
            b.facets_.push_back({nrm, dot(nrm, p)});
        }
    } else {
        std::vector<HullFacet> fs = hull3d(vertices); // throws on degenerate input
        std::vector<bool> used(vertices.size(), false);
        for (const HullFacet& f : fs) {
            used[f.a] = used[f.b] = used[f.c] = true;
            b.facets_.push_back({f.normal, f.offset});
        }
        for (size_t i = 0; i < vertices.size(); ++i)
            if (used[i]) b.vertices_.push_back(vertices[i]);
    }
    return b;
}

ConvexBody ConvexBody::support_samples(std::shared_ptr<const SphereGrid> grid,
                                       std::vector<double> values) {
    if (!grid) throw std::invalid_argument("support samples need a grid");
    int dim = grid->dimension;
    if (dim == 4) throw std::invalid_argument("support-sample bodies support dimensions 2 and 3");
    if (static_cast<int>(values.size()) != grid->size())
        throw std::invalid_argument("one support value per grid node required");
    for (double h : values)
        if (!(h > 0.0)) throw std::invalid_argument("support values must be positive (origin interior)");
    ConvexBody b;
    b.kind_ = BodyKind::SupportSamples;
    b.dim_ = dim;
    b.grid_ = std::move(grid);
    // convexify: vertices of the halfspace intersection, then re-evaluate
    std::vector<Vec> verts =
        halfspace_intersection_vertices(dim, b.grid_->nodes, values);
    double scale = 0.0;
    for (const Vec& v : verts) scale = std::max(scale, norm(v));
    b.vertices_ = dedup_points(std::move(verts), 1e-10 * scale);
    b.values_.resize(b.grid_->size());
    for (int i = 0; i < b.grid_->size(); ++i) {
        double h = -1e300;
        for (const Vec& v : b.vertices_) h = std::max(h, dot(b.grid_->nodes[i], v));
        b.values_[i] = h;
        b.facets_.push_back({b.grid_->nodes[i], h});
    }
    return b;
}

double ConvexBody::support(const Vec& xi, bool homogeneous) const {
    double s = norm(xi);
    if (s == 0.0) throw std::invalid_argument("support direction must be nonzero");
    if (!homogeneous && std::abs(s - 1.0) > 1e-12)
        throw std::invalid_argument("non-unit direction with homogeneous extension disabled");
    switch (kind_) {
        case BodyKind::Ball:
            return dot(center_, xi) + radius_ * s;
        case BodyKind::Ellipsoid: {
            Vec u = rotation_.apply_transposed(xi);
            double q = 0.0;
            for (int i = 0; i < dim_; ++i) q += semiaxes_[i] * semiaxes_[i] * u[i] * u[i];
            return dot(center_, xi) + std::sqrt(q);
        }
        case BodyKind::Polytope:
        case BodyKind::SupportSamples: {
            double h = -1e300;
            for (const Vec& v : vertices_) h = std::max(h, dot(xi, v));
            return h;
        }
    }
    throw std::logic_error("unreachable");
}

double ConvexBody::radial(const Vec& theta) const {
    switch (kind_) {
        case BodyKind::Ball: {
            // |t theta - c| = r, largest root
            double b = dot(theta, center_);
            double c = norm2(center_) - radius_ * radius_;
            double disc = b * b - c;
            if (disc < 0.0 || b + std::sqrt(disc) <= 0.0)
                throw std::runtime_error("radial function: origin not interior");
            return b + std::sqrt(disc);
        }
        case BodyKind::Ellipsoid: {
            Vec y = rotation_.apply_transposed(theta);
            Vec z = rotation_.apply_transposed(center_);
            for (int i = 0; i < dim_; ++i) {
                y[i] /= semiaxes_[i];
                z[i] /= semiaxes_[i];
            }
            double A = norm2(y), B = dot(y, z), C = norm2(z) - 1.0;
            double disc = B * B - A * C;
            if (C >= 0.0 || disc < 0.0) throw std::runtime_error("radial function: origin not interior");
            return (B + std::sqrt(disc)) / A;
        }
        case BodyKind::Polytope:
        case BodyKind::SupportSamples: {
            double t = 1e300;
            for (const Facet& f : facets_) {
                double d = dot(f.normal, theta);
                if (d > 1e-14) t = std::min(t, f.offset / d);
                else if (f.offset <= 0.0)
                    throw std::runtime_error("radial function: origin not interior");
            }
            if (!(t > 0.0) || t == 1e300) throw std::runtime_error("radial function failed");
            return t;
        }
    }
    throw std::logic_error("unreachable");
}

Vec ConvexBody::normal_on_ray(const Vec& theta) const {
    switch (kind_) {
        case BodyKind::Ball: {
            double t = radial(theta);
            return normalized(t * theta - center_);
        }
        case BodyKind::Ellipsoid: {
            double t = radial(theta);
            Vec u = rotation_.apply_transposed(t * theta - center_);
            for (int i = 0; i < dim_; ++i) u[i] /= semiaxes_[i] * semiaxes_[i];
            return normalized(rotation_.apply(u));
        }
        case BodyKind::Polytope:
        case BodyKind::SupportSamples: {
            double t = 1e300;
            const Facet* best = nullptr;
            for (const Facet& f : facets_) {
                double d = dot(f.normal, theta);
                if (d > 1e-14) {
                    double s = f.offset / d;
                    if (s < t) {
                        t = s;
                        best = &f;
                    }
                }
            }
            if (!best) throw std::runtime_error("normal_on_ray failed");
            return best->normal;
        }
    }
    throw std::logic_error("unreachable");
}

bool ConvexBody::origin_interior() const {
    switch (kind_) {
        case BodyKind::Ball:
            return norm(center_) < radius_;
        case BodyKind::Ellipsoid: {
            Vec z = rotation_.apply_transposed(center_);
            double q = 0.0;
            for (int i = 0; i < dim_; ++i) q += z[i] * z[i] / (semiaxes_[i] * semiaxes_[i]);
            return q < 1.0;
        }
        case BodyKind::Polytope:
        case BodyKind::SupportSamples: {
            for (const Facet& f : facets_)
                if (f.offset <= 0.0) return false;
            return true;
        }
    }
    return false;
}

Vec ConvexBody::interior_point() const {
    switch (kind_) {
        case BodyKind::Ball:
        case BodyKind::Ellipsoid:
            return center_;
        case BodyKind::Polytope:
        case BodyKind::SupportSamples: {
            Vec c;
            for (const Vec& v : vertices_) c += v;
            return (1.0 / vertices_.size()) * c;
        }
    }
    return Vec{};
}

ConvexBody ConvexBody::translated(const Vec& shift) const {
    ConvexBody b = *this;
    switch (kind_) {
        case BodyKind::Ball:
        case BodyKind::Ellipsoid:
            b.center_ += shift;
            break;
        case BodyKind::Polytope:
        case BodyKind::SupportSamples:
            for (Vec& v : b.vertices_) v += shift;
            for (Facet& f : b.facets_) f.offset += dot(f.normal, shift);
            for (size_t i = 0; i < b.values_.size(); ++i)
                b.values_[i] += dot(b.grid_->nodes[i], shift);
            break;
    }
    return b;
}

ConvexBody ConvexBody::scaled(double factor) const {
    if (!(factor > 0.0)) throw std::invalid_argument("scale factor must be positive");
    ConvexBody b = *this;
    b.center_ *= factor;
    b.radius_ *= factor;
    for (double& a : b.semiaxes_) a *= factor;
    for (Vec& v : b.vertices_) v *= factor;
    for (Facet& f : b.facets_) f.offset *= factor;
    for (double& h : b.values_) h *= factor;
    return b;
}

double ConvexBody::circumradius() const {
    switch (kind_) {
        case BodyKind::Ball:
            return norm(center_) + radius_;
        case BodyKind::Ellipsoid: {
            double a = 0.0;
            for (double s : semiaxes_) a = std::max(a, s);
            return norm(center_) + a;
        }
        case BodyKind::Polytope:
        case BodyKind::SupportSamples: {
            double r = 0.0;
            for (const Vec& v : vertices_) r = std::max(r, norm(v));
            return r;
        }
    }
    return 0.0;
}

double ConvexBody::inradius_lower_bound() const {
    switch (kind_) {
        case BodyKind::Ball:
            return radius_ - norm(center_);
        case BodyKind::Ellipsoid: {
            double a = 1e300;
            for (double s : semiaxes_) a = std::min(a, s);
            return a - norm(center_);
        }
        case BodyKind::Polytope:
        case BodyKind::SupportSamples: {
            double r = 1e300;
            for (const Facet& f : facets_) r = std::min(r, f.offset);
            return r;
        }
    }
    return 0.0;
}

std::string ConvexBody::describe() const {
    switch (kind_) {
        case BodyKind::Ball:
            return "ball(r=" + std::to_string(radius_) + ")";
        case BodyKind::Ellipsoid: {
            std::string s = "ellipsoid(";
            for (int i = 0; i < dim_; ++i) s += (i ? "," : "") + std::to_string(semiaxes_[i]);
            return s + ")";
        }
        case BodyKind::Polytope:
            return "polytope(" + std::to_string(vertices_.size()) + " vertices)";
        case BodyKind::SupportSamples:
            return "support(" + grid_->kind + ")";
    }
    return "?";
}

} // namespace capax::geom
