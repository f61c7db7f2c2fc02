#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "capax/sphere_grid.hpp"
#include "capax/vec.hpp"

namespace capax::geom {

struct Mat {
    // row-major n x n, identity-padded
    std::array<std::array<double, 4>, 4> a{{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}};
    Vec apply(const Vec& x) const {
        Vec y;
        for (int i = 0; i < 4; ++i) {
            double s = 0.0;
            for (int j = 0; j < 4; ++j) s += a[i][j] * x[j];
            y[i] = s;
        }
        return y;
    }
    Vec apply_transposed(const Vec& x) const {
        Vec y;
        for (int j = 0; j < 4; ++j) {
            double s = 0.0;
            for (int i = 0; i < 4; ++i) s += a[i][j] * x[i];
            y[j] = s;
        }
        return y;
    }
};

enum class BodyKind { Ball, Ellipsoid, Polytope, SupportSamples };

struct Facet {
    Vec normal;
    double offset; // support value in direction normal
};

// Convex compact set with nonempty interior (member of K^n).
// Immutable after construction; all derived structures are built eagerly.
class ConvexBody {
  public:
    ConvexBody() = default; // empty marker for result structs; dimension() == 0

    static ConvexBody ball(int dim, const Vec& center, double radius);
    static ConvexBody ellipsoid(int dim, const Vec& center, const std::vector<double>& semiaxes,
                                const Mat& rotation = Mat{});
    static ConvexBody polytope(int dim, const std::vector<Vec>& vertices);
    // Support samples are convexified on construction (self-consistency).
    static ConvexBody support_samples(std::shared_ptr<const SphereGrid> grid, std::vector<double> values);

    BodyKind kind() const { return kind_; }
    int dimension() const { return dim_; }
    const Vec& center() const { return center_; } // ball/ellipsoid only
    double radius() const { return radius_; }
    const std::vector<double>& semiaxes() const { return semiaxes_; }
    const Mat& rotation() const { return rotation_; }
    const std::vector<Vec>& vertices() const { return vertices_; } // polytope/support hull vertices
    const std::vector<Facet>& facets() const { return facets_; }
    const SphereGrid& grid() const { return *grid_; }
    std::shared_ptr<const SphereGrid> grid_ptr() const { return grid_; }
    const std::vector<double>& support_values() const { return values_; }

    // h_K(xi). If homogeneous, non-unit arguments use the 1-homogeneous
    // extension; otherwise they throw.
    double support(const Vec& xi, bool homogeneous = true) const;

    // Radial function: largest t with t*theta in K. Requires origin interior.
    double radial(const Vec& theta) const;

    // Outward unit normal at the boundary point hit by the ray along theta.
    Vec normal_on_ray(const Vec& theta) const;

    bool origin_interior() const;
    Vec interior_point() const; // a canonical interior point
    ConvexBody translated(const Vec& shift) const;
    ConvexBody scaled(double factor) const; // about the origin
    double circumradius() const;            // max |x| over K (from origin)
    double inradius_lower_bound() const;    // min over facets / analytic

    std::string describe() const;

  private:
    BodyKind kind_{};
    int dim_ = 0;
    Vec center_;
    double radius_ = 0.0;
    std::vector<double> semiaxes_;
    Mat rotation_;
    std::vector<Vec> vertices_;
    std::vector<Facet> facets_;
    std::shared_ptr<const SphereGrid> grid_;
    std::vector<double> values_;
};

} // namespace capax::geom
