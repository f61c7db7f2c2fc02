#pragma once

#include <vector>

#include "capax/vec.hpp"

namespace capax::geom {

// Convex hull of 2-d points, counterclockwise vertex order.
std::vector<int> hull2d(const std::vector<Vec>& pts);

struct HullFacet {
    int a, b, c;   // vertex indices, outward orientation
    Vec normal;    // unit outward normal
    double offset; // normal . x for points on the facet
};

// Incremental convex hull of 3-d points. Throws if the points are
// degenerate (affinely dependent within tolerance).
std::vector<HullFacet> hull3d(const std::vector<Vec>& pts);

// Vertices of the halfspace intersection {x : x.dir_i <= off_i}; the origin
// must be strictly interior. Works for dimensions 2 and 3 via duality.
std::vector<Vec> halfspace_intersection_vertices(int dim, const std::vector<Vec>& dirs,
                                                 const std::vector<double>& offs);

} // namespace capax::geom
