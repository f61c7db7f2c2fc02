#include "capax/random_bodies.hpp"

#include <cmath>
#include <memory>

#include "capax/geometry.hpp"
#include "capax/sphere_grid.hpp"

namespace capax::geom {

namespace {

Vec random_direction(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Vec v;
    for (int d = 0; d < dim; ++d) v[d] = nd(rng);
    return normalized(v);
}

Mat random_rotation(int dim, std::mt19937_64& rng) {
    // Gram-Schmidt of a Gaussian matrix
    std::normal_distribution<double> nd(0.0, 1.0);
    Mat m;
    std::vector<Vec> cols(dim);
    for (int c = 0; c < dim; ++c) {
        Vec v;
        for (int r = 0; r < dim; ++r) v[r] = nd(rng);
        for (int p = 0; p < c; ++p) v -= dot(v, cols[p]) * cols[p];
        cols[c] = normalized(v);
    }
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) m.a[r][c] = cols[c][r];
    return m;
}

ConvexBody random_polytope(int dim, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> mcount(dim + 2, 50);
    int m = mcount(rng);
    std::vector<Vec> pts;
    pts.reserve(m);
    for (int i = 0; i < m; ++i) pts.push_back(random_direction(dim, rng));
    return ConvexBody::polytope(dim, pts);
}

ConvexBody random_ellipsoid(int dim, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> lu(0.0, std::log(8.0));
    std::vector<double> axes(dim);
    for (int d = 0; d < dim; ++d) axes[d] = std::exp(lu(rng));
    return ConvexBody::ellipsoid(dim, Vec{}, axes, random_rotation(dim, rng));
}

} // namespace

ConvexBody random_convex_body(int dim, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> kind(0, 2);
    switch (kind(rng)) {
        case 0: return random_polytope(dim, rng);
        case 1: return random_ellipsoid(dim, rng);
        default: {
            ConvexBody A = random_polytope(dim, rng);
            ConvexBody B = random_ellipsoid(dim, rng);
            std::uniform_real_distribution<double> tu(0.2, 0.8);
            double t = tu(rng);
            auto grid = std::make_shared<const SphereGrid>(
                dim == 2 ? circle_grid(256) : fibonacci_grid(512));
            ConvexBody M = minkowski_combine(t, A, 1.0 - t, B, grid);
            return M.translated(-1.0 * M.interior_point());
        }
    }
}

} // namespace capax::geom
