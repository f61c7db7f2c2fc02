#pragma once

#include <cstdint>
#include <random>

#include "capax/body.hpp"

namespace capax::geom {

// Seeded generator over convex-hull polytopes, rotated ellipsoids with
// log-uniform axis ratios in [1, 8], and Minkowski mixtures of the two.
ConvexBody random_convex_body(int dim, std::mt19937_64& rng);

} // namespace capax::geom
