#pragma once

#include <array>
#include <memory>
#include <vector>

#include "capax/body.hpp"
#include "capax/geometry.hpp"

namespace capax::pde {

using geom::ConvexBody;
using geom::SphereGrid;

// Annular tensor mesh between dK and the sphere |x| = R: one node per
// (sphere node, radial layer), radii log-graded per ray, prisms split into
// n-simplices by the global-vertex-order rule (conforming across faces).
struct AnnulusMesh {
    int dim = 0;
    std::shared_ptr<const SphereGrid> sphere; // must carry simplices
    int layers = 0;                           // radial intervals
    double outer_radius = 0.0;
    std::vector<double> inner_radius; // r_K(theta_i) per sphere node
    std::vector<Vec> coords;          // node(layer, i) = layer*S + i
    std::vector<std::array<int, 5>> elems; // n+1 ids, tail = -1

    // precomputed P1 element data: volume and barycentric gradients
    std::vector<double> elem_vol;
    std::vector<double> elem_grad; // (n+1)*dim doubles per element

    int sphere_size() const { return sphere->size(); }
    int node(int layer, int i) const { return layer * sphere->size() + i; }
    int node_count() const { return (layers + 1) * sphere->size(); }
    int elem_count() const { return static_cast<int>(elems.size()); }
};

// Throws if K is not strictly inside R*B^n or the origin is not interior.
std::shared_ptr<AnnulusMesh> build_annulus_mesh(const ConvexBody& K, double R,
                                                std::shared_ptr<const SphereGrid> sphere,
                                                int layers);

} // namespace capax::pde
