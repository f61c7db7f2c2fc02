#pragma once

#include <string>
#include <vector>

#include "capax/vec.hpp"

namespace capax::geom {

// Quadrature nodes and weights on S^{n-1}, total weight sigma_{n-1}.
// Grids used for PDE meshing additionally carry a simplicial surface
// connectivity (segments for n=2, triangles for n=3, tetrahedra for n=4).
struct SphereGrid {
    int dimension = 0;
    std::vector<Vec> nodes;
    std::vector<double> weights;
    std::vector<std::vector<int>> simplices; // empty for pure quadrature grids
    std::string kind;                        // "circle", "fibonacci", ...

    int size() const { return static_cast<int>(nodes.size()); }
    double total_weight() const;

    // Throws if unit-norm / total-weight / symmetry invariants fail.
    void check_invariants() const;
};

// n=2: N equally spaced directions, weights 2*pi/N, consecutive segments.
SphereGrid circle_grid(int count);

// n=3: symmetrized Fibonacci sphere (count/2 points plus antipodes),
// equal weights 4*pi/count. Quadrature only, no connectivity.
SphereGrid fibonacci_grid(int count);

// n=3: subdivided icosahedron with triangle connectivity and lumped
// node weights. level 0 = icosahedron (12 nodes), each level quadruples
// the triangle count.
SphereGrid icosphere_grid(int level);

// n=4: product quadrature (Gauss-Legendre in both polar angles, uniform
// azimuth). Quadrature only.
SphereGrid product4_grid(int polar, int azimuthal);

// n=4: subdivided 16-cell boundary, tetrahedral connectivity, lumped weights.
SphereGrid cell16_grid(int level);

// Default quadrature grid of roughly `count` nodes for dimension n.
SphereGrid default_quadrature_grid(int n, int count);

// Default meshable grid for the PDE solver (circle / icosphere / 16-cell).
SphereGrid default_mesh_grid(int n, int level);

} // namespace capax::geom
