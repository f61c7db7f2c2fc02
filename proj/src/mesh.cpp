#include "capax/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace capax::pde {

namespace {

// Solve the small linear system for P1 barycentric gradients:
// rows of inv(E) with E = [x1-x0 ... xn-x0] give gradLambda_{1..n}.
// Returns |det E|.
double p1_gradients(int dim, const Vec* x, double* out /* (dim+1)*dim */) {
    double a[4][4], inv[4][4];
    for (int c = 0; c < dim; ++c)
        for (int r = 0; r < dim; ++r) a[r][c] = x[c + 1][r] - x[0][r];
    // gauss-jordan
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) inv[r][c] = (r == c) ? 1.0 : 0.0;
    double det = 1.0;
    for (int col = 0; col < dim; ++col) {
        int piv = col;
        for (int r = col + 1; r < dim; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (piv != col) {
            std::swap(a[piv], a[col]);
            std::swap(inv[piv], inv[col]);
            det = -det;
        }
        double p = a[col][col];
        if (p == 0.0) return 0.0;
        det *= p;
        double ip = 1.0 / p;
        for (int c = 0; c < dim; ++c) {
            a[col][c] *= ip;
            inv[col][c] *= ip;
        }
        for (int r = 0; r < dim; ++r) {
            if (r == col) continue;
            double f = a[r][col];
            if (f == 0.0) continue;
            for (int c = 0; c < dim; ++c) {
                a[r][c] -= f * a[col][c];
                inv[r][c] -= f * inv[col][c];
            }
        }
    }
    // gradLambda_k (k=1..dim) = row (k-1) of inv(E^T)?  lambda = inv(E)(x-x0),
    // so gradLambda_k = k-th row of inv(E).
    for (int k = 1; k <= dim; ++k)
        for (int d = 0; d < dim; ++d) out[k * dim + d] = inv[k - 1][d];
    for (int d = 0; d < dim; ++d) {
        double s = 0.0;
        for (int k = 1; k <= dim; ++k) s += out[k * dim + d];
        out[d] = -s;
    }
    return std::abs(det);
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

} // namespace

std::shared_ptr<AnnulusMesh> build_annulus_mesh(const ConvexBody& K, double R,
                                                std::shared_ptr<const SphereGrid> sphere,
                                                int layers) {
    if (!sphere || sphere->simplices.empty())
        throw std::invalid_argument("mesh grid must carry surface connectivity");
    if (K.dimension() != sphere->dimension) throw std::invalid_argument("dimension mismatch");
    if (!K.origin_interior()) throw std::invalid_argument("origin must be interior to the body");
    if (layers < 4) throw std::invalid_argument("at least 4 radial layers required");

    auto mesh = std::make_shared<AnnulusMesh>();
    mesh->dim = K.dimension();
    mesh->sphere = sphere;
    mesh->layers = layers;
    mesh->outer_radius = R;

    const int S = sphere->size();
    mesh->inner_radius.resize(S);
    for (int i = 0; i < S; ++i) {
        double r = K.radial(sphere->nodes[i]);
        if (!(r < 0.995 * R))
            throw std::invalid_argument("body is not strictly inside the outer sphere");
        mesh->inner_radius[i] = r;
    }

    mesh->coords.resize(static_cast<size_t>(layers + 1) * S);
    for (int j = 0; j <= layers; ++j) {
        double g = static_cast<double>(j) / layers;
        for (int i = 0; i < S; ++i) {
            double rho = mesh->inner_radius[i] * std::pow(R / mesh->inner_radius[i], g);
            mesh->coords[mesh->node(j, i)] = rho * sphere->nodes[i];
        }
    }

    // prism split: columns sorted by sphere node id, staircase simplices
    const int n = mesh->dim;
    mesh->elems.reserve(static_cast<size_t>(layers) * sphere->simplices.size() * n);
    for (int j = 0; j < layers; ++j) {
        for (const auto& simp : sphere->simplices) {
            std::array<int, 4> col{};
            for (int k = 0; k < n; ++k) col[k] = simp[k];
            std::sort(col.begin(), col.begin() + n);
            for (int k = 0; k < n; ++k) {
                std::array<int, 5> e{-1, -1, -1, -1, -1};
                int idx = 0;
                for (int a = 0; a <= k; ++a) e[idx++] = mesh->node(j, col[a]);
                for (int a = k; a < n; ++a) e[idx++] = mesh->node(j + 1, col[a]);
                mesh->elems.push_back(e);
            }
        }
    }

    const int npe = n + 1;
    const int ne = mesh->elem_count();
    mesh->elem_vol.resize(ne);
    mesh->elem_grad.resize(static_cast<size_t>(ne) * npe * n);
    const double nfac = factorial(n);
    double vmin = 1e300;
    for (int e = 0; e < ne; ++e) {
        Vec xs[5];
        for (int k = 0; k < npe; ++k) xs[k] = mesh->coords[mesh->elems[e][k]];
        double det = p1_gradients(n, xs, mesh->elem_grad.data() + static_cast<size_t>(e) * npe * n);
        mesh->elem_vol[e] = det / nfac;
        vmin = std::min(vmin, mesh->elem_vol[e]);
    }
    if (!(vmin > 0.0)) throw std::runtime_error("mesh has a degenerate element");
    return mesh;
}

} // namespace capax::pde
