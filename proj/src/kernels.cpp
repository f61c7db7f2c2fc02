#include "capax/kernels.hpp"

#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace capax::par {

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace {
constexpr int kBlock = 1024; // fixed block size keeps reductions order-stable
}

double log_energy(const std::vector<Vec>& pts, const std::vector<double>& w,
                  const std::vector<double>& diag) {
    const int m = static_cast<int>(pts.size());
    if (static_cast<int>(w.size()) != m) throw std::invalid_argument("weight size mismatch");
    const bool has_diag = !diag.empty();
    const int nblocks = (m + kBlock - 1) / kBlock;
    std::vector<double> partial(nblocks, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int b = 0; b < nblocks; ++b) {
        double acc = 0.0;
        const int lo = b * kBlock, hi = std::min(m, lo + kBlock);
        for (int i = lo; i < hi; ++i) {
            const Vec& xi = pts[i];
            double row = 0.0;
            for (int j = i + 1; j < m; ++j) {
                double d2 = norm2(xi - pts[j]);
                row += w[j] * -0.5 * std::log(d2); // ln(1/d) pairs doubled below
            }
            acc += 2.0 * w[i] * row;
            if (has_diag) acc += w[i] * w[i] * diag[i];
        }
        partial[b] = acc;
    }
    double e = 0.0;
    for (double p : partial) e += p;
    return e;
}

void log_potential(const std::vector<Vec>& pts, const std::vector<double>& w,
                   const std::vector<double>& diag, std::vector<double>& out) {
    const int m = static_cast<int>(pts.size());
    const bool has_diag = !diag.empty();
    out.assign(m, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int i = 0; i < m; ++i) {
        const Vec& xi = pts[i];
        double acc = 0.0;
        for (int j = 0; j < m; ++j) {
            if (j == i) continue;
            acc += w[j] * -0.5 * std::log(norm2(xi - pts[j]));
        }
        if (has_diag) acc += w[i] * diag[i];
        out[i] = acc;
    }
}

void log_kernel_matrix(const std::vector<Vec>& pts, const std::vector<double>& diag,
                       std::vector<double>& out) {
    const int m = static_cast<int>(pts.size());
    const bool has_diag = !diag.empty();
    out.assign(static_cast<size_t>(m) * m, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int i = 0; i < m; ++i) {
        double* row = out.data() + static_cast<size_t>(i) * m;
        for (int j = 0; j < m; ++j)
            row[j] = (j == i) ? (has_diag ? diag[i] : 0.0)
                              : -0.5 * std::log(norm2(pts[i] - pts[j]));
    }
}

namespace {

// Shared element loop: energy plus optional per-element gradient slots.
template <bool WithGrad>
double element_pass(int dim, int npe, const std::vector<std::array<int, 5>>& elems,
                    const std::vector<double>& elem_vol, const std::vector<double>& elem_grad,
                    const std::vector<double>& u, double eps, std::vector<double>* slots) {
    const int ne = static_cast<int>(elems.size());
    const int nblocks = (ne + kBlock - 1) / kBlock;
    std::vector<double> partial(nblocks, 0.0);
    const double half_n = 0.5 * dim;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int b = 0; b < nblocks; ++b) {
        double acc = 0.0;
        const int lo = b * kBlock, hi = std::min(ne, lo + kBlock);
        for (int e = lo; e < hi; ++e) {
            const double* G = elem_grad.data() + static_cast<size_t>(e) * npe * dim;
            double g[4] = {0, 0, 0, 0};
            for (int k = 0; k < npe; ++k) {
                double uk = u[elems[e][k]];
                for (int d = 0; d < dim; ++d) g[d] += uk * G[k * dim + d];
            }
            double q = eps * eps;
            for (int d = 0; d < dim; ++d) q += g[d] * g[d];
            double vol = elem_vol[e];
            acc += vol * std::pow(q, half_n);
            if constexpr (WithGrad) {
                double c = vol * dim * std::pow(q, half_n - 1.0);
                double* slot = slots->data() + static_cast<size_t>(e) * npe;
                for (int k = 0; k < npe; ++k) {
                    double gd = 0.0;
                    for (int d = 0; d < dim; ++d) gd += g[d] * G[k * dim + d];
                    slot[k] = c * gd;
                }
            }
        }
        partial[b] = acc;
    }
    double energy = 0.0;
    for (double p : partial) energy += p;
    return energy;
}

} // namespace

double element_energy(int dim, int npe, const std::vector<std::array<int, 5>>& elems,
                      const std::vector<double>& elem_vol, const std::vector<double>& elem_grad,
                      const std::vector<double>& u, double eps) {
    return element_pass<false>(dim, npe, elems, elem_vol, elem_grad, u, eps, nullptr);
}

double element_energy_grad(int dim, int npe, const std::vector<std::array<int, 5>>& elems,
                           const std::vector<double>& elem_vol, const std::vector<double>& elem_grad,
                           const std::vector<double>& u, double eps, std::vector<double>& grad_out) {
    const int ne = static_cast<int>(elems.size());
    static thread_local std::vector<double> slots;
    slots.assign(static_cast<size_t>(ne) * npe, 0.0);
    double energy = element_pass<true>(dim, npe, elems, elem_vol, elem_grad, u, eps, &slots);
    // serial scatter in element order keeps the result bit-stable
    grad_out.assign(u.size(), 0.0);
    for (int e = 0; e < ne; ++e)
        for (int k = 0; k < npe; ++k) grad_out[elems[e][k]] += slots[static_cast<size_t>(e) * npe + k];
    return energy;
}

void element_hessian(int dim, int npe, const std::vector<std::array<int, 5>>& elems,
                     const std::vector<double>& elem_vol, const std::vector<double>& elem_grad,
                     const std::vector<double>& u, double eps, std::vector<double>& hess_out) {
    const int ne = static_cast<int>(elems.size());
    hess_out.assign(static_cast<size_t>(ne) * npe * npe, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int e = 0; e < ne; ++e) {
        const double* G = elem_grad.data() + static_cast<size_t>(e) * npe * dim;
        double g[4] = {0, 0, 0, 0};
        for (int k = 0; k < npe; ++k) {
            double uk = u[elems[e][k]];
            for (int d = 0; d < dim; ++d) g[d] += uk * G[k * dim + d];
        }
        double q = eps * eps;
        for (int d = 0; d < dim; ++d) q += g[d] * g[d];
        double c1 = elem_vol[e] * dim * std::pow(q, 0.5 * dim - 1.0);
        double c2 = (dim - 2.0) / q;
        double gd[5];
        for (int k = 0; k < npe; ++k) {
            gd[k] = 0.0;
            for (int d = 0; d < dim; ++d) gd[k] += g[d] * G[k * dim + d];
        }
        double* H = hess_out.data() + static_cast<size_t>(e) * npe * npe;
        for (int k = 0; k < npe; ++k)
            for (int l = 0; l < npe; ++l) {
                double dd = 0.0;
                for (int d = 0; d < dim; ++d) dd += G[k * dim + d] * G[l * dim + d];
                H[k * npe + l] = c1 * (dd + c2 * gd[k] * gd[l]);
            }
    }
}

void element_gradients(int dim, int npe, const std::vector<std::array<int, 5>>& elems,
                       const std::vector<double>& elem_grad, const std::vector<double>& u,
                       std::vector<double>& out) {
    const int ne = static_cast<int>(elems.size());
    out.assign(static_cast<size_t>(ne) * dim, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int e = 0; e < ne; ++e) {
        const double* G = elem_grad.data() + static_cast<size_t>(e) * npe * dim;
        double* o = out.data() + static_cast<size_t>(e) * dim;
        for (int k = 0; k < npe; ++k) {
            double uk = u[elems[e][k]];
            for (int d = 0; d < dim; ++d) o[d] += uk * G[k * dim + d];
        }
    }
}

namespace ref {

double log_energy(const std::vector<Vec>& pts, const std::vector<double>& w,
                  const std::vector<double>& diag) {
    const int m = static_cast<int>(pts.size());
    double e = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            e += w[i] * w[j] * -std::log(dist(pts[i], pts[j]));
        }
    if (!diag.empty())
        for (int i = 0; i < m; ++i) e += w[i] * w[i] * diag[i];
    return e;
}

void log_potential(const std::vector<Vec>& pts, const std::vector<double>& w,
                   const std::vector<double>& diag, std::vector<double>& out) {
    const int m = static_cast<int>(pts.size());
    out.assign(m, 0.0);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            out[i] += w[j] * -std::log(dist(pts[i], pts[j]));
        }
        if (!diag.empty()) out[i] += w[i] * diag[i];
    }
}

double element_energy_grad(int dim, int npe, const std::vector<std::array<int, 5>>& elems,
                           const std::vector<double>& elem_vol, const std::vector<double>& elem_grad,
                           const std::vector<double>& u, double eps, std::vector<double>& grad_out) {
    grad_out.assign(u.size(), 0.0);
    double energy = 0.0;
    for (size_t e = 0; e < elems.size(); ++e) {
        const double* G = elem_grad.data() + e * npe * dim;
        double g[4] = {0, 0, 0, 0};
        for (int k = 0; k < npe; ++k)
            for (int d = 0; d < dim; ++d) g[d] += u[elems[e][k]] * G[k * dim + d];
        double q = eps * eps;
        for (int d = 0; d < dim; ++d) q += g[d] * g[d];
        energy += elem_vol[e] * std::pow(q, 0.5 * dim);
        double c = elem_vol[e] * dim * std::pow(q, 0.5 * dim - 1.0);
        for (int k = 0; k < npe; ++k) {
            double gd = 0.0;
            for (int d = 0; d < dim; ++d) gd += g[d] * G[k * dim + d];
            grad_out[elems[e][k]] += c * gd;
        }
    }
    return energy;
}

} // namespace ref

} // namespace capax::par
