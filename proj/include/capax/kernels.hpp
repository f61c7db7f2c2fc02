#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "capax/vec.hpp"

// Data-parallel inner loops (OpenMP when available) with block-ordered
// deterministic reductions: results are identical for any thread count.
// capax::par::ref holds naive serial implementations kept for testing.
namespace capax::par {

int max_threads();

// ---- pairwise logarithmic kernel (robin module) ----
// E(w) = sum_{i != j} w_i w_j ln(1/|x_i-x_j|) + sum_i w_i^2 diag_i.
// diag may be empty (excluded-diagonal rule).
double log_energy(const std::vector<Vec>& pts, const std::vector<double>& w,
                  const std::vector<double>& diag);

// U_i = sum_{j != i} w_j ln(1/|x_i-x_j|) + w_i diag_i  (so E = w.U)
void log_potential(const std::vector<Vec>& pts, const std::vector<double>& w,
                   const std::vector<double>& diag, std::vector<double>& out);

// Dense kernel matrix, row-major; A_ii = diag_i (0 when diag empty).
void log_kernel_matrix(const std::vector<Vec>& pts, const std::vector<double>& diag,
                       std::vector<double>& out);

// ---- P1 element energy / gradient / Hessian (equilibrium module) ----
// Regularized energy sum_e vol_e (|g_e|^2 + eps^2)^{n/2} with
// g_e = sum_k u_k gradLambda_k. elem_grad holds (npe)*dim doubles per element.
double element_energy(int dim, int npe, const std::vector<std::array<int, 5>>& elems,
                      const std::vector<double>& elem_vol, const std::vector<double>& elem_grad,
                      const std::vector<double>& u, double eps);

double element_energy_grad(int dim, int npe, const std::vector<std::array<int, 5>>& elems,
                           const std::vector<double>& elem_vol, const std::vector<double>& elem_grad,
                           const std::vector<double>& u, double eps, std::vector<double>& grad_out);

// Per-element Hessian blocks, npe*npe values per element (row-major).
void element_hessian(int dim, int npe, const std::vector<std::array<int, 5>>& elems,
                     const std::vector<double>& elem_vol, const std::vector<double>& elem_grad,
                     const std::vector<double>& u, double eps, std::vector<double>& hess_out);

// Elementwise gradient vectors of the current iterate (dim doubles per element).
void element_gradients(int dim, int npe, const std::vector<std::array<int, 5>>& elems,
                       const std::vector<double>& elem_grad, const std::vector<double>& u,
                       std::vector<double>& out);

namespace ref {
// Naive serial references for the kernels above.
double log_energy(const std::vector<Vec>& pts, const std::vector<double>& w,
                  const std::vector<double>& diag);
void log_potential(const std::vector<Vec>& pts, const std::vector<double>& w,
                   const std::vector<double>& diag, std::vector<double>& out);
double element_energy_grad(int dim, int npe, const std::vector<std::array<int, 5>>& elems,
                           const std::vector<double>& elem_vol, const std::vector<double>& elem_grad,
                           const std::vector<double>& u, double eps, std::vector<double>& grad_out);
} // namespace ref

} // namespace capax::par
