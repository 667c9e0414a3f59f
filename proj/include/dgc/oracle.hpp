#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dgc/graph.hpp"
#include "dgc/matrix.hpp"

// Dense spectral reference. Everything here works on explicit n x n
// matrices built straight from the adjacency, independent of the sparse
// propagation path it is used to check.
namespace dgc::oracle {

inline constexpr std::size_t kDefaultDenseLimit = 2048;

struct EigenDecomposition {
  std::vector<double> eigenvalues;  // ascending
  Matrix eigenvectors;              // column k pairs with eigenvalues[k]

  std::size_t size() const noexcept { return eigenvalues.size(); }
  double max_eigenvalue() const { return eigenvalues.empty() ? 0.0 : eigenvalues.back(); }
};

/// L = I - D^{-1/2} A D^{-1/2} (sym) or with A + I and its degrees (aug),
/// computed entrywise from the adjacency.
Matrix dense_laplacian(const SparseGraph& g, Variant variant,
                       std::size_t dense_limit = kDefaultDenseLimit);

/// Symmetric eigendecomposition: Householder tridiagonalization followed by
/// implicit QL with Wilkinson shifts. Deterministic, single-threaded.
EigenDecomposition eigendecompose(const Matrix& l, std::size_t dense_limit = kDefaultDenseLimit);

/// U diag(exp(-lambda t)) U^T x
Matrix exact_heat_kernel(const EigenDecomposition& eig, double t, const Matrix& x);

/// U diag(exp(+lambda t_star)) U^T x_clean: the backward diffusion that
/// turns clean features into observed ones. Refuses t_star * lambda_max > 40.
Matrix inverse_diffusion(const EigenDecomposition& eig, double t_star, const Matrix& x_clean);

/// Component of x in the null space of L (eigenvalues below zero_tol):
/// the t -> infinity limit of the heat kernel.
Matrix equilibrium_projection(const EigenDecomposition& eig, const Matrix& x,
                              double zero_tol = 1e-9);

/// Global forward-Euler error bound
///   T ||L|| ||X0|| / (2K) * (exp(T ||L||) - 1)
/// with ||L|| the spectral norm and ||X0|| the Frobenius norm.
double euler_error_bound(double T, std::uint64_t K, double norm_l, double norm_x0);

/// One-step truncation bound (h^2 / 2) ||L||^2 ||X0||.
double euler_local_error_bound(double h, double norm_l, double norm_x0);

}  // namespace dgc::oracle
