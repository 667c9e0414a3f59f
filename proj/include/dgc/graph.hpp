#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dgc/matrix.hpp"

namespace dgc {

/// Compressed sparse row storage, square n x n.
struct CsrMatrix {
  std::size_t n = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::uint32_t> col;
  std::vector<double> val;

  std::size_t nnz() const noexcept { return col.size(); }
  /// Value at (i, j), 0 when not stored. Binary search over the sorted row.
  double at(std::size_t i, std::size_t j) const;
  Matrix to_dense() const;
};

struct Edge {
  std::size_t src = 0;
  std::size_t dst = 0;
  double weight = 1.0;
};

/// Undirected weighted graph in CSR form. Rows are sorted by column index,
/// the structure is symmetric and carries no self-loops or duplicates.
class SparseGraph {
 public:
  SparseGraph() = default;

  /// Validates every invariant; throws on violation.
  static SparseGraph from_csr(CsrMatrix adjacency);

  std::size_t num_nodes() const noexcept { return adj_.n; }
  /// Stored (directed) entries, i.e. twice the number of undirected edges.
  std::size_t num_entries() const noexcept { return adj_.nnz(); }
  std::size_t num_edges() const noexcept { return adj_.nnz() / 2; }
  const CsrMatrix& adjacency() const noexcept { return adj_; }

  /// Weighted degree sum_j a_ij (no self-loop).
  std::vector<double> degrees() const;
  /// Each undirected edge once with src < dst, in row-major order.
  std::vector<Edge> edge_list() const;

 private:
  explicit SparseGraph(CsrMatrix adj) : adj_(std::move(adj)) {}
  CsrMatrix adj_;
};

/// Each undirected pair is listed once; the result is symmetrized.
SparseGraph build_graph(const std::vector<Edge>& edges, std::size_t n);

enum class Variant { Aug, Sym };

const char* to_string(Variant v);
Variant parse_variant(const std::string& s);

/// Normalized propagation operator S. For Aug this is
/// D~^{-1/2} (A + I) D~^{-1/2}; for Sym it is D^{-1/2} A D^{-1/2}.
struct PropagationMatrix {
  Variant kind = Variant::Aug;
  CsrMatrix matrix;
  bool self_loop_included = true;

  std::size_t num_nodes() const noexcept { return matrix.n; }
};

PropagationMatrix normalize(const SparseGraph& g, Variant variant);

/// L = I - S applied matrix-free.
class LaplacianHandle {
 public:
  explicit LaplacianHandle(const PropagationMatrix& s) : s_(&s) {}

  const PropagationMatrix& propagation() const noexcept { return *s_; }
  std::size_t num_nodes() const noexcept { return s_->num_nodes(); }
  Matrix apply(const Matrix& x) const;

 private:
  const PropagationMatrix* s_;
};

struct SpectralEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Largest eigenvalue of L by power iteration (L is symmetric PSD, so this
/// is also ||L||_2). Stops once the residual ||Lv - rho v|| drops below
/// tol * rho; non-convergence is reported in the result.
SpectralEstimate spectral_norm(const LaplacianHandle& l, double tol = 1e-10, int max_iter = 10000);

}  // namespace dgc
