#include "dgc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "dgc/error.hpp"
#include "dgc/kernels.hpp"

namespace dgc {

double CsrMatrix::at(std::size_t i, std::size_t j) const {
  const auto first = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
  const auto last = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
  const auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(j));
  if (it == last || *it != j) return 0.0;
  return val[static_cast<std::size_t>(it - col.begin())];
}

Matrix CsrMatrix::to_dense() const {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) m(i, col[p]) = val[p];
  return m;
}

SparseGraph SparseGraph::from_csr(CsrMatrix adj) {
  const std::size_t n = adj.n;
  if (n == 0) throw Error(Errc::InvalidArgument, "graph must have at least one node");
  if (adj.row_ptr.size() != n + 1 || adj.row_ptr.front() != 0 ||
      adj.row_ptr.back() != adj.col.size() || adj.col.size() != adj.val.size()) {
    throw Error(Errc::SchemaViolation, "malformed CSR arrays");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (adj.row_ptr[i] > adj.row_ptr[i + 1]) {
      throw Error(Errc::SchemaViolation, "row pointer is decreasing at row " + std::to_string(i));
    }
    for (std::size_t p = adj.row_ptr[i]; p < adj.row_ptr[i + 1]; ++p) {
      const std::size_t j = adj.col[p];
      if (j >= n) throw Error(Errc::IndexOutOfRange, "column index " + std::to_string(j));
      if (j == i) throw Error(Errc::SelfLoop, "self-loop at node " + std::to_string(i));
      if (!(adj.val[p] > 0.0) || !std::isfinite(adj.val[p])) {
        throw Error(Errc::NonPositiveWeight, "edge weight must be positive and finite");
      }
      if (p > adj.row_ptr[i] && adj.col[p - 1] >= adj.col[p]) {
        throw Error(adj.col[p - 1] == adj.col[p] ? Errc::DuplicateEdge : Errc::SchemaViolation,
                    "row " + std::to_string(i) + " is not strictly sorted");
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = adj.row_ptr[i]; p < adj.row_ptr[i + 1]; ++p) {
      if (adj.at(adj.col[p], i) != adj.val[p]) {
        throw Error(Errc::NotSymmetric, "entry (" + std::to_string(i) + "," +
                                            std::to_string(adj.col[p]) + ") has no mirror");
      }
    }
  }
  return SparseGraph(std::move(adj));
}

std::vector<double> SparseGraph::degrees() const {
  std::vector<double> deg(adj_.n, 0.0);
  for (std::size_t i = 0; i < adj_.n; ++i)
    for (std::size_t p = adj_.row_ptr[i]; p < adj_.row_ptr[i + 1]; ++p) deg[i] += adj_.val[p];
  return deg;
}

std::vector<Edge> SparseGraph::edge_list() const {
  std::vector<Edge> edges;
  edges.reserve(num_edges());
  for (std::size_t i = 0; i < adj_.n; ++i)
    for (std::size_t p = adj_.row_ptr[i]; p < adj_.row_ptr[i + 1]; ++p)
      if (adj_.col[p] > i) edges.push_back({i, adj_.col[p], adj_.val[p]});
  return edges;
}

SparseGraph build_graph(const std::vector<Edge>& edges, std::size_t n) {
  if (n == 0) throw Error(Errc::InvalidArgument, "graph must have at least one node");
  if (n > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(Errc::InvalidArgument, "node count exceeds 32-bit column indices");
  }
  struct Entry {
    std::size_t row;
    std::uint32_t col;
    double w;
  };
  std::vector<Entry> entries;
  entries.reserve(edges.size() * 2);
  for (const auto& e : edges) {
    if (e.src >= n || e.dst >= n) {
      throw Error(Errc::IndexOutOfRange, "edge (" + std::to_string(e.src) + "," +
                                             std::to_string(e.dst) + ") with n=" + std::to_string(n));
    }
    if (e.src == e.dst) throw Error(Errc::SelfLoop, "self-loop at node " + std::to_string(e.src));
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw Error(Errc::NonPositiveWeight, "edge (" + std::to_string(e.src) + "," +
                                               std::to_string(e.dst) + ") has non-positive weight");
    }
    entries.push_back({e.src, static_cast<std::uint32_t>(e.dst), e.weight});
    entries.push_back({e.dst, static_cast<std::uint32_t>(e.src), e.weight});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  CsrMatrix adj;
  adj.n = n;
  adj.row_ptr.assign(n + 1, 0);
  adj.col.reserve(entries.size());
  adj.val.reserve(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (k > 0 && entries[k].row == entries[k - 1].row && entries[k].col == entries[k - 1].col) {
      throw Error(Errc::DuplicateEdge, "duplicate edge (" + std::to_string(entries[k].row) + "," +
                                           std::to_string(entries[k].col) + ")");
    }
    adj.col.push_back(entries[k].col);
    adj.val.push_back(entries[k].w);
    ++adj.row_ptr[entries[k].row + 1];
  }
  for (std::size_t i = 0; i < n; ++i) adj.row_ptr[i + 1] += adj.row_ptr[i];
  return SparseGraph::from_csr(std::move(adj));
}

const char* to_string(Variant v) { return v == Variant::Aug ? "aug" : "sym"; }

Variant parse_variant(const std::string& s) {
  if (s == "aug") return Variant::Aug;
  if (s == "sym") return Variant::Sym;
  throw Error(Errc::InvalidArgument, "unknown Laplacian variant '" + s + "' (expected aug|sym)");
}

PropagationMatrix normalize(const SparseGraph& g, Variant variant) {
  const CsrMatrix& a = g.adjacency();
  const std::size_t n = a.n;
  const bool loops = variant == Variant::Aug;

  std::vector<double> deg = g.degrees();
  std::vector<double> inv_sqrt(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (loops) deg[i] += 1.0;
    if (deg[i] <= 0.0) {
      throw Error(Errc::IsolatedNodeWithSymVariant,
                  "node " + std::to_string(i) + " has no neighbours; use the aug variant");
    }
    inv_sqrt[i] = 1.0 / std::sqrt(deg[i]);
  }

  PropagationMatrix s;
  s.kind = variant;
  s.self_loop_included = loops;
  s.matrix.n = n;
  s.matrix.row_ptr.assign(n + 1, 0);
  s.matrix.col.reserve(a.nnz() + (loops ? n : 0));
  s.matrix.val.reserve(a.nnz() + (loops ? n : 0));
  // The (i,j) and (j,i) entries are evaluated by the same expression with
  // the operands in the same order, so S is exactly symmetric.
  auto entry = [&](std::size_t i, std::size_t j, double w) {
    const std::size_t lo = std::min(i, j);
    const std::size_t hi = std::max(i, j);
    return w * inv_sqrt[lo] * inv_sqrt[hi];
  };
  for (std::size_t i = 0; i < n; ++i) {
    bool diag_done = !loops;
    for (std::size_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) {
      const std::size_t j = a.col[p];
      if (!diag_done && j > i) {
        s.matrix.col.push_back(static_cast<std::uint32_t>(i));
        s.matrix.val.push_back(entry(i, i, 1.0));
        diag_done = true;
      }
      s.matrix.col.push_back(static_cast<std::uint32_t>(j));
      s.matrix.val.push_back(entry(i, j, a.val[p]));
    }
    if (!diag_done) {
      s.matrix.col.push_back(static_cast<std::uint32_t>(i));
      s.matrix.val.push_back(entry(i, i, 1.0));
    }
    s.matrix.row_ptr[i + 1] = s.matrix.col.size();
  }
  return s;
}

Matrix LaplacianHandle::apply(const Matrix& x) const {
  if (x.rows() != num_nodes()) {
    throw Error(Errc::DimensionMismatch, "Laplacian applied to matrix with wrong row count");
  }
  Matrix out(x.rows(), x.cols());
  kernels::parallel::laplacian(s_->matrix, x, out);
  return out;
}

SpectralEstimate spectral_norm(const LaplacianHandle& l, double tol, int max_iter) {
  if (!(tol > 0.0)) throw Error(Errc::InvalidArgument, "tol must be positive");
  if (max_iter < 1) throw Error(Errc::InvalidArgument, "max_iter must be at least 1");

  const std::size_t n = l.num_nodes();
  Matrix v(n, 1);
  std::mt19937_64 rng(0x5eedULL);
  std::uniform_real_distribution<double> uni(0.5, 1.5);
  for (double& e : v.values()) e = uni(rng);
  double nv = frobenius_norm(v);
  for (double& e : v.values()) e /= nv;

  SpectralEstimate est;
  for (int it = 1; it <= max_iter; ++it) {
    Matrix w = l.apply(v);
    double rayleigh = 0.0;
    for (std::size_t i = 0; i < n; ++i) rayleigh += v.data()[i] * w.data()[i];
    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = w.data()[i] - rayleigh * v.data()[i];
      residual += r * r;
    }
    residual = std::sqrt(residual);
    est.value = rayleigh;
    est.iterations = it;
    const double nw = frobenius_norm(w);
    if (nw == 0.0) {
      // Generic start vector mapped to zero: L is the zero operator.
      est.value = 0.0;
      est.converged = true;
      return est;
    }
    if (residual <= tol * std::abs(rayleigh)) {
      est.converged = true;
      return est;
    }
    for (std::size_t i = 0; i < n; ++i) v.data()[i] = w.data()[i] / nw;
  }
  return est;
}

}  // namespace dgc
