#include "dgc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dgc/error.hpp"

namespace dgc::oracle {

namespace {

void check_limit(std::size_t n, std::size_t limit) {
  if (n > limit) {
    throw Error(Errc::TooLargeForDenseOracle,
                std::to_string(n) + " nodes exceeds the dense limit of " + std::to_string(limit));
  }
}

// Householder reduction of the symmetric matrix held in v to tridiagonal
// form. On exit d holds the diagonal, e the subdiagonal (e[0] unused) and v
// the accumulated orthogonal transform.
void tridiagonalize(Matrix& v, std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = v.rows();
  for (std::size_t j = 0; j < n; ++j) d[j] = v(n - 1, j);

  for (std::size_t i = n - 1; i > 0; --i) {
    double scale = 0.0;
    double h = 0.0;
    for (std::size_t k = 0; k < i; ++k) scale += std::abs(d[k]);
    if (scale == 0.0) {
      e[i] = d[i - 1];
      for (std::size_t j = 0; j < i; ++j) {
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
        v(j, i) = 0.0;
      }
    } else {
      for (std::size_t k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;

      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        v(j, i) = f;
        g = e[j] + v(j, j) * f;
        for (std::size_t k = j + 1; k <= i - 1; ++k) {
          g += v(k, j) * d[k];
          e[k] += v(k, j) * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        for (std::size_t k = j; k <= i - 1; ++k) v(k, j) -= (f * e[k] + g * d[k]);
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
      }
    }
    d[i] = h;
  }

  for (std::size_t i = 0; i + 1 < n; ++i) {
    v(n - 1, i) = v(i, i);
    v(i, i) = 1.0;
    const double h = d[i + 1];
    if (h != 0.0) {
      for (std::size_t k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
      for (std::size_t j = 0; j <= i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
        for (std::size_t k = 0; k <= i; ++k) v(k, j) -= g * d[k];
      }
    }
    for (std::size_t k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
  }
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = v(n - 1, j);
    v(n - 1, j) = 0.0;
  }
  v(n - 1, n - 1) = 1.0;
  e[0] = 0.0;
}

// Implicit QL on the tridiagonal (d, e), rotating the columns of v along.
void tridiagonal_ql(Matrix& v, std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = v.rows();
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  double f = 0.0;
  double tst1 = 0.0;
  const double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n) {
      if (std::abs(e[m]) <= eps * tst1) break;
      ++m;
    }
    if (m > l) {
      int iter = 0;
      do {
        if (++iter > 200) throw Error(Errc::InvalidArgument, "QL iteration did not converge");
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0;
        double c2 = c;
        double c3 = c;
        const double el1 = e[l + 1];
        double s = 0.0;
        double s2 = 0.0;
        for (std::size_t ii = m; ii-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[ii];
          h = c * p;
          r = std::hypot(p, e[ii]);
          e[ii + 1] = s * r;
          s = e[ii] / r;
          c = p / r;
          p = c * d[ii] - s * g;
          d[ii + 1] = h + s * (c * g + s * d[ii]);
          for (std::size_t k = 0; k < n; ++k) {
            h = v(k, ii + 1);
            v(k, ii + 1) = s * v(k, ii) + c * h;
            v(k, ii) = c * v(k, ii) - s * h;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }

  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::size_t k = i;
    double p = d[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      if (d[j] < p) {
        k = j;
        p = d[j];
      }
    }
    if (k != i) {
      d[k] = d[i];
      d[i] = p;
      for (std::size_t j = 0; j < n; ++j) std::swap(v(j, i), v(j, k));
    }
  }
}

// U diag(factor) U^T x
Matrix spectral_apply(const EigenDecomposition& eig, const std::vector<double>& factor,
                      const Matrix& x) {
  const std::size_t n = eig.size();
  if (x.rows() != n) {
    throw Error(Errc::DimensionMismatch, "feature rows do not match the decomposition");
  }
  const Matrix& u = eig.eigenvectors;
  Matrix coeff(n, x.cols());  // U^T x, scaled
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const double uik = u(i, k);
      auto crow = coeff.row(k);
      auto xrow = x.row(i);
      for (std::size_t j = 0; j < x.cols(); ++j) crow[j] += uik * xrow[j];
    }
  }
  for (std::size_t k = 0; k < n; ++k)
    for (double& c : coeff.row(k)) c *= factor[k];
  return matmul(u, coeff);
}

}  // namespace

Matrix dense_laplacian(const SparseGraph& g, Variant variant, std::size_t dense_limit) {
  const std::size_t n = g.num_nodes();
  check_limit(n, dense_limit);
  const Matrix a = g.adjacency().to_dense();
  const double loop = variant == Variant::Aug ? 1.0 : 0.0;
  std::vector<double> deg(n, loop);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) deg[i] += a(i, j);
  Matrix l(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (deg[i] == 0.0) {
      throw Error(Errc::IsolatedNodeWithSymVariant, "isolated node " + std::to_string(i));
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double aij = a(i, j) + (i == j ? loop : 0.0);
      l(i, j) = (i == j ? 1.0 : 0.0) - aij / std::sqrt(deg[i] * deg[j]);
    }
  }
  return l;
}

EigenDecomposition eigendecompose(const Matrix& l, std::size_t dense_limit) {
  const std::size_t n = l.rows();
  if (l.cols() != n) throw Error(Errc::DimensionMismatch, "eigendecompose needs a square matrix");
  check_limit(n, dense_limit);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(l(i, j) - l(j, i)) > 1e-10) {
        throw Error(Errc::NotSymmetric, "entry (" + std::to_string(i) + "," + std::to_string(j) +
                                            ") differs from its transpose");
      }

  EigenDecomposition eig;
  if (n == 0) return eig;
  Matrix v = l;
  std::vector<double> d(n);
  std::vector<double> e(n);
  tridiagonalize(v, d, e);
  tridiagonal_ql(v, d, e);
  eig.eigenvalues = std::move(d);
  eig.eigenvectors = std::move(v);
  return eig;
}

Matrix exact_heat_kernel(const EigenDecomposition& eig, double t, const Matrix& x) {
  if (!(t >= 0.0)) throw Error(Errc::InvalidArgument, "heat kernel time must be non-negative");
  std::vector<double> factor(eig.size());
  for (std::size_t k = 0; k < eig.size(); ++k) factor[k] = std::exp(-eig.eigenvalues[k] * t);
  return spectral_apply(eig, factor, x);
}

Matrix inverse_diffusion(const EigenDecomposition& eig, double t_star, const Matrix& x_clean) {
  if (!(t_star >= 0.0)) throw Error(Errc::InvalidArgument, "t_star must be non-negative");
  if (t_star * eig.max_eigenvalue() > 40.0) {
    throw Error(Errc::OverflowRisk, "t_star * lambda_max = " +
                                        std::to_string(t_star * eig.max_eigenvalue()) + " > 40");
  }
  std::vector<double> factor(eig.size());
  for (std::size_t k = 0; k < eig.size(); ++k) factor[k] = std::exp(eig.eigenvalues[k] * t_star);
  return spectral_apply(eig, factor, x_clean);
}

Matrix equilibrium_projection(const EigenDecomposition& eig, const Matrix& x, double zero_tol) {
  std::vector<double> factor(eig.size());
  for (std::size_t k = 0; k < eig.size(); ++k)
    factor[k] = std::abs(eig.eigenvalues[k]) < zero_tol ? 1.0 : 0.0;
  return spectral_apply(eig, factor, x);
}

double euler_error_bound(double T, std::uint64_t K, double norm_l, double norm_x0) {
  if (K == 0) throw Error(Errc::InvalidArgument, "K must be at least 1");
  const double tl = T * norm_l;
  return tl * norm_x0 / (2.0 * static_cast<double>(K)) * std::expm1(tl);
}

double euler_local_error_bound(double h, double norm_l, double norm_x0) {
  return 0.5 * h * h * norm_l * norm_l * norm_x0;
}

}  // namespace dgc::oracle
