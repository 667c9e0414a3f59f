#include "dgc/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdint>

#include "dgc/error.hpp"

namespace dgc::kernels {

namespace {

void check_shapes(const CsrMatrix& s, const Matrix& x, const Matrix& out) {
  if (x.rows() != s.n || out.rows() != x.rows() || out.cols() != x.cols()) {
    throw Error(Errc::DimensionMismatch, "propagation operand shapes do not match");
  }
  if (x.data() == out.data() && !x.empty()) {
    throw Error(Errc::InvalidArgument, "propagation output aliases its input");
  }
}

// acc <- sum_p S(i, col[p]) * x(col[p], :), accumulated in CSR order.
inline void row_product(const CsrMatrix& s, const Matrix& x, std::size_t i, double* acc) {
  const std::size_t d = x.cols();
  std::fill(acc, acc + d, 0.0);
  for (std::size_t p = s.row_ptr[i]; p < s.row_ptr[i + 1]; ++p) {
    const double w = s.val[p];
    const double* xr = x.data() + static_cast<std::size_t>(s.col[p]) * d;
    for (std::size_t j = 0; j < d; ++j) acc[j] += w * xr[j];
  }
}

inline void euler_row(const CsrMatrix& s, const Matrix& x, double dt, std::size_t i, double* out) {
  row_product(s, x, i, out);
  const double keep = 1.0 - dt;
  const double* xr = x.data() + i * x.cols();
  for (std::size_t j = 0; j < x.cols(); ++j) out[j] = keep * xr[j] + dt * out[j];
}

inline void laplacian_row(const CsrMatrix& s, const Matrix& x, std::size_t i, double* out) {
  row_product(s, x, i, out);
  const double* xr = x.data() + i * x.cols();
  for (std::size_t j = 0; j < x.cols(); ++j) out[j] = xr[j] - out[j];
}

using RowIndex = std::int64_t;

// The RK4 step is written once and parameterized on the Laplacian apply so
// that both kernels share the exact stage arithmetic.
template <class ApplyL, class ForRows>
void rk4_generic(const CsrMatrix& s, const Matrix& x, double dt, Matrix& out, ApplyL apply_l,
                 ForRows for_rows) {
  check_shapes(s, x, out);
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  Matrix lr(n, d);     // L R_i for the current stage
  Matrix stage(n, d);  // R_{i+1}
  const double half = 0.5 * dt;
  const double* xv = x.data();
  double* ov = out.data();

  // k1 = -L R1, R1 = x
  apply_l(x, lr);
  for_rows([&](std::size_t i) {
    const double* l = lr.data() + i * d;
    double* acc = ov + i * d;
    double* st = stage.data() + i * d;
    const double* xr = xv + i * d;
    for (std::size_t j = 0; j < d; ++j) {
      acc[j] = l[j];
      st[j] = xr[j] - half * l[j];
    }
  });
  // R2
  apply_l(stage, lr);
  for_rows([&](std::size_t i) {
    const double* l = lr.data() + i * d;
    double* acc = ov + i * d;
    double* st = stage.data() + i * d;
    const double* xr = xv + i * d;
    for (std::size_t j = 0; j < d; ++j) {
      acc[j] += 2.0 * l[j];
      st[j] = xr[j] - half * l[j];
    }
  });
  // R3
  apply_l(stage, lr);
  for_rows([&](std::size_t i) {
    const double* l = lr.data() + i * d;
    double* acc = ov + i * d;
    double* st = stage.data() + i * d;
    const double* xr = xv + i * d;
    for (std::size_t j = 0; j < d; ++j) {
      acc[j] += 2.0 * l[j];
      st[j] = xr[j] - dt * l[j];
    }
  });
  // R4, then x - dt/6 * L (R1 + 2 R2 + 2 R3 + R4)
  apply_l(stage, lr);
  const double sixth = dt / 6.0;
  for_rows([&](std::size_t i) {
    const double* l = lr.data() + i * d;
    double* acc = ov + i * d;
    const double* xr = xv + i * d;
    for (std::size_t j = 0; j < d; ++j) acc[j] = xr[j] - sixth * (acc[j] + l[j]);
  });
}

template <class F>
void serial_rows(std::size_t n, F&& f) {
  for (std::size_t i = 0; i < n; ++i) f(i);
}

template <class F>
void parallel_rows(std::size_t n, F&& f) {
  const RowIndex rows = static_cast<RowIndex>(n);
#pragma omp parallel for schedule(dynamic, 64)
  for (RowIndex i = 0; i < rows; ++i) f(static_cast<std::size_t>(i));
}

}  // namespace

namespace serial {

void spmm(const CsrMatrix& s, const Matrix& x, Matrix& out) {
  check_shapes(s, x, out);
  for (std::size_t i = 0; i < s.n; ++i) row_product(s, x, i, out.data() + i * x.cols());
}

void euler_step(const CsrMatrix& s, const Matrix& x, double dt, Matrix& out) {
  check_shapes(s, x, out);
  for (std::size_t i = 0; i < s.n; ++i) euler_row(s, x, dt, i, out.data() + i * x.cols());
}

void laplacian(const CsrMatrix& s, const Matrix& x, Matrix& out) {
  check_shapes(s, x, out);
  for (std::size_t i = 0; i < s.n; ++i) laplacian_row(s, x, i, out.data() + i * x.cols());
}

void rk4_step(const CsrMatrix& s, const Matrix& x, double dt, Matrix& out) {
  rk4_generic(
      s, x, dt, out, [&](const Matrix& in, Matrix& o) { serial::laplacian(s, in, o); },
      [&](auto&& f) { serial_rows(x.rows(), f); });
}

}  // namespace serial

namespace parallel {

void spmm(const CsrMatrix& s, const Matrix& x, Matrix& out) {
  check_shapes(s, x, out);
  parallel_rows(s.n, [&](std::size_t i) { row_product(s, x, i, out.data() + i * x.cols()); });
}

void euler_step(const CsrMatrix& s, const Matrix& x, double dt, Matrix& out) {
  check_shapes(s, x, out);
  parallel_rows(s.n, [&](std::size_t i) { euler_row(s, x, dt, i, out.data() + i * x.cols()); });
}

void laplacian(const CsrMatrix& s, const Matrix& x, Matrix& out) {
  check_shapes(s, x, out);
  parallel_rows(s.n, [&](std::size_t i) { laplacian_row(s, x, i, out.data() + i * x.cols()); });
}

void rk4_step(const CsrMatrix& s, const Matrix& x, double dt, Matrix& out) {
  rk4_generic(
      s, x, dt, out, [&](const Matrix& in, Matrix& o) { parallel::laplacian(s, in, o); },
      [&](auto&& f) { parallel_rows(x.rows(), f); });
}

}  // namespace parallel

int max_threads() { return omp_get_max_threads(); }

}  // namespace dgc::kernels
