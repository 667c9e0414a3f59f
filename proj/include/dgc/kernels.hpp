#pragma once

#include "dgc/graph.hpp"
#include "dgc/matrix.hpp"

// Sparse propagation kernels. `serial` is the plain reference kept for
// testing; `parallel` splits rows across OpenMP threads. Every output row is
// produced by one thread in a fixed nonzero order, so both namespaces return
// bit-identical results. Outputs must be pre-sized and must not alias inputs.
namespace dgc::kernels {

namespace serial {

/// out = S x
void spmm(const CsrMatrix& s, const Matrix& x, Matrix& out);
/// out = (1 - dt) x + dt S x
void euler_step(const CsrMatrix& s, const Matrix& x, double dt, Matrix& out);
/// out = x - S x
void laplacian(const CsrMatrix& s, const Matrix& x, Matrix& out);
/// One classical RK4 step of dX/dt = -(I - S) X.
void rk4_step(const CsrMatrix& s, const Matrix& x, double dt, Matrix& out);

}  // namespace serial

namespace parallel {

void spmm(const CsrMatrix& s, const Matrix& x, Matrix& out);
void euler_step(const CsrMatrix& s, const Matrix& x, double dt, Matrix& out);
void laplacian(const CsrMatrix& s, const Matrix& x, Matrix& out);
void rk4_step(const CsrMatrix& s, const Matrix& x, double dt, Matrix& out);

}  // namespace parallel

int max_threads();

}  // namespace dgc::kernels
