#pragma once

#include "curvestab/types.hpp"

namespace curvestab {

/// Eigenvalues of a real square matrix, sorted by descending real part
/// (ties broken by descending imaginary part, so conjugate pairs are adjacent
/// with the +i member first). Throws EigenSolverError on non-convergence.
Spectrum eigenvalues(const Matrix& A);

/// Singular values of P (descending). Only the values are computed; the
/// orthogonal factors are never needed here.
SvdResult singular_values(const Matrix& P);

/// e^{tA} by scaling-and-squaring with a (13,13) Pade core.
/// Throws OverflowError if entries leave the representable range; long-time
/// trajectory work should go through the log-scaled trace evaluators instead.
Matrix expm(const Matrix& A, double t = 1.0);

/// A^k v by k matrix-vector products (the matrix power is never formed).
Vector apply_power(const Matrix& A, int k, const Vector& v);

/// det(A) via partial-pivot LU.
double determinant(const Matrix& A);

/// |det A| > tol_rel * ||A||_F^n, the invertibility test used by the
/// stability verdicts.
bool is_invertible(const Matrix& A, double tol_rel = 1e-9);

/// |Re(lambda)| <= snap_tolerance(A) is treated as a zero real part.
/// The stability trichotomy is discontinuous at Re = 0, so the snap
/// tolerance is part of the contract rather than an internal detail.
double snap_tolerance(const Matrix& A, double factor = 1e-9);

}  // namespace curvestab
