#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "momentlab/matrix.hpp"

namespace momentlab {

/// Eigenvalues of a general square matrix, sorted lexicographically by (real, imag).
struct Spectrum {
  std::vector<Complex> values;
  std::optional<CMatrix> vectors;
};

/// Real spectrum and orthonormal eigenvectors (columns) of a Hermitian matrix.
/// Eigenvalues ascend; column k of `vectors` belongs to values[k].
struct HermitianSpectrum {
  std::vector<double> values;
  CMatrix vectors;
};

/// Complex Schur form A = Q T Q^* with Q unitary and T upper triangular.
struct SchurForm {
  CMatrix q;
  CMatrix t;
};

/// Thin singular value decomposition A V = U Σ for an m×k matrix.
///
/// `sigma` has k entries in descending order. Columns of V (k×k) are
/// orthonormal. Column j of U (m×k) is the normalized image A v_j when
/// sigma[j] is non-zero and the zero vector otherwise.
template <typename T>
struct Svd {
  std::vector<double> sigma;
  Matrix<T> u;
  Matrix<T> v;
};

struct PolarDecomposition {
  CMatrix unitary;   ///< U
  CMatrix positive;  ///< P = (A^*A)^{1/2}
};

struct RealKernel {
  std::size_t dimension = 0;
  RMatrix basis;  ///< columns span the numerical kernel
  std::vector<double> singular_values;
};

/// Cyclic complex Jacobi. Throws NonHermitianInput when ‖H - H^*‖_F exceeds
/// eta·max(1, ‖H‖_F).
HermitianSpectrum hermitian_eig(const CMatrix& h, double eta = 1e-12);

/// Householder Hessenberg reduction followed by single-shift complex QR.
/// Throws NoConvergence after `100·n²` QR steps (or `max_steps` when given).
SchurForm schur(const CMatrix& a, std::size_t max_steps = 0);

/// Eigenvalues via `schur`. Eigenvectors are not computed; use `null_vector`.
Spectrum general_eig(const CMatrix& l, std::size_t max_steps = 0);

/// One-sided (Hestenes) Jacobi SVD.
Svd<Complex> svd(const CMatrix& a);
Svd<double> svd(const RMatrix& a);

std::vector<double> singular_values(const CMatrix& a);

/// A = U P with P = (A^*A)^{1/2}. When A is singular, U is completed on
/// ker P by Gram-Schmidt over the standard basis in index order.
PolarDecomposition polar_decompose(const CMatrix& a);

/// Non-negative square root. Eigenvalues in [-eta_psd·max(1,‖H‖_F), 0) are
/// clamped to zero; anything more negative raises NotPSD.
CMatrix psd_sqrt(const CMatrix& h, double eta_psd = 1e-10);

/// Number of singular values above max(eta·σ_max, 1e-14).
std::size_t rank_tol(const CMatrix& a, double eta = 1e-8);

/// Numerical kernel: singular values at or below max(eta·σ_max, 1e-14).
RealKernel real_kernel(const RMatrix& f, double eta = 1e-8);

/// σ_max / σ_min, infinity for singular input.
double condition_number(const CMatrix& a);

/// Unit vector minimizing ‖A v‖ (right singular vector of the smallest σ).
std::vector<Complex> null_vector(const CMatrix& a);

/// Extends the columns of `q` (n×k, independent) to an n×n unitary: the
/// columns are re-orthonormalized in order, then Gram-Schmidt runs over
/// e_1, e_2, ... in index order.
CMatrix orthonormal_completion(const CMatrix& q);

/// LU with partial pivoting; throws SingularMatrix on an exactly zero pivot
/// or a pivot below 1e-300.
template <typename T>
Matrix<T> solve(const Matrix<T>& a, const Matrix<T>& b);
template <typename T>
Matrix<T> inverse(const Matrix<T>& a);

/// Scaling-and-squaring Taylor exponential.
CMatrix expm(const CMatrix& a);

}  // namespace momentlab
