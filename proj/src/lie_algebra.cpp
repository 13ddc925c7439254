#include "momentlab/lie_algebra.hpp"

#include <algorithm>
#include <cmath>

#include "momentlab/linalg.hpp"

namespace momentlab {

namespace {

double real_pairing(const CMatrix& x, const CMatrix& y)
{
  // −Re tr(XY)
  double s = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t k = 0; k < x.cols(); ++k) s -= (x(i, k) * y(k, i)).real();
  return s;
}

}  // namespace

LieAlgebra LieAlgebra::su(std::size_t n)
{
  if (n < 2) throw DomainError("su(n) needs n ≥ 2");
  const Complex factor{0.0, -0.5};
  std::vector<CMatrix> basis;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j + 1; k < n; ++k) {
      CMatrix sym(n, n);
      sym(j, k) = 1.0;
      sym(k, j) = 1.0;
      CMatrix anti(n, n);
      anti(j, k) = Complex(0.0, -1.0);
      anti(k, j) = Complex(0.0, 1.0);
      basis.push_back(factor * sym);
      basis.push_back(factor * anti);
    }
  for (std::size_t l = 1; l < n; ++l) {
    CMatrix d(n, n);
    const double c = std::sqrt(2.0 / static_cast<double>(l * (l + 1)));
    for (std::size_t m = 0; m < l; ++m) d(m, m) = c;
    d(l, l) = -c * static_cast<double>(l);
    basis.push_back(factor * d);
  }
  return from_basis(std::move(basis), "su" + std::to_string(n));
}

LieAlgebra LieAlgebra::abelian(std::size_t k)
{
  if (k < 1) throw DomainError("u(1)^k needs k ≥ 1");
  std::vector<CMatrix> basis;
  for (std::size_t a = 0; a < k; ++a) {
    CMatrix d(k, k);
    d(a, a) = Complex(0.0, 1.0);
    basis.push_back(d);
  }
  return from_basis(std::move(basis), "u1^" + std::to_string(k));
}

LieAlgebra LieAlgebra::from_basis(std::vector<CMatrix> basis, std::string name)
{
  if (basis.empty()) throw DomainError("empty basis");
  const std::size_t m = basis.front().rows();
  for (const auto& b : basis) {
    if (!b.is_square() || b.rows() != m) throw ShapeError("basis matrices must be square of equal size");
  }
  LieAlgebra g;
  g.name_ = std::move(name);
  g.basis_ = std::move(basis);
  g.build();
  return g;
}

void LieAlgebra::build()
{
  const std::size_t d = dimension();
  gram_ = RMatrix(d, d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) gram_(a, b) = real_pairing(basis_[a], basis_[b]);
  const HermitianSpectrum e = hermitian_eig(to_complex(gram_), 1e-10);
  if (!(e.values.front() > 1e-12 * e.values.back())) {
    throw DomainError("inner product −tr(XY) is not positive definite on the basis");
  }
  gram_inv_ = inverse(gram_);

  structure_.assign(d * d * d, 0.0);
  double closure = 0.0;
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      const CMatrix c = commutator(basis_[a], basis_[b]);
      const LieVector coords = from_matrix(c);
      for (std::size_t k = 0; k < d; ++k) structure_[(a * d + b) * d + k] = coords[k];
      closure = std::max(closure, frobenius_norm(to_matrix(coords) - c));
    }
  double scale = 1.0;
  for (const auto& b : basis_) scale = std::max(scale, frobenius_norm(b) * frobenius_norm(b));
  if (closure > 1e-10 * scale) throw DomainError("basis is not closed under the bracket");
  if (jacobi_residual() > 1e-12 * scale * scale) throw DomainError("Jacobi identity fails");
  if (ad_invariance_residual() > 1e-12 * scale * scale) throw DomainError("inner product is not ad-invariant");
}

bool LieAlgebra::is_abelian() const
{
  return std::all_of(structure_.begin(), structure_.end(), [](double c) { return std::abs(c) < 1e-14; });
}

LieVector LieAlgebra::bracket(const LieVector& x, const LieVector& y) const
{
  const std::size_t d = dimension();
  LieVector z(d, 0.0);
  for (std::size_t a = 0; a < d; ++a) {
    if (x[a] == 0.0) continue;
    for (std::size_t b = 0; b < d; ++b) {
      const double w = x[a] * y[b];
      if (w == 0.0) continue;
      const double* c = &structure_[(a * d + b) * d];
      for (std::size_t k = 0; k < d; ++k) z[k] += w * c[k];
    }
  }
  return z;
}

double LieAlgebra::inner(const LieVector& x, const LieVector& y) const
{
  double s = 0.0;
  for (std::size_t a = 0; a < dimension(); ++a)
    for (std::size_t b = 0; b < dimension(); ++b) s += x[a] * gram_(a, b) * y[b];
  return s;
}

double LieAlgebra::norm(const LieVector& x) const { return std::sqrt(std::max(0.0, inner(x, x))); }

CMatrix LieAlgebra::to_matrix(const LieVector& x) const
{
  const std::size_t m = matrix_size();
  CMatrix out(m, m);
  for (std::size_t a = 0; a < dimension(); ++a)
    if (x[a] != 0.0) out += basis_[a] * Complex(x[a]);
  return out;
}

LieVector LieAlgebra::from_matrix(const CMatrix& m) const
{
  const std::size_t d = dimension();
  std::vector<double> rhs(d);
  for (std::size_t a = 0; a < d; ++a) rhs[a] = real_pairing(basis_[a], m);
  LieVector x(d, 0.0);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) x[a] += gram_inv_(a, b) * rhs[b];
  return x;
}

double LieAlgebra::jacobi_residual() const
{
  const std::size_t d = dimension();
  double worst = 0.0;
  auto e = [&](std::size_t a) {
    LieVector v(d, 0.0);
    v[a] = 1.0;
    return v;
  };
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b)
      for (std::size_t c = 0; c < d; ++c) {
        const LieVector x = e(a), y = e(b), z = e(c);
        LieVector s = bracket(x, bracket(y, z));
        s = axpy(1.0, bracket(y, bracket(z, x)), s);
        s = axpy(1.0, bracket(z, bracket(x, y)), s);
        for (double v : s) worst = std::max(worst, std::abs(v));
      }
  return worst;
}

double LieAlgebra::ad_invariance_residual() const
{
  const std::size_t d = dimension();
  double worst = 0.0;
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b)
      for (std::size_t c = 0; c < d; ++c) {
        LieVector x(d, 0.0), y(d, 0.0), z(d, 0.0);
        x[a] = 1.0;
        y[b] = 1.0;
        z[c] = 1.0;
        worst = std::max(worst, std::abs(inner(bracket(x, y), z) + inner(y, bracket(x, z))));
      }
  return worst;
}

bool LieAlgebra::is_central(const LieVector& x, double eta) const
{
  const double scale = std::max(1.0, norm(x));
  for (std::size_t a = 0; a < dimension(); ++a) {
    LieVector e(dimension(), 0.0);
    e[a] = 1.0;
    if (norm(bracket(x, e)) > eta * scale) return false;
  }
  return true;
}

LieVector axpy(double s, const LieVector& x, const LieVector& y)
{
  LieVector z(y);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] += s * x[i];
  return z;
}

LieVector scaled(double s, const LieVector& x)
{
  LieVector z(x);
  for (double& v : z) v *= s;
  return z;
}

}  // namespace momentlab
