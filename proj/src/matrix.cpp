#include "momentlab/matrix.hpp"

namespace momentlab {

double hermitian_defect(const CMatrix& a)
{
  if (!a.is_square()) throw ShapeError("hermitian_defect needs a square matrix");
  return frobenius_norm(a - a.adjoint());
}

double skew_hermitian_defect(const CMatrix& a)
{
  if (!a.is_square()) throw ShapeError("skew_hermitian_defect needs a square matrix");
  return frobenius_norm(a + a.adjoint());
}

double unitarity_defect(const CMatrix& u)
{
  if (!u.is_square()) throw ShapeError("unitarity_defect needs a square matrix");
  return frobenius_norm(u.adjoint() * u - CMatrix::identity(u.rows()));
}

bool is_hermitian(const CMatrix& a, double eta)
{
  return a.is_square() && hermitian_defect(a) <= eta * tolerance_scale(a);
}

bool is_skew_hermitian(const CMatrix& a, double eta)
{
  return a.is_square() && skew_hermitian_defect(a) <= eta * tolerance_scale(a);
}

bool is_unitary(const CMatrix& u, double eta)
{
  return u.is_square() && unitarity_defect(u) <= eta * tolerance_scale(u);
}

CMatrix to_complex(const RMatrix& a)
{
  CMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j);
  return c;
}

CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

}  // namespace momentlab
