#include "momentlab/symplectic_cut.hpp"

#include <algorithm>

#include "momentlab/linalg.hpp"

namespace momentlab::cut {

namespace {

constexpr Complex kI{0.0, 1.0};

std::size_t count_positive(const std::vector<double>& values, double eta)
{
  double smax = 0.0;
  for (double v : values) smax = std::max(smax, std::abs(v));
  const double thr = eta * std::max(1.0, smax);
  return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [&](double v) { return v > thr; }));
}

}  // namespace

CMatrix sympl_moment(const CMatrix& a)
{
  if (!a.is_square()) throw ShapeError("sympl_moment needs a square matrix");
  return kI * (a.adjoint() * a);
}

CMatrix cut_section(const CMatrix& h) { return psd_sqrt(h); }

HermitianConePoint cone_point(const CMatrix& h, double eta)
{
  return {h, fiber_description(h, eta).positive_count};
}

FiberDescription fiber_description(const CMatrix& h, double eta)
{
  const HermitianSpectrum e = hermitian_eig(h);
  const double floor = 1e-10 * tolerance_scale(h);
  if (!e.values.empty() && e.values.front() < -floor) {
    throw NotPSD("smallest eigenvalue " + std::to_string(e.values.front()));
  }
  const std::size_t n = h.rows();
  const std::size_t k = count_positive(e.values, eta);
  return {k, n * n - (n - k) * (n - k)};
}

CMatrix central_level(std::size_t n, double lambda) { return CMatrix::identity(n) * Complex(0.0, lambda); }

CutMembership cut_membership(const CMatrix& moment_value, const CMatrix& level, double eta)
{
  if (!level.is_square() || level.rows() != moment_value.rows() || !moment_value.is_square()) {
    throw ShapeError("cut_membership: moment value and level must be square of equal size");
  }
  const std::size_t n = level.rows();
  const Complex lambda = n ? level(0, 0) : Complex{};
  const double tol = 1e-12 * tolerance_scale(level);
  if (std::abs(lambda.real()) > tol || frobenius_norm(level - CMatrix::identity(n) * lambda) > tol) {
    throw NonCentralLevel("level is not a real multiple of i·Id");
  }
  CMatrix h = (moment_value - level) * Complex(0.0, -1.0);
  h = (h + h.adjoint()) * Complex(0.5);
  const HermitianSpectrum e = hermitian_eig(h);
  CutMembership out;
  out.inside = e.values.empty() || e.values.front() >= -eta * tolerance_scale(h);
  if (out.inside) out.positive_count = count_positive(e.values, eta);
  return out;
}

}  // namespace momentlab::cut
