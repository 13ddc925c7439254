#include "momentlab/modification.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "momentlab/linalg.hpp"
#include "momentlab/random.hpp"

namespace momentlab::mod {

namespace {

constexpr Complex kHalfI{0.0, 0.5};

void check_shapes(const FlatModulePoint& p)
{
  const std::size_t n = p.b1.rows();
  if (!p.b1.is_square() || p.b2.rows() != n || p.b2.cols() != n || p.a.cols() != n || p.b.rows() != n ||
      p.b.cols() != p.a.rows()) {
    throw ShapeError("inconsistent FlatModulePoint shapes");
  }
}

double sgn(Sign s) { return s == Sign::Plus ? 1.0 : -1.0; }

// Real coordinates per block, in the order B₁, B₂, A, B.
std::array<CMatrix*, 4> blocks(FlatModulePoint& p) { return {&p.b1, &p.b2, &p.a, &p.b}; }
std::array<const CMatrix*, 4> blocks(const FlatModulePoint& p) { return {&p.b1, &p.b2, &p.a, &p.b}; }

FlatModulePoint zero_like(std::size_t n, std::size_t r)
{
  return {CMatrix(n, n), CMatrix(n, n), CMatrix(r, n), CMatrix(n, r)};
}

// Directional derivative of adhm_moment at p along v.
hk::MomentValue adhm_derivative(const FlatModulePoint& p, const FlatModulePoint& v, Sign sign)
{
  const double s = sgn(sign);
  const CMatrix r = commutator(v.b1, p.b1.adjoint()) + commutator(p.b1, v.b1.adjoint()) +
                    commutator(v.b2, p.b2.adjoint()) + commutator(p.b2, v.b2.adjoint()) +
                    (v.a.adjoint() * p.a + p.a.adjoint() * v.a - v.b * p.b.adjoint() - p.b * v.b.adjoint()) *
                        Complex(s);
  const CMatrix c = commutator(v.b1, p.b2) + commutator(p.b1, v.b2) + (p.b * v.a + v.b * p.a) * Complex(s);
  return {kHalfI * r, c};
}

std::array<double, 3> quaternion_imag(const QuaternionPoint& q) { return {q[1], q[2], q[3]}; }

double dot(std::span<const double> x, std::span<const double> y, std::span<const double> weight)
{
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += weight[i] * x[i] * y[i];
  return s;
}

// Subtracts from u its g-orthogonal projection onto k.
void make_orthogonal(std::vector<double>& u, std::span<const double> k, std::span<const double> weight)
{
  const double kk = dot(k, k, weight);
  if (kk == 0.0) return;
  const double c = dot(u, k, weight) / kk;
  for (std::size_t i = 0; i < u.size(); ++i) u[i] -= c * k[i];
}

// Jacobian of q ↦ q̄iq as a 3×4 real matrix (columns: derivative along 1, i, j, k).
RMatrix hopf_jacobian(const QuaternionPoint& q)
{
  RMatrix j(3, 4);
  const QuaternionPoint unit_i{0.0, 1.0, 0.0, 0.0};
  const QuaternionPoint qi = quaternion_multiply(unit_i, q);
  for (std::size_t c = 0; c < 4; ++c) {
    QuaternionPoint e{};
    e[c] = 1.0;
    // d(q̄iq)(e) = ēiq + q̄ie
    const QuaternionPoint d1 = quaternion_multiply(quaternion_conjugate(e), qi);
    const QuaternionPoint d2 = quaternion_multiply(quaternion_conjugate(q), quaternion_multiply(unit_i, e));
    for (std::size_t r = 0; r < 3; ++r) j(r, c) = d1[r + 1] + d2[r + 1];
  }
  return j;
}

}  // namespace

hk::MomentValue adhm_moment(const FlatModulePoint& p, Sign sign)
{
  check_shapes(p);
  const double s = sgn(sign);
  const CMatrix r = commutator(p.b1, p.b1.adjoint()) + commutator(p.b2, p.b2.adjoint()) +
                    (p.a.adjoint() * p.a - p.b * p.b.adjoint()) * Complex(s);
  return {kHalfI * r, commutator(p.b1, p.b2) + (p.b * p.a) * Complex(s)};
}

std::vector<double> pack(const FlatModulePoint& p)
{
  std::vector<double> x;
  for (const CMatrix* m : blocks(p))
    for (const Complex& z : m->data()) {
      x.push_back(z.real());
      x.push_back(z.imag());
    }
  return x;
}

FlatModulePoint unpack(std::span<const double> x, std::size_t n, std::size_t r)
{
  FlatModulePoint p = zero_like(n, r);
  if (x.size() != 4 * n * n + 4 * r * n) throw ShapeError("packed ADHM point has wrong length");
  std::size_t k = 0;
  for (CMatrix* m : blocks(p))
    for (Complex& z : m->data()) {
      z = {x[k], x[k + 1]};
      k += 2;
    }
  return p;
}

RMatrix adhm_jacobian(const FlatModulePoint& p, Sign sign)
{
  check_shapes(p);
  const std::size_t n = p.b1.rows();
  const std::size_t r = p.a.rows();
  const std::size_t dim = 4 * n * n + 4 * r * n;
  RMatrix j(3 * n * n, dim);
  std::vector<double> e(dim, 0.0);
  for (std::size_t c = 0; c < dim; ++c) {
    e[c] = 1.0;
    const std::vector<double> y = hk::pack_moment(adhm_derivative(p, unpack(e, n, r), sign));
    e[c] = 0.0;
    for (std::size_t row = 0; row < y.size(); ++row) j(row, c) = y[row];
  }
  return j;
}

FlatModulePoint gauge_transform(const FlatModulePoint& p, const CMatrix& g)
{
  const CMatrix gi = inverse(g);
  return {g * p.b1 * gi, g * p.b2 * gi, p.a * gi, g * p.b};
}

LevelSolveResult adhm_solve(std::size_t n, std::size_t r, const std::array<double, 3>& eps, std::uint64_t seed,
                            const AdhmOptions& options)
{
  if (n < 1 || r < 1) throw DomainError("adhm_solve needs n ≥ 1 and r ≥ 1");
  const std::vector<double> goal = hk::pack_moment(hk::central_level(n, eps));
  auto residual = [&](std::span<const double> x) {
    std::vector<double> y = hk::pack_moment(adhm_moment(unpack(x, n, r), options.sign));
    for (std::size_t i = 0; i < y.size(); ++i) y[i] -= goal[i];
    return y;
  };
  auto jacobian = [&](std::span<const double> x) { return adhm_jacobian(unpack(x, n, r), options.sign); };

  Rng master(seed);
  LevMarResult best;
  best.residual = INFINITY;
  int used = 0;
  for (int k = 0; k < std::max(1, options.max_restarts); ++k) {
    Rng rng(master.next_seed());
    FlatModulePoint start{rng.ginibre(n, n), rng.ginibre(n, n), rng.ginibre(r, n), rng.ginibre(n, r)};
    LevMarResult lm = levenberg_marquardt(residual, jacobian, pack(start), options.levmar);
    used = k + 1;
    if (lm.residual < best.residual) best = std::move(lm);
    if (best.residual < options.accept_residual) break;
  }
  if (!(best.residual < options.accept_residual)) {
    throw NoConvergence("ADHM level set not reached; best residual " + std::to_string(best.residual));
  }

  LevelSolveResult out;
  out.point = unpack(best.x, n, r);
  if (options.gauge_fix) out.point = gauge_transform(out.point, schur(out.point.b1).q.adjoint());
  out.residual = hk::norm(adhm_moment(out.point, options.sign) - hk::central_level(n, eps));
  const RealKernel ker = real_kernel(adhm_jacobian(out.point, options.sign), options.kernel_eta);
  out.kernel_dim = ker.dimension;
  out.rank = 4 * n * n + 4 * r * n - ker.dimension;
  out.b1_spectrum = general_eig(out.point.b1).values;
  out.ata_spectrum = hermitian_eig(out.point.a.adjoint() * out.point.a, 1e-10).values;
  out.restarts_used = used;
  return out;
}

std::string to_string(Stratum s)
{
  switch (s) {
    case Stratum::Removed: return "removed";
    case Stratum::RegularFibered: return "regular-fibered";
    case Stratum::ReducedLocus: return "reduced-locus";
    case Stratum::BlownUp: return "blown-up";
  }
  return "unknown";
}

ProbeResult structure_probe(const hk::MomentValue& eps, const hk::MomentValue& target, std::uint64_t seed,
                            const ProbeOptions& options)
{
  const std::size_t n = eps.s.rows();
  const hk::MomentValue value = eps - target;
  ProbeResult out;
  if (hk::norm(value) <= 1e-12 * std::max(1.0, hk::norm(eps))) {
    out.stratum = Stratum::ReducedLocus;
    out.solutions = 1;
    out.max_kernel_dim = 4 * n * n;  // dφ vanishes at (0,0)
    return out;
  }

  Rng master(seed);
  std::vector<std::vector<double>> spectra;
  out.best_residual = INFINITY;
  for (int k = 0; k < options.restarts; ++k) {
    Rng rng(master.next_seed());
    const hk::SolveResult s = hk::solve_moment(value, {rng.ginibre(n, n), rng.ginibre(n, n)});
    out.best_residual = std::min(out.best_residual, s.residual);
    if (s.residual > options.solved_residual) continue;
    out.max_kernel_dim = std::max(out.max_kernel_dim, hk::kernel_dim(s.point, options.kernel_eta));
    spectra.push_back(hermitian_eig(s.point.a.adjoint() * s.point.a, 1e-10).values);
  }
  out.solutions = spectra.size();
  for (std::size_t i = 0; i < spectra.size(); ++i)
    for (std::size_t j = i + 1; j < spectra.size(); ++j) {
      double d = 0.0;
      for (std::size_t t = 0; t < n; ++t) d += (spectra[i][t] - spectra[j][t]) * (spectra[i][t] - spectra[j][t]);
      out.dispersion = std::max(out.dispersion, std::sqrt(d));
    }

  if (out.best_residual > options.removed_floor) {
    out.stratum = Stratum::Removed;
  } else if (out.max_kernel_dim > n * n) {
    out.stratum = Stratum::BlownUp;
  } else {
    out.stratum = Stratum::RegularFibered;
  }
  return out;
}

QuaternionPoint quaternion_multiply(const QuaternionPoint& p, const QuaternionPoint& q)
{
  return {p[0] * q[0] - p[1] * q[1] - p[2] * q[2] - p[3] * q[3],
          p[0] * q[1] + p[1] * q[0] + p[2] * q[3] - p[3] * q[2],
          p[0] * q[2] - p[1] * q[3] + p[2] * q[0] + p[3] * q[1],
          p[0] * q[3] + p[1] * q[2] - p[2] * q[1] + p[3] * q[0]};
}

QuaternionPoint quaternion_conjugate(const QuaternionPoint& q) { return {q[0], -q[1], -q[2], -q[3]}; }

std::array<double, 3> hopf_moment(const QuaternionPoint& q)
{
  const QuaternionPoint unit_i{0.0, 1.0, 0.0, 0.0};
  return quaternion_imag(quaternion_multiply(quaternion_conjugate(q), quaternion_multiply(unit_i, q)));
}

TaubNutSample taubnut_quotient_metric(const std::array<double, 3>& x, std::uint64_t seed,
                                      const TaubNutOptions& options)
{
  if (!(options.v0 > 0.0)) throw DomainError("v0 must be positive");
  const double radius = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  TaubNutSample out;
  out.radius = radius;

  if (!options.quaternion_factor) {
    // ℝ³ × S¹ with metric V₀|dy|² + V₀⁻¹dθ²; the circle field is ∂θ.
    const std::vector<double> weight{options.v0, options.v0, options.v0, 1.0 / options.v0};
    const std::vector<double> k{0.0, 0.0, 0.0, 1.0};
    out.potential = 1.0 / dot(k, k, weight);
    std::vector<double> lift{1.0, 0.0, 0.0, 0.0};
    make_orthogonal(lift, k, weight);
    out.potential_base = dot(lift, lift, weight);
    return out;
  }

  if (radius < 1e-12) throw DegenerateOrbit("the circle has a fixed point over x = 0");

  // Point q of the level set with q̄iq = x.
  Rng rng(seed);
  std::vector<double> q0(4);
  for (double& v : q0) v = rng.normal() * std::sqrt(radius);
  auto residual = [&](std::span<const double> v) {
    const auto h = hopf_moment({v[0], v[1], v[2], v[3]});
    return std::vector<double>{h[0] - x[0], h[1] - x[1], h[2] - x[2]};
  };
  auto jacobian = [&](std::span<const double> v) { return hopf_jacobian({v[0], v[1], v[2], v[3]}); };
  const LevMarResult lm = levenberg_marquardt(residual, jacobian, q0);
  if (lm.residual > 1e-12 * std::max(1.0, radius)) throw NoConvergence("no point of the level set over x");
  const QuaternionPoint q{lm.x[0], lm.x[1], lm.x[2], lm.x[3]};
  out.q = q;

  // Ambient ℍ × ℝ³ × S¹ coordinates (q, y, θ) with metric |dq|² + V₀|dy|² + V₀⁻¹dθ².
  // On the level set y = ε − q̄iq, so a tangent vector is (δq, −dφ(δq), δθ).
  const double v0 = options.v0;
  const std::vector<double> weight{1.0, 1.0, 1.0, 1.0, v0, v0, v0, 1.0 / v0};
  const QuaternionPoint two_i{0.0, 2.0, 0.0, 0.0};
  const QuaternionPoint iq = quaternion_multiply(two_i, q);
  const RMatrix dh = hopf_jacobian(q);
  auto tangent = [&](const QuaternionPoint& dq, double dtheta) {
    std::vector<double> u{dq[0], dq[1], dq[2], dq[3], 0.0, 0.0, 0.0, dtheta};
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = 0; c < 4; ++c) u[4 + r] -= dh(r, c) * dq[c];
    return u;
  };
  const std::vector<double> k_quot = tangent(iq, 1.0);  // the circle being divided out
  std::vector<double> k_res = tangent(iq, 0.0);         // the residual circle on the quotient
  make_orthogonal(k_res, k_quot, weight);
  const double kk = dot(k_res, k_res, weight);
  if (kk < 1e-24) throw DegenerateOrbit("residual circle orbit is degenerate");
  out.potential = 1.0 / kk;

  // Horizontal lifts of unit base vectors δx: minimal-norm δq with dφ(δq) = δx,
  // then orthogonal to both circle directions.
  const RMatrix gram = dh * dh.transpose();
  const RMatrix gram_inv = inverse(gram);
  double acc = 0.0;
  for (std::size_t axis = 0; axis < 3; ++axis) {
    QuaternionPoint dq{};
    for (std::size_t c = 0; c < 4; ++c)
      for (std::size_t r = 0; r < 3; ++r) dq[c] += dh(r, c) * gram_inv(r, axis);
    std::vector<double> lift = tangent(dq, 0.0);
    make_orthogonal(lift, k_quot, weight);
    make_orthogonal(lift, k_res, weight);
    acc += dot(lift, lift, weight);
  }
  out.potential_base = acc / 3.0;
  return out;
}

InverseRadiusFit fit_inverse_radius(std::span<const double> radii, std::span<const double> values)
{
  if (radii.size() != values.size() || radii.size() < 2) throw ShapeError("fit needs matching samples, at least 2");
  const std::size_t m = radii.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double u = 1.0 / radii[i];
    sx += u;
    sy += values[i];
    sxx += u * u;
    sxy += u * values[i];
  }
  const double mean_x = sx / m;
  const double mean_y = sy / m;
  const double var_x = sxx - m * mean_x * mean_x;
  InverseRadiusFit fit;
  fit.c1 = var_x > 0.0 ? (sxy - m * mean_x * mean_y) / var_x : 0.0;
  fit.c0 = mean_y - fit.c1 * mean_x;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double pred = fit.c0 + fit.c1 / radii[i];
    ss_res += (values[i] - pred) * (values[i] - pred);
    ss_tot += (values[i] - mean_y) * (values[i] - mean_y);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
  return fit;
}

}  // namespace momentlab::mod
