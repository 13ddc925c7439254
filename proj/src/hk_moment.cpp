#include "momentlab/hk_moment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "momentlab/linalg.hpp"

namespace momentlab::hk {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr Complex kHalfI{0.0, 0.5};
constexpr double kCondCutoff = 1e8;

void check_shapes(const HKPoint& p)
{
  if (p.a.cols() != p.b.rows() || p.a.rows() != p.b.cols()) {
    throw ShapeError("HKPoint shapes " + p.a.shape_string() + " and " + p.b.shape_string() + " do not compose");
  }
}

void check_invertible(const HKPoint& p)
{
  if (!p.a.is_square() || !p.b.is_square()) throw ShapeError("square A, B required");
  if (condition_number(p.a) > kCondCutoff || condition_number(p.b) > kCondCutoff) {
    throw SingularBasePoint("A or B has condition number above 1e8");
  }
}

CMatrix block_diag(const std::vector<CMatrix>& blocks)
{
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.rows();
  CMatrix out(n, n);
  std::size_t off = 0;
  for (const auto& b : blocks) {
    out.set_block(off, off, b);
    off += b.rows();
  }
  return out;
}

CMatrix columns(const CMatrix& m, std::size_t first, std::size_t count) { return m.block(0, first, m.rows(), count); }

CMatrix hstack(std::initializer_list<CMatrix> parts)
{
  std::size_t rows = parts.begin()->rows();
  std::size_t cols = 0;
  for (const auto& p : parts) cols += p.cols();
  CMatrix out(rows, cols);
  std::size_t off = 0;
  for (const auto& p : parts) {
    out.set_block(0, off, p);
    off += p.cols();
  }
  return out;
}

// Orthonormal eigenbasis of im P (eigenvalues above the rank threshold) and of ker P.
std::pair<CMatrix, CMatrix> image_kernel_bases(const CMatrix& p, double eta)
{
  const HermitianSpectrum e = hermitian_eig(p);
  const std::size_t n = p.rows();
  double top = 0.0;
  for (double v : e.values) top = std::max(top, std::abs(v));
  const double thr = std::max(eta * top, 1e-14);
  std::vector<std::size_t> image_idx;
  for (std::size_t j = n; j-- > 0;) {
    if (e.values[j] > thr) image_idx.push_back(j);
  }
  CMatrix im(n, image_idx.size());
  for (std::size_t c = 0; c < image_idx.size(); ++c) im.set_col(c, e.vectors.col(image_idx[c]));
  const CMatrix full = orthonormal_completion(im);
  return {im, columns(full, image_idx.size(), n - image_idx.size())};
}

void check_nonnegative_hermitian(const CMatrix& p)
{
  if (!p.is_square()) throw ShapeError("P must be square");
  if (!is_hermitian(p, 1e-10)) throw NonHermitianInput("P is not Hermitian");
  const HermitianSpectrum e = hermitian_eig(p);
  if (!e.values.empty() && e.values.front() < -1e-10 * tolerance_scale(p)) throw NotPSD("P has a negative eigenvalue");
}

}  // namespace

MomentValue operator-(const MomentValue& x, const MomentValue& y) { return {x.r - y.r, x.s - y.s}; }
MomentValue operator+(const MomentValue& x, const MomentValue& y) { return {x.r + y.r, x.s + y.s}; }

double norm(const MomentValue& m) { return std::hypot(frobenius_norm(m.r), frobenius_norm(m.s)); }

MomentValue central_level(std::size_t n, const std::array<double, 3>& eps)
{
  return {CMatrix::identity(n) * Complex(0.0, eps[0]), CMatrix::identity(n) * Complex(eps[1], eps[2])};
}

MomentValue hk_moment(const HKPoint& p)
{
  check_shapes(p);
  return {kHalfI * (p.a.adjoint() * p.a - p.b * p.b.adjoint()), p.b * p.a};
}

MomentValue hk_moment_left(const HKPoint& p)
{
  check_shapes(p);
  return {kHalfI * (p.b.adjoint() * p.b - p.a * p.a.adjoint()), p.a * p.b};
}

MomentValue d_moment(const HKPoint& p, const TangentVector& v)
{
  check_shapes(p);
  if (v.a.rows() != p.a.rows() || v.a.cols() != p.a.cols() || v.b.rows() != p.b.rows() || v.b.cols() != p.b.cols()) {
    throw ShapeError("tangent vector does not match base point");
  }
  const CMatrix ad = p.a.adjoint();
  const CMatrix bd = p.b.adjoint();
  CMatrix r = v.a.adjoint() * p.a + ad * v.a - p.b * v.b.adjoint() - v.b * bd;
  return {kHalfI * r, p.b * v.a + v.b * p.a};
}

std::vector<double> pack_point(const HKPoint& p)
{
  std::vector<double> x;
  x.reserve(2 * (p.a.size() + p.b.size()));
  for (const auto* m : {&p.a, &p.b})
    for (const Complex& z : m->data()) {
      x.push_back(z.real());
      x.push_back(z.imag());
    }
  return x;
}

HKPoint unpack_point(std::span<const double> x, std::size_t r, std::size_t n)
{
  if (x.size() != 4 * r * n) throw ShapeError("packed point has wrong length");
  HKPoint p{CMatrix(r, n), CMatrix(n, r)};
  std::size_t k = 0;
  for (auto* m : {&p.a, &p.b})
    for (Complex& z : m->data()) {
      z = {x[k], x[k + 1]};
      k += 2;
    }
  return p;
}

std::vector<double> pack_moment(const MomentValue& m)
{
  const std::size_t n = m.r.rows();
  std::vector<double> y;
  y.reserve(3 * n * n);
  for (std::size_t k = 0; k < n; ++k) y.push_back(m.r(k, k).imag());
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = k + 1; l < n; ++l) {
      y.push_back(std::numbers::sqrt2 * m.r(k, l).real());
      y.push_back(std::numbers::sqrt2 * m.r(k, l).imag());
    }
  for (const Complex& z : m.s.data()) {
    y.push_back(z.real());
    y.push_back(z.imag());
  }
  return y;
}

MomentValue unpack_moment(std::span<const double> y, std::size_t n)
{
  if (y.size() != 3 * n * n) throw ShapeError("packed moment has wrong length");
  MomentValue m{CMatrix(n, n), CMatrix(n, n)};
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) m.r(i, i) = {0.0, y[k++]};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const Complex z{y[k] / std::numbers::sqrt2, y[k + 1] / std::numbers::sqrt2};
      k += 2;
      m.r(i, j) = z;
      m.r(j, i) = -cj(z);
    }
  for (Complex& z : m.s.data()) {
    z = {y[k], y[k + 1]};
    k += 2;
  }
  return m;
}

RMatrix realified_dmoment(const HKPoint& p)
{
  check_shapes(p);
  const std::size_t r = p.a.rows();
  const std::size_t n = p.a.cols();
  const CMatrix& A = p.a;
  const CMatrix& B = p.b;
  RMatrix out(3 * n * n, 4 * r * n);
  CMatrix dr(n, n);
  CMatrix ds(n, n);
  std::size_t col = 0;

  auto emit = [&] {
    dr *= kHalfI;
    const std::vector<double> y = pack_moment({dr, ds});
    for (std::size_t row = 0; row < y.size(); ++row) out(row, col) = y[row];
    ++col;
    dr = CMatrix(n, n);
    ds = CMatrix(n, n);
  };

  // a = z·E_pq (p < r, q < n): a*A adds conj(z)·A(p,:) to row q, A*a adds
  // z·conj(A(p,:))ᵀ to column q, Ba adds z·B(:,p) to column q.
  for (std::size_t pp = 0; pp < r; ++pp)
    for (std::size_t q = 0; q < n; ++q)
      for (const Complex z : {Complex(1.0, 0.0), kI}) {
        for (std::size_t l = 0; l < n; ++l) dr(q, l) += cj(z) * A(pp, l);
        for (std::size_t k = 0; k < n; ++k) dr(k, q) += z * cj(A(pp, k));
        for (std::size_t k = 0; k < n; ++k) ds(k, q) += z * B(k, pp);
        emit();
      }
  // b = z·E_pq (p < n, q < r): −Bb* adds −conj(z)·B(:,q) to column p, −bB*
  // adds −z·conj(B(:,q))ᵀ to row p, bA adds z·A(q,:) to row p.
  for (std::size_t pp = 0; pp < n; ++pp)
    for (std::size_t q = 0; q < r; ++q)
      for (const Complex z : {Complex(1.0, 0.0), kI}) {
        for (std::size_t k = 0; k < n; ++k) dr(k, pp) -= cj(z) * B(k, q);
        for (std::size_t l = 0; l < n; ++l) dr(pp, l) -= z * cj(B(l, q));
        for (std::size_t l = 0; l < n; ++l) ds(pp, l) += z * A(q, l);
        emit();
      }
  return out;
}

std::size_t kernel_dim(const HKPoint& p, double eta) { return real_kernel(realified_dmoment(p), eta).dimension; }

CMatrix l_matrix(const HKPoint& p)
{
  check_shapes(p);
  check_invertible(p);
  return solve(p.b, p.a.adjoint());
}

bool kernel_membership_check(const HKPoint& p, const CMatrix& h, double eta)
{
  const CMatrix l = l_matrix(p);
  if (h.rows() != l.rows() || !h.is_square()) throw ShapeError("h must be n×n");
  const CMatrix k = h + h.adjoint();
  const double congruence = frobenius_norm(l * k * l.adjoint() + k);
  const double lscale = tolerance_scale(l);
  if (congruence >= eta * tolerance_scale(k) * lscale * lscale) return false;
  const MomentValue dv = d_moment(p, {h * p.a, -(p.b * h)});
  const double scale = tolerance_scale(h) * std::max(tolerance_scale(p.a) * tolerance_scale(p.a),
                                                      tolerance_scale(p.b) * tolerance_scale(p.b));
  return norm(dv) < eta * scale;
}

CriticalTest critical_point_test(const HKPoint& p, double eta)
{
  CriticalTest out;
  out.spectrum = general_eig(l_matrix(p)).values;
  double best = 0.0;
  // λ runs from the top of the sorted spectrum so diag(1,−1) reports (1, −1)
  for (auto it = out.spectrum.rbegin(); it != out.spectrum.rend(); ++it)
    for (const Complex& mu : out.spectrum) {
      const Complex lam = *it;
      const Complex prod = lam * cj(mu);
      const double gap = std::abs(prod + 1.0) / (1.0 + std::abs(prod));
      if (gap < eta && (!out.witness || gap < best)) {
        out.critical = true;
        out.witness = {lam, mu};
        best = gap;
      }
    }
  return out;
}

CMatrix hermitian_eigvector_witness(const CMatrix& l, std::span<const Complex> v, std::span<const Complex> w,
                                    double eta)
{
  if (!l.is_square() || v.size() != l.rows() || w.size() != l.rows()) throw ShapeError("eigenvector length mismatch");
  const std::size_t n = l.rows();
  const double nv = vector_norm(v);
  const double nw = vector_norm(w);
  if (nv == 0.0 && nw == 0.0) return CMatrix(n, n);
  if (nv == 0.0 || nw == 0.0) throw NotEigenPair("one of v, w is zero");

  auto eigenvalue = [&](std::span<const Complex> x, double nx) {
    const std::vector<Complex> lx = l * x;
    const Complex lam = inner_product(x, std::span<const Complex>(lx)) / (nx * nx);
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) res += abs2(lx[i] - lam * x[i]);
    if (std::sqrt(res) > eta * tolerance_scale(l) * nx) throw NotEigenPair("vector is not an eigenvector of L");
    return lam;
  };
  const Complex lam = eigenvalue(v, nv);
  const Complex mu = eigenvalue(w, nw);
  const Complex prod = lam * cj(mu);
  if (std::abs(prod + 1.0) > eta * (1.0 + std::abs(prod))) throw NotEigenPair("eigenvalues do not satisfy λμ̄ = −1");

  CMatrix h(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h(i, j) = v[i] * cj(w[j]) + w[i] * cj(v[j]);
  return h;
}

DiscFiberPoint disc_fiber_point(double d, double phase)
{
  if (!(d > 0.0 && d <= 1.0)) throw DomainError("disc parameter d must lie in (0, 1]");
  const double modulus = std::sqrt(std::max(0.0, 1.0 / (d * d) - d * d));
  const Complex b = std::polar(modulus, phase);
  const CMatrix t{{Complex(1.0 / d), b}, {Complex(0.0), Complex(d)}};
  const CMatrix l = CMatrix::diagonal({Complex(1.0), Complex(-1.0)});
  const CMatrix tinv = inverse(t);
  const CMatrix w = tinv.adjoint() * l * tinv;
  if (unitarity_defect(w) > 1e-8) throw DomainError("W = (T*)⁻¹LT⁻¹ is not unitary");
  return {{w * t, t.adjoint()}, t, w};
}

HKPoint disc_fiber_sum(std::span<const double> ds, const CMatrix& l_prime)
{
  if (!l_prime.is_square()) throw ShapeError("L′ must be square");
  std::vector<CMatrix> as;
  std::vector<CMatrix> bs;
  for (double d : ds) {
    const DiscFiberPoint f = disc_fiber_point(d);
    as.push_back(f.point.a);
    bs.push_back(f.point.b);
  }
  if (l_prime.rows() > 0) {
    if (condition_number(l_prime) > kCondCutoff) throw SingularMatrix("L′ is singular");
    // For normal L′ with H = (L′*L′)^{1/2}, P = H^{1/2} and W = P⁻¹L′P⁻¹:
    // (WP, P) maps to (0, L′). Otherwise refine that start by least squares.
    const CMatrix h = psd_sqrt(l_prime.adjoint() * l_prime);
    const CMatrix p = psd_sqrt(h);
    const CMatrix pinv = inverse(p);
    const CMatrix w = pinv * l_prime * pinv;
    HKPoint block{w * p, p};
    const MomentValue target{CMatrix(l_prime.rows(), l_prime.rows()), l_prime};
    const double tol = 1e-10 * tolerance_scale(l_prime);
    if (norm(hk_moment(block) - target) > tol) {
      const SolveResult s = solve_moment(target, block);
      if (s.residual > tol) throw NoConvergence("no point found over (0, L′)");
      block = s.point;
    }
    as.push_back(block.a);
    bs.push_back(block.b);
  }
  return {block_diag(as), block_diag(bs)};
}

HKPoint zero_fiber_point(const CMatrix& p, const CMatrix& w, double eta)
{
  check_nonnegative_hermitian(p);
  const std::size_t n = p.rows();
  if (w.rows() != n || w.cols() != n) throw ShapeError("W must be n×n");
  if (2 * rank_tol(p, eta) > n) throw RankTooLarge("rank(P) exceeds n/2");
  if (!is_unitary(w, 1e-10)) throw DomainError("W is not unitary");
  const double pn = frobenius_norm(p);
  if (frobenius_norm(p * w * p) > std::max(eta * pn * pn, 1e-14)) throw NotIsotropic("PWP is not zero");
  return {p, p * w};
}

CMatrix canonical_isotropic_unitary(const CMatrix& p, double eta)
{
  check_nonnegative_hermitian(p);
  const auto [im, ker] = image_kernel_bases(p, eta);
  const std::size_t k = im.cols();
  if (2 * k > p.rows()) throw RankTooLarge("rank(P) exceeds n/2");
  const CMatrix domain = hstack({im, ker});
  const CMatrix codomain = hstack({columns(ker, 0, k), im, columns(ker, k, ker.cols() - k)});
  return codomain * domain.adjoint();
}

CMatrix random_isotropic_unitary(const CMatrix& p, Rng& rng, double eta)
{
  check_nonnegative_hermitian(p);
  auto [im, ker] = image_kernel_bases(p, eta);
  const std::size_t k = im.cols();
  if (2 * k > p.rows()) throw RankTooLarge("rank(P) exceeds n/2");
  if (k > 0) im = im * rng.haar_unitary(k);
  if (ker.cols() > 0) ker = ker * rng.haar_unitary(ker.cols());
  const CMatrix domain = hstack({im, ker});
  const CMatrix codomain = hstack({columns(ker, 0, k), im, columns(ker, k, ker.cols() - k)});
  return codomain * domain.adjoint();
}

OrbitMatch orbit_match(const HKPoint& p1, const HKPoint& p2, double eta)
{
  check_shapes(p1);
  check_shapes(p2);
  if (!p1.a.is_square() || p1.a.rows() != p2.a.rows()) throw ShapeError("orbit_match needs square points of equal size");
  for (const HKPoint* q : {&p1, &p2}) {
    const double scale = tolerance_scale(q->a) * tolerance_scale(q->b);
    if (norm(hk_moment(*q)) > 1e-8 * scale) throw DomainError("point is not in the zero fibre");
  }
  const PolarDecomposition a1 = polar_decompose(p1.a);
  const PolarDecomposition a2 = polar_decompose(p2.a);
  if (frobenius_norm(a1.positive - a2.positive) > eta * tolerance_scale(a1.positive)) {
    throw InvariantMismatch("(A*A)^{1/2} differs between the two points");
  }
  const CMatrix p = (a1.positive + a2.positive) * Complex(0.5);
  const std::size_t n = p.rows();
  // B = PV from the polar decomposition B* = V*P, and W = VU maps im P into ker P.
  const CMatrix v1 = polar_decompose(p1.b.adjoint()).unitary.adjoint();
  const CMatrix v2 = polar_decompose(p2.b.adjoint()).unitary.adjoint();
  const CMatrix w1 = v1 * a1.unitary;
  const CMatrix w2 = v2 * a2.unitary;

  const CMatrix ex = image_kernel_bases(p, eta).first;
  CMatrix w = CMatrix::identity(n);
  if (ex.cols() > 0) {
    const CMatrix ey = w1.adjoint() * ex;
    const CMatrix target = w2.adjoint() * ex;
    const CMatrix domain = orthonormal_completion(hstack({ex, ey}));
    const CMatrix codomain = orthonormal_completion(hstack({ex, target}));
    w = codomain * domain.adjoint();
  }
  OrbitMatch out;
  out.u = a1.unitary * w.adjoint() * a2.unitary.adjoint();
  out.residual = frobenius_norm(out.u * p2.a - p1.a) + frobenius_norm(p2.b * out.u.adjoint() - p1.b);
  return out;
}

CMatrix non_image_matrix(std::size_t n, Complex lambda, Rng& rng)
{
  if (n < 2) throw DomainError("non_image_matrix needs n ≥ 2");
  CMatrix m(n, n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    m(i, i + 1) = std::polar(rng.uniform(0.5, 2.0), rng.uniform(0.0, 2.0 * std::numbers::pi));
  }
  Complex sum{};
  for (std::size_t j = 1; j + 1 < n; ++j) {
    m(j, j) = rng.complex_normal();
    sum += m(j, j);
  }
  m(n - 1, n - 1) = static_cast<double>(n) * lambda - sum;
  return m;
}

SolveResult solve_moment(const MomentValue& target, const HKPoint& start, const LevMarOptions& options)
{
  check_shapes(start);
  const std::size_t r = start.a.rows();
  const std::size_t n = start.a.cols();
  if (target.r.rows() != n || target.s.rows() != n) throw ShapeError("target does not match the point");
  const std::vector<double> goal = pack_moment(target);
  auto residual = [&](std::span<const double> x) {
    std::vector<double> y = pack_moment(hk_moment(unpack_point(x, r, n)));
    for (std::size_t i = 0; i < y.size(); ++i) y[i] -= goal[i];
    return y;
  };
  auto jacobian = [&](std::span<const double> x) { return realified_dmoment(unpack_point(x, r, n)); };
  const LevMarResult lm = levenberg_marquardt(residual, jacobian, pack_point(start), options);
  SolveResult out{unpack_point(lm.x, r, n), 0.0, lm.iterations};
  out.residual = norm(hk_moment(out.point) - target);
  return out;
}

SearchResult nonmembership_search(const MomentValue& target, int restarts, std::uint64_t seed,
                                  const LevMarOptions& options)
{
  if (restarts < 1) throw DomainError("restarts must be at least 1");
  const std::size_t n = target.s.rows();
  Rng master(seed);
  SearchResult out;
  for (int k = 0; k < restarts; ++k) {
    Rng rng(master.next_seed());
    const HKPoint start{rng.ginibre(n, n), rng.ginibre(n, n)};
    SolveResult s = solve_moment(target, start, options);
    out.residuals.push_back(s.residual);
    if (k == 0 || s.residual < out.best_residual) {
      out.best_residual = s.residual;
      out.best_point = std::move(s.point);
    }
  }
  return out;
}

FiberProbe lambda_fiber_probe(std::size_t n, Complex lambda, int samples, std::uint64_t seed, double accept_residual)
{
  const MomentValue target{CMatrix(n, n), CMatrix::identity(n) * lambda};
  Rng master(seed);
  std::vector<std::vector<double>> spectra;
  FiberProbe out;
  for (int k = 0; k < samples; ++k) {
    Rng rng(master.next_seed());
    const SolveResult s = solve_moment(target, {rng.ginibre(n, n), rng.ginibre(n, n)});
    if (s.residual > accept_residual) continue;
    out.max_residual = std::max(out.max_residual, s.residual);
    spectra.push_back(hermitian_eig(s.point.a.adjoint() * s.point.a, 1e-10).values);
  }
  out.solutions = spectra.size();
  for (std::size_t i = 0; i < spectra.size(); ++i)
    for (std::size_t j = i + 1; j < spectra.size(); ++j) {
      double d = 0.0;
      for (std::size_t t = 0; t < n; ++t) d += (spectra[i][t] - spectra[j][t]) * (spectra[i][t] - spectra[j][t]);
      out.dispersion = std::max(out.dispersion, std::sqrt(d));
    }
  return out;
}

}  // namespace momentlab::hk
