#include "momentlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace momentlab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kAbsoluteFloor = 1e-14;

template <typename T>
T unit_phase(const T& x)
{
  if constexpr (is_complex<T>::value) {
    const double r = std::abs(x);
    return r == 0.0 ? T{1.0} : x / r;
  } else {
    return x < 0.0 ? -1.0 : 1.0;
  }
}

void require_square(const CMatrix& a, const char* who)
{
  if (!a.is_square()) throw ShapeError(std::string(who) + " needs a square matrix, got " + a.shape_string());
}

bool lex_less(const Complex& a, const Complex& b)
{
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

// Givens rotation G = [[c, s], [-conj(s), c]] with G [a; b] = [r; 0].
struct Givens {
  double c = 1.0;
  Complex s{0.0, 0.0};
};

Givens make_givens(const Complex& a, const Complex& b)
{
  const double ab = std::abs(b);
  if (ab == 0.0) return {};
  const double aa = std::abs(a);
  if (aa == 0.0) return {0.0, std::conj(b) / ab};
  const double norm = std::hypot(aa, ab);
  return {aa / norm, (a / aa) * std::conj(b) / norm};
}

void reduce_to_hessenberg(CMatrix& h, CMatrix& q)
{
  const std::size_t n = h.rows();
  if (n < 3) return;
  for (std::size_t k = 0; k + 2 < n; ++k) {
    std::vector<Complex> v(n - k - 1);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = h(k + 1 + i, k);
    const double alpha = vector_norm<Complex>(v);
    if (alpha == 0.0) continue;
    v[0] += unit_phase(v[0]) * alpha;
    const double vn = vector_norm<Complex>(v);
    if (vn == 0.0) continue;
    for (auto& x : v) x /= vn;
    // H <- (I - 2vv^*) H on rows k+1..n-1
    for (std::size_t j = 0; j < n; ++j) {
      Complex dot{};
      for (std::size_t i = 0; i < v.size(); ++i) dot += std::conj(v[i]) * h(k + 1 + i, j);
      for (std::size_t i = 0; i < v.size(); ++i) h(k + 1 + i, j) -= 2.0 * v[i] * dot;
    }
    // H <- H (I - 2vv^*) and Q <- Q (I - 2vv^*) on columns k+1..n-1
    auto apply_right = [&](CMatrix& m) {
      for (std::size_t i = 0; i < n; ++i) {
        Complex dot{};
        for (std::size_t j = 0; j < v.size(); ++j) dot += m(i, k + 1 + j) * v[j];
        for (std::size_t j = 0; j < v.size(); ++j) m(i, k + 1 + j) -= 2.0 * dot * std::conj(v[j]);
      }
    };
    apply_right(h);
    apply_right(q);
  }
  for (std::size_t i = 2; i < n; ++i)
    for (std::size_t j = 0; j + 1 < i; ++j) h(i, j) = 0.0;
}

template <typename T>
Svd<T> jacobi_svd(const Matrix<T>& a)
{
  const std::size_t m = a.rows();
  const std::size_t k = a.cols();
  Matrix<T> u = a;
  Matrix<T> v = Matrix<T>::identity(k);
  constexpr int kMaxSweeps = 80;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < k; ++p) {
      for (std::size_t q = p + 1; q < k; ++q) {
        double alpha = 0.0;
        double beta = 0.0;
        T gamma{};
        for (std::size_t i = 0; i < m; ++i) {
          alpha += abs2(u(i, p));
          beta += abs2(u(i, q));
          gamma += cj(u(i, p)) * u(i, q);
        }
        const double g = std::abs(gamma);
        if (g == 0.0 || g <= kEps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const T phase = cj(unit_phase(gamma));
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        auto rotate = [&](Matrix<T>& x, std::size_t rows) {
          for (std::size_t i = 0; i < rows; ++i) {
            const T xp = x(i, p);
            const T xq = x(i, q) * phase;
            x(i, p) = c * xp - s * xq;
            x(i, q) = s * xp + c * xq;
          }
        };
        rotate(u, m);
        rotate(v, k);
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sigma(k);
  for (std::size_t j = 0; j < k; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += abs2(u(i, j));
    sigma[j] = std::sqrt(s);
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  Svd<T> out;
  out.sigma.resize(k);
  out.u = Matrix<T>(m, k);
  out.v = Matrix<T>(k, k);
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t src = order[j];
    out.sigma[j] = sigma[src];
    for (std::size_t i = 0; i < k; ++i) out.v(i, j) = v(i, src);
    if (sigma[src] > 0.0) {
      for (std::size_t i = 0; i < m; ++i) out.u(i, j) = u(i, src) / sigma[src];
    }
  }
  return out;
}

double threshold(double eta, double sigma_max) { return std::max(eta * sigma_max, kAbsoluteFloor); }

}  // namespace

HermitianSpectrum hermitian_eig(const CMatrix& h, double eta)
{
  require_square(h, "hermitian_eig");
  if (!all_finite(h)) throw NonFiniteEntry("hermitian_eig input");
  if (hermitian_defect(h) > eta * tolerance_scale(h)) {
    throw NonHermitianInput("‖H - H^*‖_F = " + std::to_string(hermitian_defect(h)));
  }
  const std::size_t n = h.rows();
  CMatrix a = (h + h.adjoint()) * Complex(0.5);
  CMatrix v = CMatrix::identity(n);
  const double scale = frobenius_norm(a);

  // Entries below this are treated as converged; rotations never grow them.
  const double negligible = 1e-3 * kEps * scale;
  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex c = a(p, q);
        const double r = std::abs(c);
        if (r == 0.0 || r <= negligible) continue;
        rotated = true;
        const Complex e = c / r;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * r);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double cs = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = t * cs;
        // G = diag(1, conj(e)) · [[cs, sn], [-sn, cs]]
        const Complex gpp = cs;
        const Complex gpq = sn;
        const Complex gqp = -sn * std::conj(e);
        const Complex gqq = cs * std::conj(e);
        for (std::size_t k = 0; k < n; ++k) {
          const Complex xp = a(k, p);
          const Complex xq = a(k, q);
          a(k, p) = xp * gpp + xq * gqp;
          a(k, q) = xp * gpq + xq * gqq;
          const Complex vp = v(k, p);
          const Complex vq = v(k, q);
          v(k, p) = vp * gpp + vq * gqp;
          v(k, q) = vp * gpq + vq * gqq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex xp = a(p, k);
          const Complex xq = a(q, k);
          a(p, k) = std::conj(gpp) * xp + std::conj(gqp) * xq;
          a(q, k) = std::conj(gpq) * xp + std::conj(gqq) * xq;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
    if (!rotated) break;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });
  HermitianSpectrum out;
  out.values.resize(n);
  out.vectors = CMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]).real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  return out;
}

SchurForm schur(const CMatrix& a, std::size_t max_steps)
{
  require_square(a, "schur");
  if (!all_finite(a)) throw NonFiniteEntry("schur input");
  const std::size_t n = a.rows();
  CMatrix h = a;
  CMatrix q = CMatrix::identity(n);
  if (n == 0) return {q, h};
  reduce_to_hessenberg(h, q);

  const std::size_t cap = max_steps ? max_steps : 100 * n * n;
  const double norm = std::max(frobenius_norm(h), std::numeric_limits<double>::min());
  std::size_t total = 0;
  std::size_t its = 0;
  std::size_t hi = n - 1;
  std::vector<Givens> rot(n);

  while (hi > 0) {
    std::size_t l = hi;
    for (; l > 0; --l) {
      double s = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
      if (s == 0.0) s = norm;
      if (std::abs(h(l, l - 1)) <= kEps * s) {
        h(l, l - 1) = 0.0;
        break;
      }
    }
    if (l == hi) {
      --hi;
      its = 0;
      continue;
    }
    if (++total > cap) throw NoConvergence("shifted QR exceeded " + std::to_string(cap) + " steps");
    ++its;

    Complex mu;
    if (its % 10 == 0) {
      mu = h(hi, hi) + 0.75 * std::abs(h(hi, hi - 1));
    } else {
      const Complex x = h(hi - 1, hi - 1);
      const Complex y = h(hi - 1, hi);
      const Complex z = h(hi, hi - 1);
      const Complex w = h(hi, hi);
      const Complex half = 0.5 * (x - w);
      const Complex disc = std::sqrt(half * half + y * z);
      const Complex m1 = 0.5 * (x + w) + disc;
      const Complex m2 = 0.5 * (x + w) - disc;
      mu = std::abs(m1 - w) < std::abs(m2 - w) ? m1 : m2;
    }

    for (std::size_t k = l; k <= hi; ++k) h(k, k) -= mu;
    for (std::size_t k = l; k < hi; ++k) {
      rot[k] = make_givens(h(k, k), h(k + 1, k));
      const double c = rot[k].c;
      const Complex s = rot[k].s;
      for (std::size_t j = k; j < n; ++j) {
        const Complex x = h(k, j);
        const Complex y = h(k + 1, j);
        h(k, j) = c * x + s * y;
        h(k + 1, j) = -std::conj(s) * x + c * y;
      }
    }
    for (std::size_t k = l; k < hi; ++k) {
      const double c = rot[k].c;
      const Complex s = rot[k].s;
      const std::size_t last = std::min(k + 2, hi);
      for (std::size_t i = 0; i <= last; ++i) {
        const Complex x = h(i, k);
        const Complex y = h(i, k + 1);
        h(i, k) = x * c + y * std::conj(s);
        h(i, k + 1) = -x * s + y * c;
      }
      for (std::size_t i = 0; i < n; ++i) {
        const Complex x = q(i, k);
        const Complex y = q(i, k + 1);
        q(i, k) = x * c + y * std::conj(s);
        q(i, k + 1) = -x * s + y * c;
      }
    }
    for (std::size_t k = l; k <= hi; ++k) h(k, k) += mu;
  }
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) h(i, j) = 0.0;
  return {q, h};
}

Spectrum general_eig(const CMatrix& l, std::size_t max_steps)
{
  const SchurForm s = schur(l, max_steps);
  Spectrum out;
  out.values = s.t.diag();
  std::sort(out.values.begin(), out.values.end(), lex_less);
  return out;
}

Svd<Complex> svd(const CMatrix& a)
{
  if (!all_finite(a)) throw NonFiniteEntry("svd input");
  return jacobi_svd(a);
}

Svd<double> svd(const RMatrix& a)
{
  if (!all_finite(a)) throw NonFiniteEntry("svd input");
  return jacobi_svd(a);
}

std::vector<double> singular_values(const CMatrix& a) { return svd(a).sigma; }

CMatrix orthonormal_completion(const CMatrix& q)
{
  const std::size_t n = q.rows();
  std::vector<std::vector<Complex>> basis;
  basis.reserve(n);
  auto orthogonalize = [&](std::vector<Complex>& x) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) {
        const Complex d = inner_product<Complex>(b, x);
        for (std::size_t i = 0; i < n; ++i) x[i] -= d * b[i];
      }
    }
  };
  for (std::size_t j = 0; j < q.cols(); ++j) {
    std::vector<Complex> x = q.col(j);
    orthogonalize(x);
    const double nx = vector_norm<Complex>(x);
    if (nx < 1e-8) throw DomainError("orthonormal_completion: input columns are not independent");
    for (auto& v : x) v /= nx;
    basis.push_back(std::move(x));
  }
  for (std::size_t e = 0; e < n && basis.size() < n; ++e) {
    std::vector<Complex> x(n);
    x[e] = 1.0;
    orthogonalize(x);
    const double nx = vector_norm<Complex>(x);
    if (nx < 1e-8) continue;
    for (auto& v : x) v /= nx;
    basis.push_back(std::move(x));
  }
  CMatrix out(n, n);
  for (std::size_t j = 0; j < n; ++j) out.set_col(j, basis[j]);
  return out;
}

PolarDecomposition polar_decompose(const CMatrix& a)
{
  require_square(a, "polar_decompose");
  const std::size_t n = a.rows();
  const Svd<Complex> s = svd(a);
  const double smax = s.sigma.empty() ? 0.0 : s.sigma.front();
  const double cut = std::max(64.0 * kEps * smax, std::numeric_limits<double>::min());

  std::size_t r = 0;
  while (r < n && s.sigma[r] > cut) ++r;
  CMatrix w = orthonormal_completion(s.u.block(0, 0, n, r));

  CMatrix sig(n, n);
  for (std::size_t j = 0; j < n; ++j) sig(j, j) = s.sigma[j];
  const CMatrix vh = s.v.adjoint();
  PolarDecomposition out;
  out.unitary = w * vh;
  out.positive = s.v * sig * vh;
  out.positive = (out.positive + out.positive.adjoint()) * Complex(0.5);
  return out;
}

CMatrix psd_sqrt(const CMatrix& h, double eta_psd)
{
  const HermitianSpectrum e = hermitian_eig(h);
  const double floor = eta_psd * tolerance_scale(h);
  const std::size_t n = h.rows();
  CMatrix d(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    if (e.values[k] < -floor) {
      throw NotPSD("eigenvalue " + std::to_string(e.values[k]) + " below -" + std::to_string(floor));
    }
    d(k, k) = std::sqrt(std::max(0.0, e.values[k]));
  }
  CMatrix p = e.vectors * d * e.vectors.adjoint();
  return (p + p.adjoint()) * Complex(0.5);
}

std::size_t rank_tol(const CMatrix& a, double eta)
{
  const auto sigma = singular_values(a);
  if (sigma.empty()) return 0;
  const double thr = threshold(eta, sigma.front());
  return static_cast<std::size_t>(std::count_if(sigma.begin(), sigma.end(), [&](double s) { return s > thr; }));
}

RealKernel real_kernel(const RMatrix& f, double eta)
{
  const Svd<double> s = svd(f);
  RealKernel out;
  out.singular_values = s.sigma;
  const double smax = s.sigma.empty() ? 0.0 : s.sigma.front();
  const double thr = threshold(eta, smax);
  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < s.sigma.size(); ++j)
    if (s.sigma[j] <= thr) cols.push_back(j);
  out.dimension = cols.size();
  out.basis = RMatrix(f.cols(), cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (std::size_t i = 0; i < f.cols(); ++i) out.basis(i, c) = s.v(i, cols[c]);
  return out;
}

double condition_number(const CMatrix& a)
{
  const auto sigma = singular_values(a);
  if (sigma.empty()) return 1.0;
  if (sigma.back() == 0.0) return std::numeric_limits<double>::infinity();
  return sigma.front() / sigma.back();
}

std::vector<Complex> null_vector(const CMatrix& a)
{
  const Svd<Complex> s = svd(a);
  return s.v.col(s.v.cols() - 1);
}

template <typename T>
Matrix<T> solve(const Matrix<T>& a, const Matrix<T>& b)
{
  if (!a.is_square() || a.rows() != b.rows()) throw ShapeError("solve: incompatible shapes");
  const std::size_t n = a.rows();
  Matrix<T> lu = a;
  Matrix<T> x = b;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(lu(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(lu(i, k)) > best) {
        best = std::abs(lu(i, k));
        piv = i;
      }
    }
    if (best < 1e-300) throw SingularMatrix("zero pivot in column " + std::to_string(k));
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
      for (std::size_t j = 0; j < x.cols(); ++j) std::swap(x(k, j), x(piv, j));
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const T f = lu(i, k) / lu(k, k);
      if (f == T{}) continue;
      for (std::size_t j = k; j < n; ++j) lu(i, j) -= f * lu(k, j);
      for (std::size_t j = 0; j < x.cols(); ++j) x(i, j) -= f * x(k, j);
    }
  }
  for (std::size_t kk = n; kk-- > 0;) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      T s = x(kk, j);
      for (std::size_t c = kk + 1; c < n; ++c) s -= lu(kk, c) * x(c, j);
      x(kk, j) = s / lu(kk, kk);
    }
  }
  return x;
}

template <typename T>
Matrix<T> inverse(const Matrix<T>& a)
{
  return solve(a, Matrix<T>::identity(a.rows()));
}

template RMatrix solve(const RMatrix&, const RMatrix&);
template CMatrix solve(const CMatrix&, const CMatrix&);
template RMatrix inverse(const RMatrix&);
template CMatrix inverse(const CMatrix&);

CMatrix expm(const CMatrix& a)
{
  require_square(a, "expm");
  const std::size_t n = a.rows();
  double norm1 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) c += std::abs(a(i, j));
    norm1 = std::max(norm1, c);
  }
  int squarings = 0;
  if (norm1 > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
  const CMatrix b = a * Complex(std::ldexp(1.0, -squarings));
  CMatrix term = CMatrix::identity(n);
  CMatrix sum = CMatrix::identity(n);
  for (int k = 1; k <= 20; ++k) {
    term = term * b * Complex(1.0 / k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

}  // namespace momentlab
