#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "momentlab/errors.hpp"
#include "momentlab/hk_moment.hpp"
#include "momentlab/linalg.hpp"
#include "momentlab/random.hpp"

using namespace momentlab;
using namespace momentlab::hk;

namespace {

const Complex I1{0.0, 1.0};
const CMatrix kL{{1.0, 0.0}, {0.0, -1.0}};

double diff(const CMatrix& a, const CMatrix& b) { return frobenius_norm(a - b); }

HKPoint random_point(Rng& rng, std::size_t n) { return {rng.ginibre(n, n), rng.ginibre(n, n)}; }

// Column-by-column central differences of the packed moment map.
RMatrix fd_jacobian(const HKPoint& p, double t = 1e-6)
{
  const std::size_t n = p.a.rows();
  std::vector<double> x = pack_point(p);
  const std::size_t m = pack_moment(hk_moment(p)).size();
  RMatrix j(m, x.size());
  for (std::size_t c = 0; c < x.size(); ++c) {
    std::vector<double> xp = x, xm = x;
    xp[c] += t;
    xm[c] -= t;
    const std::vector<double> fp = pack_moment(hk_moment(unpack_point(xp, n, n)));
    const std::vector<double> fm = pack_moment(hk_moment(unpack_point(xm, n, n)));
    for (std::size_t r = 0; r < m; ++r) j(r, c) = (fp[r] - fm[r]) / (2 * t);
  }
  return j;
}

}  // namespace

TEST_CASE("hk_moment examples")
{
  const MomentValue z = hk_moment({CMatrix(2, 2), CMatrix(2, 2)});
  CHECK(frobenius_norm(z.r) == 0.0);
  CHECK(frobenius_norm(z.s) == 0.0);

  const MomentValue id = hk_moment({CMatrix::identity(3), CMatrix::identity(3)});
  CHECK(frobenius_norm(id.r) == 0.0);
  CHECK(diff(id.s, CMatrix::identity(3)) == 0.0);

  const MomentValue l = hk_moment({kL, CMatrix::identity(2)});
  CHECK(frobenius_norm(l.r) < 1e-15);
  CHECK(diff(l.s, kL) < 1e-15);

  // direct entry formula for a rectangular (r×n, n×r) pair
  Rng rng(1);
  const CMatrix a = rng.ginibre(3, 2), b = rng.ginibre(2, 3);
  const MomentValue m = hk_moment({a, b});
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      Complex ata = 0.0, bbs = 0.0, ba = 0.0;
      for (std::size_t k = 0; k < 3; ++k) {
        ata += std::conj(a(k, i)) * a(k, j);
        bbs += b(i, k) * std::conj(b(j, k));
        ba += b(i, k) * a(k, j);
      }
      CHECK(std::abs(m.r(i, j) - 0.5 * I1 * (ata - bbs)) < 1e-14);
      CHECK(std::abs(m.s(i, j) - ba) < 1e-14);
    }
  }
  CHECK_THROWS_AS(hk_moment({rng.ginibre(2, 3), rng.ginibre(2, 3)}), ShapeError);
}

TEST_CASE("hk_moment_left")
{
  const MomentValue z = hk_moment_left({CMatrix(2, 2), CMatrix(2, 2)});
  CHECK(frobenius_norm(z.r) + frobenius_norm(z.s) == 0.0);
  const MomentValue id = hk_moment_left({CMatrix::identity(2), CMatrix::identity(2)});
  CHECK(frobenius_norm(id.r) == 0.0);
  CHECK(diff(id.s, CMatrix::identity(2)) == 0.0);

  // φ_L(A, B) is φ with the roles of A and B exchanged
  Rng rng(2);
  for (int k = 0; k < 10; ++k) {
    const HKPoint p = random_point(rng, 3);
    const MomentValue left = hk_moment_left(p);
    const MomentValue swapped = hk_moment({p.b, p.a});
    CHECK(diff(left.r, swapped.r) < 1e-13);
    CHECK(diff(left.s, swapped.s) < 1e-13);
    CHECK(diff(left.s, p.a * p.b) < 1e-13);
  }
}

TEST_CASE("equivariance")
{
  Rng rng(3);
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 2 + k % 3;
    const HKPoint p = random_point(rng, n);
    const CMatrix u = rng.haar_unitary(n), v = rng.haar_unitary(n);
    const MomentValue m = hk_moment(p);
    const MomentValue g = hk_moment({u * p.a * v.adjoint(), v * p.b * u.adjoint()});
    const double scale = std::max(1.0, norm(m));
    CHECK(diff(g.r, v * m.r * v.adjoint()) < 1e-11 * scale);
    CHECK(diff(g.s, v * m.s * v.adjoint()) < 1e-11 * scale);
    CHECK(skew_hermitian_defect(m.r) < 1e-12 * scale);
  }
}

TEST_CASE("d_moment")
{
  Rng rng(4);
  const HKPoint p = random_point(rng, 3);
  const MomentValue zero = d_moment(p, {CMatrix(3, 3), CMatrix(3, 3)});
  CHECK(norm(zero) == 0.0);

  SUBCASE("at (I, I)")
  {
    const CMatrix a = rng.ginibre(2, 2);
    const MomentValue d = d_moment({CMatrix::identity(2), CMatrix::identity(2)}, {a, CMatrix(2, 2)});
    CHECK(diff(d.r, (a.adjoint() + a) * (0.5 * I1)) < 1e-14);
    CHECK(diff(d.s, a) < 1e-14);
  }
  SUBCASE("finite differences")
  {
    for (int k = 0; k < 10; ++k) {
      const HKPoint q = random_point(rng, 3);
      const TangentVector v{rng.ginibre(3, 3), rng.ginibre(3, 3)};
      const double t = 1e-4;
      const MomentValue fd = hk_moment({q.a + v.a * Complex(t), q.b + v.b * Complex(t)}) -
                             hk_moment({q.a - v.a * Complex(t), q.b - v.b * Complex(t)});
      const MomentValue d = d_moment(q, v);
      CHECK(diff(fd.r * Complex(0.5 / t), d.r) < 1e-6);
      CHECK(diff(fd.s * Complex(0.5 / t), d.s) < 1e-6);
    }
  }
  SUBCASE("gauge directions are in the kernel")
  {
    for (int k = 0; k < 20; ++k) {
      const HKPoint q = random_point(rng, 3);
      const CMatrix g = rng.ginibre(3, 3);
      const CMatrix h = g - g.adjoint();
      const MomentValue d = d_moment(q, {h * q.a, -(q.b * h)});
      CHECK(norm(d) < 1e-11 * std::max(1.0, frobenius_norm(q.a) * frobenius_norm(q.b)));
    }
  }
}

TEST_CASE("packing")
{
  Rng rng(5);
  const HKPoint p = random_point(rng, 3);
  const HKPoint back = unpack_point(pack_point(p), 3, 3);
  CHECK(back.a == p.a);
  CHECK(back.b == p.b);
  const MomentValue m = hk_moment(p);
  const std::vector<double> y = pack_moment(m);
  CHECK(y.size() == 27);
  double sq = 0.0;
  for (double v : y) sq += v * v;
  CHECK(std::sqrt(sq) == doctest::Approx(norm(m)).epsilon(1e-13));
  const MomentValue back_m = unpack_moment(y, 3);
  CHECK(diff(back_m.r, m.r) < 1e-13);
  CHECK(diff(back_m.s, m.s) < 1e-13);
}

TEST_CASE("realified_dmoment")
{
  const RMatrix z = realified_dmoment({CMatrix(2, 2), CMatrix(2, 2)});
  CHECK(z.rows() == 12);
  CHECK(z.cols() == 16);
  CHECK(frobenius_norm(z) == 0.0);

  Rng rng(6);
  for (std::size_t n = 1; n <= 3; ++n) {
    const HKPoint p = random_point(rng, n);
    const RMatrix f = realified_dmoment(p);
    CHECK(f.rows() == 3 * n * n);
    CHECK(f.cols() == 4 * n * n);
    // column-wise against d_moment
    for (std::size_t c = 0; c < f.cols(); ++c) {
      std::vector<double> e(f.cols(), 0.0);
      e[c] = 1.0;
      const HKPoint dir = unpack_point(e, n, n);
      const std::vector<double> col = pack_moment(d_moment(p, {dir.a, dir.b}));
      for (std::size_t r = 0; r < f.rows(); ++r) CHECK(std::abs(f(r, c) - col[r]) < 1e-12);
    }
    // against finite differences of the moment map itself
    const RMatrix fd = fd_jacobian(p);
    CHECK(frobenius_norm(f - fd) < 1e-7 * frobenius_norm(f));
  }
}

TEST_CASE("kernel_dim")
{
  CHECK(kernel_dim({CMatrix(2, 2), CMatrix(2, 2)}) == 16);
  CHECK(kernel_dim({kL.adjoint(), CMatrix::identity(2)}) > 4);

  Rng rng(7);
  for (std::size_t n : {2u, 3u}) {
    int regular = 0;
    while (regular < 30) {
      const HKPoint p = random_point(rng, n);
      if (critical_point_test(p).critical) continue;
      ++regular;
      CHECK(kernel_dim(p) == n * n);
      // independent oracle: kernel of the finite-difference Jacobian
      CHECK(real_kernel(fd_jacobian(p), 1e-6).dimension == n * n);
    }
  }
}

TEST_CASE("kernel_membership_check")
{
  Rng rng(8);
  const HKPoint p = random_point(rng, 3);
  const CMatrix g = rng.ginibre(3, 3);
  CHECK(kernel_membership_check(p, g - g.adjoint()));

  const HKPoint crit{kL.adjoint(), CMatrix::identity(2)};
  CHECK(kernel_membership_check(crit, CMatrix{{0.0, 1.0}, {1.0, 0.0}}));
  CHECK_FALSE(kernel_membership_check({CMatrix::identity(2), CMatrix::identity(2)}, CMatrix::identity(2)));
  CHECK_THROWS_AS(kernel_membership_check({CMatrix(2, 2), CMatrix::identity(2)}, CMatrix::identity(2)),
                  SingularBasePoint);
}

TEST_CASE("critical_point_test")
{
  // A = L*, B = I gives B⁻¹A* = L
  auto from_l = [](const CMatrix& l) { return HKPoint{l.adjoint(), CMatrix::identity(l.rows())}; };

  const CriticalTest c = critical_point_test(from_l(kL));
  CHECK(c.critical);
  REQUIRE(c.witness.has_value());
  CHECK(std::abs(c.witness->first * std::conj(c.witness->second) + 1.0) < 1e-12);

  CHECK_FALSE(critical_point_test(from_l(CMatrix::diagonal({Complex(1.0), Complex(2.0)}))).critical);
  CHECK(critical_point_test(from_l(CMatrix::diagonal({2.0 * I1, -0.5 * I1}))).critical);
  CHECK_THROWS_AS(critical_point_test({CMatrix(2, 2), CMatrix::identity(2)}), SingularBasePoint);

  SUBCASE("brute-force pair oracle and kernel agreement")
  {
    Rng rng(9);
    for (int k = 0; k < 40; ++k) {
      const std::size_t n = 2 + k % 2;
      HKPoint p = random_point(rng, n);
      if (k % 4 == 0) {
        // plant a pair λ, −1/λ̄ in a conjugated diagonal
        std::vector<Complex> d;
        const Complex lam = rng.complex_normal();
        d.push_back(lam);
        d.push_back(-1.0 / std::conj(lam));
        while (d.size() < n) d.push_back(rng.complex_normal());
        const CMatrix s = rng.ginibre(n, n);
        p = from_l(s * CMatrix::diagonal(d) * inverse(s));
      }
      const CriticalTest t = critical_point_test(p);
      const std::vector<Complex> ev = general_eig(l_matrix(p)).values;
      bool pair = false;
      for (const Complex& x : ev)
        for (const Complex& y : ev) pair = pair || std::abs(x * std::conj(y) + 1.0) < 1e-6 * (1.0 + std::abs(x * y));
      CHECK(t.critical == pair);
      CHECK(t.critical == (kernel_dim(p) > n * n));
    }
  }
  SUBCASE("isolated along a line")
  {
    // diag(1+t, −1) is critical only at t = 0
    int hits = 0;
    for (int k = -50; k <= 50; ++k) {
      const double t = k * 0.01;
      if (critical_point_test(from_l(CMatrix::diagonal({Complex(1.0 + t), Complex(-1.0)}))).critical) ++hits;
    }
    CHECK(hits == 1);
  }
}

TEST_CASE("hermitian_eigvector_witness")
{
  const std::vector<Complex> e1{1.0, 0.0}, e2{0.0, 1.0}, zero{0.0, 0.0};
  const CMatrix h = hermitian_eigvector_witness(kL, e1, e2);
  CHECK(diff(h, CMatrix{{0.0, 1.0}, {1.0, 0.0}}) < 1e-15);
  CHECK(frobenius_norm(hermitian_eigvector_witness(kL, zero, zero)) == 0.0);

  const CMatrix l = CMatrix::diagonal({2.0 * I1, -0.5 * I1});
  const CMatrix w = hermitian_eigvector_witness(l, e1, e2);
  CHECK(frobenius_norm(l * w * l.adjoint() + w) < 1e-10);
  CHECK(hermitian_defect(w) < 1e-15);

  CHECK_THROWS_AS(hermitian_eigvector_witness(kL, std::vector<Complex>{1.0, 1.0}, e2), NotEigenPair);
  CHECK_THROWS_AS(hermitian_eigvector_witness(kL, e1, zero), NotEigenPair);
  CHECK_THROWS_AS(hermitian_eigvector_witness(CMatrix::identity(2), e1, e2), NotEigenPair);
}

TEST_CASE("disc fibre")
{
  const DiscFiberPoint centre = disc_fiber_point(1.0);
  CHECK(diff(centre.t, CMatrix::identity(2)) < 1e-15);
  CHECK(diff(centre.point.a, kL) < 1e-15);
  CHECK(diff(centre.point.b, CMatrix::identity(2)) < 1e-15);

  const MomentValue target{CMatrix(2, 2), kL};
  const DiscFiberPoint p = disc_fiber_point(1.0 / std::sqrt(2.0), 0.0);
  CHECK(std::norm(p.t(0, 1)) == doctest::Approx(1.5).epsilon(1e-13));
  CHECK(norm(hk_moment(p.point) - target) < 1e-10);

  const DiscFiberPoint q = disc_fiber_point(0.9, std::numbers::pi / 3);
  CHECK(norm(hk_moment(q.point) - target) < 1e-10);
  CHECK(unitarity_defect(q.w) < 1e-10);
  CHECK(std::arg(q.t(0, 1)) == doctest::Approx(std::numbers::pi / 3));

  CHECK_THROWS_AS(disc_fiber_point(0.0), DomainError);
  CHECK_THROWS_AS(disc_fiber_point(1.2), DomainError);

  SUBCASE("distinct orbits for distinct d")
  {
    std::vector<std::vector<double>> inv;
    for (double d : {0.2, 0.4, 0.6, 0.8}) {
      const DiscFiberPoint f = disc_fiber_point(d, 1.0);
      // A*A is the left-invariant; here it equals T*T
      inv.push_back(hermitian_eig(f.point.a.adjoint() * f.point.a, 1e-10).values);
      CHECK(diff(f.point.a.adjoint() * f.point.a, f.t.adjoint() * f.t) < 1e-10 * frobenius_norm(f.t) * frobenius_norm(f.t));
    }
    for (std::size_t i = 0; i < inv.size(); ++i)
      for (std::size_t j = i + 1; j < inv.size(); ++j) CHECK(std::abs(inv[i][0] - inv[j][0]) > 1e-6);
  }
}

TEST_CASE("disc_fiber_sum")
{
  const std::vector<double> one{1.0};
  const HKPoint p = disc_fiber_sum(one, CMatrix::identity(1));
  const MomentValue m = hk_moment(p);
  CHECK(frobenius_norm(m.r) < 1e-12);
  CHECK(diff(m.s, CMatrix::diagonal({Complex(1.0), Complex(-1.0), Complex(1.0)})) < 1e-12);

  const std::vector<double> d{0.8};
  const CMatrix lp = CMatrix::diagonal({Complex(2.0), 3.0 * I1});
  const MomentValue m4 = hk_moment(disc_fiber_sum(d, lp));
  CHECK(frobenius_norm(m4.r) < 1e-9);
  CHECK(diff(m4.s, CMatrix::diagonal({Complex(1.0), Complex(-1.0), Complex(2.0), 3.0 * I1})) < 1e-9);

  // a normal block with complex spectrum
  Rng rng(10);
  const CMatrix v = rng.haar_unitary(3);
  const CMatrix g = v * CMatrix::diagonal({Complex(1.5, 0.5), Complex(-0.7), Complex(0.2, -2.0)}) * v.adjoint();
  const MomentValue mg = hk_moment(disc_fiber_sum(d, g));
  CHECK(frobenius_norm(mg.r) < 1e-9);
  CHECK(diff(mg.s.block(2, 2, 3, 3), g) < 1e-9);

  CHECK_THROWS_AS(disc_fiber_sum(d, CMatrix{{1.0, 1.0}, {1.0, 1.0}}), SingularMatrix);
}

TEST_CASE("zero fibre")
{
  const HKPoint z = zero_fiber_point(CMatrix(2, 2), CMatrix::identity(2));
  CHECK(frobenius_norm(z.a) + frobenius_norm(z.b) == 0.0);

  const CMatrix p = CMatrix::diagonal({Complex(1.0), Complex(0.0)});
  const CMatrix swap{{0.0, 1.0}, {1.0, 0.0}};
  const HKPoint q = zero_fiber_point(p, swap);
  CHECK(diff(q.a, p) < 1e-15);
  CHECK(diff(q.b, CMatrix{{0.0, 1.0}, {0.0, 0.0}}) < 1e-15);
  CHECK(norm(hk_moment(q)) < 1e-15);

  Rng rng(11);
  CHECK_THROWS_AS(zero_fiber_point(rng.psd(3, 2), CMatrix::identity(3)), RankTooLarge);
  CHECK_THROWS_AS(zero_fiber_point(p, CMatrix::identity(2)), NotIsotropic);
  CHECK_THROWS_AS(zero_fiber_point(p, CMatrix{{0.0, 2.0}, {1.0, 0.0}}), DomainError);

  SUBCASE("classification by P")
  {
    for (std::size_t n = 2; n <= 6; ++n) {
      for (std::size_t rank = 0; rank <= n / 2; ++rank) {
        const CMatrix pp = rng.psd(n, rank);
        const CMatrix w = random_isotropic_unitary(pp, rng);
        CHECK(unitarity_defect(w) < 1e-12);
        CHECK(frobenius_norm(pp * w * pp) < 1e-12 * std::max(1.0, frobenius_norm(pp) * frobenius_norm(pp)));
        const HKPoint zp = zero_fiber_point(pp, w);
        CHECK(norm(hk_moment(zp)) < 1e-10 * std::max(1.0, frobenius_norm(pp) * frobenius_norm(pp)));
        // (A*A)^{1/2} recovers P; taken as the polar factor to avoid squaring a singular matrix
        CHECK(diff(polar_decompose(zp.a).positive, pp) < 1e-10 * tolerance_scale(pp));
        const CMatrix wc = canonical_isotropic_unitary(pp);
        CHECK(diff(wc, canonical_isotropic_unitary(pp)) == 0.0);
        CHECK(norm(hk_moment(zero_fiber_point(pp, wc))) < 1e-10 * std::max(1.0, frobenius_norm(pp) * frobenius_norm(pp)));
      }
    }
  }
}

TEST_CASE("orbit_match")
{
  const CMatrix p = CMatrix::diagonal({Complex(1.0), Complex(0.0)});
  const CMatrix swap{{0.0, 1.0}, {1.0, 0.0}};
  const HKPoint p1 = zero_fiber_point(p, swap);
  const HKPoint p2 = zero_fiber_point(p, -swap);

  const OrbitMatch self = orbit_match(p1, p1);
  CHECK(self.residual < 1e-12);
  const OrbitMatch m = orbit_match(p1, p2);
  CHECK(m.residual < 1e-8);
  CHECK(unitarity_defect(m.u) < 1e-12);
  // residual recomputed from the definition
  CHECK(diff(m.u * p2.a, p1.a) + diff(p2.b * m.u.adjoint(), p1.b) < 1e-8);

  CHECK_THROWS_AS(orbit_match(p1, zero_fiber_point(CMatrix::diagonal({Complex(2.0), Complex(0.0)}), swap)),
                  InvariantMismatch);
  CHECK_THROWS_AS(orbit_match(p1, {CMatrix::identity(2), CMatrix::identity(2)}), DomainError);

  Rng rng(12);
  for (std::size_t n = 2; n <= 6; ++n) {
    const CMatrix pp = rng.psd(n, n / 2);
    const HKPoint a = zero_fiber_point(pp, random_isotropic_unitary(pp, rng));
    const CMatrix v = rng.haar_unitary(n);
    // move inside the orbit, then recover it
    const HKPoint b{v * a.a, a.b * v.adjoint()};
    const OrbitMatch r = orbit_match(a, b);
    CHECK(r.residual < 1e-8 * tolerance_scale(pp));
  }
}

TEST_CASE("non_image_matrix")
{
  Rng rng(13);
  for (std::size_t n = 2; n <= 6; ++n) {
    for (const Complex lam : {Complex(0.0), Complex(1.0), Complex(0.3, -0.7)}) {
      const CMatrix m = non_image_matrix(n, lam, rng);
      for (std::size_t i = 0; i < n; ++i) CHECK(m(i, 0) == Complex(0.0));
      for (std::size_t i = 0; i + 1 < n; ++i) {
        CHECK(std::abs(m(i, i + 1)) >= 0.5);
        CHECK(std::abs(m(i, i + 1)) <= 2.0);
        for (std::size_t j = i + 2; j < n; ++j) CHECK(m(i, j) == Complex(0.0));
      }
      CHECK(std::abs(trace(m) - Complex(static_cast<double>(n)) * lam) < 1e-12);
      CHECK(rank_tol(m) == n - 1);
    }
  }
  CHECK_THROWS(non_image_matrix(1, 0.0, rng));
}

TEST_CASE("solver and image searches")
{
  SUBCASE("controls in the image")
  {
    const SearchResult id = nonmembership_search({CMatrix(2, 2), CMatrix::identity(2)}, 5, 1);
    CHECK(id.best_residual < 1e-10);
    CHECK(norm(hk_moment(id.best_point) - MomentValue{CMatrix(2, 2), CMatrix::identity(2)}) < 1e-10);
    const CMatrix d = CMatrix::diagonal({Complex(0.0), Complex(0.5, 1.0), Complex(-2.0)});
    CHECK(nonmembership_search({CMatrix(3, 3), d}, 5, 2).best_residual < 1e-10);
  }
  SUBCASE("certificate stays away from the solver's reach")
  {
    Rng rng(14);
    const CMatrix m = non_image_matrix(2, 0.0, rng);
    const SearchResult s = nonmembership_search({CMatrix(2, 2), m}, 10, 3);
    CHECK(s.residuals.size() == 10);
    // strictly positive but not bounded away from zero: the target sits in the closure of the image
    CHECK(s.best_residual > 1e-9);
  }
  SUBCASE("single orbit over (0, λI)")
  {
    const FiberProbe scalar = lambda_fiber_probe(1, 1.0, 5, 4);
    CHECK(scalar.dispersion < 1e-10);
    const FiberProbe two = lambda_fiber_probe(2, 1.0, 20, 5);
    CHECK(two.solutions >= 10);
    CHECK(two.dispersion < 1e-6);
    const FiberProbe control = lambda_fiber_probe(2, 0.0, 20, 6);
    CHECK(control.dispersion > 1e-3);
  }
}
