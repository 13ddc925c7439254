#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "momentlab/errors.hpp"
#include "momentlab/linalg.hpp"
#include "momentlab/nahm.hpp"
#include "momentlab/random.hpp"

using namespace momentlab;
using namespace momentlab::nahm;

namespace {

const Complex I1{0.0, 1.0};

// f(t) = 1/(c − t) solves f' = f², so Tᵢ = f·eᵢ solves the reduced su(2) equations.
double closed_form(double x, double t) { return 1.0 / (1.0 + 1.0 / x - t); }

double sup_error_su2(const NahmPath& p, double x)
{
  double worst = 0.0;
  for (std::size_t k = 0; k < p.grid.size(); ++k) {
    const double f = closed_form(x, p.grid[k]);
    for (std::size_t i = 1; i <= 3; ++i) {
      for (std::size_t a = 0; a < 3; ++a) {
        const double expect = a + 1 == i ? f : 0.0;
        worst = std::max(worst, std::abs(p.values[k][i][a] - expect));
      }
    }
  }
  return worst;
}

NahmPath uniform_path(const LieAlgebra& g, std::size_t nodes, const std::function<Quadruple(double)>& fn)
{
  NahmPath p;
  for (std::size_t k = 0; k < nodes; ++k) {
    const double t = static_cast<double>(k) / (nodes - 1);
    p.grid.push_back(t);
    p.values.push_back(fn(t));
  }
  (void)g;
  return p;
}

BoundaryTriple random_triple(const LieAlgebra& g, Rng& rng, double scale)
{
  BoundaryTriple x;
  for (auto& v : x) {
    v = g.zero();
    for (double& c : v) c = scale * rng.normal();
  }
  return x;
}

}  // namespace

TEST_CASE("Lie algebras")
{
  const LieAlgebra su2 = LieAlgebra::su(2);
  CHECK(su2.dimension() == 3);
  CHECK(su2.jacobi_residual() < 1e-12);
  CHECK(su2.ad_invariance_residual() < 1e-12);
  // [e₁, e₂] = e₃ and cyclic
  const LieVector e1{1, 0, 0}, e2{0, 1, 0}, e3{0, 0, 1};
  const LieVector b = su2.bracket(e1, e2);
  CHECK(std::abs(b[2] - 1.0) < 1e-14);
  CHECK(std::abs(b[0]) + std::abs(b[1]) < 1e-14);
  CHECK(std::abs(su2.bracket(e2, e3)[0] - 1.0) < 1e-14);
  // bracket agrees with the matrix commutator
  const CMatrix c = commutator(su2.to_matrix(e1), su2.to_matrix(e2));
  CHECK(frobenius_norm(c - su2.to_matrix(e3)) < 1e-14);
  // ⟨X, Y⟩ = −Re tr(XY) on matrix realizations
  CHECK(su2.inner(e1, e1) == doctest::Approx(-trace(su2.to_matrix(e1) * su2.to_matrix(e1)).real()));
  CHECK_FALSE(su2.is_abelian());
  CHECK_FALSE(su2.is_central(e1));
  CHECK(su2.is_central(su2.zero()));

  const LieAlgebra su3 = LieAlgebra::su(3);
  CHECK(su3.dimension() == 8);
  CHECK(su3.jacobi_residual() < 1e-12);
  CHECK(su3.ad_invariance_residual() < 1e-12);
  Rng rng(1);
  LieVector x(8), y(8);
  for (std::size_t a = 0; a < 8; ++a) x[a] = rng.normal(), y[a] = rng.normal();
  CHECK(frobenius_norm(su3.to_matrix(su3.bracket(x, y)) - commutator(su3.to_matrix(x), su3.to_matrix(y))) < 1e-12);
  for (std::size_t a = 0; a < 8; ++a) CHECK(su3.from_matrix(su3.to_matrix(x))[a] == doctest::Approx(x[a]));

  const LieAlgebra u1 = LieAlgebra::abelian(3);
  CHECK(u1.is_abelian());
  CHECK(u1.is_central(LieVector{1.0, -2.0, 0.5}));

  // a non-closed basis is rejected
  const CMatrix p{{0.0, 1.0}, {0.0, 0.0}};
  CHECK_THROWS_AS(LieAlgebra::from_basis({p * I1, p.adjoint() * I1}, "bad"), DomainError);
}

TEST_CASE("nahm_residual")
{
  const LieAlgebra su2 = LieAlgebra::su(2);
  const NahmPath zero = uniform_path(su2, 11, [&](double) { return Quadruple{su2.zero(), su2.zero(), su2.zero(), su2.zero()}; });
  CHECK(nahm_residual(su2, zero) == 0.0);

  // constant commuting triple in a Cartan subalgebra of su(3)
  const LieAlgebra su3 = LieAlgebra::su(3);
  const LieVector h1 = su3.from_matrix(CMatrix::diagonal({I1, -I1, Complex(0.0)}));
  const LieVector h2 = su3.from_matrix(CMatrix::diagonal({I1, I1, -2.0 * I1}));
  CHECK(su3.norm(su3.bracket(h1, h2)) < 1e-14);
  const NahmPath cartan = uniform_path(su3, 7, [&](double) { return Quadruple{su3.zero(), h1, h2, axpy(2.0, h1, h2)}; });
  CHECK(nahm_residual(su3, cartan) < 1e-13);

  // closed form on a non-uniform grid, derivatives left to the finite differences
  NahmPath exact;
  const double x = 1.0 / 1.1;
  for (int k = 0; k <= 800; ++k) {
    const double s = static_cast<double>(k) / 800;
    const double t = s * s * (3 - 2 * s);
    if (!exact.grid.empty() && t <= exact.grid.back()) continue;
    exact.grid.push_back(t);
    const double f = closed_form(x, t);
    exact.values.push_back({su2.zero(), LieVector{f, 0, 0}, LieVector{0, f, 0}, LieVector{0, 0, f}});
  }
  CHECK(nahm_residual(su2, exact) < 1e-6);
  // a wrong sign is detected
  NahmPath wrong = exact;
  for (auto& q : wrong.values) q[1][0] = -q[1][0];
  CHECK(nahm_residual(su2, wrong) > 1e-1);
}

TEST_CASE("integrate_reduced")
{
  const LieAlgebra su2 = LieAlgebra::su(2);

  SUBCASE("zero data")
  {
    const IntegrationResult r = integrate_reduced(su2, {su2.zero(), su2.zero(), su2.zero()});
    CHECK(r.smooth);
    for (const auto& q : r.path.values)
      for (const auto& v : q) CHECK(su2.norm(v) == 0.0);
  }
  SUBCASE("closed form for several poles")
  {
    for (double c : {1.1, 2.0, 5.0}) {
      const double x = 1.0 / (c - 1.0);
      const IntegrationResult r = integrate_reduced(su2, symmetric_su2_triple(x));
      REQUIRE(r.smooth);
      CHECK(r.path.grid.front() == 0.0);
      CHECK(r.path.grid.back() == 1.0);
      CHECK(sup_error_su2(r.path, x) < 1e-8);
      CHECK(nahm_residual(su2, r.path) < 1e-8);
      // off-grid samples through the dense output
      for (double t : {0.123, 0.5, 0.987}) CHECK(std::abs(sample(r.path, t)[1][0] - closed_form(x, t)) < 1e-8);
    }
  }
  SUBCASE("x = 1 gives 1/(2 − t)")
  {
    const IntegrationResult r = integrate_reduced(su2, symmetric_su2_triple(1.0));
    REQUIRE(r.smooth);
    CHECK(std::abs(r.path.values.front()[1][0] - 0.5) < 1e-8);
  }
  SUBCASE("blow-up at the pole")
  {
    const IntegrationResult r = integrate_reduced(su2, symmetric_su2_triple(-2.0));
    CHECK_FALSE(r.smooth);
    REQUIRE(r.blowup_time.has_value());
    CHECK(std::abs(*r.blowup_time - 0.5) < 1e-3);
  }
  SUBCASE("norm evolution identity")
  {
    // d/dt ⟨Tᵢ,Tᵢ⟩ = 2⟨Tᵢ,[Tⱼ,T_k]⟩ checked along a random su(3) solution
    const LieAlgebra su3 = LieAlgebra::su(3);
    Rng rng(2);
    const IntegrationResult r = integrate_reduced(su3, random_triple(su3, rng, 0.3));
    REQUIRE(r.smooth);
    for (double t : {0.2, 0.5, 0.8}) {
      const double h = 1e-4;
      const Quadruple a = sample(r.path, t + h), b = sample(r.path, t - h), m = sample(r.path, t);
      for (int i = 1; i <= 3; ++i) {
        const int j = i % 3 + 1, k = j % 3 + 1;
        const double lhs = (su3.inner(a[i], a[i]) - su3.inner(b[i], b[i])) / (2 * h);
        const double rhs = 2 * su3.inner(m[i], su3.bracket(m[j], m[k]));
        CHECK(std::abs(lhs - rhs) < 1e-6);
      }
    }
  }
}

TEST_CASE("region membership")
{
  const LieAlgebra su2 = LieAlgebra::su(2);
  CHECK(ug_membership(su2, {su2.zero(), su2.zero(), su2.zero()}).member);
  CHECK(ug_membership(su2, symmetric_su2_triple(-0.9)).member);
  const Membership out = ug_membership(su2, symmetric_su2_triple(-1.1));
  CHECK_FALSE(out.member);
  REQUIRE(out.blowup_time.has_value());
  // pole at c = 1 + 1/x
  CHECK(std::abs(*out.blowup_time - (1.0 + 1.0 / -1.1)) < 1e-3);

  const double boundary = ray_boundary(su2, symmetric_su2_triple(1.0), -2.0, 0.0, 1e-3);
  CHECK(std::abs(boundary + 1.0) < 1e-3);
  CHECK_THROWS_AS(ray_boundary(su2, symmetric_su2_triple(1.0), 0.0, 1.0), DomainError);

  SUBCASE("star-shaped about the origin")
  {
    Rng rng(3);
    int members = 0;
    while (members < 20) {
      const BoundaryTriple x = random_triple(su2, rng, 1.0);
      if (!ug_membership(su2, x).member) continue;
      ++members;
      for (double a : {0.25, 0.5, 0.75}) {
        BoundaryTriple ax;
        for (int i = 0; i < 3; ++i) ax[i] = scaled(a, x[i]);
        CHECK(ug_membership(su2, ax).member);
      }
    }
  }
  SUBCASE("Abelian algebras have no boundary")
  {
    const LieAlgebra u1 = LieAlgebra::abelian(2);
    Rng rng(4);
    for (int k = 0; k < 10; ++k) {
      const BoundaryTriple x = random_triple(u1, rng, 100.0);
      CHECK(ug_membership(u1, x).member);
    }
  }
}

TEST_CASE("scaling_reparam")
{
  const LieAlgebra su2 = LieAlgebra::su(2);
  const double x = 0.8, c = 1.0 + 1.0 / x;
  const IntegrationResult r = integrate_reduced(su2, symmetric_su2_triple(x));
  REQUIRE(r.smooth);

  for (double a : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const NahmPath s = scaling_reparam(r.path, a);
    CHECK(nahm_residual(su2, s) < 1e-8);
    const BoundaryTriple psi = psi_eval(s);
    CHECK(std::abs(psi[0][0] - a * x) < 1e-10);
    for (std::size_t k = 0; k < s.grid.size(); k += 7) {
      const double t = s.grid[k];
      CHECK(std::abs(s.values[k][1][0] - a / (c - a * t - 1 + a)) < 1e-8);
    }
  }
  const NahmPath near_one = scaling_reparam(r.path, 1.0 - 1e-9);
  CHECK(std::abs(psi_eval(near_one)[2][2] - x) < 1e-8);

  const NahmPath zero = scaling_reparam(integrate_reduced(su2, {su2.zero(), su2.zero(), su2.zero()}).path, 0.4);
  CHECK(triple_norm(su2, psi_eval(zero)) == 0.0);

  CHECK_THROWS_AS(scaling_reparam(r.path, 0.0), DomainError);
  CHECK_THROWS_AS(scaling_reparam(r.path, 1.5), DomainError);

  SUBCASE("su(3)")
  {
    const LieAlgebra su3 = LieAlgebra::su(3);
    Rng rng(5);
    const BoundaryTriple x3 = random_triple(su3, rng, 0.4);
    const IntegrationResult r3 = integrate_reduced(su3, x3);
    REQUIRE(r3.smooth);
    for (double a : {0.2, 0.6}) {
      const BoundaryTriple psi = psi_eval(scaling_reparam(r3.path, a));
      for (int i = 0; i < 3; ++i) CHECK(su3.norm(axpy(-a, x3[i], psi[i])) < 1e-8);
    }
  }
}

TEST_CASE("gauge_to_zero")
{
  const LieAlgebra su2 = LieAlgebra::su(2);

  SUBCASE("already in gauge")
  {
    const IntegrationResult r = integrate_reduced(su2, symmetric_su2_triple(0.5));
    const GaugeResult g = gauge_to_zero(su2, r.path);
    for (const CMatrix& m : g.gauge) CHECK(frobenius_norm(m - CMatrix::identity(2)) < 1e-14);
    for (std::size_t k = 0; k < r.path.grid.size(); ++k)
      for (int i = 1; i <= 3; ++i) CHECK(su2.norm(axpy(-1.0, r.path.values[k][i], g.path.values[k][i])) < 1e-14);
  }
  SUBCASE("constant T0, zero Ti")
  {
    const LieVector cvec{0.3, -1.0, 0.7};
    const NahmPath p =
        uniform_path(su2, 101, [&](double) { return Quadruple{cvec, su2.zero(), su2.zero(), su2.zero()}; });
    const GaugeResult g = gauge_to_zero(su2, p);
    const CMatrix cm = su2.to_matrix(cvec);
    for (std::size_t k = 0; k < p.grid.size(); k += 10) {
      CHECK(frobenius_norm(g.gauge[k] - expm(cm * Complex(p.grid[k]))) < 1e-8);
      CHECK(su2.norm(g.path.values[k][0]) < 1e-9);
    }
  }
  SUBCASE("gauge-transformed solution is recovered")
  {
    const IntegrationResult r = integrate_reduced(su2, symmetric_su2_triple(0.7));
    REQUIRE(r.smooth);
    // h(t) = exp(tC)exp(t²D) with h(0) = Id
    const CMatrix cm = su2.to_matrix({0.4, 0.1, -0.3}), dm = su2.to_matrix({-0.2, 0.5, 0.2});
    std::vector<CMatrix> h, hdot;
    for (double t : r.path.grid) {
      const CMatrix e1 = expm(cm * Complex(t)), e2 = expm(dm * Complex(t * t));
      h.push_back(e1 * e2);
      hdot.push_back(cm * e1 * e2 + e1 * dm * e2 * Complex(2 * t));
    }
    const NahmPath moved = apply_gauge(su2, r.path, h, hdot);
    const double before = nahm_residual(su2, moved);
    CHECK(before < 1e-8);
    const GaugeResult back = gauge_to_zero(su2, moved);
    CHECK(nahm_residual(su2, back.path) < 1e-8);
    double t0 = 0.0, err = 0.0;
    for (std::size_t k = 0; k < back.path.grid.size(); ++k) {
      t0 = std::max(t0, su2.norm(back.path.values[k][0]));
      for (int i = 1; i <= 3; ++i) err = std::max(err, su2.norm(axpy(-1.0, r.path.values[k][i], back.path.values[k][i])));
    }
    CHECK(t0 < 1e-9);
    // with g(0) = Id the t = 0 data are unchanged, and the original path returns
    for (int i = 1; i <= 3; ++i)
      CHECK(su2.norm(axpy(-1.0, moved.values.front()[i], back.path.values.front()[i])) < 1e-12);
    CHECK(err < 1e-8);
  }
  SUBCASE("anchor at t = 1 leaves psi unchanged")
  {
    const IntegrationResult r = integrate_reduced(su2, symmetric_su2_triple(0.7));
    const CMatrix cm = su2.to_matrix({0.4, 0.1, -0.3});
    std::vector<CMatrix> h, hdot;
    for (double t : r.path.grid) {
      h.push_back(expm(cm * Complex(t - 1.0)));
      hdot.push_back(cm * h.back());
    }
    const NahmPath moved = apply_gauge(su2, r.path, h, hdot);
    const GaugeResult back = gauge_to_zero(su2, moved, GaugeAnchor::End);
    const BoundaryTriple a = psi_eval(moved), b = psi_eval(back.path);
    for (int i = 0; i < 3; ++i) CHECK(su2.norm(axpy(-1.0, a[i], b[i])) < 1e-9);
  }
}

TEST_CASE("psi and the region test")
{
  const LieAlgebra su2 = LieAlgebra::su(2);
  const IntegrationResult r = integrate_reduced(su2, symmetric_su2_triple(1.0));
  const BoundaryTriple psi = psi_eval(r.path);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(psi[i][i] - 1.0) < 1e-12);

  const BoundaryTriple zero{su2.zero(), su2.zero(), su2.zero()};
  CHECK(tstar_region_test(su2, zero, zero));
  // ε − μ = −x(e₁,e₂,e₃) leaves the region once −x < −1
  CHECK(tstar_region_test(su2, symmetric_su2_triple(0.9), zero));
  CHECK_FALSE(tstar_region_test(su2, symmetric_su2_triple(1.01), zero));
  CHECK_THROWS_AS(tstar_region_test(su2, zero, symmetric_su2_triple(1.0)), NonCentralLevel);

  const LieAlgebra u1 = LieAlgebra::abelian(1);
  const BoundaryTriple big{LieVector{50.0}, LieVector{-3.0}, LieVector{7.0}};
  const BoundaryTriple eps{LieVector{1.0}, LieVector{0.0}, LieVector{2.0}};
  CHECK(tstar_region_test(u1, big, eps));
}
