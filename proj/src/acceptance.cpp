#include "momentlab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>

#include "momentlab/hk_moment.hpp"
#include "momentlab/linalg.hpp"
#include "momentlab/modification.hpp"
#include "momentlab/nahm.hpp"
#include "momentlab/random.hpp"
#include "momentlab/symplectic_cut.hpp"

namespace momentlab::acceptance {

namespace {

using nlohmann::json;

struct Outcome {
  bool passed = true;
  json detail = json::object();
};

int samples(const Options& o, int full, int quick) { return o.quick ? quick : full; }

// A rank-deficient matrix of the given rank.
CMatrix low_rank(Rng& rng, std::size_t n, std::size_t rank) { return rng.ginibre(n, rank) * rng.ginibre(rank, n); }

Outcome linalg_criterion(const Options& o)
{
  Rng rng(o.seed);
  const int count = samples(o, 1000, 200);
  double worst_polar = 0.0;
  double worst_sqrt = 0.0;
  for (int k = 0; k < count; ++k) {
    const std::size_t n = 1 + static_cast<std::size_t>(k % 8);
    const CMatrix a = (k % 5 == 4 && n > 1) ? low_rank(rng, n, n / 2) : rng.ginibre(n, n);
    const PolarDecomposition pd = polar_decompose(a);
    worst_polar = std::max(worst_polar, frobenius_norm(a - pd.unitary * pd.positive) / tolerance_scale(a));
    const CMatrix h = a.adjoint() * a;
    const CMatrix p = psd_sqrt(h);
    worst_sqrt = std::max(worst_sqrt, frobenius_norm(p * p - h) / tolerance_scale(h));
  }
  Outcome out;
  out.passed = worst_polar < 1e-10 && worst_sqrt < 1e-9;
  out.detail = {{"samples", count}, {"max_polar_rel_error", worst_polar}, {"max_psd_sqrt_rel_error", worst_sqrt}};
  return out;
}

Outcome cut_criterion(const Options& o)
{
  Rng rng(o.seed + 1);
  const int count = samples(o, 100, 30);
  double worst = 0.0;
  for (int k = 0; k < count; ++k) {
    const std::size_t n = 1 + static_cast<std::size_t>(k % 6);
    const std::size_t rank = static_cast<std::size_t>(k / 6) % (n + 1);
    const CMatrix h = rng.psd(n, rank);
    const CMatrix diff = cut::sympl_moment(cut::cut_section(h)) - h * Complex(0.0, 1.0);
    worst = std::max(worst, frobenius_norm(diff) / tolerance_scale(h));
  }
  int patterns = 0;
  int mismatches = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      std::vector<Complex> d(n);
      std::size_t k = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask & (1u << i)) {
          d[i] = rng.uniform(0.1, 3.0);
          ++k;
        }
      }
      const cut::FiberDescription f = cut::fiber_description(CMatrix::diagonal(std::span<const Complex>(d)));
      ++patterns;
      if (f.positive_count != k || f.fiber_dim != n * n - (n - k) * (n - k)) ++mismatches;
    }
  }
  Outcome out;
  out.passed = worst < 1e-9 && mismatches == 0;
  out.detail = {{"samples", count}, {"max_section_rel_error", worst}, {"patterns", patterns}, {"mismatches", mismatches}};
  return out;
}

hk::HKPoint constructed_critical_point(Rng& rng, std::size_t n)
{
  const Complex lambda = std::polar(rng.uniform(0.5, 2.0), rng.uniform(0.0, 2.0 * std::numbers::pi));
  std::vector<Complex> eig(n);
  eig[0] = lambda;
  eig[1] = -1.0 / std::conj(lambda);
  for (std::size_t i = 2; i < n; ++i) eig[i] = std::polar(rng.uniform(0.5, 2.0), rng.uniform(0.0, 2.0 * std::numbers::pi));
  const CMatrix v = CMatrix::identity(n) + rng.ginibre(n, n) * Complex(0.3);
  const CMatrix l = v * CMatrix::diagonal(std::span<const Complex>(eig)) * inverse(v);
  const CMatrix b = rng.ginibre(n, n) + CMatrix::identity(n) * Complex(2.0);
  return {(b * l).adjoint(), b};
}

Outcome kernel_criterion(const Options& o)
{
  Rng rng(o.seed + 2);
  const int per_n = samples(o, 100, 30);
  int regular_checked = 0;
  int regular_wrong = 0;
  int disagreements = 0;
  int agreement_checked = 0;
  for (std::size_t n : {2u, 3u}) {
    // Regular points, rejection-sampled.
    int got = 0;
    while (got < per_n) {
      const hk::HKPoint p{rng.ginibre(n, n), rng.ginibre(n, n)};
      if (condition_number(p.a) > 1e6 || condition_number(p.b) > 1e6) continue;
      if (hk::critical_point_test(p).critical) continue;
      ++got;
      ++regular_checked;
      if (hk::kernel_dim(p) != n * n) ++regular_wrong;
    }
  }
  // Agreement on random samples plus constructed critical points.
  const int random_count = samples(o, 100, 30);
  const int constructed_count = 10;
  for (int k = 0; k < random_count + constructed_count; ++k) {
    const std::size_t n = 2 + static_cast<std::size_t>(k % 2);
    const hk::HKPoint p = k < random_count ? hk::HKPoint{rng.ginibre(n, n), rng.ginibre(n, n)}
                                           : constructed_critical_point(rng, n);
    const bool critical = hk::critical_point_test(p).critical;
    const bool large_kernel = hk::kernel_dim(p) > n * n;
    ++agreement_checked;
    if (critical != large_kernel) ++disagreements;
  }
  Outcome out;
  out.passed = regular_wrong == 0 && disagreements == 0;
  out.detail = {{"regular_samples", regular_checked},
                {"regular_kernel_mismatches", regular_wrong},
                {"agreement_samples", agreement_checked},
                {"constructed_critical", constructed_count},
                {"disagreements", disagreements}};
  return out;
}

Outcome disc_criterion(const Options& o)
{
  Rng rng(o.seed + 3);
  const hk::MomentValue target{CMatrix(2, 2), CMatrix::diagonal({Complex(1.0), Complex(-1.0)})};
  double worst_phi = 0.0;
  double worst_unitary = 0.0;
  std::vector<std::vector<double>> invariants;
  for (int k = 0; k < 20; ++k) {
    const double d = 0.05 + 0.9 * k / 19.0;
    const hk::DiscFiberPoint f = hk::disc_fiber_point(d, rng.uniform(0.0, 2.0 * std::numbers::pi));
    worst_phi = std::max(worst_phi, hk::norm(hk::hk_moment(f.point) - target));
    worst_unitary = std::max(worst_unitary, unitarity_defect(f.w));
    invariants.push_back(hermitian_eig(f.t.adjoint() * f.t, 1e-10).values);
  }
  double min_gap = INFINITY;
  for (std::size_t i = 0; i < invariants.size(); ++i)
    for (std::size_t j = i + 1; j < invariants.size(); ++j) {
      double gap = 0.0;
      for (std::size_t t = 0; t < 2; ++t) gap = std::max(gap, std::abs(invariants[i][t] - invariants[j][t]));
      min_gap = std::min(min_gap, gap);
    }
  Outcome out;
  out.passed = worst_phi < 1e-10 && worst_unitary < 1e-10 && min_gap > 1e-6;
  out.detail = {{"max_moment_residual", worst_phi}, {"max_unitarity_defect", worst_unitary}, {"min_invariant_gap", min_gap}};
  return out;
}

Outcome zero_fiber_criterion(const Options& o)
{
  Rng rng(o.seed + 4);
  const int per_n = samples(o, 10, 3);
  double worst_residual = 0.0;
  double worst_match = 0.0;
  int match_failures = 0;
  int mismatch_missed = 0;
  int rank_missed = 0;
  int pairs = 0;
  for (std::size_t n = 2; n <= 6; ++n) {
    for (int s = 0; s < per_n; ++s) {
      const std::size_t rank = static_cast<std::size_t>(s) % (n / 2 + 1);
      const CMatrix p = rng.psd(n, rank);
      const double scale = std::max(1.0, frobenius_norm(p) * frobenius_norm(p));
      const hk::HKPoint p1 = hk::zero_fiber_point(p, hk::random_isotropic_unitary(p, rng));
      const hk::HKPoint base = hk::zero_fiber_point(p, hk::random_isotropic_unitary(p, rng));
      worst_residual = std::max(worst_residual, hk::norm(hk::hk_moment(p1)) / scale);
      const CMatrix u = rng.haar_unitary(n);
      const hk::HKPoint p2{u * base.a, base.b * u.adjoint()};
      ++pairs;
      try {
        const hk::OrbitMatch m = hk::orbit_match(p1, p2);
        worst_match = std::max(worst_match, m.residual);
        if (!(m.residual < 1e-8)) ++match_failures;
      } catch (const Error&) {
        ++match_failures;
      }
      // A different P gives a different orbit.
      const CMatrix other = rank > 0 ? p * Complex(1.5) : rng.psd(n, 1);
      try {
        const hk::HKPoint p3 = hk::zero_fiber_point(other, hk::random_isotropic_unitary(other, rng));
        (void)hk::orbit_match(p1, p3);
        ++mismatch_missed;
      } catch (const InvariantMismatch&) {
      }
    }
    // Rank above n/2.
    const CMatrix big = rng.psd(n, n / 2 + 1);
    try {
      (void)hk::zero_fiber_point(big, CMatrix::identity(n));
      ++rank_missed;
    } catch (const RankTooLarge&) {
    }
  }
  Outcome out;
  out.passed = worst_residual < 1e-10 && match_failures == 0 && mismatch_missed == 0 && rank_missed == 0;
  out.detail = {{"pairs", pairs},
                {"max_rel_moment_residual", worst_residual},
                {"max_match_residual", worst_match},
                {"match_failures", match_failures},
                {"distinct_P_not_rejected", mismatch_missed},
                {"large_rank_not_rejected", rank_missed}};
  return out;
}

Outcome image_criterion(const Options& o)
{
  const int restarts = samples(o, 50, 10);
  Outcome out;
  json per_n = json::array();
  for (std::size_t n : {2u, 3u}) {
    Rng rng(o.seed + 5 + n);
    const CMatrix m = hk::non_image_matrix(n, Complex(0.0), rng);
    const hk::MomentValue zero_r{CMatrix(n, n), m};
    const hk::SearchResult cert = hk::nonmembership_search(zero_r, restarts, rng.next_seed());
    const hk::SearchResult ident =
        hk::nonmembership_search({CMatrix(n, n), CMatrix::identity(n)}, 10, rng.next_seed());
    std::vector<Complex> d(n);
    for (std::size_t i = 1; i < n; ++i) d[i] = std::polar(rng.uniform(0.5, 2.0), rng.uniform(0.0, 6.0));
    const hk::SearchResult diag =
        hk::nonmembership_search({CMatrix(n, n), CMatrix::diagonal(std::span<const Complex>(d))}, 10, rng.next_seed());
    const bool ok = cert.best_residual >= 1e-3 && ident.best_residual < 1e-10 && diag.best_residual < 1e-10;
    out.passed = out.passed && ok;
    per_n.push_back({{"n", n},
                     {"restarts", restarts},
                     {"certificate_floor", cert.best_residual},
                     {"control_identity", ident.best_residual},
                     {"control_diagonal", diag.best_residual}});
  }
  out.detail = {{"runs", per_n}, {"required_floor", 1e-3}};
  return out;
}

Outcome orbit_criterion(const Options& o)
{
  const hk::FiberProbe one = hk::lambda_fiber_probe(2, Complex(1.0), 20, o.seed + 7);
  const hk::FiberProbe zero = hk::lambda_fiber_probe(2, Complex(0.0), 20, o.seed + 7);
  Outcome out;
  out.passed = one.solutions >= 2 && one.dispersion < 1e-6 && zero.solutions >= 2 && zero.dispersion > 1e-3;
  out.detail = {{"lambda1_dispersion", one.dispersion},
                {"lambda1_solutions", one.solutions},
                {"lambda0_dispersion", zero.dispersion},
                {"lambda0_solutions", zero.solutions}};
  return out;
}

Outcome adhm_criterion(const Options& o)
{
  const std::size_t n = 2;
  const mod::LevelSolveResult s = mod::adhm_solve(n, n, {1.0, 0.3, -0.2}, o.seed + 8);
  const std::size_t quotient = s.kernel_dim - n * n;
  Outcome out;
  out.passed = s.residual < 1e-10 && s.kernel_dim == 20 && quotient == 4 * n * n;
  out.detail = {{"residual", s.residual}, {"kernel_dim", s.kernel_dim}, {"quotient_dim", quotient}, {"rank", s.rank}};
  return out;
}

Outcome nahm_criterion(const Options& o)
{
  using namespace nahm;
  const LieAlgebra su2 = LieAlgebra::su(2);
  Outcome out;

  // Ray boundary against the pole c = 1 + 1/x reaching t = 0 at x = −1.
  const double boundary = ray_boundary(su2, symmetric_su2_triple(1.0), -2.0, 0.0, 1e-3);
  const bool boundary_ok = std::abs(boundary + 1.0) < 1e-3;

  // ψ ∘ scaling = a·ψ on an su(2) and an su(3) solution.
  Rng rng(o.seed + 9);
  const LieAlgebra su3 = LieAlgebra::su(3);
  double worst_scale = 0.0;
  double worst_scaled_residual = 0.0;
  for (const LieAlgebra* g : {&su2, &su3}) {
    BoundaryTriple x;
    if (g == &su2) {
      x = symmetric_su2_triple(1.0);
    } else {
      for (auto& v : x) {
        v = g->zero();
        for (double& c : v) c = 0.4 * rng.normal();
      }
    }
    const IntegrationResult r = integrate_reduced(*g, x);
    if (!r.smooth) throw NoConvergence("scaling sample is not a member");
    const BoundaryTriple psi = psi_eval(r.path);
    for (int k = 1; k <= 9; ++k) {
      const double a = 0.1 * k;
      const NahmPath scaled_path = scaling_reparam(r.path, a);
      const BoundaryTriple psi_a = psi_eval(scaled_path);
      for (std::size_t i = 0; i < 3; ++i) worst_scale = std::max(worst_scale, g->norm(axpy(-a, psi[i], psi_a[i])));
      worst_scaled_residual = std::max(worst_scaled_residual, nahm_residual(*g, scaled_path));
    }
  }

  // gauge_to_zero on a solution moved off the T₀ = 0 slice by h(t) = exp(tC)exp(t²D).
  const IntegrationResult base = integrate_reduced(su2, symmetric_su2_triple(1.0));
  const CMatrix c = su2.to_matrix({0.3 * rng.normal(), 0.3 * rng.normal(), 0.3 * rng.normal()});
  const CMatrix d = su2.to_matrix({0.3 * rng.normal(), 0.3 * rng.normal(), 0.3 * rng.normal()});
  std::vector<CMatrix> h, hdot;
  for (double t : base.path.grid) {
    const CMatrix e1 = expm(c * Complex(t));
    const CMatrix e2 = expm(d * Complex(t * t));
    h.push_back(e1 * e2);
    hdot.push_back(c * e1 * e2 + e1 * d * Complex(2.0 * t) * e2);
  }
  const NahmPath moved = apply_gauge(su2, base.path, h, hdot);
  const double residual_before = nahm_residual(su2, moved);
  const GaugeResult fixed = gauge_to_zero(su2, moved);
  const double residual_after = nahm_residual(su2, fixed.path);
  double t0_max = 0.0;
  for (const auto& q : fixed.path.values) t0_max = std::max(t0_max, su2.norm(q[0]));
  double start_change = 0.0;
  for (std::size_t i = 1; i <= 3; ++i) {
    start_change = std::max(start_change, su2.norm(axpy(-1.0, moved.values.front()[i], fixed.path.values.front()[i])));
  }
  const bool gauge_ok = std::abs(residual_after - residual_before) < 1e-8 && start_change < 1e-8 && t0_max < 1e-9;

  // Star-shapedness on sampled members.
  int members = 0;
  int star_failures = 0;
  int draws = 0;
  while (members < 20 && draws < 400) {
    ++draws;
    BoundaryTriple x;
    for (auto& v : x) v = {rng.normal(), rng.normal(), rng.normal()};
    if (!ug_membership(su2, x).member) continue;
    ++members;
    for (int k = 1; k <= 9; ++k) {
      BoundaryTriple ax;
      for (std::size_t i = 0; i < 3; ++i) ax[i] = scaled(0.1 * k, x[i]);
      if (!ug_membership(su2, ax).member) ++star_failures;
    }
  }

  // Abelian control.
  const LieAlgebra ab = LieAlgebra::abelian(3);
  int abelian_failures = 0;
  for (int k = 0; k < 20; ++k) {
    BoundaryTriple x;
    for (auto& v : x) v = {5.0 * rng.normal(), 5.0 * rng.normal(), 5.0 * rng.normal()};
    if (!ug_membership(ab, x).member) ++abelian_failures;
  }

  out.passed = boundary_ok && worst_scale < 1e-8 && gauge_ok && members == 20 && star_failures == 0 &&
               abelian_failures == 0;
  out.detail = {{"boundary", boundary},
                {"boundary_oracle", -1.0},
                {"max_scaling_error", worst_scale},
                {"max_scaled_residual", worst_scaled_residual},
                {"gauge_residual_before", residual_before},
                {"gauge_residual_after", residual_after},
                {"gauge_t0_max", t0_max},
                {"gauge_start_change", start_change},
                {"star_members", members},
                {"star_failures", star_failures},
                {"abelian_failures", abelian_failures}};
  return out;
}

Outcome taubnut_criterion(const Options& o)
{
  Rng rng(o.seed + 10);
  std::vector<double> radii, values, flat_values;
  double worst_cross = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double r = 0.5 + 4.5 * k / 19.0;
    std::array<double, 3> dir{rng.normal(), rng.normal(), rng.normal()};
    const double len = std::hypot(dir[0], dir[1], dir[2]);
    const std::array<double, 3> x{r * dir[0] / len, r * dir[1] / len, r * dir[2] / len};
    const mod::TaubNutSample s = mod::taubnut_quotient_metric(x, rng.next_seed());
    radii.push_back(s.radius);
    values.push_back(s.potential);
    worst_cross = std::max(worst_cross, std::abs(s.potential - s.potential_base));
    flat_values.push_back(mod::taubnut_quotient_metric(x, 0, {1.0, false}).potential);
  }
  const mod::InverseRadiusFit fit = mod::fit_inverse_radius(radii, values);
  const mod::InverseRadiusFit flat = mod::fit_inverse_radius(radii, flat_values);
  Outcome out;
  out.passed = fit.r_squared > 1.0 - 1e-6 && std::abs(fit.c1) > 1e-6 && std::abs(flat.c1) < 1e-9;
  out.detail = {{"c0", fit.c0},
                {"c1", fit.c1},
                {"r_squared", fit.r_squared},
                {"max_base_lift_discrepancy", worst_cross},
                {"flat_c0", flat.c0},
                {"flat_c1", flat.c1}};
  return out;
}

struct Entry {
  const char* name;
  std::function<Outcome(const Options&)> run;
};

const Entry kEntries[kCriterionCount] = {
    {"linalg-polar-psd", linalg_criterion},
    {"cut-section-fibers", cut_criterion},
    {"kernel-dimension", kernel_criterion},
    {"disc-fiber", disc_criterion},
    {"zero-fiber", zero_fiber_criterion},
    {"non-surjectivity", image_criterion},
    {"single-orbit-fiber", orbit_criterion},
    {"adhm-dimension", adhm_criterion},
    {"nahm-region", nahm_criterion},
    {"taub-nut-potential", taubnut_criterion},
};

}  // namespace

CriterionResult run_criterion(int id, const Options& options)
{
  if (id < 1 || id > kCriterionCount) throw DomainError("criterion id out of range");
  const Entry& e = kEntries[id - 1];
  CriterionResult r;
  r.id = id;
  r.name = e.name;
  const auto start = std::chrono::steady_clock::now();
  try {
    Outcome o = e.run(options);
    r.passed = o.passed;
    r.detail = std::move(o.detail);
  } catch (const std::exception& ex) {
    r.passed = false;
    r.detail = {{"exception", ex.what()}};
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<CriterionResult> run_all(const Options& options)
{
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriterionCount; ++id) out.push_back(run_criterion(id, options));
  return out;
}

std::string summary_line(const CriterionResult& r)
{
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s %2d %-20s (%.2f s)", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds);
  return std::string(buf) + " " + r.detail.dump();
}

}  // namespace momentlab::acceptance
