#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "momentlab/levmar.hpp"
#include "momentlab/matrix.hpp"
#include "momentlab/random.hpp"

namespace momentlab::hk {

/// (A, B) with A r×n and B n×r; r = n in the square case.
struct HKPoint {
  CMatrix a;
  CMatrix b;
};

/// (R, S): R skew-Hermitian (the real part), S arbitrary (the complex part).
struct MomentValue {
  CMatrix r;
  CMatrix s;
};

struct TangentVector {
  CMatrix a;
  CMatrix b;
};

MomentValue operator-(const MomentValue& x, const MomentValue& y);
MomentValue operator+(const MomentValue& x, const MomentValue& y);
/// sqrt(‖R‖² + ‖S‖²).
double norm(const MomentValue& m);

/// The central level of ε ∈ ℝ³: (iε₁·Id, (ε₂ + iε₃)·Id).
MomentValue central_level(std::size_t n, const std::array<double, 3>& eps);

/// φ(A,B) = ((i/2)(A*A − BB*), BA).
MomentValue hk_moment(const HKPoint& p);
/// φ_L(A,B) = ((i/2)(B*B − AA*), AB), the moment map of the left action.
MomentValue hk_moment_left(const HKPoint& p);
/// dφ_(A,B)(a,b) = ((i/2)(a*A + A*a − Bb* − bB*), Ba + bA).
MomentValue d_moment(const HKPoint& p, const TangentVector& v);

/// Real coordinates of a point: interleaved (re, im) of A row-major, then of B.
std::vector<double> pack_point(const HKPoint& p);
HKPoint unpack_point(std::span<const double> x, std::size_t r, std::size_t n);

/// Real coordinates of a moment value with R skew-Hermitian:
/// Im R_kk, then √2·Re R_kl and √2·Im R_kl for k < l, then (re, im) of S.
/// The Euclidean norm equals the Frobenius norm of (R, S).
std::vector<double> pack_moment(const MomentValue& m);
MomentValue unpack_moment(std::span<const double> y, std::size_t n);

/// dφ_p as a real 3n² × 4rn matrix in the packed coordinates above.
RMatrix realified_dmoment(const HKPoint& p);

/// Dimension of the numerical kernel of the realified dφ_p.
std::size_t kernel_dim(const HKPoint& p, double eta = 1e-8);

/// Whether (hA, −Bh) lies in ker dφ_p. Throws SingularBasePoint when A or B
/// has condition number above 1e8.
bool kernel_membership_check(const HKPoint& p, const CMatrix& h, double eta = 1e-8);

struct CriticalTest {
  bool critical = false;
  std::optional<std::pair<Complex, Complex>> witness;  ///< (λ, μ) with λμ̄ ≈ −1
  std::vector<Complex> spectrum;                       ///< eigenvalues of L = B⁻¹A*
};

/// Searches the spectrum of L = B⁻¹A* for a pair with |λμ̄ + 1| < eta(1 + |λμ̄|).
CriticalTest critical_point_test(const HKPoint& p, double eta = 1e-8);

/// L = B⁻¹A*. Throws SingularBasePoint under the invertibility guard.
CMatrix l_matrix(const HKPoint& p);

/// h = vw* + wv* for eigenvectors v, w of L with λμ̄ = −1; then LhL* = −h.
/// v = w = 0 gives 0. Throws NotEigenPair otherwise.
CMatrix hermitian_eigvector_witness(const CMatrix& l, std::span<const Complex> v, std::span<const Complex> w,
                                    double eta = 1e-8);

struct DiscFiberPoint {
  HKPoint point;
  CMatrix t;  ///< [[1/d, b], [0, d]]
  CMatrix w;  ///< (T*)⁻¹ L T⁻¹, unitary
};

/// A point of the fibre over (0, diag(1,−1)), 0 < d ≤ 1. Throws DomainError.
DiscFiberPoint disc_fiber_point(double d, double phase = 0.0);

/// Block sum of disc-fibre points (one block per d) and a point over (0, L′).
HKPoint disc_fiber_sum(std::span<const double> ds, const CMatrix& l_prime);

/// (P, PW) in φ⁻¹(0, 0). Throws RankTooLarge, NotIsotropic, DomainError.
HKPoint zero_fiber_point(const CMatrix& p, const CMatrix& w, double eta = 1e-8);

/// Unitary mapping an eigenbasis of im P onto the leading vectors of a basis of ker P.
CMatrix canonical_isotropic_unitary(const CMatrix& p, double eta = 1e-8);
/// As above, with random unitary rotations inside im P and ker P.
CMatrix random_isotropic_unitary(const CMatrix& p, Rng& rng, double eta = 1e-8);

struct OrbitMatch {
  CMatrix u;
  double residual = 0.0;  ///< ‖uA₂ − A₁‖ + ‖B₂u⁻¹ − B₁‖
};

/// Unitary u with (A₁, B₁) = (uA₂, B₂u⁻¹) for two points of φ⁻¹(0,0).
/// Throws InvariantMismatch when (A*A)^{1/2} differs, DomainError when a point
/// is not in the zero fibre.
OrbitMatch orbit_match(const HKPoint& p1, const HKPoint& p2, double eta = 1e-8);

/// M with zero first column, non-zero superdiagonal, zeros above it and
/// m₂₂ + … + m_nn = nλ. (0, M) has no preimage.
CMatrix non_image_matrix(std::size_t n, Complex lambda, Rng& rng);

struct SolveResult {
  HKPoint point;
  double residual = 0.0;
  int iterations = 0;
};

/// Least-squares solve of φ(A,B) = target from `start`.
SolveResult solve_moment(const MomentValue& target, const HKPoint& start, const LevMarOptions& options = {});

struct SearchResult {
  double best_residual = 0.0;
  HKPoint best_point;
  std::vector<double> residuals;  ///< one per restart
};

/// Restarts from seeded Ginibre starts and keeps the smallest ‖φ − target‖_F.
SearchResult nonmembership_search(const MomentValue& target, int restarts, std::uint64_t seed,
                                  const LevMarOptions& options = {});

struct FiberProbe {
  double dispersion = 0.0;  ///< max pairwise distance of sorted spectra of A*A
  double max_residual = 0.0;
  std::size_t solutions = 0;
};

/// Solves φ = (0, λ·Id) from `samples` random starts and compares the orbit invariant.
FiberProbe lambda_fiber_probe(std::size_t n, Complex lambda, int samples, std::uint64_t seed,
                              double accept_residual = 1e-10);

}  // namespace momentlab::hk
