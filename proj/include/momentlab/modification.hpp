#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "momentlab/hk_moment.hpp"
#include "momentlab/levmar.hpp"
#include "momentlab/matrix.hpp"

namespace momentlab::mod {

/// (B₁, B₂) ∈ M = gl(n)², (A, B) ∈ X with A r×n, B n×r.
struct FlatModulePoint {
  CMatrix b1;
  CMatrix b2;
  CMatrix a;
  CMatrix b;
};

struct LevelSolveResult {
  FlatModulePoint point;
  double residual = 0.0;
  std::size_t kernel_dim = 0;  ///< kernel of the realified constraint linearization
  std::size_t rank = 0;        ///< its rank (3n² when surjective)
  std::vector<Complex> b1_spectrum;
  std::vector<double> ata_spectrum;  ///< eigenvalues of A*A
  int restarts_used = 0;
};

/// +1 for μ + φ = ε, −1 for μ − φ = ε.
enum class Sign { Plus = 1, Minus = -1 };

/// (i/2)([B₁,B₁*] + [B₂,B₂*] ± (A*A − BB*)), [B₁,B₂] ± BA.
hk::MomentValue adhm_moment(const FlatModulePoint& p, Sign sign = Sign::Plus);

std::vector<double> pack(const FlatModulePoint& p);
FlatModulePoint unpack(std::span<const double> x, std::size_t n, std::size_t r);

/// Realified linearization of `adhm_moment`: 3n² × (4n² + 4rn).
RMatrix adhm_jacobian(const FlatModulePoint& p, Sign sign = Sign::Plus);

struct AdhmOptions {
  Sign sign = Sign::Plus;
  bool gauge_fix = true;  ///< conjugate to make B₁ upper triangular
  int max_restarts = 8;
  double accept_residual = 1e-10;
  double kernel_eta = 1e-8;
  LevMarOptions levmar;
};

/// Solves adhm_moment = (iε₁, ε₂ + iε₃)·Id from seeded Ginibre starts.
/// Throws NoConvergence when no restart reaches `accept_residual`.
LevelSolveResult adhm_solve(std::size_t n, std::size_t r, const std::array<double, 3>& eps, std::uint64_t seed,
                            const AdhmOptions& options = {});

/// Unitary conjugation g: (gB₁g⁻¹, gB₂g⁻¹, Ag⁻¹, gB).
FlatModulePoint gauge_transform(const FlatModulePoint& p, const CMatrix& g);

enum class Stratum { Removed, RegularFibered, ReducedLocus, BlownUp };
std::string to_string(Stratum s);

struct ProbeResult {
  Stratum stratum = Stratum::Removed;
  double best_residual = 0.0;    ///< smallest ‖φ − (ε − target)‖ found
  std::size_t max_kernel_dim = 0;
  double dispersion = 0.0;       ///< spread of the invariant A*A over solutions
  std::size_t solutions = 0;
};

struct ProbeOptions {
  int restarts = 12;
  double solved_residual = 1e-10;
  double removed_floor = 1e-8;
  double kernel_eta = 1e-8;
};

/// Classifies the fibre φ⁻¹(ε − target) over a point of M with μ = target.
ProbeResult structure_probe(const hk::MomentValue& eps, const hk::MomentValue& target, std::uint64_t seed,
                            const ProbeOptions& options = {});

/// Components (1, i, j, k).
using QuaternionPoint = std::array<double, 4>;

QuaternionPoint quaternion_multiply(const QuaternionPoint& p, const QuaternionPoint& q);
QuaternionPoint quaternion_conjugate(const QuaternionPoint& q);

/// q̄iq as (x₁, x₂, x₃).
std::array<double, 3> hopf_moment(const QuaternionPoint& q);

struct TaubNutSample {
  double radius = 0.0;           ///< |x|
  double potential = 0.0;        ///< V = 1/|K_res|² in the quotient metric
  double potential_base = 0.0;   ///< V from horizontal lifts of base vectors
  QuaternionPoint q{};
};

struct TaubNutOptions {
  double v0 = 1.0;               ///< constant potential of the flat ℝ³ × S¹ factor
  bool quaternion_factor = true; ///< false gives the unmodified flat control
};

/// Metric data of the circle quotient of ℍ × (ℝ³ × S¹) at base point x.
/// Throws DegenerateOrbit at the fixed point x = 0.
TaubNutSample taubnut_quotient_metric(const std::array<double, 3>& x, std::uint64_t seed,
                                      const TaubNutOptions& options = {});

struct InverseRadiusFit {
  double c0 = 0.0;
  double c1 = 0.0;
  double r_squared = 0.0;
};

/// Least-squares fit V ≈ c₀ + c₁/r.
InverseRadiusFit fit_inverse_radius(std::span<const double> radii, std::span<const double> values);

}  // namespace momentlab::mod
