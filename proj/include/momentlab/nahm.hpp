#pragma once

#include <array>
#include <optional>
#include <vector>

#include "momentlab/lie_algebra.hpp"

namespace momentlab::nahm {

/// (T₀, T₁, T₂, T₃) at one time.
using Quadruple = std::array<LieVector, 4>;
/// (X₁, X₂, X₃).
using BoundaryTriple = std::array<LieVector, 3>;

/// Values on a strictly increasing grid in [0, 1]. `derivatives` is either
/// empty or holds d/dt of every node; when empty, interpolation estimates the
/// derivatives by finite differences.
struct NahmPath {
  std::vector<double> grid;
  std::vector<Quadruple> values;
  std::vector<Quadruple> derivatives;
};

/// max over nodes and i of ‖dTᵢ/dt + [T₀,Tᵢ] − [Tⱼ,T_k]‖, with dT/dt from
/// five-point Lagrange differences on the (non-uniform) grid.
double nahm_residual(const LieAlgebra& g, const NahmPath& path);

/// Cubic Hermite interpolation of the path at t.
Quadruple sample(const NahmPath& path, double t);

struct IntegrateOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_max = 1.0 / 512.0;  ///< divided further by max(1, 2‖F(y)‖/‖y‖)
  double h_min = 1e-13;
  std::optional<double> blowup_cap;  ///< default 1e6·(1 + ‖X‖)
};

struct IntegrationResult {
  bool smooth = false;
  std::optional<double> blowup_time;
  NahmPath path;  ///< on [blowup_time, 1] when not smooth
  int steps = 0;
  int rejected = 0;
};

/// Integrates dTᵢ/dt = [Tⱼ, T_k] backward from Tᵢ(1) = Xᵢ with Dormand-Prince 5(4).
IntegrationResult integrate_reduced(const LieAlgebra& g, const BoundaryTriple& x, const IntegrateOptions& options = {});

struct Membership {
  bool member = false;
  std::optional<double> blowup_time;
};

Membership ug_membership(const LieAlgebra& g, const BoundaryTriple& x, const IntegrateOptions& options = {});

/// Bisects the membership change along s ↦ s·direction on [lo, hi] down to
/// width `tol`. Throws DomainError unless exactly one endpoint is a member.
double ray_boundary(const LieAlgebra& g, const BoundaryTriple& direction, double lo, double hi, double tol = 1e-3);

/// T̃(s) = a·T(as + 1 − a), again a solution, with ψ(T̃) = a·ψ(T).
NahmPath scaling_reparam(const NahmPath& path, double a);

enum class GaugeAnchor { Start, End };

struct GaugeResult {
  NahmPath path;                ///< T₀ ≡ 0
  std::vector<CMatrix> gauge;   ///< g at each grid node
};

/// Solves dg/dt = gT₀ (RK4 on the grid) and applies Tᵢ ↦ gTᵢg⁻¹. With
/// GaugeAnchor::Start g(0) = Id, with GaugeAnchor::End g(1) = Id.
GaugeResult gauge_to_zero(const LieAlgebra& g, const NahmPath& path, GaugeAnchor anchor = GaugeAnchor::Start);

/// Tᵢ ↦ hTᵢh⁻¹, T₀ ↦ hT₀h⁻¹ − ḣh⁻¹ at every node; derivatives are dropped.
NahmPath apply_gauge(const LieAlgebra& g, const NahmPath& path, const std::vector<CMatrix>& h,
                     const std::vector<CMatrix>& hdot);

/// (T₁(1), T₂(1), T₃(1)).
BoundaryTriple psi_eval(const NahmPath& path);

/// Whether ε − μ lies in U_𝔤. Throws NonCentralLevel unless each εᵢ is central.
bool tstar_region_test(const LieAlgebra& g, const BoundaryTriple& mu_value, const BoundaryTriple& eps,
                       const IntegrateOptions& options = {});

/// x·(e₁, e₂, e₃) in the su(2) basis.
BoundaryTriple symmetric_su2_triple(double x);

double triple_norm(const LieAlgebra& g, const BoundaryTriple& x);

}  // namespace momentlab::nahm
