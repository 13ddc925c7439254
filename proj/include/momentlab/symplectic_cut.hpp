#pragma once

#include <cstddef>

#include "momentlab/matrix.hpp"

namespace momentlab::cut {

/// A point iH of the image of the U(n) moment map, H ⪰ 0.
struct HermitianConePoint {
  CMatrix h;
  std::size_t positive_count = 0;  ///< k
};

struct FiberDescription {
  std::size_t positive_count = 0;  ///< k
  std::size_t fiber_dim = 0;       ///< dim U(n) - dim U(n-k) = n² - (n-k)²
};

struct CutMembership {
  bool inside = false;
  std::size_t positive_count = 0;  ///< meaningful only when inside
};

/// A ↦ iA^*A, the moment map of U(n) acting by A ↦ AV⁻¹.
CMatrix sympl_moment(const CMatrix& a);

/// H ↦ H^{1/2}, a section of `sympl_moment` over the cone. Throws NotPSD.
CMatrix cut_section(const CMatrix& h);

/// Counts eigenvalues of H above eta·max(1, σ_max) and reports the
/// dimension of the fibre U(n)/U(n-k). Throws NotPSD.
FiberDescription fiber_description(const CMatrix& h, double eta = 1e-8);

HermitianConePoint cone_point(const CMatrix& h, double eta = 1e-8);

/// Whether −i(μ − ε) ⪰ −eta, i.e. which side of the cut a moment value lies on.
/// `level` must be iλ·Id for real λ, otherwise NonCentralLevel.
CutMembership cut_membership(const CMatrix& moment_value, const CMatrix& level, double eta = 1e-8);

/// iλ·Id of size n.
CMatrix central_level(std::size_t n, double lambda);

}  // namespace momentlab::cut
