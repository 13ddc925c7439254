#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "momentlab/matrix.hpp"

namespace momentlab {

/// Coordinates with respect to the algebra's basis.
using LieVector = std::vector<double>;

/// A real Lie algebra with a matrix realization, structure constants and an
/// ad-invariant inner product ⟨X, Y⟩ = −Re tr(XY).
class LieAlgebra {
 public:
  /// su(n) with basis e_a = −(i/2)λ_a for the generalized Gell-Mann matrices.
  /// For n = 2 this is −(i/2)σ_a, so [e₁, e₂] = e₃.
  static LieAlgebra su(std::size_t n);
  /// u(1)^k realized as diagonal i·ℝ^k.
  static LieAlgebra abelian(std::size_t k);
  /// Validates closure, Jacobi identity and ad-invariance; throws DomainError.
  static LieAlgebra from_basis(std::vector<CMatrix> basis, std::string name);

  const std::string& name() const { return name_; }
  std::size_t dimension() const { return basis_.size(); }
  std::size_t matrix_size() const { return basis_.empty() ? 0 : basis_.front().rows(); }
  const CMatrix& basis(std::size_t a) const { return basis_[a]; }
  /// c_{ab}^c with [e_a, e_b] = Σ_c c_{ab}^c e_c.
  double structure_constant(std::size_t a, std::size_t b, std::size_t c) const
  {
    return structure_[(a * dimension() + b) * dimension() + c];
  }
  double gram(std::size_t a, std::size_t b) const { return gram_(a, b); }
  bool is_abelian() const;

  LieVector zero() const { return LieVector(dimension(), 0.0); }
  LieVector bracket(const LieVector& x, const LieVector& y) const;
  double inner(const LieVector& x, const LieVector& y) const;
  double norm(const LieVector& x) const;

  CMatrix to_matrix(const LieVector& x) const;
  /// Orthogonal projection of a matrix onto the algebra, in coordinates.
  LieVector from_matrix(const CMatrix& m) const;

  /// max over basis triples of the Jacobi identity defect.
  double jacobi_residual() const;
  /// max over basis triples of |⟨[X,Y],Z⟩ + ⟨Y,[X,Z]⟩|.
  double ad_invariance_residual() const;
  /// Whether [x, e_a] vanishes for every basis element, relative to ‖x‖.
  bool is_central(const LieVector& x, double eta = 1e-10) const;

 private:
  LieAlgebra() = default;
  void build();

  std::string name_;
  std::vector<CMatrix> basis_;
  RMatrix gram_;
  RMatrix gram_inv_;
  std::vector<double> structure_;
};

/// x + y, s·x and friends on coordinate vectors.
LieVector axpy(double s, const LieVector& x, const LieVector& y);
LieVector scaled(double s, const LieVector& x);

}  // namespace momentlab
