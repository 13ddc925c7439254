#pragma once

#include <functional>
#include <span>
#include <vector>

#include "momentlab/matrix.hpp"

namespace momentlab {

/// Damped Gauss-Newton (Levenberg) settings.
///
/// The damping starts at `initial_damping · max diag(JᵀJ)` and is multiplied
/// by `decrease` after an accepted step and by `increase` after a rejected one.
struct LevMarOptions {
  double initial_damping = 1e-3;
  double decrease = 0.3;
  double increase = 3.0;
  double step_tol = 1e-14;
  double residual_tol = 1e-15;
  int iter_cap = 500;
};

struct LevMarResult {
  std::vector<double> x;
  double residual = 0.0;  ///< ‖r(x)‖₂ at the returned point
  int iterations = 0;
};

using ResidualFn = std::function<std::vector<double>(std::span<const double>)>;
using JacobianFn = std::function<RMatrix(std::span<const double>)>;

/// Minimizes ‖r(x)‖² from `x0`. Never throws on non-convergence: the caller
/// reads the final residual.
LevMarResult levenberg_marquardt(const ResidualFn& residual, const JacobianFn& jacobian, std::vector<double> x0,
                                 const LevMarOptions& options = {});

}  // namespace momentlab
