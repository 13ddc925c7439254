#include "momentlab/levmar.hpp"

#include <algorithm>
#include <cmath>

#include "momentlab/linalg.hpp"

namespace momentlab {

namespace {

double squared_norm(std::span<const double> v)
{
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

// Solves (JᵀJ + μI) δ = -Jᵀr through whichever normal system is smaller.
std::vector<double> damped_step(const RMatrix& j, std::span<const double> r, double mu)
{
  const std::size_t m = j.rows();
  const std::size_t k = j.cols();
  if (m <= k) {
    // δ = -Jᵀ (JJᵀ + μI)⁻¹ r
    RMatrix g(m, m);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = a; b < m; ++b) {
        double s = 0.0;
        for (std::size_t c = 0; c < k; ++c) s += j(a, c) * j(b, c);
        g(a, b) = s;
        g(b, a) = s;
      }
    for (std::size_t a = 0; a < m; ++a) g(a, a) += mu;
    RMatrix rhs(m, 1);
    for (std::size_t a = 0; a < m; ++a) rhs(a, 0) = r[a];
    const RMatrix y = solve(g, rhs);
    std::vector<double> delta(k, 0.0);
    for (std::size_t c = 0; c < k; ++c)
      for (std::size_t a = 0; a < m; ++a) delta[c] -= j(a, c) * y(a, 0);
    return delta;
  }
  RMatrix g(k, k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a; b < k; ++b) {
      double s = 0.0;
      for (std::size_t c = 0; c < m; ++c) s += j(c, a) * j(c, b);
      g(a, b) = s;
      g(b, a) = s;
    }
  for (std::size_t a = 0; a < k; ++a) g(a, a) += mu;
  RMatrix rhs(k, 1);
  for (std::size_t a = 0; a < k; ++a) {
    double s = 0.0;
    for (std::size_t c = 0; c < m; ++c) s += j(c, a) * r[c];
    rhs(a, 0) = -s;
  }
  const RMatrix d = solve(g, rhs);
  return d.col(0);
}

}  // namespace

LevMarResult levenberg_marquardt(const ResidualFn& residual, const JacobianFn& jacobian, std::vector<double> x0,
                                 const LevMarOptions& options)
{
  LevMarResult out;
  out.x = std::move(x0);
  std::vector<double> r = residual(out.x);
  double cost = squared_norm(r);
  RMatrix j = jacobian(out.x);

  double max_diag = 0.0;
  for (std::size_t c = 0; c < j.cols(); ++c) {
    double s = 0.0;
    for (std::size_t a = 0; a < j.rows(); ++a) s += j(a, c) * j(a, c);
    max_diag = std::max(max_diag, s);
  }
  double mu = options.initial_damping * (max_diag > 0.0 ? max_diag : 1.0);

  for (out.iterations = 0; out.iterations < options.iter_cap; ++out.iterations) {
    if (std::sqrt(cost) <= options.residual_tol) break;
    std::vector<double> delta;
    try {
      delta = damped_step(j, r, mu);
    } catch (const SingularMatrix&) {
      mu *= options.increase;
      continue;
    }
    if (std::sqrt(squared_norm(delta)) < options.step_tol) break;

    std::vector<double> trial(out.x.size());
    for (std::size_t i = 0; i < trial.size(); ++i) trial[i] = out.x[i] + delta[i];
    std::vector<double> r_trial = residual(trial);
    const double cost_trial = squared_norm(r_trial);
    if (std::isfinite(cost_trial) && cost_trial < cost) {
      out.x = std::move(trial);
      r = std::move(r_trial);
      cost = cost_trial;
      j = jacobian(out.x);
      mu *= options.decrease;
    } else {
      mu *= options.increase;
      if (mu > 1e300) break;
    }
  }
  out.residual = std::sqrt(cost);
  return out;
}

}  // namespace momentlab
