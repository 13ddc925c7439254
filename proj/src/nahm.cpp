#include "momentlab/nahm.hpp"

#include <algorithm>
#include <cmath>

#include "momentlab/linalg.hpp"

namespace momentlab::nahm {

namespace {

// Nodes of the 5-point window used for differentiating at node k.
std::pair<std::size_t, std::size_t> window(std::size_t k, std::size_t count)
{
  const std::size_t width = std::min<std::size_t>(5, count);
  std::size_t start = k >= width / 2 ? k - width / 2 : 0;
  start = std::min(start, count - width);
  return {start, width};
}

// Weights w_m with f'(t_k) ≈ Σ w_m f(t_{start+m}).
std::vector<double> lagrange_derivative_weights(const std::vector<double>& t, std::size_t k, std::size_t start,
                                                std::size_t width)
{
  std::vector<double> w(width, 0.0);
  const double x = t[k];
  for (std::size_t m = 0; m < width; ++m) {
    const double tm = t[start + m];
    double total = 0.0;
    for (std::size_t l = 0; l < width; ++l) {
      if (l == m) continue;
      double term = 1.0 / (tm - t[start + l]);
      for (std::size_t p = 0; p < width; ++p) {
        if (p == m || p == l) continue;
        term *= (x - t[start + p]) / (tm - t[start + p]);
      }
      total += term;
    }
    w[m] = total;
  }
  return w;
}

Quadruple fd_derivative(const NahmPath& path, std::size_t k)
{
  const auto [start, width] = window(k, path.grid.size());
  const std::vector<double> w = lagrange_derivative_weights(path.grid, k, start, width);
  Quadruple d;
  for (std::size_t c = 0; c < 4; ++c) {
    d[c] = LieVector(path.values[k][c].size(), 0.0);
    for (std::size_t m = 0; m < width; ++m) d[c] = axpy(w[m], path.values[start + m][c], d[c]);
  }
  return d;
}

Quadruple node_derivative(const NahmPath& path, std::size_t k)
{
  return path.derivatives.empty() ? fd_derivative(path, k) : path.derivatives[k];
}

// Cubic Hermite value and derivative at t.
std::pair<Quadruple, Quadruple> hermite(const NahmPath& path, double t)
{
  const auto& grid = path.grid;
  if (grid.empty()) throw DomainError("empty path");
  if (t <= grid.front()) return {path.values.front(), node_derivative(path, 0)};
  if (t >= grid.back()) return {path.values.back(), node_derivative(path, grid.size() - 1)};
  const std::size_t hi = static_cast<std::size_t>(std::upper_bound(grid.begin(), grid.end(), t) - grid.begin());
  const std::size_t lo = hi - 1;
  const double h = grid[hi] - grid[lo];
  const double s = (t - grid[lo]) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  const double d00 = 6 * s * s - 6 * s, d10 = 3 * s * s - 4 * s + 1;
  const double d01 = -d00, d11 = 3 * s * s - 2 * s;
  const Quadruple dlo = node_derivative(path, lo);
  const Quadruple dhi = node_derivative(path, hi);
  Quadruple v, dv;
  for (std::size_t c = 0; c < 4; ++c) {
    const std::size_t dim = path.values[lo][c].size();
    v[c] = LieVector(dim, 0.0);
    dv[c] = LieVector(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      const double y0 = path.values[lo][c][i], y1 = path.values[hi][c][i];
      const double m0 = dlo[c][i] * h, m1 = dhi[c][i] * h;
      v[c][i] = h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1;
      dv[c][i] = (d00 * y0 + d10 * m0 + d01 * y1 + d11 * m1) / h;
    }
  }
  return {v, dv};
}

// dTᵢ/dt = [Tⱼ, T_k] on the stacked state (T₁, T₂, T₃).
std::vector<double> reduced_rhs(const LieAlgebra& g, const std::vector<double>& y)
{
  const std::size_t d = g.dimension();
  const LieVector t1(y.begin(), y.begin() + d);
  const LieVector t2(y.begin() + d, y.begin() + 2 * d);
  const LieVector t3(y.begin() + 2 * d, y.end());
  std::vector<double> out;
  out.reserve(3 * d);
  for (const LieVector& v : {g.bracket(t2, t3), g.bracket(t3, t1), g.bracket(t1, t2)}) out.insert(out.end(), v.begin(), v.end());
  return out;
}

Quadruple to_quadruple(const LieAlgebra& g, const std::vector<double>& y)
{
  const std::size_t d = g.dimension();
  return {g.zero(), LieVector(y.begin(), y.begin() + d), LieVector(y.begin() + d, y.begin() + 2 * d),
          LieVector(y.begin() + 2 * d, y.end())};
}

double state_norm(const LieAlgebra& g, const std::vector<double>& y)
{
  const Quadruple q = to_quadruple(g, y);
  return std::sqrt(g.inner(q[1], q[1]) + g.inner(q[2], q[2]) + g.inner(q[3], q[3]));
}

// Dormand-Prince 5(4) coefficients.
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kE[7] = {71.0 / 57600, 0.0, -71.0 / 16695, 71.0 / 1920, -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

}  // namespace

Quadruple sample(const NahmPath& path, double t) { return hermite(path, t).first; }

double nahm_residual(const LieAlgebra& g, const NahmPath& path)
{
  const std::size_t count = path.grid.size();
  if (count < 2 || path.values.size() != count) throw DomainError("path needs at least two nodes");
  double worst = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const Quadruple d = fd_derivative(path, k);
    const Quadruple& v = path.values[k];
    for (std::size_t i = 1; i <= 3; ++i) {
      const std::size_t j = i % 3 + 1;
      const std::size_t l = j % 3 + 1;
      LieVector r = axpy(1.0, g.bracket(v[0], v[i]), d[i]);
      r = axpy(-1.0, g.bracket(v[j], v[l]), r);
      worst = std::max(worst, g.norm(r));
    }
  }
  return worst;
}

double triple_norm(const LieAlgebra& g, const BoundaryTriple& x)
{
  double s = 0.0;
  for (const auto& v : x) s += g.inner(v, v);
  return std::sqrt(s);
}

IntegrationResult integrate_reduced(const LieAlgebra& g, const BoundaryTriple& x, const IntegrateOptions& options)
{
  const std::size_t d = g.dimension();
  for (const auto& v : x)
    if (v.size() != d) throw ShapeError("boundary triple does not match the algebra dimension");
  const double cap = options.blowup_cap.value_or(1e6 * (1.0 + triple_norm(g, x)));
  if (!(cap > 0.0)) throw DomainError("blow-up cap must be positive");

  std::vector<double> y;
  for (const auto& v : x) y.insert(y.end(), v.begin(), v.end());
  const std::size_t m = y.size();

  IntegrationResult out;
  std::vector<double> ts{1.0};
  std::vector<Quadruple> vals{to_quadruple(g, y)};
  std::vector<double> f = reduced_rhs(g, y);
  std::vector<Quadruple> ders{to_quadruple(g, f)};

  // Integrate in s = 1 − t, where dy/ds = −F(y).
  double s = 0.0;
  double h = options.h_max;
  std::array<std::vector<double>, 7> k;
  bool blown = false;
  while (s < 1.0) {
    // Resolve half the solution's own time scale ‖y‖/‖F(y)‖ as well as [0, 1].
    const double rate = state_norm(g, f) / std::max(state_norm(g, y), 1e-300);
    const double h_cap = options.h_max / std::max(1.0, 2.0 * rate);
    h = std::min({h, h_cap, 1.0 - s});
    k[0] = f;
    for (double& v : k[0]) v = -v;
    std::vector<double> stage(m);
    for (int st = 1; st < 7; ++st) {
      for (std::size_t i = 0; i < m; ++i) {
        double acc = y[i];
        for (int p = 0; p < st; ++p) acc += h * kA[st][p] * k[p][i];
        stage[i] = acc;
      }
      k[st] = reduced_rhs(g, stage);
      for (double& v : k[st]) v = -v;
    }
    // stage now holds the fifth-order solution (row 6 of A equals the weights b).
    double err = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < m; ++i) {
      double e = 0.0;
      for (int p = 0; p < 7; ++p) e += kE[p] * k[p][i];
      e *= h;
      const double sc = options.atol + options.rtol * std::max(std::abs(y[i]), std::abs(stage[i]));
      err = std::max(err, std::abs(e) / sc);
      finite = finite && std::isfinite(stage[i]);
    }
    if (!finite) err = INFINITY;
    const double factor = err > 0.0 ? std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2))) : 5.0;
    if (err <= 1.0) {
      s = std::min(1.0, s + h);
      if (1.0 - s < 1e-15) s = 1.0;
      y = stage;
      f = k[6];
      for (double& v : f) v = -v;
      ++out.steps;
      ts.push_back(1.0 - s);
      vals.push_back(to_quadruple(g, y));
      ders.push_back(to_quadruple(g, f));
      if (state_norm(g, y) > cap) {
        blown = true;
        break;
      }
      h *= factor;
    } else {
      ++out.rejected;
      h *= std::min(1.0, factor);
      if (h < options.h_min) {
        blown = true;
        break;
      }
    }
  }

  std::reverse(ts.begin(), ts.end());
  std::reverse(vals.begin(), vals.end());
  std::reverse(ders.begin(), ders.end());
  out.path = {std::move(ts), std::move(vals), std::move(ders)};
  out.smooth = !blown;
  if (blown) out.blowup_time = 1.0 - s;
  return out;
}

Membership ug_membership(const LieAlgebra& g, const BoundaryTriple& x, const IntegrateOptions& options)
{
  const IntegrationResult r = integrate_reduced(g, x, options);
  return {r.smooth, r.blowup_time};
}

double ray_boundary(const LieAlgebra& g, const BoundaryTriple& direction, double lo, double hi, double tol)
{
  auto member = [&](double s) {
    BoundaryTriple x;
    for (std::size_t i = 0; i < 3; ++i) x[i] = scaled(s, direction[i]);
    return ug_membership(g, x).member;
  };
  const bool mlo = member(lo);
  if (mlo == member(hi)) throw DomainError("ray endpoints do not straddle the boundary");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (member(mid) == mlo ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

NahmPath scaling_reparam(const NahmPath& path, double a)
{
  if (!(a > 0.0 && a <= 1.0)) throw DomainError("scaling parameter must lie in (0, 1]");
  if (path.grid.empty() || std::abs(path.grid.back() - 1.0) > 1e-14) throw DomainError("path must end at t = 1");
  const bool with_derivs = !path.derivatives.empty();
  NahmPath out;
  auto push = [&](double s, const Quadruple& v, const Quadruple& dv) {
    out.grid.push_back(s);
    Quadruple sv, sdv;
    for (std::size_t c = 0; c < 4; ++c) {
      sv[c] = scaled(a, v[c]);
      sdv[c] = scaled(a * a, dv[c]);
    }
    out.values.push_back(std::move(sv));
    if (with_derivs) out.derivatives.push_back(std::move(sdv));
  };
  const double t0 = 1.0 - a;
  const auto [v0, dv0] = hermite(path, t0);
  push(0.0, v0, dv0);
  for (std::size_t k = 0; k < path.grid.size(); ++k) {
    const double s = (path.grid[k] - t0) / a;
    if (s <= 0.0) continue;
    // Skip a node that nearly coincides with the interpolated start.
    const double next_gap = k + 1 < path.grid.size() ? (path.grid[k + 1] - path.grid[k]) / a : 1.0;
    if (s < 0.1 * next_gap && k + 1 < path.grid.size()) continue;
    push(std::min(s, 1.0), path.values[k], path.derivatives.empty() ? Quadruple{} : path.derivatives[k]);
  }
  out.grid.back() = 1.0;
  return out;
}

NahmPath apply_gauge(const LieAlgebra& g, const NahmPath& path, const std::vector<CMatrix>& h,
                     const std::vector<CMatrix>& hdot)
{
  if (h.size() != path.grid.size() || hdot.size() != path.grid.size()) throw ShapeError("gauge length mismatch");
  NahmPath out;
  out.grid = path.grid;
  for (std::size_t k = 0; k < path.grid.size(); ++k) {
    const CMatrix hi = inverse(h[k]);
    Quadruple q;
    q[0] = g.from_matrix(h[k] * g.to_matrix(path.values[k][0]) * hi - hdot[k] * hi);
    for (std::size_t i = 1; i <= 3; ++i) q[i] = g.from_matrix(h[k] * g.to_matrix(path.values[k][i]) * hi);
    out.values.push_back(std::move(q));
  }
  return out;
}

GaugeResult gauge_to_zero(const LieAlgebra& g, const NahmPath& path, GaugeAnchor anchor)
{
  const std::size_t count = path.grid.size();
  if (count < 2) throw DomainError("path needs at least two nodes");
  const std::size_t m = g.matrix_size();
  std::vector<CMatrix> gs{CMatrix::identity(m)};
  auto t0 = [&](double t) { return g.to_matrix(sample(path, t)[0]); };
  for (std::size_t k = 0; k + 1 < count; ++k) {
    const double h = path.grid[k + 1] - path.grid[k];
    const CMatrix a0 = g.to_matrix(path.values[k][0]);
    const CMatrix am = t0(path.grid[k] + 0.5 * h);
    const CMatrix a1 = g.to_matrix(path.values[k + 1][0]);
    const CMatrix& y = gs.back();
    const CMatrix k1 = y * a0;
    const CMatrix k2 = (y + k1 * Complex(0.5 * h)) * am;
    const CMatrix k3 = (y + k2 * Complex(0.5 * h)) * am;
    const CMatrix k4 = (y + k3 * Complex(h)) * a1;
    gs.push_back(y + (k1 + k2 * Complex(2.0) + k3 * Complex(2.0) + k4) * Complex(h / 6.0));
  }
  if (anchor == GaugeAnchor::End) {
    const CMatrix end_inv = inverse(gs.back());
    for (auto& x : gs) x = end_inv * x;
  }
  std::vector<CMatrix> gdot;
  for (std::size_t k = 0; k < count; ++k) gdot.push_back(gs[k] * g.to_matrix(path.values[k][0]));
  return {apply_gauge(g, path, gs, gdot), gs};
}

BoundaryTriple psi_eval(const NahmPath& path)
{
  if (path.grid.empty() || std::abs(path.grid.back() - 1.0) > 1e-14) throw DomainError("path is not defined at t = 1");
  const Quadruple& q = path.values.back();
  return {q[1], q[2], q[3]};
}

bool tstar_region_test(const LieAlgebra& g, const BoundaryTriple& mu_value, const BoundaryTriple& eps,
                       const IntegrateOptions& options)
{
  for (const auto& e : eps)
    if (!g.is_central(e)) throw NonCentralLevel("level component is not central");
  BoundaryTriple x;
  for (std::size_t i = 0; i < 3; ++i) x[i] = axpy(-1.0, mu_value[i], eps[i]);
  return ug_membership(g, x, options).member;
}

BoundaryTriple symmetric_su2_triple(double x)
{
  return {LieVector{x, 0.0, 0.0}, LieVector{0.0, x, 0.0}, LieVector{0.0, 0.0, x}};
}

}  // namespace momentlab::nahm
