#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "momentlab/acceptance.hpp"
#include "momentlab/hk_moment.hpp"
#include "momentlab/linalg.hpp"
#include "momentlab/matrix_io.hpp"
#include "momentlab/modification.hpp"
#include "momentlab/nahm.hpp"
#include "momentlab/random.hpp"
#include "momentlab/symplectic_cut.hpp"

using nlohmann::json;
using namespace momentlab;

namespace {

constexpr std::uint64_t kDefaultSeed = 42;

// Thrown when a command ran but its numerical check failed; the record is still written.
struct CheckFailed {
  std::string what;
};

struct Record {
  json outputs = json::object();
  json residuals = json::array();
};

json complex_json(Complex z)
{
  if (std::abs(z.imag()) <= 1e-14 * std::max(1.0, std::abs(z.real()))) return z.real();
  return json::array({z.real(), z.imag()});
}

json complex_list(const std::vector<Complex>& zs)
{
  json out = json::array();
  for (const Complex& z : zs) out.push_back(complex_json(z));
  return out;
}

json moment_json(const hk::MomentValue& m) { return {{"R", matrix_to_json(m.r)}, {"S", matrix_to_json(m.s)}}; }

std::array<double, 3> parse_triple(const std::vector<double>& v, const std::string& what)
{
  if (v.size() != 3) throw ParseError(what + " needs exactly three comma-separated values");
  return {v[0], v[1], v[2]};
}

std::string read_text(const std::string& literal_or_path)
{
  std::ifstream in(literal_or_path);
  if (!in) return literal_or_path;
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json parse_json_arg(const std::string& literal_or_path)
{
  try {
    return json::parse(read_text(literal_or_path));
  } catch (const json::exception& e) {
    throw ParseError(std::string("JSON argument: ") + e.what());
  }
}

LieAlgebra algebra_from_name(const std::string& name)
{
  if (name == "su2") return LieAlgebra::su(2);
  if (name == "su3") return LieAlgebra::su(3);
  if (name.rfind("u1^", 0) == 0) return LieAlgebra::abelian(static_cast<std::size_t>(std::stoul(name.substr(3))));
  if (name == "u1") return LieAlgebra::abelian(1);
  throw ParseError("unknown algebra '" + name + "' (use su2, su3, u1^k)");
}

nahm::BoundaryTriple triple_from_json(const LieAlgebra& g, const json& j)
{
  if (!j.is_array() || j.size() != 3) throw ParseError("boundary triple must be a JSON array of three coordinate arrays");
  nahm::BoundaryTriple x;
  for (std::size_t i = 0; i < 3; ++i) {
    x[i] = j[i].get<std::vector<double>>();
    if (x[i].size() != g.dimension()) throw ParseError("triple component has the wrong dimension");
  }
  return x;
}

json triple_json(const nahm::BoundaryTriple& x) { return json::array({x[0], x[1], x[2]}); }

json path_json(const nahm::NahmPath& p)
{
  json values = json::array();
  for (const auto& q : p.values) values.push_back(json::array({q[1], q[2], q[3]}));
  return {{"grid", p.grid}, {"values", values}};
}

// Options bound to one subcommand; values stay alive for the callback.
struct Options {
  std::string matrix_h, matrix_a, matrix_b, matrix_l, x_triple, targets, algebra = "su2", radii = "0.5:5:20";
  std::optional<double> eps_lambda;
  std::vector<double> eps{1.0, 0.3, -0.2};
  std::vector<double> ray{1.0, 1.0, 1.0};
  std::string lambda = "0";
  std::string sign = "plus";
  double eta = 1e-8, d = 0.5, phase = 0.0, a = 0.5, lo = -2.0, hi = 0.0, tol = 1e-3, scale = 1.0, v0 = 1.0;
  std::size_t n = 2, r = 2, rank = 1;
  int restarts = 50, criterion = 0;
  bool quick = false, bisect = false, flat = false, left = false, paths = false;
};

Record cut_analyze(const Options& o)
{
  const CMatrix h = load_matrix(o.matrix_h);
  const cut::FiberDescription f = cut::fiber_description(h, o.eta);
  Record rec;
  rec.outputs = {{"k", f.positive_count}, {"fiber_dim", f.fiber_dim}};
  const CMatrix section = cut::cut_section(h);
  rec.residuals.push_back(frobenius_norm(cut::sympl_moment(section) - h * Complex(0.0, 1.0)));
  if (o.eps_lambda) {
    const cut::CutMembership m =
        cut::cut_membership(h * Complex(0.0, 1.0), cut::central_level(h.rows(), *o.eps_lambda), o.eta);
    rec.outputs["inside"] = m.inside;
    rec.outputs["eps"] = *o.eps_lambda;
  }
  return rec;
}

Record hk_moment_cmd(const Options& o)
{
  const hk::HKPoint p{load_matrix(o.matrix_a), load_matrix(o.matrix_b)};
  Record rec;
  rec.outputs["phi"] = moment_json(hk::hk_moment(p));
  if (o.left) rec.outputs["phi_left"] = moment_json(hk::hk_moment_left(p));
  if (p.a.is_square() && p.b.is_square()) rec.outputs["kernel_dim"] = hk::kernel_dim(p, o.eta);
  return rec;
}

Record hk_critical(const Options& o)
{
  // With B = I the matrix B⁻¹A* equals L for A = L*.
  hk::HKPoint p;
  if (!o.matrix_l.empty()) {
    const CMatrix l = load_matrix(o.matrix_l);
    if (!l.is_square()) throw ShapeError("L must be square");
    p = {l.adjoint(), CMatrix::identity(l.rows())};
  } else {
    p = {load_matrix(o.matrix_a), load_matrix(o.matrix_b)};
  }
  const hk::CriticalTest t = hk::critical_point_test(p, o.eta);
  Record rec;
  rec.outputs = {{"critical", t.critical}, {"spectrum", complex_list(t.spectrum)}, {"kernel_dim", hk::kernel_dim(p, o.eta)}};
  rec.outputs["witness"] = t.witness ? json::array({complex_json(t.witness->first), complex_json(t.witness->second)})
                                     : json(nullptr);
  return rec;
}

Record hk_fiber_disc(const Options& o)
{
  const hk::DiscFiberPoint f = hk::disc_fiber_point(o.d, o.phase);
  const hk::MomentValue target{CMatrix(2, 2), CMatrix::diagonal({Complex(1.0), Complex(-1.0)})};
  Record rec;
  const double residual = hk::norm(hk::hk_moment(f.point) - target);
  rec.outputs = {{"A", matrix_to_json(f.point.a)},
                 {"B", matrix_to_json(f.point.b)},
                 {"T", matrix_to_json(f.t)},
                 {"W", matrix_to_json(f.w)},
                 {"invariant_TstarT", hermitian_eig(f.t.adjoint() * f.t, 1e-10).values},
                 {"unitarity_defect", unitarity_defect(f.w)}};
  rec.residuals.push_back(residual);
  if (!(residual < 1e-10)) throw CheckFailed{"disc fibre residual " + std::to_string(residual)};
  return rec;
}

Record hk_fiber_zero(const Options& o, std::uint64_t seed)
{
  Rng rng(seed);
  const CMatrix p = rng.psd(o.n, o.rank);
  const CMatrix w = hk::canonical_isotropic_unitary(p, o.eta);
  const hk::HKPoint z = hk::zero_fiber_point(p, w, o.eta);
  Record rec;
  rec.outputs = {{"P", matrix_to_json(p)}, {"W", matrix_to_json(w)}, {"A", matrix_to_json(z.a)}, {"B", matrix_to_json(z.b)}};
  rec.residuals.push_back(hk::norm(hk::hk_moment(z)));
  return rec;
}

Record hk_image_test(const Options& o, std::uint64_t seed)
{
  Rng rng(seed);
  const CMatrix m = hk::non_image_matrix(o.n, parse_complex(o.lambda), rng);
  const hk::SearchResult s = hk::nonmembership_search({CMatrix(o.n, o.n), m}, o.restarts, rng.next_seed());
  Record rec;
  rec.outputs = {{"M", matrix_to_json(m)}, {"rank_M", rank_tol(m)}, {"best_residual", s.best_residual},
                 {"restarts", o.restarts}};
  rec.residuals = s.residuals;
  return rec;
}

Record mod_adhm(const Options& o, std::uint64_t seed)
{
  mod::AdhmOptions opt;
  if (o.sign == "minus") {
    opt.sign = mod::Sign::Minus;
  } else if (o.sign != "plus") {
    throw ParseError("--sign must be plus or minus");
  }
  const mod::LevelSolveResult s = mod::adhm_solve(o.n, o.r, parse_triple(o.eps, "--eps"), seed, opt);
  Record rec;
  rec.outputs = {{"kernel_dim", s.kernel_dim},
                 {"rank", s.rank},
                 {"quotient_dim", s.kernel_dim - o.n * o.n},
                 {"b1_spectrum", complex_list(s.b1_spectrum)},
                 {"ata_spectrum", s.ata_spectrum},
                 {"B1", matrix_to_json(s.point.b1)},
                 {"B2", matrix_to_json(s.point.b2)},
                 {"A", matrix_to_json(s.point.a)},
                 {"B", matrix_to_json(s.point.b)},
                 {"eps_convention", "R = i*eps1*Id, S = (eps2 + i*eps3)*Id, R includes the i/2 factor"}};
  rec.residuals.push_back(s.residual);
  return rec;
}

Record mod_probe(const Options& o, std::uint64_t seed)
{
  const json targets = parse_json_arg(o.targets);
  if (!targets.is_array() || targets.empty()) throw ParseError("--targets must be a non-empty JSON array");
  Record rec;
  json results = json::array();
  Rng master(seed);
  for (const auto& t : targets) {
    hk::MomentValue target;
    try {
      target.s = matrix_from_json(t.at("S"));
      target.r = t.contains("R") ? matrix_from_json(t.at("R")) : CMatrix(target.s.rows(), target.s.rows());
    } catch (const json::exception& e) {
      throw ParseError(std::string("target entry: ") + e.what());
    }
    const hk::MomentValue eps = hk::central_level(target.s.rows(), parse_triple(o.eps, "--eps"));
    const mod::ProbeResult p = mod::structure_probe(eps, target, master.next_seed());
    results.push_back({{"label", t.value("label", "")},
                       {"stratum", mod::to_string(p.stratum)},
                       {"best_residual", p.best_residual},
                       {"max_kernel_dim", p.max_kernel_dim},
                       {"dispersion", p.dispersion},
                       {"solutions", p.solutions}});
    rec.residuals.push_back(p.best_residual);
  }
  rec.outputs["targets"] = results;
  return rec;
}

Record mod_taubnut(const Options& o, std::uint64_t seed)
{
  std::vector<double> parts;
  std::stringstream ss(o.radii);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      parts.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ParseError("--radii must look like lo:hi:count");
    }
  }
  if (parts.size() != 3 || parts[2] < 2 || !(parts[0] > 0.0) || !(parts[1] > parts[0])) {
    throw ParseError("--radii must look like lo:hi:count with 0 < lo < hi and count ≥ 2");
  }
  const int count = static_cast<int>(parts[2]);
  Rng rng(seed);
  std::vector<double> radii, values, base;
  for (int k = 0; k < count; ++k) {
    const double r = parts[0] + (parts[1] - parts[0]) * k / (count - 1);
    std::array<double, 3> dir{rng.normal(), rng.normal(), rng.normal()};
    const double len = std::hypot(dir[0], dir[1], dir[2]);
    const mod::TaubNutSample s = mod::taubnut_quotient_metric({r * dir[0] / len, r * dir[1] / len, r * dir[2] / len},
                                                              rng.next_seed(), {o.v0, !o.flat});
    radii.push_back(s.radius);
    values.push_back(s.potential);
    base.push_back(s.potential_base);
  }
  const mod::InverseRadiusFit fit = mod::fit_inverse_radius(radii, values);
  Record rec;
  rec.outputs = {{"radii", radii}, {"V", values}, {"V_base", base}, {"c0", fit.c0}, {"c1", fit.c1},
                 {"r_squared", fit.r_squared}, {"flat", o.flat}};
  for (std::size_t i = 0; i < values.size(); ++i) rec.residuals.push_back(std::abs(values[i] - base[i]));
  return rec;
}

Record nahm_integrate(const Options& o)
{
  const LieAlgebra g = algebra_from_name(o.algebra);
  const nahm::BoundaryTriple x = triple_from_json(g, parse_json_arg(o.x_triple));
  const nahm::IntegrationResult r = nahm::integrate_reduced(g, x);
  Record rec;
  rec.outputs = {{"algebra", g.name()}, {"smooth", r.smooth}, {"steps", r.steps}, {"rejected", r.rejected}};
  rec.outputs["blowup_time"] = r.blowup_time ? json(*r.blowup_time) : json(nullptr);
  if (r.smooth) {
    rec.outputs["psi"] = triple_json(nahm::psi_eval(r.path));
    rec.residuals.push_back(nahm::nahm_residual(g, r.path));
  }
  if (o.paths) rec.outputs["path"] = path_json(r.path);
  return rec;
}

nahm::BoundaryTriple ray_triple(const LieAlgebra& g, const std::vector<double>& ray)
{
  if (ray.size() != 3) throw ParseError("--ray needs three values");
  if (g.dimension() < 3) throw ParseError("--ray needs an algebra of dimension at least 3");
  nahm::BoundaryTriple x;
  for (std::size_t i = 0; i < 3; ++i) {
    x[i] = g.zero();
    x[i][i] = ray[i];
  }
  return x;
}

Record nahm_region(const Options& o)
{
  const LieAlgebra g = algebra_from_name(o.algebra);
  const nahm::BoundaryTriple dir = ray_triple(g, o.ray);
  Record rec;
  rec.outputs = {{"algebra", g.name()}, {"ray", o.ray}};
  if (o.bisect) {
    rec.outputs["boundary"] = nahm::ray_boundary(g, dir, o.lo, o.hi, o.tol);
    rec.outputs["interval"] = {o.lo, o.hi};
    rec.outputs["tolerance"] = o.tol;
  } else {
    nahm::BoundaryTriple x;
    for (std::size_t i = 0; i < 3; ++i) x[i] = scaled(o.scale, dir[i]);
    const nahm::Membership m = nahm::ug_membership(g, x);
    rec.outputs["scale"] = o.scale;
    rec.outputs["member"] = m.member;
    rec.outputs["blowup_time"] = m.blowup_time ? json(*m.blowup_time) : json(nullptr);
  }
  return rec;
}

Record nahm_scale(const Options& o)
{
  const LieAlgebra g = algebra_from_name(o.algebra);
  const nahm::BoundaryTriple x =
      o.x_triple.empty() ? ray_triple(g, o.ray) : triple_from_json(g, parse_json_arg(o.x_triple));
  const nahm::IntegrationResult r = nahm::integrate_reduced(g, x);
  if (!r.smooth) throw CheckFailed{"boundary triple is not in the region: no smooth solution"};
  const nahm::NahmPath s = nahm::scaling_reparam(r.path, o.a);
  const nahm::BoundaryTriple psi = nahm::psi_eval(r.path);
  const nahm::BoundaryTriple psi_a = nahm::psi_eval(s);
  double err = 0.0;
  for (std::size_t i = 0; i < 3; ++i) err = std::max(err, g.norm(axpy(-o.a, psi[i], psi_a[i])));
  Record rec;
  rec.outputs = {{"a", o.a}, {"psi", triple_json(psi)}, {"psi_scaled", triple_json(psi_a)}, {"scaling_error", err},
                 {"residual_scaled", nahm::nahm_residual(g, s)}};
  rec.residuals = {nahm::nahm_residual(g, r.path), nahm::nahm_residual(g, s)};
  if (o.paths) rec.outputs["path"] = path_json(s);
  return rec;
}

json config_snapshot(const CLI::App* app)
{
  json out = json::object();
  for (const CLI::App* a = app; a != nullptr; a = a->get_parent()) {
    for (const CLI::Option* opt : a->get_options()) {
      const std::string name = opt->get_name(false, true);
      if (name.empty() || name == "--help" || name == "--help-all") continue;
      const auto& results = opt->results();
      if (!results.empty()) {
        out[opt->get_single_name()] = results.size() == 1 ? json(results.front()) : json(results);
      } else if (!opt->get_default_str().empty()) {
        out[opt->get_single_name()] = opt->get_default_str();
      }
    }
  }
  return out;
}

bool seed_on_command_line(int argc, char** argv)
{
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--seed" || arg.rfind("--seed=", 0) == 0) return true;
  }
  return false;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"momentlab: moment maps, modifications and Nahm data"};
  app.require_subcommand(1);
  // global options such as --seed may also follow the subcommand
  app.fallthrough();
  app.set_config("--config", "", "flat key=value configuration file");

  std::uint64_t seed = kDefaultSeed;
  std::string output_path;
  app.add_option("--seed", seed, "random seed (flag > MOMENTLAB_SEED > config > 42)");
  app.add_option("--output", output_path, "append JSON lines to this file instead of stdout");

  Options o;
  std::function<Record(std::uint64_t)> action;
  std::string command_name;
  auto bind = [&](CLI::App* sub, std::string name, std::function<Record(std::uint64_t)> fn) {
    sub->callback([&action, &command_name, name, fn] {
      command_name = name;
      action = fn;
    });
  };

  // cut
  CLI::App* cut_cmd = app.add_subcommand("cut", "symplectic cut of Hom(C^n, C^n)");
  cut_cmd->require_subcommand(1);
  CLI::App* analyze = cut_cmd->add_subcommand("analyze", "fibre and cut membership over iH");
  analyze->add_option("--H", o.matrix_h, "non-negative Hermitian matrix (literal or file)")->required();
  analyze->add_option("--eps", o.eps_lambda, "central level i*lambda*Id");
  analyze->add_option("--eta", o.eta, "relative positivity threshold")->capture_default_str();
  bind(analyze, "cut analyze", [&](std::uint64_t) { return cut_analyze(o); });

  // hk
  CLI::App* hk_cmd = app.add_subcommand("hk", "hyperkähler moment map on pairs (A, B)");
  hk_cmd->require_subcommand(1);
  CLI::App* moment = hk_cmd->add_subcommand("moment", "evaluate phi(A, B)");
  moment->add_option("--A", o.matrix_a, "matrix A")->required();
  moment->add_option("--B", o.matrix_b, "matrix B")->required();
  moment->add_flag("--left", o.left, "also evaluate the left moment map");
  moment->add_option("--eta", o.eta, "kernel threshold")->capture_default_str();
  bind(moment, "hk moment", [&](std::uint64_t) { return hk_moment_cmd(o); });

  CLI::App* critical = hk_cmd->add_subcommand("critical", "critical-point test via L = B^-1 A*");
  auto* l_opt = critical->add_option("--L", o.matrix_l, "L itself (uses A = L*, B = I)");
  auto* a_opt = critical->add_option("--A", o.matrix_a, "matrix A");
  auto* b_opt = critical->add_option("--B", o.matrix_b, "matrix B");
  l_opt->excludes(a_opt)->excludes(b_opt);
  a_opt->needs(b_opt);
  b_opt->needs(a_opt);
  critical->add_option("--eta", o.eta, "pair tolerance")->capture_default_str();
  critical->callback([&] {
    if (o.matrix_l.empty() && o.matrix_a.empty()) throw CLI::RequiredError("--L or --A/--B");
    command_name = "hk critical";
    action = [&](std::uint64_t) { return hk_critical(o); };
  });

  CLI::App* disc = hk_cmd->add_subcommand("fiber-disc", "point of the disc fibre over (0, diag(1,-1))");
  disc->add_option("--d", o.d, "disc parameter in (0, 1]")->capture_default_str();
  disc->add_option("--phase", o.phase, "phase of the off-diagonal entry")->capture_default_str();
  bind(disc, "hk fiber-disc", [&](std::uint64_t) { return hk_fiber_disc(o); });

  CLI::App* zero = hk_cmd->add_subcommand("fiber-zero", "point of the zero fibre from a random P");
  zero->add_option("--rank", o.rank, "rank of P")->capture_default_str();
  zero->add_option("--n", o.n, "matrix size")->capture_default_str();
  zero->add_option("--eta", o.eta, "rank threshold")->capture_default_str();
  bind(zero, "hk fiber-zero", [&](std::uint64_t s) { return hk_fiber_zero(o, s); });

  CLI::App* image = hk_cmd->add_subcommand("image-test", "search for a preimage of a non-image certificate");
  image->add_option("--n", o.n, "matrix size (at least 2)")->capture_default_str();
  image->add_option("--lambda", o.lambda, "complex level, e.g. 0 or 1+2i")->capture_default_str();
  image->add_option("--restarts", o.restarts, "number of seeded restarts")->capture_default_str();
  bind(image, "hk image-test", [&](std::uint64_t s) { return hk_image_test(o, s); });

  // mod
  CLI::App* mod_cmd = app.add_subcommand("mod", "modification engine");
  mod_cmd->require_subcommand(1);
  CLI::App* adhm = mod_cmd->add_subcommand("adhm", "solve the ADHM level set");
  adhm->add_option("--n", o.n, "rank n")->capture_default_str();
  adhm->add_option("--r", o.r, "framing r")->capture_default_str();
  adhm->add_option("--eps", o.eps, "level eps1,eps2,eps3")->delimiter(',')->capture_default_str();
  adhm->add_option("--sign", o.sign, "plus (mu + phi) or minus (mu - phi)")->capture_default_str();
  bind(adhm, "mod adhm", [&](std::uint64_t s) { return mod_adhm(o, s); });

  CLI::App* probe = mod_cmd->add_subcommand("probe", "classify fibres over moment targets");
  probe->add_option("--targets", o.targets, "JSON array of {label, R?, S} (literal or file)")->required();
  probe->add_option("--eps", o.eps, "level eps1,eps2,eps3")->delimiter(',')->capture_default_str();
  bind(probe, "mod probe", [&](std::uint64_t s) { return mod_probe(o, s); });

  CLI::App* taubnut = mod_cmd->add_subcommand("taubnut", "circle quotient metric of H x (R^3 x S^1)");
  taubnut->add_option("--radii", o.radii, "lo:hi:count")->capture_default_str();
  taubnut->add_option("--v0", o.v0, "constant potential of the flat factor")->capture_default_str();
  taubnut->add_flag("--flat", o.flat, "flat control without the quaternion factor");
  bind(taubnut, "mod taubnut", [&](std::uint64_t s) { return mod_taubnut(o, s); });

  // nahm
  CLI::App* nahm_cmd = app.add_subcommand("nahm", "reduced Nahm equations");
  nahm_cmd->require_subcommand(1);
  CLI::App* integrate = nahm_cmd->add_subcommand("integrate", "integrate backward from T(1) = X");
  integrate->add_option("--algebra", o.algebra, "su2, su3 or u1^k")->capture_default_str();
  integrate->add_option("--X", o.x_triple, "JSON [[..],[..],[..]] coordinates (literal or file)")->required();
  integrate->add_flag("--path", o.paths, "include the grid and values");
  bind(integrate, "nahm integrate", [&](std::uint64_t) { return nahm_integrate(o); });

  CLI::App* region = nahm_cmd->add_subcommand("region", "membership along a ray s*(c1 e1, c2 e2, c3 e3)");
  region->add_option("--algebra", o.algebra, "su2, su3 or u1^k")->capture_default_str();
  region->add_option("--ray", o.ray, "coefficients c1,c2,c3")->delimiter(',')->capture_default_str();
  region->add_flag("--bisect", o.bisect, "locate the boundary on [lo, hi]");
  region->add_option("--lo", o.lo, "bisection start")->capture_default_str();
  region->add_option("--hi", o.hi, "bisection end")->capture_default_str();
  region->add_option("--tol", o.tol, "bisection width")->capture_default_str();
  region->add_option("--scale", o.scale, "ray parameter for a single membership test")->capture_default_str();
  bind(region, "nahm region", [&](std::uint64_t) { return nahm_region(o); });

  CLI::App* scale = nahm_cmd->add_subcommand("scale", "affine reparametrization of a solution");
  scale->add_option("--a", o.a, "scale factor in (0, 1]")->capture_default_str();
  scale->add_option("--algebra", o.algebra, "su2, su3 or u1^k")->capture_default_str();
  scale->add_option("--X", o.x_triple, "boundary triple (default: the --ray triple)");
  scale->add_option("--ray", o.ray, "coefficients c1,c2,c3")->delimiter(',')->capture_default_str();
  scale->add_flag("--path", o.paths, "include the rescaled grid and values");
  bind(scale, "nahm scale", [&](std::uint64_t) { return nahm_scale(o); });

  // verify
  CLI::App* verify = app.add_subcommand("verify", "run the acceptance suite");
  verify->add_flag("--quick", o.quick, "fewer samples, same tolerances");
  verify->add_option("--criterion", o.criterion, "run a single criterion (1-10)")
      ->check(CLI::Range(1, acceptance::kCriterionCount));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  if (!seed_on_command_line(argc, argv)) {
    if (const char* env = std::getenv("MOMENTLAB_SEED")) {
      try {
        seed = std::stoull(env);
      } catch (const std::exception&) {
        std::cerr << "error: MOMENTLAB_SEED is not an unsigned integer\n";
        return 2;
      }
    }
  }

  std::ofstream file;
  if (!output_path.empty()) {
    file.open(output_path, std::ios::app);
    if (!file) {
      std::cerr << "error: cannot open " << output_path << "\n";
      return 2;
    }
  }
  std::ostream& out = output_path.empty() ? std::cout : file;
  int record_id = 0;
  auto emit = [&](const std::string& name, const CLI::App* sub, const Record& rec, double seconds,
                  std::optional<std::string> error) {
    json j = {{"id", record_id++},
              {"subcommand", name},
              {"config", config_snapshot(sub)},
              {"seed", seed},
              {"outputs", rec.outputs},
              {"residuals", rec.residuals},
              {"wall_time", seconds}};
    if (error) j["error"] = *error;
    out << j.dump() << std::endl;
  };

  if (verify->parsed()) {
    acceptance::Options ao{o.quick, seed};
    bool all = true;
    std::vector<int> ids;
    if (o.criterion > 0) {
      ids.push_back(o.criterion);
    } else {
      for (int i = 1; i <= acceptance::kCriterionCount; ++i) ids.push_back(i);
    }
    for (int id : ids) {
      const acceptance::CriterionResult r = acceptance::run_criterion(id, ao);
      Record rec;
      rec.outputs = {{"criterion", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}};
      emit("verify", verify, rec, r.seconds, std::nullopt);
      std::cerr << acceptance::summary_line(r) << "\n";
      all = all && r.passed;
    }
    return all ? 0 : 1;
  }

  const CLI::App* leaf = &app;
  while (!leaf->get_subcommands().empty()) leaf = leaf->get_subcommands().front();
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  try {
    const Record rec = action(seed);
    emit(command_name, leaf, rec, elapsed(), std::nullopt);
    return 0;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const CheckFailed& e) {
    emit(command_name, leaf, {}, elapsed(), e.what);
    std::cerr << "error: " << e.what << "\n";
    return 1;
  } catch (const std::exception& e) {
    emit(command_name, leaf, {}, elapsed(), std::string(e.what()));
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
