#include "hdg/cases.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace hdg {

namespace {

constexpr double kPi = std::numbers::pi;

/// grad(r^a F(t)): column x = r^{a-1}(a F cos t - F' sin t),
/// column y = r^{a-1}(a F sin t + F' cos t).
Mat2 polar_gradient(double r, double t, double a, const Vec2& F, const Vec2& dF) {
  const double s = std::pow(r, a - 1.0);
  const double c = std::cos(t), sn = std::sin(t);
  Mat2 g;
  g.col(0) = s * (a * c * F - sn * dF);
  g.col(1) = s * (a * sn * F + c * dF);
  return g;
}

bool at_origin(const Point& x) { return x.x() == 0.0 && x.y() == 0.0; }

}  // namespace

double polar_angle(const Point& x, const Point& side) {
  if (x.y() == 0.0 && x.x() > 0.0) return side.y() < 0.0 ? 2.0 * kPi : 0.0;
  double t = std::atan2(x.y(), x.x());
  if (t < 0.0) t += 2.0 * kPi;
  return t;
}

// ---------------------------------------------------------------------------

Vec2 CornerSingularSolution::velocity(const Point& x, const Point& side) const {
  if (at_origin(x)) return Vec2::Zero();
  const double r = x.norm(), t = polar_angle(x, side);
  return 1.5 * std::sqrt(r) *
         Vec2(std::cos(t / 2) - std::cos(1.5 * t), 3.0 * std::sin(t / 2) - std::sin(1.5 * t));
}

Mat2 CornerSingularSolution::velocity_gradient(const Point& x, const Point& side) const {
  if (at_origin(x)) {
    const double inf = std::numeric_limits<double>::infinity();
    return Mat2::Constant(inf);
  }
  const double r = x.norm(), t = polar_angle(x, side);
  const Vec2 F = 1.5 * Vec2(std::cos(t / 2) - std::cos(1.5 * t), 3.0 * std::sin(t / 2) - std::sin(1.5 * t));
  const Vec2 dF =
      1.5 * Vec2(-0.5 * std::sin(t / 2) + 1.5 * std::sin(1.5 * t), 1.5 * std::cos(t / 2) - 1.5 * std::cos(1.5 * t));
  return polar_gradient(r, t, 0.5, F, dF);
}

double CornerSingularSolution::pressure(const Point& x, const Point& side) const {
  if (at_origin(x)) return std::numeric_limits<double>::quiet_NaN();
  const double r = x.norm(), t = polar_angle(x, side);
  return -6.0 / std::sqrt(r) * std::cos(t / 2);
}

double CornerSingularSolution::stream_function(const Point& x, const Point& side) const {
  if (at_origin(x)) return 0.0;
  const double r = x.norm(), t = polar_angle(x, side);
  const double s = std::sin(t / 2);
  return 4.0 * std::pow(r, 1.5) * s * s * s;
}

// ---------------------------------------------------------------------------

CornerProfile::CornerProfile() : lambda_(856399.0 / 1572864.0), omega_(1.5 * kPi) {}

double CornerProfile::derivative(int m, double t) const {
  const double a = 1.0 + lambda_, b = 1.0 - lambda_;
  const double c = std::cos(lambda_ * omega_);
  const double shift = m * kPi / 2;
  const double am = std::pow(a, m), bm = std::pow(b, m);
  return c / a * am * std::sin(a * t + shift) - am * std::cos(a * t + shift) -
         c / b * bm * std::sin(b * t + shift) + bm * std::cos(b * t + shift);
}

LShapeSolution::LShapeSolution(double nu) : nu_(nu) {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw std::invalid_argument("viscosity must be positive and finite");
}

Vec2 LShapeSolution::velocity(const Point& x, const Point& side) const {
  if (at_origin(x)) return Vec2::Zero();
  const double r = x.norm(), t = polar_angle(x, side), l = psi_.exponent();
  const double p0 = psi_.derivative(0, t), p1 = psi_.derivative(1, t);
  const double c = std::cos(t), s = std::sin(t);
  return std::pow(r, l) * Vec2((1 + l) * s * p0 + c * p1, -(1 + l) * c * p0 + s * p1);
}

Mat2 LShapeSolution::velocity_gradient(const Point& x, const Point& side) const {
  if (at_origin(x)) return Mat2::Constant(std::numeric_limits<double>::infinity());
  const double r = x.norm(), t = polar_angle(x, side), l = psi_.exponent();
  const double p0 = psi_.derivative(0, t), p1 = psi_.derivative(1, t), p2 = psi_.derivative(2, t);
  const double c = std::cos(t), s = std::sin(t);
  const Vec2 F((1 + l) * s * p0 + c * p1, -(1 + l) * c * p0 + s * p1);
  const Vec2 dF((1 + l) * c * p0 + l * s * p1 + c * p2, (1 + l) * s * p0 - l * c * p1 + s * p2);
  return polar_gradient(r, t, l, F, dF);
}

// Sign chosen so that -lap u + grad p1 = 0.
double LShapeSolution::singular_pressure(const Point& x, const Point& side) const {
  if (at_origin(x)) return std::numeric_limits<double>::quiet_NaN();
  const double r = x.norm(), t = polar_angle(x, side), l = psi_.exponent();
  return -std::pow(r, l - 1) * ((1 + l) * (1 + l) * psi_.derivative(1, t) + psi_.derivative(3, t)) / (1 - l);
}

double LShapeSolution::pressure(const Point& x, const Point& side) const {
  return nu_ * singular_pressure(x, side) + x.x() * x.x() * x.x() + x.y() * x.y() * x.y();
}

Vec2 LShapeSolution::body_force(const Point& x) const { return {3 * x.x() * x.x(), 3 * x.y() * x.y()}; }

// ---------------------------------------------------------------------------

std::string_view to_string(CaseId id) {
  switch (id) {
    case CaseId::SquareMinReg: return "square-mr";
    case CaseId::LShape: return "lshape";
    case CaseId::CrackedSquare: return "crack";
  }
  return "?";
}

std::optional<CaseId> parse_case(std::string_view s) {
  for (CaseId id : {CaseId::SquareMinReg, CaseId::LShape, CaseId::CrackedSquare})
    if (s == to_string(id)) return id;
  return std::nullopt;
}

CaseDefinition case_square_min_reg() {
  return {CaseId::SquareMinReg, std::make_shared<CornerSingularSolution>("square-mr"), unit_square_mesh, {8, 4}, 1.0};
}

CaseDefinition case_lshape(double nu) {
  return {CaseId::LShape, std::make_shared<LShapeSolution>(nu), lshape_mesh, {2, 2}, 3.0};
}

CaseDefinition case_cracked_square() {
  return {CaseId::CrackedSquare, std::make_shared<CornerSingularSolution>("crack"), cracked_square_mesh, {8, 4}, 0.04};
}

CaseDefinition make_case(CaseId id, double nu) {
  switch (id) {
    case CaseId::SquareMinReg: return case_square_min_reg();
    case CaseId::LShape: return case_lshape(nu);
    case CaseId::CrackedSquare: return case_cracked_square();
  }
  throw std::invalid_argument("unknown case");
}

std::optional<double> mean_last_two(const std::vector<std::optional<double>>& rates) {
  std::vector<double> defined;
  for (const auto& r : rates)
    if (r) defined.push_back(*r);
  if (defined.size() < 2) return std::nullopt;
  return 0.5 * (defined[defined.size() - 1] + defined[defined.size() - 2]);
}

Eigen::VectorXd case_boundary_data(const ExactSolution& exact, const Mesh& mesh, const SpaceSet& spaces) {
  Eigen::VectorXd bc = interpolate_facet_dirichlet(exact, mesh, spaces.facet_velocity);
  balance_boundary_flux(mesh, spaces.facet_velocity, bc);
  return bc;
}

ConvergenceReport run_convergence(const CaseDefinition& def, MethodConfig cfg, int levels, std::optional<int> base_n,
                                  const LevelObserver& observer) {
  if (levels < 1) throw std::invalid_argument("levels must be at least 1");
  const ExactSolution& exact = *def.exact;
  cfg.nu = exact.viscosity();
  cfg.validate();

  ConvergenceReport report;
  report.case_name = std::string(to_string(def.id));
  report.cfg = cfg;
  const BodyForce f = [&exact](const Point& x) { return exact.body_force(x); };

  Mesh mesh = def.mesh(base_n.value_or(def.base_n_for(cfg.degree)));
  for (int level = 0; level < levels; ++level) {
    if (level > 0) mesh = refine_uniform(mesh);
    const SpaceSet spaces = build_spaces(mesh, cfg);
    DiscreteStokesSolution sol;
    try {
      sol = solve_condensed(mesh, spaces, f, case_boundary_data(exact, mesh, spaces));
    } catch (const SolverError& e) {
      throw SolverError("level " + std::to_string(level) + " (" + std::to_string(mesh.num_cells()) +
                        " cells): " + e.what());
    }
    LevelResult lr;
    lr.level = level;
    lr.cells = mesh.num_cells();
    lr.h = mesh.max_cell_diameter();
    lr.dofs_condensed = sol.global_unknowns;
    lr.errors = compute_error_report(exact, mesh, spaces, sol);
    report.levels.push_back(lr);
    if (observer) observer(level, mesh, spaces, sol);
  }

  std::vector<double> eu, ee, ep;
  for (const auto& l : report.levels) {
    eu.push_back(l.errors.u_l2);
    ee.push_back(l.errors.u_energy);
    ep.push_back(l.errors.p_l2);
  }
  report.rate_u_l2 = eoc(eu);
  report.rate_u_energy = eoc(ee);
  report.rate_p_l2 = eoc(ep);
  return report;
}

RobustnessReport run_pressure_robustness(int levels, int degree, std::optional<int> base_n,
                                         std::optional<double> alpha) {
  RobustnessReport out;
  std::vector<Eigen::VectorXd> reference;  // EDG-HDG, nu = 1, per level
  for (Method m : {Method::EDG, Method::EDG_HDG}) {
    for (double nu : {1.0, 1e-5}) {
      const CaseDefinition def = case_lshape(nu);
      const MethodConfig cfg = MethodConfig::make(m, degree, alpha, nu);
      LevelObserver obs;
      if (m == Method::EDG_HDG) {
        obs = [&, nu](int level, const Mesh&, const SpaceSet&, const DiscreteStokesSolution& sol) {
          Eigen::VectorXd v(sol.u.size() + sol.ubar.size());
          v << sol.u, sol.ubar;
          if (nu == 1.0) {
            reference.push_back(v);
            return;
          }
          const Eigen::VectorXd& r = reference.at(level);
          const double scale = r.cwiseAbs().maxCoeff();
          const double diff = (v - r).cwiseAbs().maxCoeff() / (scale > 0.0 ? scale : 1.0);
          out.max_velocity_difference = std::max(out.max_velocity_difference, diff);
        };
      }
      out.runs.push_back({m, nu, run_convergence(def, cfg, levels, base_n, obs)});
    }
  }
  return out;
}

}  // namespace hdg
