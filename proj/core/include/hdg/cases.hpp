#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hdg/analysis.hpp"
#include "hdg/exact_solution.hpp"
#include "hdg/mesh.hpp"
#include "hdg/solver.hpp"
#include "hdg/spaces.hpp"

namespace hdg {

/// Polar angle in [0, 2pi). On the positive x-axis the side point decides
/// between 0 (side above) and 2pi (side below).
double polar_angle(const Point& x, const Point& side);

/// u = 3/2 sqrt(r) (cos(t/2) - cos(3t/2), 3 sin(t/2) - sin(3t/2)),
/// p = -6 r^{-1/2} cos(t/2), f = 0, nu = 1.
class CornerSingularSolution final : public ExactSolution {
 public:
  explicit CornerSingularSolution(std::string name) : name_(std::move(name)) {}
  Vec2 velocity(const Point& x, const Point& side) const override;
  Mat2 velocity_gradient(const Point& x, const Point& side) const override;
  double pressure(const Point& x, const Point& side) const override;
  Vec2 body_force(const Point&) const override { return Vec2::Zero(); }
  std::vector<Point> singular_points() const override { return {Point::Zero()}; }
  std::string name() const override { return name_; }
  using ExactSolution::pressure;
  using ExactSolution::velocity;
  using ExactSolution::velocity_gradient;

  /// Stream function 4 r^{3/2} sin^3(t/2); u = (d/dy, -d/dx).
  double stream_function(const Point& x, const Point& side) const;

 private:
  std::string name_;
};

/// Angular profile of the re-entrant corner solution with exponent
/// 856399/1572864 and opening angle 3pi/2.
class CornerProfile {
 public:
  CornerProfile();
  /// m-th derivative of the profile at angle t (m >= 0).
  [[nodiscard]] double derivative(int m, double t) const;
  [[nodiscard]] double exponent() const { return lambda_; }
  [[nodiscard]] double opening_angle() const { return omega_; }

 private:
  double lambda_;
  double omega_;
};

/// Re-entrant corner flow on the L-shape: u = r^l (...), p = nu p1 + x^3 + y^3,
/// f = (3x^2, 3y^2).
class LShapeSolution final : public ExactSolution {
 public:
  explicit LShapeSolution(double nu);
  Vec2 velocity(const Point& x, const Point& side) const override;
  Mat2 velocity_gradient(const Point& x, const Point& side) const override;
  double pressure(const Point& x, const Point& side) const override;
  Vec2 body_force(const Point& x) const override;
  double viscosity() const override { return nu_; }
  std::vector<Point> singular_points() const override { return {Point::Zero()}; }
  std::string name() const override { return "lshape"; }
  using ExactSolution::pressure;
  using ExactSolution::velocity;
  using ExactSolution::velocity_gradient;

  /// Viscosity-free part p1 of the pressure.
  double singular_pressure(const Point& x, const Point& side) const;
  [[nodiscard]] const CornerProfile& profile() const { return psi_; }

 private:
  double nu_;
  CornerProfile psi_;
};

/// u = (x + 2y, -x - y), p = 0, f = 0: contained in every discrete space.
class LinearPatchSolution final : public ExactSolution {
 public:
  Vec2 velocity(const Point& x, const Point&) const override { return {x.x() + 2.0 * x.y(), -x.x() - x.y()}; }
  Mat2 velocity_gradient(const Point&, const Point&) const override { return (Mat2() << 1, 2, -1, -1).finished(); }
  double pressure(const Point&, const Point&) const override { return 0.0; }
  Vec2 body_force(const Point&) const override { return Vec2::Zero(); }
  std::string name() const override { return "patch"; }
  using ExactSolution::pressure;
  using ExactSolution::velocity;
  using ExactSolution::velocity_gradient;
};

enum class CaseId { SquareMinReg, LShape, CrackedSquare };

std::string_view to_string(CaseId id);
std::optional<CaseId> parse_case(std::string_view s);

struct CaseDefinition {
  CaseId id;
  std::shared_ptr<const ExactSolution> exact;
  std::function<Mesh(int)> mesh;  ///< generator taking the base resolution
  std::array<int, 2> default_base_n;  ///< for degree 1 and 2
  double area;

  [[nodiscard]] int base_n_for(int degree) const { return default_base_n[degree >= 2 ? 1 : 0]; }
};

CaseDefinition case_square_min_reg();
CaseDefinition case_lshape(double nu);
CaseDefinition case_cracked_square();
CaseDefinition make_case(CaseId id, double nu = 1.0);

struct LevelResult {
  int level = 0;
  int cells = 0;
  double h = 0.0;
  int dofs_condensed = 0;
  ErrorReport errors;
};

struct ConvergenceReport {
  std::string case_name;
  MethodConfig cfg;
  std::vector<LevelResult> levels;
  std::vector<std::optional<double>> rate_u_l2;
  std::vector<std::optional<double>> rate_u_energy;
  std::vector<std::optional<double>> rate_p_l2;
};

/// Mean of the last two defined rates; nullopt if fewer than two.
std::optional<double> mean_last_two(const std::vector<std::optional<double>>& rates);

/// Called after each level with the data of that level.
using LevelObserver =
    std::function<void(int level, const Mesh&, const SpaceSet&, const DiscreteStokesSolution&)>;

/// Boundary data for a case: nodal interpolation followed by flux balancing.
Eigen::VectorXd case_boundary_data(const ExactSolution& exact, const Mesh& mesh, const SpaceSet& spaces);

/// Solves the case on `levels` uniformly refined meshes with static
/// condensation. The viscosity of cfg is replaced by the case viscosity.
ConvergenceReport run_convergence(const CaseDefinition& def, MethodConfig cfg, int levels,
                                  std::optional<int> base_n = std::nullopt, const LevelObserver& observer = {});

struct RobustnessRun {
  Method method;
  double nu;
  ConvergenceReport report;
};

struct RobustnessReport {
  std::vector<RobustnessRun> runs;  ///< {EDG, EDG-HDG} x {1, 1e-5}
  /// max over levels of |u(nu=1) - u(nu=1e-5)|_inf / |u(nu=1)|_inf for the
  /// EDG-HDG cell and facet velocity coefficients.
  double max_velocity_difference = 0.0;
};

RobustnessReport run_pressure_robustness(int levels, int degree = 1, std::optional<int> base_n = std::nullopt,
                                         std::optional<double> alpha = std::nullopt);

}  // namespace hdg
