#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <hdg/geometry.hpp>
#include <hdg/quadrature.hpp>

#include "cli.hpp"

namespace hdg::cli {

namespace {

std::string sci(double v) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

/// Local a_h (alpha = 1 split into parts) and b_h recomputed with order-10
/// rules and physical-point evaluation.
struct ReferenceLocal {
  Eigen::MatrixXd volume, penalty, consistency, b;
};

ReferenceLocal reference_local(const Mesh& mesh, int cell, int k) {
  const LocalSizes sz(k);
  const int nk = triangle_dim(k), nf = segment_dim(k), np = sz.cell_pressure;
  const CellGeometry g = cell_geometry(mesh, cell);
  ReferenceLocal r;
  r.volume = Eigen::MatrixXd::Zero(sz.velocity(), sz.velocity());
  r.penalty = r.volume;
  r.consistency = r.volume;
  r.b = Eigen::MatrixXd::Zero(sz.pressure(), sz.velocity());

  const TriangleRule& tri = triangle_rule(10);
  for (int q = 0; q < tri.size(); ++q) {
    const Point x = g.map(tri.points[q]);
    const Bary l = physical_to_bary(g, x);
    const double w = 2.0 * g.area * tri.weights[q];
    const auto G = triangle_shape_grad(k, l, g.grad_bary);
    const Eigen::VectorXd psi = triangle_shape(k - 1, l);
    for (int c = 0; c < 2; ++c) {
      r.volume.block(c * nk, c * nk, nk, nk) += w * G * G.transpose();
      r.b.block(0, c * nk, np, nk) -= w * psi * G.col(c).transpose();
    }
  }
  const LineRule& line = gauss_line(8);
  for (int lf = 0; lf < 3; ++lf) {
    const int face = mesh.cell_faces(cell)[lf].face;
    const auto [a, b] = mesh.face_points(face);
    const double len = (b - a).norm();
    const Point n = mesh.outward_normal(cell, lf);
    const int voff = sz.cell_velocity + lf * 2 * nf, poff = np + lf * nf;
    for (int q = 0; q < line.size(); ++q) {
      const double t = line.points[q];
      const Bary l = physical_to_bary(g, (1.0 - t) * a + t * b);
      const Eigen::VectorXd phi = triangle_shape(k, l);
      const Eigen::VectorXd dn = triangle_shape_grad(k, l, g.grad_bary) * n;
      const Eigen::VectorXd mu = segment_shape(k, t);
      const double w = len * line.weights[q];
      for (int c = 0; c < 2; ++c) {
        Eigen::VectorXd jump = Eigen::VectorXd::Zero(sz.velocity());
        Eigen::VectorXd dnv = Eigen::VectorXd::Zero(sz.velocity());
        jump.segment(c * nk, nk) = phi;
        jump.segment(voff + c * nf, nf) = -mu;
        dnv.segment(c * nk, nk) = dn;
        r.penalty += (w / g.diameter) * jump * jump.transpose();
        r.consistency -= w * (jump * dnv.transpose() + dnv * jump.transpose());
        r.b.block(poff, 0, nf, sz.velocity()) += (w * n(c)) * mu * jump.transpose();
      }
    }
  }
  return r;
}

double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

double max_coefficient_difference(const DiscreteStokesSolution& x, const DiscreteStokesSolution& y) {
  double d = 0.0;
  d = std::max(d, (x.u - y.u).cwiseAbs().maxCoeff());
  d = std::max(d, (x.ubar - y.ubar).cwiseAbs().maxCoeff());
  d = std::max(d, (x.p - y.p).cwiseAbs().maxCoeff());
  if (x.pbar.size() > 0) d = std::max(d, (x.pbar - y.pbar).cwiseAbs().maxCoeff());
  return d;
}

SuiteResult patch_suite(const RunSpec& spec) {
  const LinearPatchSolution exact;
  const std::vector<std::pair<const char*, Mesh>> meshes = {
      {"square", unit_square_mesh(3)}, {"lshape", lshape_mesh(1)}, {"crack", cracked_square_mesh(2)}};
  double worst = 0.0;
  for (Method m : {Method::HDG, Method::EDG_HDG, Method::EDG}) {
    for (const auto& [name, mesh] : meshes) {
      const SpaceSet spaces = build_spaces(mesh, MethodConfig::make(m, spec.degree, spec.alpha));
      const auto sol = solve_condensed(mesh, spaces, {}, case_boundary_data(exact, mesh, spaces));
      const ErrorReport e = compute_error_report(exact, mesh, spaces, sol, {10, 0});
      worst = std::max({worst, e.u_l2, e.u_energy, e.p_l2});
    }
  }
  return {"patch", worst <= 1e-10, "max error " + sci(worst) + " (tol 1e-10)"};
}

SuiteResult oracle_suite(const RunSpec& spec) {
  double worst = 0.0;
  for (const Mesh& mesh : {unit_square_mesh(2), lshape_mesh(1), cracked_square_mesh(2)}) {
    for (int c = 0; c < mesh.num_cells(); ++c) {
      const ReferenceLocal ref = reference_local(mesh, c, spec.degree);
      const LocalA parts = local_a_parts(mesh, c, spec.degree);
      const Eigen::MatrixXd b = local_b(mesh, c, spec.degree);
      worst = std::max({worst, max_abs_diff(parts.volume, ref.volume), max_abs_diff(parts.penalty, ref.penalty),
                        max_abs_diff(parts.consistency, ref.consistency), max_abs_diff(b, ref.b)});
    }
  }
  return {"assembly-oracle", worst <= 1e-12, "max entry difference " + sci(worst) + " (tol 1e-12)"};
}

SuiteResult equivalence_suite(const RunSpec& spec) {
  double worst = 0.0;
  for (CaseId id : {CaseId::SquareMinReg, CaseId::LShape, CaseId::CrackedSquare}) {
    const CaseDefinition def = make_case(id, spec.nu);
    const ExactSolution& exact = *def.exact;
    const Mesh mesh = def.mesh(def.base_n_for(spec.degree));
    const BodyForce f = [&exact](const Point& x) { return exact.body_force(x); };
    for (Method m : {Method::HDG, Method::EDG_HDG, Method::EDG}) {
      const SpaceSet spaces = build_spaces(mesh, MethodConfig::make(m, spec.degree, spec.alpha, exact.viscosity()));
      const Eigen::VectorXd bc = case_boundary_data(exact, mesh, spaces);
      const auto full = solve_full(assemble(mesh, spaces, f, bc));
      const auto cond = solve_condensed(mesh, spaces, f, bc);
      worst = std::max(worst, max_coefficient_difference(full, cond));
    }
  }
  return {"condensed-vs-full", worst <= 1e-10, "max coefficient difference " + sci(worst) + " (tol 1e-10)"};
}

SuiteResult coercivity_suite(const RunSpec& spec, std::ostream& log) {
  const Mesh mesh = unit_square_mesh(4);
  const SpaceSet spaces = build_spaces(mesh, MethodConfig::make(spec.method, spec.degree, spec.alpha));
  const CoercivitySample s = sample_coercivity(mesh, spaces, 100, spec.seed);
  log << "coercivity: seed " << s.seed << ", 100 samples, min quotient " << s.min_quotient << '\n';
  if (s.min_quotient <= 0.0) log << "warning: penalty alpha=" << spaces.cfg.alpha << " is too small for coercivity\n";
  return {"coercivity", s.min_quotient > 0.0,
          "min Rayleigh quotient " + sci(s.min_quotient) + " at alpha=" + format_double(spaces.cfg.alpha)};
}

SuiteResult structure_suite(const RunSpec& spec) {
  double worst = 0.0;
  for (CaseId id : {CaseId::SquareMinReg, CaseId::LShape, CaseId::CrackedSquare}) {
    for (Method m : {Method::HDG, Method::EDG_HDG}) {
      const CaseDefinition def = make_case(id, spec.nu);
      const int n = id == CaseId::CrackedSquare ? 4 : 2;
      const auto report = run_convergence(def, MethodConfig::make(m, spec.degree, spec.alpha), 2, n);
      for (const LevelResult& l : report.levels) {
        const double scale = std::max(1.0, l.errors.u_max);
        worst = std::max({worst, l.errors.div_sup / scale, l.errors.normal_jump_sup / scale});
      }
    }
  }
  return {"structure", worst <= 1e-9, "max scaled div / normal jump " + sci(worst) + " (tol 1e-9)"};
}

SuiteResult inf_sup_suite(const RunSpec& spec) {
  std::vector<double> beta;
  for (int n : {2, 4, 6}) {
    const Mesh mesh = unit_square_mesh(n);
    beta.push_back(inf_sup_probe(mesh, build_spaces(mesh, MethodConfig::make(spec.method, spec.degree, spec.alpha))));
  }
  const double lo = *std::min_element(beta.begin(), beta.end());
  return {"inf-sup", lo >= 0.5 * beta.front() && lo > 0.0,
          "beta = " + sci(beta[0]) + ", " + sci(beta[1]) + ", " + sci(beta[2])};
}

}  // namespace

std::vector<SuiteResult> run_verify_suites(const RunSpec& spec, std::ostream& log) {
  std::vector<SuiteResult> out;
  auto guarded = [&](const char* name, auto&& fn) {
    try {
      out.push_back(fn());
    } catch (const std::exception& e) {
      out.push_back({name, false, std::string("exception: ") + e.what()});
    }
  };
  guarded("patch", [&] { return patch_suite(spec); });
  guarded("assembly-oracle", [&] { return oracle_suite(spec); });
  guarded("condensed-vs-full", [&] { return equivalence_suite(spec); });
  guarded("coercivity", [&] { return coercivity_suite(spec, log); });
  guarded("structure", [&] { return structure_suite(spec); });
  guarded("inf-sup", [&] { return inf_sup_suite(spec); });
  return out;
}

}  // namespace hdg::cli
