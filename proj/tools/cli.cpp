#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace hdg::cli {

namespace {

std::string rate_cell(const std::optional<double>& r) { return r ? format_double(*r) : std::string(); }

void write_rows(std::ostream& os, const ConvergenceReport& r, const std::string& prefix) {
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    const LevelResult& l = r.levels[i];
    os << prefix << l.level << ',' << l.cells << ',' << format_double(l.h) << ',' << l.dofs_condensed << ','
       << format_double(l.errors.u_l2) << ',' << rate_cell(r.rate_u_l2[i]) << ','
       << format_double(l.errors.u_energy) << ',' << rate_cell(r.rate_u_energy[i]) << ','
       << format_double(l.errors.p_l2) << ',' << rate_cell(r.rate_p_l2[i]) << ','
       << format_double(l.errors.div_sup) << ',' << format_double(l.errors.normal_jump_sup) << '\n';
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  return f;
}

LevelObserver dump_observer(const RunSpec& spec) {
  if (spec.mesh_dump.empty() && spec.matrix_dump.empty()) return {};
  return [&spec](int level, const Mesh& mesh, const SpaceSet& spaces, const DiscreteStokesSolution& sol) {
    if (level != 0) return;
    if (!spec.mesh_dump.empty()) {
      auto f = open_output(spec.mesh_dump);
      write_mesh(f, mesh);
    }
    if (!spec.matrix_dump.empty()) {
      const CaseDefinition def = make_case(spec.case_id, spec.nu);
      const ExactSolution& exact = *def.exact;
      const SaddleSystem sys = assemble(
          mesh, spaces, [&exact](const Point& x) { return exact.body_force(x); }, sol.ubar);
      auto f = open_output(spec.matrix_dump);
      write_matrix_coordinates(f, sys.matrix);
    }
  };
}

}  // namespace

void validate(const RunSpec& spec) {
  if (spec.degree != 1 && spec.degree != 2) throw SpecError("--degree must be 1 or 2");
  const int min_levels = spec.subcommand == Subcommand::Robustness ? 3 : 2;
  if (spec.subcommand != Subcommand::Verify && (spec.levels < min_levels || spec.levels > 9))
    throw SpecError("--levels must be in [" + std::to_string(min_levels) + ", 9]");
  if (!(spec.nu > 0.0) || !std::isfinite(spec.nu)) throw SpecError("--nu must be positive");
  if (spec.alpha && (!(*spec.alpha > 0.0) || !std::isfinite(*spec.alpha))) throw SpecError("--alpha must be positive");
  if (spec.base_n) {
    if (*spec.base_n < 1) throw SpecError("--base-n must be positive");
    const bool crack = spec.subcommand == Subcommand::Convergence && spec.case_id == CaseId::CrackedSquare;
    if (crack && *spec.base_n % 2 != 0) throw SpecError("--base-n must be even for the cracked square");
  }
}

MethodConfig method_config(const RunSpec& spec) {
  return MethodConfig::make(spec.method, spec.degree, spec.alpha, spec.nu);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_convergence_csv(std::ostream& os, const ConvergenceReport& report) {
  os << kCsvHeader << '\n';
  write_rows(os, report, "");
}

void write_robustness_csv(std::ostream& os, const RobustnessReport& report) {
  os << "method,nu," << kCsvHeader << '\n';
  for (const RobustnessRun& run : report.runs)
    write_rows(os, run.report, std::string(to_string(run.method)) + ',' + format_double(run.nu) + ',');
}

void print_table(std::ostream& os, const ConvergenceReport& r) {
  os << r.case_name << "  " << to_string(r.cfg.method) << "  k=" << r.cfg.degree << "  alpha=" << r.cfg.alpha
     << "  nu=" << r.cfg.nu << '\n';
  auto rate = [](const std::optional<double>& x) {
    std::ostringstream s;
    if (x) s << std::fixed << std::setprecision(2) << *x;
    return s.str();
  };
  os << std::setw(3) << "lvl" << std::setw(8) << "cells" << std::setw(10) << "h" << std::setw(9) << "dofs"
     << std::setw(12) << "|u-uh|" << std::setw(6) << "eoc" << std::setw(12) << "|||u-uh|||" << std::setw(6) << "eoc"
     << std::setw(12) << "|p-ph|" << std::setw(6) << "eoc" << std::setw(11) << "div" << '\n';
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    const LevelResult& l = r.levels[i];
    os << std::setw(3) << l.level << std::setw(8) << l.cells << std::setw(10) << std::setprecision(3)
       << std::defaultfloat << l.h << std::setw(9) << l.dofs_condensed << std::scientific << std::setprecision(3)
       << std::setw(12) << l.errors.u_l2 << std::setw(6) << rate(r.rate_u_l2[i]) << std::setw(12)
       << l.errors.u_energy << std::setw(6) << rate(r.rate_u_energy[i]) << std::setw(12) << l.errors.p_l2
       << std::setw(6) << rate(r.rate_p_l2[i]) << std::setw(11) << std::setprecision(2) << l.errors.div_sup
       << std::defaultfloat << '\n';
  }
}

int cmd_convergence(const RunSpec& spec, std::ostream& out, std::ostream&) {
  const CaseDefinition def = make_case(spec.case_id, spec.nu);
  const ConvergenceReport report = run_convergence(def, method_config(spec), spec.levels, spec.base_n,
                                                   dump_observer(spec));
  print_table(out, report);
  if (!spec.out.empty()) {
    auto f = open_output(spec.out);
    write_convergence_csv(f, report);
  }
  return 0;
}

int cmd_robustness(const RunSpec& spec, std::ostream& out, std::ostream&) {
  const RobustnessReport report = run_pressure_robustness(spec.levels, spec.degree, spec.base_n, spec.alpha);
  for (const RobustnessRun& run : report.runs) print_table(out, run.report);
  out << "max relative EDG-HDG velocity difference (nu=1 vs nu=1e-05): "
      << format_double(report.max_velocity_difference) << '\n';
  if (!spec.out.empty()) {
    auto f = open_output(spec.out);
    write_robustness_csv(f, report);
  }
  return 0;
}

int cmd_verify(const RunSpec& spec, std::ostream& out, std::ostream&) {
  out << "seed " << spec.seed << '\n';
  const auto results = run_verify_suites(spec, out);
  bool ok = true;
  for (const SuiteResult& r : results) {
    out << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << '\n';
    ok = ok && r.passed;
  }
  return ok ? 0 : 1;
}

int run(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  try {
    validate(spec);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  try {
    switch (spec.subcommand) {
      case Subcommand::Convergence: return cmd_convergence(spec, out, err);
      case Subcommand::Robustness: return cmd_robustness(spec, out, err);
      case Subcommand::Verify: return cmd_verify(spec, out, err);
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace hdg::cli
