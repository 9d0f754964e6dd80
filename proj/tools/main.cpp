#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <hdg/parallel.hpp>

#include "cli.hpp"

using hdg::cli::RunSpec;

namespace {

struct Names {
  std::string method = "edg-hdg";
  std::string case_id = "square-mr";
  std::string alpha = "auto";
};

void add_common(CLI::App* app, RunSpec& spec, Names& names) {
  app->add_option("--method", names.method, "hdg, edg-hdg or edg")->check(CLI::IsMember({"hdg", "edg-hdg", "edg"}));
  app->add_option("--degree", spec.degree, "polynomial degree k (1 or 2)");
  app->add_option("--nu", spec.nu, "viscosity (L-shape case)");
  app->add_option("--alpha", names.alpha, "penalty, or auto for 6k^2");
  app->add_option("--seed", spec.seed, "seed for randomized suites");
  app->add_option("--base-n", spec.base_n, "resolution of the coarsest mesh");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybridized and embedded discontinuous Galerkin Stokes solver"};
  app.require_subcommand(1);
  RunSpec spec;
  Names names;

  auto* conv = app.add_subcommand("convergence", "uniform refinement study for one case");
  add_common(conv, spec, names);
  conv->add_option("--case", names.case_id, "square-mr, lshape or crack")
      ->check(CLI::IsMember({"square-mr", "lshape", "crack"}));
  conv->add_option("--levels", spec.levels, "number of meshes");
  conv->add_option("--out", spec.out, "CSV output path");
  conv->add_option("--dump-mesh", spec.mesh_dump, "write the coarsest mesh");
  conv->add_option("--dump-matrix", spec.matrix_dump, "write the coarsest full saddle-point matrix");

  auto* rob = app.add_subcommand("robustness", "EDG and EDG-HDG on the L-shape at nu = 1 and 1e-5");
  add_common(rob, spec, names);
  rob->add_option("--levels", spec.levels, "number of meshes");
  rob->add_option("--out", spec.out, "CSV output path");

  auto* ver = app.add_subcommand("verify", "patch, oracle, equivalence, coercivity and structure suites");
  add_common(ver, spec, names);

  app.add_option_function<int>(
         "--threads", [](int n) { hdg::set_worker_threads(n); }, "worker threads (default STOKES_HYBRID_THREADS or 1)")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*rob) spec.subcommand = hdg::cli::Subcommand::Robustness;
  else if (*ver) spec.subcommand = hdg::cli::Subcommand::Verify;
  else spec.subcommand = hdg::cli::Subcommand::Convergence;

  spec.method = *hdg::parse_method(names.method);
  spec.case_id = *hdg::parse_case(names.case_id);
  const std::string& alpha = names.alpha;
  if (alpha != "auto") {
    try {
      std::size_t used = 0;
      spec.alpha = std::stod(alpha, &used);
      if (used != alpha.size()) throw std::invalid_argument(alpha);
    } catch (const std::exception&) {
      std::cerr << "error: --alpha must be a number or auto\n";
      return 2;
    }
  }
  return hdg::cli::run(spec, std::cout, std::cerr);
}
