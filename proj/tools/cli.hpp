#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <hdg/cases.hpp>

namespace hdg::cli {

enum class Subcommand { Convergence, Robustness, Verify };

struct RunSpec {
  Subcommand subcommand = Subcommand::Convergence;
  CaseId case_id = CaseId::SquareMinReg;
  Method method = Method::EDG_HDG;
  int degree = 1;
  int levels = 5;
  double nu = 1.0;
  std::optional<double> alpha;  ///< empty = 6k^2
  std::string out;              ///< CSV path; empty = no file
  std::uint64_t seed = 20200601;
  std::optional<int> base_n;
  std::string mesh_dump;    ///< coarsest mesh, plain text
  std::string matrix_dump;  ///< coarsest full saddle matrix, coordinates
};

class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Throws SpecError.
void validate(const RunSpec& spec);
MethodConfig method_config(const RunSpec& spec);

/// Shortest round-trip decimal, locale independent.
std::string format_double(double v);

inline constexpr const char* kCsvHeader =
    "level,cells,h,dofs_condensed,err_u_l2,rate_u_l2,err_u_energy,rate_u_energy,err_p_l2,rate_p_l2,div_sup,"
    "normal_jump_sup";

void write_convergence_csv(std::ostream& os, const ConvergenceReport& report);
/// Same columns prefixed by `method,nu`, one block per run.
void write_robustness_csv(std::ostream& os, const RobustnessReport& report);
void print_table(std::ostream& os, const ConvergenceReport& report);

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<SuiteResult> run_verify_suites(const RunSpec& spec, std::ostream& log);

int cmd_convergence(const RunSpec& spec, std::ostream& out, std::ostream& err);
int cmd_robustness(const RunSpec& spec, std::ostream& out, std::ostream& err);
int cmd_verify(const RunSpec& spec, std::ostream& out, std::ostream& err);

/// Validates, dispatches and maps failures to exit codes (2 bad spec, 1
/// numerical failure).
int run(const RunSpec& spec, std::ostream& out, std::ostream& err);

}  // namespace hdg::cli
