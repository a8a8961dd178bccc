#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qcs/oscillation.hpp"
#include "qcs_cli/config.hpp"

namespace qcs::cli {

struct CommandResult {
  int exit_code = kOk;
  nlohmann::ordered_json report;
};

// One named check inside a verify suite.
struct Check {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double limit = 0.0;
  std::string detail;
};

struct SuiteResult {
  std::string suite;
  std::vector<Check> checks;
  bool pass() const;
  nlohmann::ordered_json to_json() const;
};

// exp, tan, z + z^3 and g_1 with analytic derivatives.
std::vector<std::pair<std::string, HoloFun>> schwarzian_test_set();

SuiteResult verify_asymptotics(const RunConfig& cfg);
SuiteResult verify_seams(const RunConfig& cfg);
SuiteResult verify_operators(const RunConfig& cfg);
SuiteResult verify_nevanlinna(const RunConfig& cfg);
SuiteResult verify_beltrami(const RunConfig& cfg);

CommandResult cmd_constants(const RunConfig& cfg, std::ostream& out);
CommandResult cmd_verify(const RunConfig& cfg, std::ostream& out);
CommandResult cmd_order(const RunConfig& cfg, std::ostream& out);
CommandResult cmd_pipeline(const RunConfig& cfg, std::ostream& out);

// Full command-line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qcs::cli
