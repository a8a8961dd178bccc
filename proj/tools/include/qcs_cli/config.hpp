#pragma once

#include <string>

#include "json.hpp"
#include "qcs/gluing.hpp"
#include "qcs/spiral.hpp"

namespace qcs::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2 };

// Raised for invalid user input; mapped to exit code 2.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Reference phi tolerance; seam checks compare against 10x this value so a
// loosened solver tolerance shows up as a failure.
inline constexpr double kReferencePhiTol = 1e-12;

struct RunConfig {
  int m = 0, n = 1;
  bool degenerate = false;  // k = 1: U = g_m o h, n ignored

  // pipeline
  double window = 40.0;  // half-width of the square window
  int grid = 512;
  int subsamples = 4;
  double solver_tol = 1e-6;
  int max_iter = 200;
  double boundary_margin = 0.1;  // excluded band, fraction of the window
  double seam_margin = 2.0;      // excluded distance to seams, in grid spacings
  double bl_tol = 0.05;
  double cr_tol = 1e-2;
  std::string field_format = "bin";

  // order
  double r_min = 1e2, r_max = 1e6;
  int radii_per_decade = 8;
  double profile_tol = 1e-6;
  double order_tol = 0.03;

  // verify
  std::string suite = "all";
  int verify_grid = 256;
  int seam_samples = 1000;

  double phi_tol = 1e-12;
  int workers = 1;
  std::string out_dir = "qcs_out";

  void validate() const;  // throws UsageError
  nlohmann::ordered_json to_json() const;
  GlueParams glue() const;
  SpiralParams spiral() const;
};

// Current UTC time, ISO 8601; the only non-deterministic report field.
std::string timestamp();

// Writes j (pretty, trailing newline) to out_dir/name, creating out_dir.
std::string write_json(const RunConfig& cfg, const std::string& name, const nlohmann::ordered_json& j);
std::string output_path(const RunConfig& cfg, const std::string& name);

}  // namespace qcs::cli
