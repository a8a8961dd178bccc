#pragma once

#include <vector>

#include "qcs/beltrami.hpp"
#include "qcs/oscillation.hpp"
#include "qcs_cli/config.hpp"

namespace qcs::cli {

struct PipelineZero {
  cplx z;              // refined zero of F-hat
  int winding = 0;     // cell winding number at detection
  cplx ep_x, ep_y;     // E-hat' by central differences along x and y
  double deviation = 0.0;  // max |E-hat' - 1| over both directions
  double exact_offset = 0.0;  // distance to psi(w0) for the nearest zero w0 of U
};

// Evaluates F-hat = U o psi^{-1} and E-hat = F-hat / F-hat' off the grid.
class FHat {
 public:
  FHat(const GlueParams& gp, const SpiralParams& sp, const BeltramiSolution& sol);

  struct Point {
    cplx w;              // psi^{-1}(z)
    cplx a, b;           // d psi, dbar psi at w
    LogComplex value;    // F-hat(z)
    bool zero = false;   // U vanishes at w
    bool has_derivs = false;
    cplx dlog;           // d/dz log F-hat
    cplx dbarlog;        // dbar/dz log F-hat
    double cr = 0.0;     // |dbar F-hat| / |d F-hat|
  };
  Point eval(cplx z) const;
  cplx E(cplx z) const;  // 0 at zeros of F-hat

 private:
  const GlueParams& gp_;
  const SpiralParams& sp_;
  const BeltramiSolution& sol_;
};

struct PipelineResult {
  TruncatedMu mu;
  BeltramiSolution sol;
  QCSolveReport qc;
  ComplexGridField log_F;  // log F-hat at the nodes (log modulus + i arg)
  ComplexGridField E;      // E-hat at the nodes
  ComplexGridField cr;     // chain-rule CR residual; NaN where excluded
  double cr_max = 0.0;
  cplx cr_argmax;
  int cr_nodes = 0, cr_excluded = 0;
  double fd_cr_max = 0.0;  // finite-difference residual of log F-hat where it is resolved
  int fd_cr_nodes = 0;
  std::vector<PipelineZero> zeros;
  int non_simple = 0;
  int unresolved_cells = 0;
  int expected_zeros = 0;  // zeros psi(w0) of the exact list inside the evaluation region
  BankLaineReport bank_laine;
  double max_deviation = 0.0;
  double seconds = 0.0;
  bool pass = false;
};

PipelineResult run_pipeline(const RunConfig& cfg);
nlohmann::ordered_json pipeline_report(const RunConfig& cfg, const PipelineResult& r);

}  // namespace qcs::cli
