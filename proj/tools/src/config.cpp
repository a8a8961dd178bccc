#include "qcs_cli/config.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>

namespace qcs::cli {

void RunConfig::validate() const {
  auto need = [](bool ok, const std::string& msg) {
    if (!ok) throw UsageError(msg);
  };
  need(m >= 0 && n >= 0, "m and n must be non-negative");
  need(degenerate || m != n, "m = n is degenerate (k = 1); pass --degenerate to run it deliberately");
  need(window > 0.0, "window must be positive");
  need(grid >= 16 && grid <= 1024, "grid must be in [16, 1024]");
  need(subsamples >= 1 && subsamples <= 16, "subsamples must be in [1, 16]");
  need(solver_tol > 0.0 && max_iter > 0, "solver tolerance and iteration cap must be positive");
  need(boundary_margin >= 0.0 && boundary_margin < 0.5, "boundary margin must be in [0, 0.5)");
  need(seam_margin >= 0.0, "seam margin must be non-negative");
  need(bl_tol > 0.0 && cr_tol > 0.0, "tolerances must be positive");
  need(field_format == "bin" || field_format == "csv", "field format must be bin or csv");
  need(r_min > 0.0 && r_max > r_min, "radii must satisfy 0 < r_min < r_max");
  need(radii_per_decade >= 1, "radii per decade must be positive");
  need(profile_tol > 0.0 && order_tol > 0.0, "profile and order tolerances must be positive");
  static const std::set<std::string> suites{"asymptotics", "seams", "operators", "nevanlinna", "beltrami", "all"};
  need(suites.count(suite) == 1, "unknown suite '" + suite + "'");
  need(verify_grid >= 16 && verify_grid <= 1024, "verify grid must be in [16, 1024]");
  need(seam_samples >= 2, "seam samples must be at least 2");
  need(phi_tol > 0.0 && phi_tol < 1.0, "phi tolerance must be in (0, 1)");
  need(workers >= 1, "workers must be positive");
  need(!out_dir.empty(), "output directory must be non-empty");
}

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["m"] = m;
  j["n"] = n;
  j["degenerate"] = degenerate;
  j["window"] = window;
  j["grid"] = grid;
  j["subsamples"] = subsamples;
  j["solver_tol"] = solver_tol;
  j["max_iter"] = max_iter;
  j["boundary_margin"] = boundary_margin;
  j["seam_margin"] = seam_margin;
  j["bl_tol"] = bl_tol;
  j["cr_tol"] = cr_tol;
  j["field_format"] = field_format;
  j["r_min"] = r_min;
  j["r_max"] = r_max;
  j["radii_per_decade"] = radii_per_decade;
  j["profile_tol"] = profile_tol;
  j["order_tol"] = order_tol;
  j["suite"] = suite;
  j["verify_grid"] = verify_grid;
  j["seam_samples"] = seam_samples;
  j["phi_tol"] = phi_tol;
  j["workers"] = workers;
  j["out_dir"] = out_dir;
  return j;
}

GlueParams RunConfig::glue() const {
  GlueParams gp = degenerate ? glue_constants_degenerate(BlockIndex(m)) : glue_constants(BlockIndex(m), BlockIndex(n));
  gp.tol = phi_tol;
  return gp;
}

SpiralParams RunConfig::spiral() const { return make_spiral(glue().k); }

std::string timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string output_path(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

std::string write_json(const RunConfig& cfg, const std::string& name, const nlohmann::ordered_json& j) {
  const std::string path = output_path(cfg, name);
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << j.dump(2) << '\n';
  return path;
}

}  // namespace qcs::cli
