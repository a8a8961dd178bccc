#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "qcs/special.hpp"
#include "qcs/spiral.hpp"
#include "qcs_cli/commands.hpp"
#include "qcs_cli/pipeline.hpp"

using namespace qcs;
using namespace qcs::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "qcs");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
  return {code, o.str(), e.str()};
}

std::string tmpdir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qcs_cli_test_" + name);
  fs::remove_all(p);
  return p.string();
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream is(path);
  REQUIRE(is.good());
  return nlohmann::json::parse(is);
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("constants") {
  const std::string d = tmpdir("constants");
  const Run r = run({"constants", "--m", "0", "--n", "2", "--out", d});
  CHECK(r.code == 0);
  const nlohmann::json j = read_json(d + "/constants_0_2.json");
  CHECK(j["k"].get<double>() == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(std::abs(j["mu"][0].get<double>() - 0.9384) < 1e-3);
  CHECK(std::abs(j["mu"][1].get<double>() - 0.2403) < 1e-3);
  CHECK(j["config"]["n"] == 2);
  const Run r1 = run({"constants", "--m", "0", "--n", "1", "--out", d});
  CHECK(r1.code == 0);
  const double rho = read_json(d + "/constants_0_1.json")["rho"];
  CHECK(rho == doctest::Approx(1 + std::pow(std::log(3.0), 2) / (4 * M_PI * M_PI)).epsilon(1e-14));
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run({"constants", "--m", "1", "--n", "1"}).code == 2);
  CHECK(run({"constants", "--m", "x"}).code == 2);
  CHECK(run({"nonsense"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"verify", "--suite", "bogus", "--out", tmpdir("bogus")}).code == 2);
  CHECK(run({"pipeline", "--grid", "4096", "--out", tmpdir("grid")}).code == 2);
  CHECK(run({"constants", "--help"}).code == 0);
}

TEST_CASE("verify operators passes and sabotaged seams fail") {
  const std::string d = tmpdir("verify");
  const Run ops = run({"verify", "--suite", "operators", "--out", d});
  CHECK(ops.code == 0);
  CHECK(read_json(d + "/verify_operators.json")["pass"] == true);
  const Run good = run({"verify", "--suite", "seams", "--out", d});
  CHECK(good.code == 0);
  const Run bad = run({"verify", "--suite", "seams", "--phi-tol", "1e-2", "--out", d});
  CHECK(bad.code == 1);
  const nlohmann::json j = read_json(d + "/verify_seams.json");
  CHECK(j["pass"] == false);
  CHECK(j["checks"][0]["measured"].get<double>() > 1e-11);
  CHECK(j["checks"][0]["detail"].get<std::string>().find("max at x") != std::string::npos);
}

TEST_CASE("verify all writes one report per suite") {
  const std::string d = tmpdir("all");
  const Run r = run({"verify", "--suite", "all", "--verify-grid", "64", "--seam-samples", "100", "--out", d});
  for (const char* s : {"asymptotics", "seams", "operators", "nevanlinna", "beltrami"})
    CHECK(fs::exists(d + "/verify_" + s + ".json"));
  CHECK(fs::exists(d + "/config.json"));
  MESSAGE(r.out);
}

TEST_CASE("reports are deterministic apart from the timestamp and independent of workers") {
  const std::string a = tmpdir("det_a"), b = tmpdir("det_b");
  REQUIRE(run({"verify", "--suite", "asymptotics", "--out", a}).code == 0);
  REQUIRE(run({"verify", "--suite", "asymptotics", "--out", b, "--workers", "2"}).code == 0);
  nlohmann::json ja = read_json(a + "/verify_asymptotics.json"), jb = read_json(b + "/verify_asymptotics.json");
  for (auto* j : {&ja, &jb}) {
    j->erase("timestamp");
    (*j)["config"].erase("workers");
    (*j)["config"].erase("out_dir");
  }
  CHECK(ja == jb);

  const std::vector<std::string> args = {"order", "--r-min", "100", "--r-max", "1000", "--radii-per-decade", "6"};
  auto with = [&](const std::string& d, const char* w) {
    std::vector<std::string> v = args;
    v.insert(v.end(), {"--out", d, "--workers", w});
    return v;
  };
  run(with(a, "1"));
  run(with(b, "3"));
  CHECK(slurp(a + "/order_0_1.csv") == slurp(b + "/order_0_1.csv"));
  CHECK(slurp(a + "/order_0_1.csv").rfind("r,value,excluded_measure\n", 0) == 0);
}

TEST_CASE("config file with flags winning") {
  const std::string d = tmpdir("config");
  fs::create_directories(d);
  {
    std::ofstream os(d + "/run.ini");
    os << "# pair and output\nm = 1\nn = 2\nout = \"" << d << "\"\n";
  }
  CHECK(run({"constants", "--config", d + "/run.ini"}).code == 0);
  CHECK(fs::exists(d + "/constants_1_2.json"));
  CHECK(run({"constants", "--config", d + "/run.ini", "--n", "0"}).code == 0);
  CHECK(fs::exists(d + "/constants_1_0.json"));
}

TEST_CASE("degenerate pipeline is g_m o h exactly") {
  RunConfig cfg;
  cfg.m = 1;
  cfg.n = 1;
  cfg.degenerate = true;
  cfg.window = 6.0;
  cfg.grid = 64;
  cfg.out_dir = tmpdir("deg");
  const PipelineResult r = run_pipeline(cfg);
  CHECK(r.cr_max == 0.0);
  CHECK(r.sol.report.iterations == 0);
  const SpiralParams sp = make_spiral(1.0);
  for (int iy = 0; iy < 64; iy += 7)
    for (int ix = 0; ix < 64; ix += 5) {
      const cplx z = r.log_F.node(ix, iy);
      const cplx v = r.log_F.at(ix, iy);
      if (!std::isfinite(v.real())) continue;
      const LogComplex g = log_g(BlockIndex(1), inverse_h(sp, z));
      CHECK(log_distance(g, LogComplex::from_log(v)) < 1e-12 * (1 + std::abs(v)));
    }
  CHECK(r.zeros.size() == static_cast<std::size_t>(r.expected_zeros));
  CHECK(r.non_simple == 0);
  CHECK(r.max_deviation < 1e-3);
  CHECK(r.pass);
}

TEST_CASE("coarse (0,1) pipeline") {
  RunConfig cfg;
  cfg.window = 10.0;
  cfg.grid = 128;
  cfg.out_dir = tmpdir("p01");
  const Run r = run({"pipeline", "--window", "10", "--grid", "128", "--out", cfg.out_dir});
  MESSAGE(r.out << r.err);
  CHECK(r.code <= 1);
  const nlohmann::json j = read_json(cfg.out_dir + "/pipeline.json");
  CHECK(j["zeros"]["detected"].get<int>() == j["zeros"]["expected"].get<int>());
  CHECK(j["zeros"]["non_simple"] == 0);
  for (const char* f : {"mu.bin", "psi.bin", "logF.bin", "E.bin", "cr_residual.bin", "zeros.csv"})
    CHECK(fs::exists(cfg.out_dir + "/" + f));
  const ComplexGridField mu = load_field(cfg.out_dir + "/mu.bin");
  CHECK(mu.nx == 128);
}
