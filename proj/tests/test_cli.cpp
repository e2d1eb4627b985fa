#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "delaymid/cli.hpp"
#include "delaymid/mid_design.hpp"
#include "delaymid/serialize.hpp"
#include "doctest.h"

using namespace delaymid;
namespace fs = std::filesystem;

namespace {

struct Invocation {
  int status;
  std::string out, err;
};

Invocation invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "delaymid");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("delaymid_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("design writes coefficients and the multiplicity report") {
  const auto dir = scratch("design");
  const auto path = (dir / "d.json").string();
  const auto r = invoke({"design", "--sigma0", "0", "--theta0", "2", "--tau", "1", "-o", path});
  REQUIRE(r.status == 0);
  const auto j = Json::parse(slurp(path));
  CHECK(design_from_json(j) == assign_complex_pair(AssignmentTarget(0, 2, 1)));
  CHECK(j.at("multiplicity").at("certified_multiplicity") == 2);
  CHECK(j.at("degree") == 4);

  const auto real = invoke({"design", "--sigma0", "0", "--theta0", "0", "--tau", "1", "-o", "-"});
  REQUIRE(real.status == 0);
  const auto jr = Json::parse(real.out);
  CHECK(design_from_json(jr) == DelayDesign(-4, 6, -2, -6, 1));
  CHECK(jr.at("multiplicity").at("certified_multiplicity") == 4);
}

TEST_CASE("design output round-trips through verify and simulate") {
  const auto dir = scratch("roundtrip");
  const auto design = (dir / "design.json").string();
  REQUIRE(invoke({"design", "--sigma0", "0", "--theta0", "2", "--tau", "1", "-o", design}).status == 0);

  const auto v = invoke({"verify", "--design", design, "--root", "0+2i", "-o", (dir / "v.json").string()});
  CHECK(v.status == 0);
  CHECK(v.out.find("certified_strict") != std::string::npos);
  CHECK(Json::parse(slurp(dir / "v.json")).at("certificate").at("verdict") == "certified_strict");

  // The target inside the design document is used when --root is omitted.
  CHECK(invoke({"verify", "--design", design, "-o", (dir / "v2.json").string()}).status == 0);

  const auto s = invoke({"simulate", "--design", design, "--t-end", "40", "-o", (dir / "traj.csv").string()});
  REQUIRE(s.status == 0);
  const auto traj = slurp(dir / "traj.csv");
  CHECK(traj.rfind("t,y,y_prime\n0,1,0\n", 0) == 0);
  const auto modal = Json::parse(slurp(dir / "traj_modal.json"));
  CHECK(modal.at("method") == "extrema");
  CHECK(modal.at("multiplicity") == 2);
  CHECK(std::abs(modal.at("sigma_est").get<double>()) < 0.02);
  CHECK(std::abs(modal.at("theta_est").get<double>() - 2.0) < 0.02);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("exit");
  const auto design = (dir / "design.json").string();
  REQUIRE(invoke({"design", "--sigma0", "0", "--theta0", "2", "--tau", "1", "-o", design}).status == 0);

  // Refuted dominance is a domain error.
  const auto refuted = invoke({"verify", "--design", design, "--root", "0.3+2i", "-o", (dir / "v.json").string()});
  CHECK(refuted.status == 1);
  CHECK(Json::parse(slurp(dir / "v.json")).at("certificate").at("verdict") == "refuted");

  // Library errors are reported verbatim.
  const auto bad_tau = invoke({"design", "--sigma0", "0", "--theta0", "2", "--tau", "-1", "-o", "-"});
  CHECK(bad_tau.status == 1);
  const auto err = Json::parse(bad_tau.err);
  CHECK(err.at("error") == "InvalidArgument");
  CHECK(err.at("message") == "delay tau must be positive");

  const auto blow = invoke({"simulate", "--a1", "0", "--a0", "0", "--alpha1", "0", "--alpha0", "-1", "--tau", "1",
                            "--t-end", "100", "-o", (dir / "b.csv").string()});
  CHECK(blow.status == 1);
  CHECK(Json::parse(blow.err).at("error") == "BlowUp");

  // Usage errors name the flag.
  const auto nan = invoke({"design", "--sigma0", "0", "--theta0", "2", "--tau", "x"});
  CHECK(nan.status == 2);
  CHECK(nan.err.find("--tau") != std::string::npos);
  const auto missing = invoke({"design", "--sigma0", "0", "--tau", "1", "-o", "-"});
  CHECK(missing.status == 2);
  CHECK(missing.err.find("--theta0") != std::string::npos);
  const auto root = invoke({"verify", "--design", design, "--root", "zz", "-o", "-"});
  CHECK(root.status == 2);
  CHECK(root.err.find("--root") != std::string::npos);
  const auto nofile = invoke({"verify", "--design", (dir / "none.json").string(), "--root", "0+2i"});
  CHECK(nofile.status == 2);
  CHECK(nofile.err.find("--design") != std::string::npos);
  const auto fmt = invoke({"design", "--sigma0", "0", "--theta0", "2", "--tau", "1", "--format", "svg"});
  CHECK(fmt.status == 2);
  CHECK(fmt.err.find("--format") != std::string::npos);
  CHECK(invoke({}).status == 2);
  CHECK(invoke({"design", "--nope", "1"}).status == 2);
  CHECK(invoke({"--help"}).status == 0);
}

TEST_CASE("default output directory from the environment") {
  const auto dir = scratch("env");
  ::setenv(cli::kOutputDirEnv, dir.string().c_str(), 1);
  const auto r = invoke({"resonator", "--omega", "1", "--k", "1", "--ma", "1", "--zeta", "0.1", "--Omega", "2", "--sweep"});
  ::unsetenv(cli::kOutputDirEnv);
  REQUIRE(r.status == 0);
  const auto j = Json::parse(slurp(dir / "resonator.json"));
  CHECK(j.at("matches_theorem") == true);
  CHECK(j.at("multiplicity").at("certified_multiplicity") == 2);
  CHECK(j.at("absorber").at("closed_loop_multiplicity").at("certified_multiplicity") == 2);
  const auto sweep = slurp(dir / "resonator_sweep.csv");
  CHECK(sweep.rfind("omega_prime,magnitude_db,phase_deg\n0,0,0\n", 0) == 0);
}

TEST_CASE("locus reports the first real-part maximum and is deterministic") {
  const auto dir = scratch("locus");
  const auto a = invoke({"locus", "--from", "0", "--to", "8", "--step", "0.01", "-o", (dir / "a.csv").string()});
  REQUIRE(a.status == 0);
  CHECK(a.out.find("real_part_local_max,2.51,-1.58639,10.4553") != std::string::npos);
  const auto b = invoke({"locus", "--from", "0", "--to", "8", "--step", "0.01", "-o", (dir / "b.csv").string()});
  REQUIRE(b.status == 0);
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  CHECK(slurp(dir / "a_events.csv") == slurp(dir / "b_events.csv"));
  CHECK(slurp(dir / "a_paths.csv") == slurp(dir / "b_paths.csv"));

  const auto s1 = invoke({"locus", "--from", "0", "--to", "2", "--format", "svg", "--detail", "-o", (dir / "s1.svg").string()});
  const auto s2 = invoke({"locus", "--from", "0", "--to", "2", "--format", "svg", "--detail", "-o", (dir / "s2.svg").string()});
  REQUIRE(s1.status == 0);
  REQUIRE(s2.status == 0);
  CHECK(slurp(dir / "s1.svg") == slurp(dir / "s2.svg"));
  CHECK(slurp(dir / "s1.svg").find("<svg") != std::string::npos);
}

TEST_CASE("roots and design output are deterministic") {
  const auto dir = scratch("det");
  for (const char* n : {"1", "2"})
    REQUIRE(invoke({"design", "--sigma0", "-0.5", "--theta0", "2", "--tau", "1", "-o", (dir / (std::string("d") + n + ".json")).string()})
                .status == 0);
  CHECK(slurp(dir / "d1.json") == slurp(dir / "d2.json"));
  for (const char* n : {"1", "2"})
    REQUIRE(invoke({"roots", "--design", (dir / "d1.json").string(), "--re-min", "-4", "--re-max", "1", "--im-min", "-20",
                    "--im-max", "20", "--format", "json", "-o", (dir / (std::string("r") + n + ".json")).string()})
                .status == 0);
  CHECK(slurp(dir / "r1.json") == slurp(dir / "r2.json"));
  const auto roots = Json::parse(slurp(dir / "r1.json"));
  CHECK(roots.at("roots").at(0).at("multiplicity") == 2);
}
