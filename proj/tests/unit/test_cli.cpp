#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "fracstab/cli.hpp"

using namespace fracstab;
using namespace fracstab::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = FRACSTAB_FIXTURE_DIR;

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("fracstab_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Outcome run_manifest(const RunManifest& m) {
  std::ostringstream out;
  std::ostringstream err;
  Outcome o;
  o.code = run(m, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

RunManifest manifest(Command c, const fs::path& input, const fs::path& dir) {
  RunManifest m;
  m.command = c;
  m.input_path = input;
  m.output_dir = dir;
  return m;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t line_count(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("analyze names the deciding criterion") {
  const fs::path dir = scratch("analyze");
  const Outcome o = run_manifest(manifest(Command::Analyze, kFixtures / "example3.toml", dir));
  CHECK(o.code == kExitOk);
  CHECK(o.out.find("Thm4: Stable") != std::string::npos);
  CHECK(o.out.find("oracle: Z = 0") != std::string::npos);
  CHECK(o.out.find("overall: Stable by") != std::string::npos);
  CHECK(fs::exists(dir / "analyze.json"));
}

TEST_CASE("singular matrix is not asymptotically stable") {
  const fs::path dir = scratch("singular");
  const Outcome o = run_manifest(manifest(Command::Analyze, kFixtures / "singular.toml", dir));
  CHECK(o.code == kExitOk);
  CHECK(o.out.find("overall: NotAsymptoticallyStable") != std::string::npos);
}

TEST_CASE("classify reports the structural cross-check") {
  const fs::path dir = scratch("classify");
  const Outcome o = run_manifest(manifest(Command::Classify, kFixtures / "example3.toml", dir));
  CHECK(o.code == kExitOk);
  CHECK(o.out.find("case #15") != std::string::npos);
  CHECK(o.out.find("cross-check:") != std::string::npos);
}

TEST_CASE("simulate writes one row per step") {
  const fs::path dir = scratch("simulate");
  RunManifest m = manifest(Command::Simulate, kFixtures / "example3.toml", dir);
  m.t_end = 10.0;
  m.svg = true;
  const Outcome o = run_manifest(m);
  REQUIRE(o.code == kExitOk);
  const std::string csv = slurp(dir / "trajectory.csv");
  CHECK(csv.rfind("t,x1,x2,x3\n", 0) == 0);
  CHECK(line_count(csv) == 2002);
  CHECK(fs::exists(dir / "trajectory.svg"));
}

TEST_CASE("oracle dumps the contour") {
  const fs::path dir = scratch("oracle");
  RunManifest m = manifest(Command::Oracle, kFixtures / "example13.toml", dir);
  m.dump_contour = true;
  const Outcome o = run_manifest(m);
  CHECK(o.code == kExitOk);
  CHECK(o.out.find("result: Z = 0") != std::string::npos);
  CHECK(slurp(dir / "contour.csv").rfind("segment,t,re,im\n", 0) == 0);
}

TEST_CASE("empty sweep grid writes only the header") {
  const fs::path dir = scratch("sweep_empty");
  RunManifest m = manifest(Command::Sweep, kFixtures / "example13.toml", dir);
  m.sweep_param = "a13";
  m.sweep_grid = "-2:0:0";
  CHECK(run_manifest(m).code == kExitOk);
  CHECK(slurp(dir / "sweep.csv") == "value,overall_verdict,fired_criterion,oracle_Z\n");
}

TEST_CASE("sweep output is deterministic and finds the boundary") {
  const fs::path d1 = scratch("sweep1");
  const fs::path d2 = scratch("sweep2");
  RunManifest m = manifest(Command::Sweep, kFixtures / "example13.toml", d1);
  m.sweep_param = "a13";
  m.sweep_grid = "-2:-0.1:20";
  const Outcome o = run_manifest(m);
  CHECK(o.code == kExitOk);
  CHECK(o.out.find("boundary: Stable") != std::string::npos);
  m.output_dir = d2;
  CHECK(run_manifest(m).code == kExitOk);
  CHECK(slurp(d1 / "sweep.csv") == slurp(d2 / "sweep.csv"));
  CHECK(line_count(slurp(d1 / "sweep.csv")) == 21);
}

TEST_CASE("sweeping an order of the zero matrix never gives Stable") {
  const fs::path dir = scratch("sweep_zero");
  {
    std::ofstream f(dir / "zero.toml");
    f << "alpha = [0.5, 0.5, 0.5]\nmatrix = [[0, 0, 0], [0, 0, 0], [0, 0, 0]]\n";
  }
  RunManifest m = manifest(Command::Sweep, dir / "zero.toml", dir);
  m.sweep_param = "alpha3";
  m.sweep_grid = "0.1:1:10";
  CHECK(run_manifest(m).code == kExitOk);
  const std::string csv = slurp(dir / "sweep.csv");
  CHECK(line_count(csv) == 11);
  CHECK(csv.find(",Stable,") == std::string::npos);
}

TEST_CASE("bad input exits with the usage code") {
  const fs::path dir = scratch("bad");
  {
    std::ofstream f(dir / "bad.toml");
    f << "alpha = [0.5, 1.5, 0.5]\nmatrix = [[0, 0, 0], [0, 0, 0], [0, 0, 0]]\n";
  }
  const Outcome o = run_manifest(manifest(Command::Analyze, dir / "bad.toml", dir));
  CHECK(o.code == kExitUsage);
  CHECK_FALSE(o.err.empty());
  CHECK(run_manifest(manifest(Command::Analyze, dir / "missing.toml", dir)).code == kExitUsage);
  RunManifest m = manifest(Command::Sweep, kFixtures / "example13.toml", dir);
  m.sweep_param = "b12";
  m.sweep_grid = "0:1:3";
  CHECK(run_manifest(m).code == kExitUsage);
}

TEST_CASE("argument parsers") {
  const auto [nu, window] = parse_diag("nu=0.3,window=100:1000");
  CHECK(nu == 0.3);
  CHECK(window == std::make_pair(100.0, 1000.0));
  CHECK(parse_window("1:2") == std::make_pair(1.0, 2.0));
  const SweepGrid g = parse_grid("-1:1:5");
  CHECK(g.values() == std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0});
  CHECK(parse_grid("0:1:1").values() == std::vector<double>{0.0});
  CHECK(parse_grid("0:1:0").values().empty());
  CHECK(parse_command("print-charfn") == Command::PrintCharFn);
  CHECK_FALSE(parse_command("nope").has_value());
  CHECK(fmt(0.1) == "0.1");
  CHECK(fmt(0.0) == "0");
}

TEST_CASE("atomic writes replace the file in one step") {
  const fs::path dir = scratch("atomic");
  write_atomic(dir / "f.txt", "first");
  write_atomic(dir / "f.txt", "second");
  CHECK(slurp(dir / "f.txt") == "second");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
  CHECK(entries == 1);
}
