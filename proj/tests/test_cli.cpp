// End-to-end runs of the carnot-gmt binary: exit codes, written reports and
// byte-identical reruns.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "carnot/report.hpp"
#include "carnot/tiling.hpp"

namespace fs = std::filesystem;
using carnot::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

fs::path scratch() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / ("carnot_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Run run(const std::string& args) {
  const std::string cmd = std::string(CARNOT_GMT_PATH) + " " + args + " 2>" + (scratch() / "stderr.txt").string();
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string last_stderr() { return slurp(scratch() / "stderr.txt"); }

std::string out_dir(const std::string& name) { return (scratch() / name).string(); }

}  // namespace

TEST(Cli, GroupCheckPassesAndWritesReport) {
  const auto r = run("group check --seed 1 --out " + out_dir("g"));
  ASSERT_EQ(r.code, 0) << last_stderr();
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["command"], "group check");
  EXPECT_EQ(j["seed"], 1);
  EXPECT_TRUE(j["result"]["pass"].get<bool>());
  EXPECT_EQ(slurp(fs::path(out_dir("g")) / "group_check.json"), r.out);
  EXPECT_EQ(j["config_hash"].get<std::string>().size(), 16u);
}

TEST(Cli, CubeRenderHasSixtyFourTiles) {
  const auto r = run("tile render --group euclidean:3 --level 2 --per-tile 3 --seed 2 --out " + out_dir("render"));
  ASSERT_EQ(r.code, 0) << last_stderr();
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["result"]["n_tiles"], 64);
  std::ifstream csv(fs::path(out_dir("render")) / "tiles_level2.csv");
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "level,word,x1,x2,x3");
  std::set<std::string> words;
  std::size_t rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    words.insert(line.substr(0, line.find(',', 2)));
  }
  EXPECT_EQ(words.size(), 64u);
  EXPECT_EQ(rows, 192u);
}

TEST(Cli, CertifyPassesAndCorruptedDigitsFail) {
  const auto ok = run("tile certify --samples 20000 --seed 3 --out " + out_dir("cert"));
  ASSERT_EQ(ok.code, 0) << last_stderr();
  EXPECT_TRUE(json::parse(ok.out)["result"]["pass"].get<bool>());

  auto digits = carnot::default_digits(carnot::GroupSpec::heisenberg(1));
  digits[5] = digits[3];
  json list = json::array();
  for (const auto& d : digits) list.push_back({d[0], d[1], d[2]});
  const fs::path path = scratch() / "bad_digits.json";
  std::ofstream(path) << list.dump();
  const auto bad = run("tile certify --samples 20000 --seed 3 --digits " + path.string() + " --out " + out_dir("bad"));
  EXPECT_EQ(bad.code, 1);
  const auto j = json::parse(bad.out);
  EXPECT_FALSE(j["result"]["pass"].get<bool>());
  EXPECT_NEAR(j["result"]["max_overlap"].get<double>(), 1.0 / 16.0, 0.02);
}

TEST(Cli, InputErrorsExitTwo) {
  EXPECT_EQ(run("group check --out " + out_dir("e")).code, 2);
  EXPECT_NE(last_stderr().find("seed"), std::string::npos);
  EXPECT_EQ(run("group check --seed 1 --no-such-flag").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("group check --seed 1 --group sl:2").code, 2);
  const fs::path spec = scratch() / "not_antisymmetric.json";
  std::ofstream(spec) << R"({"layer_dims": [2, 1], "structure_constants": [[[1, 2, 1, 1.0], [2, 1, 1, 1.0]]]})";
  EXPECT_EQ(run("group check --seed 1 --group " + spec.string()).code, 2);
  EXPECT_EQ(run("potential kernel-check --seed 1 --lambda 4").code, 2);
}

TEST(Cli, ReportsAreByteIdenticalAcrossRuns) {
  for (const std::string args : {"tile certify --samples 20000", "potential holder", "measure frostman --depth 8 --balls 500"}) {
    const auto a = run(args + " --seed 9 --out " + out_dir("det_a"));
    const auto b = run(args + " --seed 9 --out " + out_dir("det_b"));
    ASSERT_EQ(a.code, 0) << args << "\n" << last_stderr();
    EXPECT_EQ(a.out, b.out) << args;
    const auto c = run(args + " --seed 10 --out " + out_dir("det_c"));
    EXPECT_NE(a.out, c.out) << args;
  }
}

TEST(Cli, MeasureDimensionAndCantorExport) {
  const auto dim = run("measure dim --set vertical --levels 2..6 --out " + out_dir("dim"));
  ASSERT_EQ(dim.code, 0) << last_stderr();
  EXPECT_NEAR(json::parse(dim.out)["result"]["s_hat"].get<double>(), 2.0, 0.15);
  const auto cant = run("measure cantor --s 2.5 --depth 4 --out " + out_dir("cantor"));
  ASSERT_EQ(cant.code, 0) << last_stderr();
  const auto j = json::parse(cant.out);
  EXPECT_EQ(j["result"]["atoms"], 1024);
  const auto pts = carnot::read_points_csv(carnot::GroupSpec::heisenberg(1),
                                           (fs::path(out_dir("cantor")) / j["result"]["csv"].get<std::string>()).string());
  EXPECT_EQ(pts.size(), 1024u);
}

TEST(Cli, PartitionVerifyAndHigherOrderWarning) {
  const auto ok = run("hp verify --levels 2..3 --samples 2000 --derivative-samples 50 --seed 4 --out " + out_dir("hp"));
  ASSERT_EQ(ok.code, 0) << last_stderr();
  EXPECT_TRUE(json::parse(ok.out)["result"]["pass"].get<bool>());
  const auto hi = run("hp verify --levels 2..3 --samples 500 --derivative-samples 10 --max-order 3 --seed 4 --out " + out_dir("hp3"));
  EXPECT_EQ(hi.code, 0);
  EXPECT_NE(last_stderr().find("warning"), std::string::npos);
  EXPECT_FALSE(json::parse(hi.out)["result"]["warnings"].empty());
}

TEST(Cli, PotentialKernelCheckAndEval) {
  const auto k = run("potential kernel-check --seed 5 --out " + out_dir("kc"));
  ASSERT_EQ(k.code, 0) << last_stderr();
  EXPECT_NEAR(json::parse(k.out)["result"]["bound_constant"].get<double>(), 1.0, 1e-12);
  const fs::path pts = scratch() / "eval_points.csv";
  std::ofstream(pts) << "x1,x2,x3\n3,0,0\n0,4,1\n";
  const auto e = run("potential eval --measure atom --points " + pts.string() + " --out " + out_dir("ev"));
  ASSERT_EQ(e.code, 0) << last_stderr();
  EXPECT_TRUE(fs::exists(fs::path(out_dir("ev")) / "potential.csv"));
}
