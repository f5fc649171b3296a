#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cvw/config.hpp"
#include "cvw/io.hpp"

using namespace cvw;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run(const std::string& args) {
  const std::string cmd = std::string(CVWAVE_BINARY) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cvwave_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::vector<std::string> csv_rows(const std::string& text) {
  std::vector<std::string> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') rows.push_back(line);
  return rows;
}

}  // namespace

TEST(Config, DefaultsAndSections) {
  const RunConfig d = parse_config("");
  EXPECT_EQ(d.params.g, 9.81);
  EXPECT_EQ(d.continuation.modes, 128);
  EXPECT_EQ(d.continuation.policy, Policy::warn);

  const RunConfig c = parse_config("[physics]\nupsilon = 2.5\n[grid]\nmodes = 32\n"
                                   "[continuation]\npolicy = halt\n[sweep]\nupsilons = 0, 1,3\n");
  EXPECT_EQ(c.params.vorticity, 2.5);
  EXPECT_EQ(c.continuation.modes, 32);
  EXPECT_EQ(c.continuation.policy, Policy::halt);
  EXPECT_EQ(c.sweep_upsilons, (std::vector<double>{0, 1, 3}));
}

TEST(Config, OverridesWin) {
  const RunConfig c =
      parse_config("[physics]\nupsilon = 2\n", {"physics.upsilon=4", "grid.modes=16"});
  EXPECT_EQ(c.params.vorticity, 4.0);
  EXPECT_EQ(c.continuation.modes, 16);
  EXPECT_EQ(c.overrides.size(), 2u);
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_config("[physics]\nfoo = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[physics]\ng = abc\n"), ConfigError);
  EXPECT_THROW(parse_config("[physics\ng = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[physics]\ng = -1\n"), ConfigError);
  EXPECT_THROW(parse_config("", {"grid.modes"}), ConfigError);
  EXPECT_THROW(parse_config("", {"continuation.policy=maybe"}), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/cfg.ini"), ConfigError);
}

TEST(Config, SourceTextKeptVerbatim) {
  const std::string text = "; comment\n[physics]\n  upsilon=1   \n\n[grid]\nmodes = 64\n";
  const RunConfig c = parse_config(text);
  EXPECT_EQ(c.source_text, text);
  EXPECT_NE(c.effective().find("physics.upsilon = 1\n"), std::string::npos);
  EXPECT_EQ(parse_config(c.source_text).effective(), c.effective());
}

TEST(Io, BranchJsonRoundTrip) {
  PhysicalParams p;
  p.vorticity = 1.0;
  ContinuationConfig cfg;
  cfg.modes = 16;
  cfg.max_points = 4;
  const Branch b = trace_branch(p, cfg);
  Provenance prov;
  prov.command = "trace";
  const auto j = to_json(b, prov);
  EXPECT_EQ(j["provenance"]["version"], CVW_VERSION);
  const Branch r = branch_from_json(nlohmann::json::parse(j.dump()));
  ASSERT_EQ(r.points.size(), b.points.size());
  for (size_t i = 0; i < r.points.size(); ++i) {
    EXPECT_EQ(r.points[i].point.v.cos_coeffs(), b.points[i].point.v.cos_coeffs());
    EXPECT_EQ(r.points[i].point.Q, b.points[i].point.Q);
    EXPECT_EQ(r.points[i].s, b.points[i].s);
  }
  EXPECT_EQ(r.config.modes, 16);
  EXPECT_EQ(r.params.vorticity, 1.0);
  const auto& cond = j["points"][0]["diagnostics"]["conditions"][0];
  EXPECT_TRUE(cond.contains("name") && cond.contains("pass") && cond.contains("margin") &&
              cond.contains("location"));

  std::ostringstream csv;
  write_branch_csv(csv, b);
  EXPECT_EQ(csv_rows(csv.str()).front(),
            "s,m,Q,amplitude,bound,margin,minQ2gv,graph_min,residual,newton_iters");
  EXPECT_EQ(csv_rows(csv.str()).size(), 5u);
}

TEST(Io, MalformedInput) {
  EXPECT_THROW(branch_from_json(nlohmann::json::parse("{\"params\": {}}")), IoError);
  EXPECT_THROW(read_branch_file("/nonexistent/branch.json"), IoError);
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("codes");
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("frobnicate"), 1);
  EXPECT_EQ(run("trace --set physics.nope=1 -o " + dir.string()), 2);
  EXPECT_EQ(run("trace --set grid.modes=4 -o " + dir.string()), 2);
  EXPECT_EQ(run("verify -b " + (dir / "missing.json").string()), 5);
  {
    std::ofstream(dir / "garbage.json") << "{ not json";
  }
  EXPECT_EQ(run("verify -b " + (dir / "garbage.json").string()), 5);
}

TEST(Cli, KernelStudyMarginsPositive) {
  const fs::path dir = scratch("kernel");
  ASSERT_EQ(run("kernel-study -o " + dir.string()), 0);
  const auto rows = csv_rows(slurp(dir / "kernel.csv"));
  ASSERT_GT(rows.size(), 5u);
  for (size_t i = 1; i < rows.size(); ++i) {
    const double margin = std::stod(rows[i].substr(rows[i].rfind(',') + 1));
    EXPECT_GT(margin, 0.0) << rows[i];
  }
}

TEST(Cli, TraceDefaultsUpsilonOne) {
  const fs::path dir = scratch("trace");
  ASSERT_EQ(run("trace --upsilon 1 -o " + dir.string()), 0);
  EXPECT_GE(csv_rows(slurp(dir / "branch.csv")).size(), 51u);
  const std::string csv = slurp(dir / "branch.csv");
  EXPECT_NE(csv.find("# effective:"), std::string::npos);
  EXPECT_NE(csv.find("cvwave " CVW_VERSION), std::string::npos);
}

TEST(Cli, VerifyDetectsCorruptedHead) {
  const fs::path dir = scratch("verify");
  const std::string common = " --modes 32 --set continuation.max_points=12 -o " + dir.string();
  ASSERT_EQ(run("trace --upsilon 1" + common), 0);
  ASSERT_EQ(run("verify -b " + (dir / "branch.json").string()), 0);

  auto j = nlohmann::json::parse(slurp(dir / "branch.json"));
  j["points"][5]["Q"] = j["points"][5]["Q"].get<double>() * (1.0 + 1e-6);
  std::ofstream(dir / "corrupt.json") << j.dump();
  const std::string cmd = std::string(CVWAVE_BINARY) + " verify -b " +
                          (dir / "corrupt.json").string() + " > " +
                          (dir / "verify.txt").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  EXPECT_EQ(WEXITSTATUS(status), 4);
  const std::string out = slurp(dir / "verify.txt");
  EXPECT_NE(out.find("point 5: FAIL bernoulli_identity"), std::string::npos) << out;
}

TEST(Cli, ReconstructAndDeterminism) {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const std::string common = " --upsilon 1 --modes 32 --set continuation.max_points=10 -o ";
  ASSERT_EQ(run("trace" + common + a.string()), 0);
  ASSERT_EQ(run("trace" + common + b.string()), 0);
  // Only output.dir differs between the two runs.
  EXPECT_EQ(csv_rows(slurp(a / "branch.csv")), csv_rows(slurp(b / "branch.csv")));
  auto ja = nlohmann::json::parse(slurp(a / "branch.json"));
  auto jb = nlohmann::json::parse(slurp(b / "branch.json"));
  ja.erase("provenance");
  jb.erase("provenance");
  EXPECT_EQ(ja.dump(), jb.dump());
  ASSERT_EQ(run("reconstruct --svg -b " + (a / "branch.json").string() + " -o " + a.string()), 0);
  EXPECT_TRUE(fs::exists(a / "surface.csv"));
  EXPECT_TRUE(fs::exists(a / "velocity.csv"));
  EXPECT_TRUE(fs::exists(a / "current.csv"));
  EXPECT_TRUE(fs::exists(a / "surface.svg"));
  EXPECT_EQ(run("reconstruct --point 99 -b " + (a / "branch.json").string()), 2);
}

TEST(Cli, ConfigFileEchoedVerbatim) {
  const fs::path dir = scratch("echo");
  const std::string text = "[physics]\nupsilon = 0.5\n\n; bifurcation table only\n[grid]\nmodes = 16\n";
  {
    std::ofstream(dir / "run.ini", std::ios::binary) << text;
  }
  ASSERT_EQ(run("bifurcate -c " + (dir / "run.ini").string() + " -o " + dir.string()), 0);
  std::string echoed;
  std::istringstream in(slurp(dir / "bifurcate.csv"));
  std::string line;
  bool inside = false;
  while (std::getline(in, line)) {
    if (line == "# config file:") { inside = true; continue; }
    if (inside && line.rfind("#   ", 0) == 0) { echoed += line.substr(4) + "\n"; continue; }
    if (inside && line == "#") { echoed += "\n"; continue; }
    if (inside) break;
  }
  EXPECT_EQ(echoed, text);
}
