#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "oracles.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int status;
  std::string out;
};

Run cli(const std::string& args) {
  std::string cmd = std::string(SBK_CLI) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  int st = pclose(p);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

class Cli : public ::testing::Test {
 protected:
  fs::path dir;
  void SetUp() override {
    dir = fs::temp_directory_path() / ("sbk_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string d() const { return "--dir " + dir.string() + " "; }
  json manifest() const {
    std::ifstream f(dir / "manifest.json");
    return json::parse(f);
  }
};

}  // namespace

TEST_F(Cli, EllipticEvalMatchesLatticeSum) {
  auto r = cli(d() + "elliptic eval --fn wp --z 0.3,0.0 --z 0.2,0.35");
  ASSERT_EQ(r.status, 0);
  double a, b, c, e;
  ASSERT_EQ(std::sscanf(r.out.c_str(), "%lf %lf %lf %lf", &a, &b, &c, &e), 4);
  auto w1 = oracle::wp_lattice({0.3, 0.0}, 1, 1), w2 = oracle::wp_lattice({0.2, 0.35}, 1, 1);
  EXPECT_LT(std::abs(sbk::cplx(a, b) - w1) / std::abs(w1), 1e-9);
  EXPECT_LT(std::abs(sbk::cplx(c, e) - w2) / std::abs(w2), 1e-9);
  EXPECT_EQ(manifest()["status"], "ok");
}

TEST_F(Cli, LameBuildWritesCurveAndManifest) {
  ASSERT_EQ(cli(d() + "lame build --k 3 --n 1 --m 0").status, 0);
  auto m = manifest();
  EXPECT_LT(m["residuals"]["closure"]["value"].get<double>(), 1e-8);
  EXPECT_EQ(m["residuals"]["winding"], 1);
  EXPECT_TRUE(fs::exists(dir / "curve.json"));
  // the written curve round-trips through verify and dual
  EXPECT_EQ(cli(d() + "curve verify --in " + (dir / "curve.json").string() + " --alpha 1.5707963267948966").status, 0);
  EXPECT_EQ(cli(d() + "dual --in " + (dir / "curve.json").string()).status, 0);
  std::ifstream f(dir / "dual.csv");
  std::string head;
  std::getline(f, head);
  EXPECT_EQ(head, "t,a,b,c,kappa");
}

TEST_F(Cli, RigidityReportsNontrivial) {
  auto r = cli(d() + "poly rigidity --n 30 --k 4");
  ASSERT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("nontrivial=true"), std::string::npos);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(cli(d() + "no-such-command").status, 2);
  EXPECT_EQ(cli(d() + "elliptic eval --fn nope --z 0,1").status, 2);
  EXPECT_EQ(cli(d() + "curve verify --in " + (dir / "missing.json").string()).status, 3);
  fs::create_directories(dir);
  std::ofstream(dir / "bad.json") << "{\"closed\": true, \"samples\": [[1, 0]";
  EXPECT_EQ(cli(d() + "curve verify --in " + (dir / "bad.json").string()).status, 3);
  // an ellipse is self-Backlund at every angle, a Lame curve only at its certified ones
  ASSERT_EQ(cli(d() + "lame build --k 3 --n 1 --m 0").status, 0);
  EXPECT_EQ(cli(d() + "curve verify --in " + (dir / "curve.json").string() + " --alpha 1").status, 4);
  // library errors keep their own codes: bad Lame indices, omega' out of range
  EXPECT_EQ(cli(d() + "lame build --k 4 --n 2").status, 17);
  EXPECT_EQ(cli(d() + "lame build --omega-prime -1").status, 11);
  EXPECT_EQ(manifest()["status"], "error");
}

TEST_F(Cli, CarouselFlowCsv) {
  ASSERT_EQ(cli(d() + "carousel flow --T 1 --samples 10").status, 0);
  std::ifstream f(dir / "trajectory.csv");
  std::string head, line;
  std::getline(f, head);
  EXPECT_EQ(head, "t,x0,y0,x1,y1,x2,y2,x3,y3,x4,y4,I,J,K,H");
  int rows = 0;
  while (std::getline(f, line)) ++rows;
  EXPECT_EQ(rows, 11);
  EXPECT_LT(manifest()["residuals"]["integral_drift"]["value"].get<double>(), 1e-8);
}
