#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "karcher/cli.hpp"
#include "karcher/literal.hpp"
#include "karcher/manifold.hpp"

namespace karcher {
namespace {

constexpr double kPi = std::numbers::pi;

struct Invocation {
  int code = 0;
  std::string out;
  std::string err;
  std::map<std::string, std::string> kv;

  double num(const std::string& key) const { return std::stod(kv.at(key)); }
};

Invocation run(std::vector<std::string> args) {
  args.insert(args.begin(), "karcher");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Invocation r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  std::istringstream lines(r.out);
  std::string line;
  while (std::getline(lines, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) r.kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return r;
}

std::string temp_file(const std::string& name, const std::string& content) {
  const std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << content;
  return path;
}

TEST(Cli, ConstantsForPlaneGroup) {
  const Invocation r = run({"constants", "--m", "2", "--k", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(r.num("beta_gp"), kPi / 2.0, 1e-15);
  EXPECT_NEAR(r.num("r_cx_cover"), kPi / 2.0, 1e-15);
  EXPECT_NEAR(r.num("r_inj_quotient"), kPi / 4.0, 1e-15);
  EXPECT_NEAR(r.num("r_cx_quotient"), kPi / 8.0, 1e-15);
  EXPECT_EQ(r.kv.at("beta_gp").substr(0, 9), "1.5707963");
}

TEST(Cli, ConstantsForManifold) {
  const Invocation r = run({"constants", "--manifold", "sphere:2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(r.num("r_inj"), kPi, 1e-15);
  EXPECT_NEAR(r.num("r_cx"), kPi / 2.0, 1e-15);
}

TEST(Cli, EuclideanMean) {
  const Invocation r = run({"mean", "--manifold", "euclidean:1", "--point", "0", "--point", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.num("minimizer"), 1.0);
  EXPECT_LT(r.num("residual"), 1e-14);
  EXPECT_EQ(r.kv.at("n"), "2");
}

TEST(Cli, SphereMeanFromFileRoundTrips) {
  const std::string path = temp_file("cli_points.txt", "# three points\n0,0,1\n0.6,0,0.8\n0,0.6,0.8\n");
  const Invocation r = run({"mean", "--manifold", "sphere:2", "--points", path, "--tol", "1e-11"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Manifold s2 = literal::parse_manifold("sphere:2");
  const Point p = literal::parse_point(s2, r.kv.at("minimizer"));
  EXPECT_NEAR(p.coords(0), p.coords(1), 1e-10);
  EXPECT_EQ(r.kv.at("multistart_agreement"), "true");
  // The printed minimizer feeds straight into another command.
  const Invocation d = run({"dist", "--manifold", "sphere:2", "--a", r.kv.at("minimizer"), "--b", r.kv.at("minimizer")});
  ASSERT_EQ(d.code, 0) << d.err;
  EXPECT_LT(d.num("dist"), 1e-15);
}

TEST(Cli, Distance) {
  const Invocation r = run({"dist", "--manifold", "sphere:2", "--a", "0,0,1", "--b", "1,0,0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(r.num("dist"), kPi / 2.0, 1e-15);
}

TEST(Cli, PsrDistanceOracle) {
  const Invocation r = run({"psr-dist", "--a", "4,0,0,1", "--b", "1,0,0,4", "--k", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(r.num("d_sr"), kPi / 2.0, 1e-12);
}

TEST(Cli, PsrMean) {
  const Invocation r = run({"psr-mean", "--m", "2", "--sample", "3,0,0,1", "--sample", "3.5,0,0,1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Mat s = literal::parse_matrix(r.kv.at("S"));
  EXPECT_NEAR(s(0, 0), std::sqrt(3.0 * 3.5), 1e-8);
  EXPECT_NEAR(s(1, 1), 1.0, 1e-8);
  EXPECT_NEAR(s(0, 1), 0.0, 1e-8);
  EXPECT_EQ(r.kv.at("unique_up_to_G"), "true");
}

TEST(Cli, EquivariantMeanOnProjectivePlane) {
  const Invocation r = run({"efm", "--action", "antipodal:2", "--point", "0,0,1", "--point", "0,0,-1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.kv.at("orbit_size"), "2");
  EXPECT_LT(r.num("objective"), 1e-20);
}

TEST(Cli, Certify) {
  const Invocation r = run({"certify", "--manifold", "sphere:2", "--point", "0,0,1", "--point", "0,0.1,0.99498743710662"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LT(r.num("radius"), r.num("r_cx"));
}

TEST(Cli, DomainErrorsExitOne) {
  const Invocation r = run({"psr-dist", "--a", "1,0,0,1", "--b", "4,0,0,1"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.kv.at("error"), "DegenerateSpectrum");
  EXPECT_FALSE(r.kv.at("detail").empty());
  const Invocation cut = run({"dist", "--manifold", "sphere:2", "--a", "0,0,2", "--b", "0,0,1"});
  EXPECT_EQ(cut.code, 1);
  EXPECT_EQ(cut.kv.at("error"), "InvalidInput");
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  const Invocation missing = run({"mean", "--point", "0"});
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.err.find("sphere:<n>"), std::string::npos);
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(run({"--help"}).code, 0); }

TEST(Cli, ExperimentIsReproducible) {
  const std::string cfg = temp_file("cli_experiment.cfg", "experiment = sphere_genericity\ntrials = 10\nseed = 5\n");
  const std::string csv1 = ::testing::TempDir() + "cli_a.csv", csv2 = ::testing::TempDir() + "cli_b.csv";
  const Invocation a = run({"experiment", "--config", cfg, "--csv", csv1});
  const Invocation b = run({"experiment", "--config", cfg, "--csv", csv2, "--threads", "2"});
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.kv.at("atoms"), "0");
  std::ifstream f1(csv1), f2(csv2);
  const std::string s1((std::istreambuf_iterator<char>(f1)), {}), s2((std::istreambuf_iterator<char>(f2)), {});
  EXPECT_FALSE(s1.empty());
  EXPECT_EQ(s1, s2);
  const Invocation c = run({"experiment", "--config", cfg, "--seed", "6"});
  EXPECT_NE(c.kv.at("median_distance_to_A"), a.kv.at("median_distance_to_A"));
}

TEST(Cli, ExperimentRejectsBadConfig) {
  const std::string cfg = temp_file("cli_bad.cfg", "experiment = rp2_equivariance\nradius = 1.0\n");
  const Invocation r = run({"experiment", "--config", cfg});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.kv.at("error"), "InvalidInput");
}

TEST(Cli, SelftestPasses) {
  const Invocation r = run({"selftest"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.kv.at("failed"), "0");
}

}  // namespace
}  // namespace karcher
