#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "karcher/errors.hpp"
#include "karcher/lab.hpp"
#include "karcher/literal.hpp"

namespace karcher::lab {
namespace {

constexpr double kPi = std::numbers::pi;

// Reference SplitMix64 with an explicit running state.
std::uint64_t reference_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string csv_of(const ExperimentConfig& cfg, const ExperimentOutput& out) {
  std::ostringstream s;
  write_csv(s, cfg, out.records);
  return s.str();
}

std::string summary_of(const ExperimentOutput& out) {
  std::ostringstream s;
  write_summary(s, out.summary);
  return s.str();
}

ExperimentConfig small(Experiment e, int trials) {
  ExperimentConfig cfg;
  cfg.experiment = e;
  cfg.trials = trials;
  if (e == Experiment::Rp2Equivariance) cfg.radius = 0.5;
  if (e == Experiment::PsrUniqueness) cfg.radius = 0.9 * kPi / 8.0;
  return cfg;
}

void expect_partition(const SummaryReport& s) { EXPECT_EQ(s.atoms + s.non_atoms + s.failures, s.trials); }

TEST(SplitMix64, MatchesReferenceSequence) {
  SplitMix64 g(1234567);
  std::uint64_t state = 1234567;
  for (int i = 0; i < 100; ++i) ASSERT_EQ(g(), reference_next(state));
  SplitMix64 h(1234567);
  EXPECT_EQ(h(), 6457827717110365317ULL);
  EXPECT_EQ(h(), 3203168211198807973ULL);
}

TEST(SplitMix64, SubstreamsDifferAndRepeat) {
  SplitMix64 a = SplitMix64::substream(7, 0), b = SplitMix64::substream(7, 1), c = SplitMix64::substream(8, 0);
  SplitMix64 a2 = SplitMix64::substream(7, 0);
  const auto x = a(), y = b(), z = c();
  EXPECT_NE(x, y);
  EXPECT_NE(x, z);
  EXPECT_EQ(a2(), x);
}

TEST(Config, ParsesEveryKey) {
  std::istringstream in(R"(# experiment file
experiment = psr_uniqueness
trials = 12   # inline comment
sample_size = 7
sigma = 0.25
radius = 0.3
seed = 99
tol = 1e-9
atom_tol = 1e-5
m = 3
k = 2
sampler = vmf
threads = 2
timing = true
csv = out.csv
summary = out.txt
)");
  const ExperimentConfig c = parse_config(in);
  EXPECT_EQ(c.experiment, Experiment::PsrUniqueness);
  EXPECT_EQ(c.trials, 12);
  EXPECT_EQ(c.sample_size, 7);
  EXPECT_EQ(c.sigma, 0.25);
  EXPECT_EQ(c.radius, 0.3);
  EXPECT_EQ(c.seed, 99u);
  EXPECT_EQ(c.tol, 1e-9);
  EXPECT_EQ(c.atom_tol, 1e-5);
  EXPECT_EQ(c.m, 3);
  EXPECT_EQ(c.k, 2.0);
  EXPECT_EQ(c.sampler, Sampler::VonMisesFisher);
  EXPECT_EQ(c.threads, 2);
  EXPECT_TRUE(c.timing);
  EXPECT_EQ(c.csv_path, "out.csv");
  EXPECT_EQ(c.summary_path, "out.txt");
}

TEST(Config, RejectsMalformedLines) {
  for (const char* text : {"trials 5\n", "colour = red\n", "trials = five\n", "experiment = open_book\n",
                           "sampler = cauchy\n", "timing = maybe\n"}) {
    std::istringstream in(text);
    try {
      parse_config(in);
      FAIL() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidInput) << text;
    }
  }
  EXPECT_THROW(parse_config_file("/nonexistent/config.txt"), Error);
}

TEST(Config, ValidateBounds) {
  ExperimentConfig c;
  EXPECT_NO_THROW(validate(c));
  c.trials = 0;
  EXPECT_THROW(validate(c), Error);
  c = ExperimentConfig{};
  c.sample_size = 0;
  EXPECT_THROW(validate(c), Error);

  c = small(Experiment::Rp2Equivariance, 1);
  c.radius = kPi / 4.0;
  EXPECT_THROW(validate(c), Error);
  c.radius = kPi / 4.0 - 1e-3;
  EXPECT_NO_THROW(validate(c));

  c = small(Experiment::PsrUniqueness, 1);
  c.radius = kPi / 8.0;
  EXPECT_THROW(validate(c), Error);
  c.k = 4.0;
  EXPECT_NO_THROW(validate(c));
  c.m = 6;
  EXPECT_THROW(validate(c), Error);

  c = small(Experiment::PsrGenericity, 1);
  c.m = 4;
  EXPECT_THROW(validate(c), Error);
}

TEST(SphereGenericity, UniformHasNoAtomsAndDistanceMatchesMean) {
  const ExperimentConfig cfg = small(Experiment::SphereGenericity, 60);
  const ExperimentOutput out = run_experiment(cfg);
  expect_partition(out.summary);
  EXPECT_EQ(out.summary.atoms, 0);
  EXPECT_EQ(out.summary.failures, 0);
  EXPECT_TRUE(out.summary.absolutely_continuous);
  EXPECT_LT(out.summary.max_residual, 10.0 * cfg.tol);
  const Manifold s2 = Manifold::sphere(2);
  for (const TrialRecord& r : out.records) {
    const Vec x = literal::parse_point(s2, r.mean).coords;
    ASSERT_NEAR(r.distance_to_a, std::asin(std::abs(x(2))), 1e-15);
    ASSERT_GE(r.distance_to_a, 0.0);
  }
}

TEST(SphereGenericity, PointMassOnEquatorIsAllAtoms) {
  ExperimentConfig cfg = small(Experiment::SphereGenericity, 20);
  cfg.sampler = Sampler::PointMass;
  const ExperimentOutput out = run_experiment(cfg);
  EXPECT_EQ(out.summary.atoms, 20);
  EXPECT_FALSE(out.summary.absolutely_continuous);
  EXPECT_NE(summary_of(out).find("absolutely_continuous=false"), std::string::npos);
}

TEST(SphereGenericity, VonMisesFisherSampler) {
  ExperimentConfig cfg = small(Experiment::SphereGenericity, 30);
  cfg.sampler = Sampler::VonMisesFisher;
  cfg.sigma = 5.0;
  const ExperimentOutput out = run_experiment(cfg);
  expect_partition(out.summary);
  EXPECT_EQ(out.summary.atoms, 0);
  EXPECT_EQ(out.summary.unique_count, 30);
}

TEST(Determinism, SameSeedSameBytesDifferentSeedDifferent) {
  for (Experiment e : {Experiment::SphereGenericity, Experiment::Rp2Equivariance, Experiment::PsrGenericity,
                       Experiment::PsrUniqueness}) {
    ExperimentConfig cfg = small(e, 8);
    const std::string a = csv_of(cfg, run_experiment(cfg));
    const ExperimentOutput second = run_experiment(cfg);
    EXPECT_EQ(csv_of(cfg, second), a) << to_string(e);
    cfg.threads = 3;
    const ExperimentOutput threaded = run_experiment(cfg);
    EXPECT_EQ(csv_of(cfg, threaded), a) << to_string(e);
    EXPECT_EQ(summary_of(threaded), summary_of(second)) << to_string(e);
    cfg.seed = 2;
    EXPECT_NE(csv_of(cfg, run_experiment(cfg)), a) << to_string(e);
  }
}

TEST(Rp2Equivariance, DefectsVanishAndMeansStayInBall) {
  const ExperimentConfig cfg = small(Experiment::Rp2Equivariance, 40);
  const ExperimentOutput out = run_experiment(cfg);
  expect_partition(out.summary);
  EXPECT_EQ(out.summary.failures, 0);
  EXPECT_LT(out.summary.max_defect, 1e-8);
  EXPECT_EQ(out.summary.in_ball_count, 40);
}

TEST(PsrGenericity, PositiveGapsAndResampleCount) {
  ExperimentConfig cfg = small(Experiment::PsrGenericity, 20);
  cfg.m = 3;
  cfg.sample_size = 10;
  const ExperimentOutput out = run_experiment(cfg);
  expect_partition(out.summary);
  EXPECT_EQ(out.summary.atoms, 0);
  EXPECT_EQ(out.summary.failures, 0);
  EXPECT_GT(out.summary.median_distance, 0.0);
  int resampled = 0;
  for (const TrialRecord& r : out.records) resampled += r.resampled;
  EXPECT_EQ(out.summary.resampled, resampled);
}

TEST(PsrUniqueness, InsideBoundIsAlwaysUnique) {
  const ExperimentConfig cfg = small(Experiment::PsrUniqueness, 30);
  const ExperimentOutput out = run_experiment(cfg);
  expect_partition(out.summary);
  EXPECT_EQ(out.summary.failures, 0);
  EXPECT_EQ(out.summary.uniqueness_rate, 1.0);
  EXPECT_EQ(out.summary.in_ball_rate, 1.0);
}

TEST(Summarize, PartitionsAndQuarantinesFailures) {
  ExperimentConfig cfg;
  std::vector<TrialRecord> recs(5);
  for (int i = 0; i < 5; ++i) {
    recs[static_cast<std::size_t>(i)].trial = i;
    recs[static_cast<std::size_t>(i)].ok = true;
    recs[static_cast<std::size_t>(i)].distance_to_a = 0.1 * i;
    recs[static_cast<std::size_t>(i)].residual = 1e-12 * i;
    recs[static_cast<std::size_t>(i)].unique = i != 3;
  }
  recs[4].ok = false;
  recs[4].residual = 1.0;
  const SummaryReport s = summarize(cfg, recs);
  EXPECT_EQ(s.trials, 5);
  EXPECT_EQ(s.atoms, 1);
  EXPECT_EQ(s.non_atoms, 3);
  EXPECT_EQ(s.failures, 1);
  EXPECT_EQ(s.min_distance, 0.0);
  EXPECT_NEAR(s.median_distance, 0.15, 1e-15);
  EXPECT_EQ(s.unique_count, 3);
  EXPECT_NEAR(s.uniqueness_rate, 0.75, 1e-15);
  EXPECT_NEAR(s.max_residual, 3e-12, 1e-24);
}

TEST(Output, CsvHeaderAndTimingColumn) {
  ExperimentConfig cfg = small(Experiment::SphereGenericity, 3);
  const ExperimentOutput out = run_experiment(cfg);
  const std::string csv = csv_of(cfg, out);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "trial,distance_to_A,residual,certified,unique,iterations,time_ms,status,defect,in_ball,resampled,digest,mean");
  EXPECT_NE(csv.find(",NA,ok,"), std::string::npos);
  cfg.timing = true;
  EXPECT_EQ(csv_of(cfg, out).find(",NA,"), std::string::npos);
  std::istringstream lines(csv);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) ++count;
  EXPECT_EQ(count, 4);
}

TEST(Output, FilesWrittenFromConfigPaths) {
  ExperimentConfig cfg = small(Experiment::SphereGenericity, 4);
  cfg.csv_path = ::testing::TempDir() + "lab_out.csv";
  cfg.summary_path = ::testing::TempDir() + "lab_summary.txt";
  const ExperimentOutput out = run_experiment(cfg);
  std::ifstream c(cfg.csv_path), s(cfg.summary_path);
  const std::string csv((std::istreambuf_iterator<char>(c)), {});
  const std::string summary((std::istreambuf_iterator<char>(s)), {});
  EXPECT_EQ(csv, csv_of(cfg, out));
  EXPECT_EQ(summary, summary_of(out));
  EXPECT_NE(summary.find("experiment=sphere_genericity\n"), std::string::npos);
  EXPECT_NE(summary.find("atoms=0\n"), std::string::npos);
}

}  // namespace
}  // namespace karcher::lab
