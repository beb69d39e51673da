#pragma once

#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace karcher::lab {

/// SplitMix64 used as a counter-based generator: output n of a stream is
/// mix(key + n * golden). Substreams are keyed by (seed, trial), so results
/// do not depend on scheduling.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t key) : key_(key) {}
  static SplitMix64 substream(std::uint64_t seed, std::uint64_t index);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  static std::uint64_t mix(std::uint64_t z);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

enum class Experiment { SphereGenericity, Rp2Equivariance, PsrGenericity, PsrUniqueness };
enum class Sampler { Uniform, VonMisesFisher, PointMass };

const char* to_string(Experiment e) noexcept;
const char* to_string(Sampler s) noexcept;

// Config file: one `key = value` per line, '#' starts a comment.
//   experiment   sphere_genericity | rp2_equivariance | psr_genericity | psr_uniqueness
//   trials, sample_size, seed, m, threads
//   sigma        vMF concentration (sphere) or SPD log-scale (psr)
//   radius       sampling ball radius (rp2, psr_uniqueness)
//   k, tol, atom_tol
//   sampler      uniform | vmf | point_mass   (sphere_genericity)
//   timing       true | false   (false writes time_ms as NA)
//   csv, summary output paths (optional)
struct ExperimentConfig {
  Experiment experiment = Experiment::SphereGenericity;
  int trials = 100;
  int sample_size = 5;
  double sigma = 0.5;
  double radius = 0.5;
  std::uint64_t seed = 1;
  double tol = 1e-10;
  double atom_tol = 1e-6;
  int m = 2;
  double k = 1.0;
  Sampler sampler = Sampler::Uniform;
  int threads = 1;
  bool timing = false;
  std::string csv_path;
  std::string summary_path;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);
/// Throws InvalidInput on trials < 1, N < 1, bad m, or a radius outside the
/// uniqueness bound for experiments that assert uniqueness.
void validate(const ExperimentConfig& cfg);

struct TrialRecord {
  int trial = 0;
  bool ok = false;
  std::string status;
  std::uint64_t digest = 0;
  std::string mean;
  double distance_to_a = 0.0;
  double residual = 0.0;
  bool certified = false;
  bool unique = false;
  bool in_ball = true;
  int iterations = 0;
  double defect = 0.0;
  int resampled = 0;
  double time_ms = 0.0;
};

struct SummaryReport {
  ExperimentConfig config;
  int trials = 0;
  int atoms = 0;
  int non_atoms = 0;
  int failures = 0;
  double min_distance = 0.0;
  double median_distance = 0.0;
  int unique_count = 0;
  double uniqueness_rate = 0.0;
  int in_ball_count = 0;
  double in_ball_rate = 0.0;
  double max_residual = 0.0;
  double max_defect = 0.0;
  int resampled = 0;
  bool absolutely_continuous = true;
};

struct ExperimentOutput {
  std::vector<TrialRecord> records;
  SummaryReport summary;
};

TrialRecord run_trial(const ExperimentConfig& cfg, int trial);
SummaryReport summarize(const ExperimentConfig& cfg, const std::vector<TrialRecord>& records);

/// Runs every trial (on cfg.threads workers) and writes the CSV and summary
/// files when their paths are set.
ExperimentOutput run_experiment(const ExperimentConfig& cfg);

ExperimentOutput run_sphere_genericity(ExperimentConfig cfg);
ExperimentOutput run_rp2_equivariance(ExperimentConfig cfg);
ExperimentOutput run_psr_genericity(ExperimentConfig cfg);
ExperimentOutput run_psr_uniqueness(ExperimentConfig cfg);

void write_csv(std::ostream& out, const ExperimentConfig& cfg, const std::vector<TrialRecord>& records);
void write_summary(std::ostream& out, const SummaryReport& report);

}  // namespace karcher::lab
