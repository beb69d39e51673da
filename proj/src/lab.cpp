#include "karcher/lab.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

#include "karcher/equivariant.hpp"
#include "karcher/errors.hpp"
#include "karcher/frechet.hpp"
#include "karcher/literal.hpp"
#include "karcher/sampling.hpp"
#include "karcher/spd_psr.hpp"

namespace karcher::lab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDefectTol = 1e-8;
constexpr int kMaxResample = 1000;

std::uint64_t digest_of(const std::vector<Vec>& samples) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const Vec& v : samples) h = fnv1a(v.data(), sizeof(double) * static_cast<std::size_t>(v.size()), h);
  return h;
}

std::vector<Vec> coords_of(const std::vector<Point>& pts) {
  std::vector<Vec> out;
  for (const Point& p : pts) out.push_back(p.coords);
  return out;
}

double equator_distance(const Vec& x) { return std::asin(std::min(1.0, std::abs(x(2)))); }

// S = exp(sigma A) with A symmetric standard Gaussian; redrawn while the
// spectrum is degenerate.
spd::SpdMatrix draw_spd(SplitMix64& rng, int m, double sigma, int& resampled) {
  for (int attempt = 0; attempt < kMaxResample; ++attempt) {
    const SymEig a = sym_eig(sampling::symmetric_gaussian(rng, m, sigma));
    spd::SpdMatrix s(sym_part(a.vectors * a.values.array().exp().matrix().asDiagonal() * a.vectors.transpose()));
    if (spd::top_stratum_gap(s) >= spd::kGapTol) return s;
    ++resampled;
  }
  throw Error(ErrorKind::DegenerateSpectrum, "SPD sampler produced only degenerate spectra");
}

void mark_residual(TrialRecord& rec, double tol) {
  if (!(rec.residual < 10.0 * tol)) {
    rec.ok = false;
    rec.status = "solver_failure:residual";
  }
}

void sphere_trial(const ExperimentConfig& cfg, SplitMix64& rng, TrialRecord& rec) {
  const Manifold s2 = Manifold::sphere(2);
  std::vector<Point> pts;
  if (cfg.sampler == Sampler::PointMass) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    const double phi = angle(rng);
    Vec x(3);
    x << std::cos(phi), std::sin(phi), 0.0;
    pts.assign(static_cast<std::size_t>(cfg.sample_size), s2.wrap(x));
  } else if (cfg.sampler == Sampler::VonMisesFisher) {
    const Vec mean = sampling::uniform_sphere(rng, 2);
    for (int i = 0; i < cfg.sample_size; ++i) pts.push_back(s2.wrap(sampling::von_mises_fisher_s2(mean, cfg.sigma, rng)));
  } else {
    for (int i = 0; i < cfg.sample_size; ++i) pts.push_back(s2.wrap(sampling::uniform_sphere(rng, 2)));
  }
  rec.digest = digest_of(coords_of(pts));
  const Configuration q(s2, pts);
  FrechetOptions options;
  options.tol = cfg.tol;
  const MeanResult r = frechet_mean(q, options);
  rec.mean = literal::format_point(s2, r.minimizer);
  rec.distance_to_a = equator_distance(r.minimizer.coords);
  rec.residual = r.barycenter_residual;
  rec.certified = r.afsari_certified;
  rec.unique = r.multistart_agreement;
  rec.iterations = r.iterations;
  rec.ok = true;
  rec.status = "ok";
  mark_residual(rec, cfg.tol);
}

void rp2_trial(const ExperimentConfig& cfg, SplitMix64& rng, TrialRecord& rec) {
  const FiniteAction action = antipodal_action(2);
  const Manifold& s2 = action.cover();
  std::bernoulli_distribution flip(0.5);
  const Point center = s2.wrap(sampling::uniform_sphere(rng, 2));
  std::vector<QuotientPoint> q;
  std::vector<Point> raw;
  for (int i = 0; i < cfg.sample_size; ++i) {
    Point p = sampling::random_in_ball(s2, center, cfg.radius, rng);
    if (flip(rng)) p = action.act(1, p);
    raw.push_back(p);
    q.push_back(QuotientPoint{p});
  }
  rec.digest = digest_of(coords_of(raw));

  const std::vector<Configuration> lifts = even_cover_lifts(action, QuotientPoint{center}, cfg.radius, q);
  FrechetOptions options;
  options.tol = cfg.tol;
  std::vector<Point> means;
  double residual = 0.0;
  bool unique = true;
  for (const Configuration& c : lifts) {
    const MeanResult r = frechet_mean(c, options);
    means.push_back(r.minimizer);
    residual = std::max(residual, r.barycenter_residual);
    unique = unique && r.multistart_agreement;
  }
  double defect = 0.0;
  for (int h1 = 0; h1 < action.order(); ++h1)
    for (int h2 = 0; h2 < action.order(); ++h2) {
      const Point moved = action.act(h1, means[static_cast<std::size_t>(h2)]);
      defect = std::max(defect, s2.dist(moved, means[static_cast<std::size_t>(action.compose(h1, h2))]));
    }

  EfmOptions efm;
  efm.tol = cfg.tol;
  const EfmResult e = efm_solve(action, q, efm);
  for (const Point& m : means) defect = std::max(defect, quotient_dist(action, QuotientPoint{m}, e.downstairs_mean));
  residual = std::max(residual, barycenter_check(Configuration(s2, e.aligned_lifts), e.minimizer).residual);

  rec.mean = literal::format_point(s2, e.minimizer);
  rec.distance_to_a = equator_distance(e.minimizer.coords);
  rec.residual = residual;
  rec.certified = afsari_certificate(lifts.front()).certified;
  rec.unique = unique && static_cast<int>(e.orbit.size()) == action.order() &&
               s2.dist(e.orbit[0], e.orbit[1]) > kDefectTol;
  rec.in_ball = quotient_dist(action, QuotientPoint{center}, e.downstairs_mean) < cfg.radius;
  rec.iterations = e.outer_iterations;
  rec.defect = defect;
  rec.ok = true;
  rec.status = "ok";
  mark_residual(rec, cfg.tol);
}

void record_psr(const ExperimentConfig& cfg, const spd::PsrMeanResult& r, TrialRecord& rec) {
  const Manifold cover = spd::psr_cover(cfg.m, cfg.k);
  std::vector<Point> lifts;
  for (const spd::EigenPair& p : r.aligned_lifts) lifts.push_back(spd::to_cover(cover, p));
  const Point rep = spd::to_cover(cover, r.representative);
  rec.mean = literal::format_point(cover, rep);
  rec.distance_to_a = spd::top_stratum_gap(spd::SpdMatrix(sym_part(spd::compose(r.representative))));
  rec.residual = barycenter_check(Configuration(cover, lifts), rep).residual;
  rec.unique = r.unique_up_to_g;
  rec.iterations = r.outer_iterations;
  rec.ok = true;
  rec.status = "ok";
}

spd::PsrOptions psr_options(const ExperimentConfig& cfg, std::uint64_t trial) {
  spd::PsrOptions options;
  options.tol = cfg.tol;
  options.seed = SplitMix64::mix(cfg.seed ^ SplitMix64::mix(trial + 0x7073726d65616eULL));
  return options;
}

void psr_genericity_trial(const ExperimentConfig& cfg, SplitMix64& rng, TrialRecord& rec) {
  std::vector<spd::SpdMatrix> samples;
  std::vector<Vec> raw;
  for (int i = 0; i < cfg.sample_size; ++i) {
    samples.push_back(draw_spd(rng, cfg.m, cfg.sigma, rec.resampled));
    raw.push_back(as_coords(samples.back().matrix()));
  }
  rec.digest = digest_of(raw);
  const spd::PsrMeanResult r = spd::psr_mean(samples, cfg.k, psr_options(cfg, static_cast<std::uint64_t>(rec.trial)));
  record_psr(cfg, r, rec);
  rec.certified = false;
  mark_residual(rec, cfg.tol);
}

void psr_uniqueness_trial(const ExperimentConfig& cfg, SplitMix64& rng, TrialRecord& rec) {
  const Manifold cover = spd::psr_cover(cfg.m, cfg.k);
  const spd::SpdMatrix center = draw_spd(rng, cfg.m, cfg.sigma, rec.resampled);
  const Point lift = spd::to_cover(cover, spd::eig_canonical(center));
  std::vector<spd::SpdMatrix> samples;
  std::vector<Vec> raw;
  while (static_cast<int>(samples.size()) < cfg.sample_size) {
    const Point p = sampling::random_in_ball(cover, lift, cfg.radius, rng);
    const spd::SpdMatrix s(sym_part(spd::compose(spd::from_cover(p, cfg.m))));
    bool accepted = false;
    try {
      accepted = spd::d_sr(s, center, cfg.k) < cfg.radius;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateSpectrum) throw;
    }
    if (!accepted) {
      if (++rec.resampled > kMaxResample) throw Error(ErrorKind::NoConvergence, "rejection sampler exhausted");
      continue;
    }
    samples.push_back(s);
    raw.push_back(as_coords(s.matrix()));
  }
  rec.digest = digest_of(raw);
  const spd::PsrMeanResult r = spd::psr_mean(samples, cfg.k, psr_options(cfg, static_cast<std::uint64_t>(rec.trial)));
  record_psr(cfg, r, rec);
  rec.in_ball = spd::d_psr(center, r.representative, cfg.k) < cfg.radius;
  rec.certified = true;
  mark_residual(rec, cfg.tol);
}

Experiment parse_experiment(const std::string& v) {
  if (v == "sphere_genericity") return Experiment::SphereGenericity;
  if (v == "rp2_equivariance") return Experiment::Rp2Equivariance;
  if (v == "psr_genericity") return Experiment::PsrGenericity;
  if (v == "psr_uniqueness") return Experiment::PsrUniqueness;
  throw Error(ErrorKind::InvalidInput, "unknown experiment '" + v + "'");
}

Sampler parse_sampler(const std::string& v) {
  if (v == "uniform") return Sampler::Uniform;
  if (v == "vmf") return Sampler::VonMisesFisher;
  if (v == "point_mass") return Sampler::PointMass;
  throw Error(ErrorKind::InvalidInput, "unknown sampler '" + v + "'");
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
  std::istringstream in(v);
  T x{};
  in >> x;
  if (!in || !in.eof()) throw Error(ErrorKind::InvalidInput, "bad value for " + key + ": '" + v + "'");
  return x;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw Error(ErrorKind::InvalidInput, "bad value for " + key + ": '" + v + "'");
}

}  // namespace

std::uint64_t SplitMix64::mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

SplitMix64 SplitMix64::substream(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64(mix(mix(seed) ^ mix(index + 0x9e3779b97f4a7c15ULL)));
}

SplitMix64::result_type SplitMix64::operator()() {
  return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL);
}

const char* to_string(Experiment e) noexcept {
  switch (e) {
    case Experiment::SphereGenericity: return "sphere_genericity";
    case Experiment::Rp2Equivariance: return "rp2_equivariance";
    case Experiment::PsrGenericity: return "psr_genericity";
    case Experiment::PsrUniqueness: return "psr_uniqueness";
  }
  return "unknown";
}

const char* to_string(Sampler s) noexcept {
  switch (s) {
    case Sampler::Uniform: return "uniform";
    case Sampler::VonMisesFisher: return "vmf";
    case Sampler::PointMass: return "point_mass";
  }
  return "unknown";
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  for (const std::string& line : literal::content_lines(in)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::InvalidInput, "config line without '=': " + line);
    auto strip = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t") + 1);
      return s;
    };
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    if (key == "experiment") cfg.experiment = parse_experiment(value);
    else if (key == "trials") cfg.trials = parse_number<int>(key, value);
    else if (key == "sample_size") cfg.sample_size = parse_number<int>(key, value);
    else if (key == "sigma") cfg.sigma = parse_number<double>(key, value);
    else if (key == "radius") cfg.radius = parse_number<double>(key, value);
    else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "tol") cfg.tol = parse_number<double>(key, value);
    else if (key == "atom_tol") cfg.atom_tol = parse_number<double>(key, value);
    else if (key == "m") cfg.m = parse_number<int>(key, value);
    else if (key == "k") cfg.k = parse_number<double>(key, value);
    else if (key == "sampler") cfg.sampler = parse_sampler(value);
    else if (key == "threads") cfg.threads = parse_number<int>(key, value);
    else if (key == "timing") cfg.timing = parse_bool(key, value);
    else if (key == "csv") cfg.csv_path = value;
    else if (key == "summary") cfg.summary_path = value;
    else throw Error(ErrorKind::InvalidInput, "unknown config key '" + key + "'");
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot open config '" + path + "'");
  return parse_config(in);
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) throw Error(ErrorKind::InvalidInput, "trials must be >= 1");
  if (cfg.sample_size < 1) throw Error(ErrorKind::InvalidInput, "sample_size must be >= 1");
  if (cfg.threads < 1) throw Error(ErrorKind::InvalidInput, "threads must be >= 1");
  if (!(cfg.tol > 0.0) || !(cfg.atom_tol > 0.0)) throw Error(ErrorKind::InvalidInput, "tolerances must be positive");
  if (!(cfg.sigma >= 0.0) || !(cfg.k > 0.0)) throw Error(ErrorKind::InvalidInput, "sigma must be >= 0 and k > 0");
  switch (cfg.experiment) {
    case Experiment::SphereGenericity: break;
    case Experiment::Rp2Equivariance: {
      const double bound = radius_relations(antipodal_action(2)).r_cx;
      if (!(cfg.radius > 0.0 && cfg.radius < bound)) {
        throw Error(ErrorKind::InvalidInput, "radius must lie in (0, r_cx(RP^2) = " + literal::format_double(bound) + ")");
      }
      break;
    }
    case Experiment::PsrGenericity:
      if (cfg.m < 2 || cfg.m > 3) throw Error(ErrorKind::InvalidInput, "psr_genericity supports m in {2, 3}");
      break;
    case Experiment::PsrUniqueness: {
      if (cfg.m < 2 || cfg.m > 5) throw Error(ErrorKind::InvalidInput, "psr_uniqueness supports 2 <= m <= 5");
      const double bound = spd::psr_constants(cfg.m, cfg.k).r_cx_quotient;
      if (!(cfg.radius > 0.0 && cfg.radius < bound)) {
        throw Error(ErrorKind::InvalidInput, "radius must lie in (0, sqrt(k) beta_gp / 4 = " +
                                                 literal::format_double(bound) + ")");
      }
      break;
    }
  }
}

TrialRecord run_trial(const ExperimentConfig& cfg, int trial) {
  TrialRecord rec;
  rec.trial = trial;
  SplitMix64 rng = SplitMix64::substream(cfg.seed, static_cast<std::uint64_t>(trial));
  const auto start = std::chrono::steady_clock::now();
  try {
    switch (cfg.experiment) {
      case Experiment::SphereGenericity: sphere_trial(cfg, rng, rec); break;
      case Experiment::Rp2Equivariance: rp2_trial(cfg, rng, rec); break;
      case Experiment::PsrGenericity: psr_genericity_trial(cfg, rng, rec); break;
      case Experiment::PsrUniqueness: psr_uniqueness_trial(cfg, rng, rec); break;
    }
  } catch (const Error& e) {
    rec.ok = false;
    rec.status = std::string("solver_failure:") + to_string(e.kind());
  }
  rec.time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

SummaryReport summarize(const ExperimentConfig& cfg, const std::vector<TrialRecord>& records) {
  SummaryReport s;
  s.config = cfg;
  s.trials = static_cast<int>(records.size());
  s.absolutely_continuous = !(cfg.experiment == Experiment::SphereGenericity && cfg.sampler == Sampler::PointMass);
  std::vector<double> distances;
  for (const TrialRecord& r : records) {
    s.resampled += r.resampled;
    if (!r.ok) {
      ++s.failures;
      continue;
    }
    distances.push_back(r.distance_to_a);
    (r.distance_to_a < cfg.atom_tol ? s.atoms : s.non_atoms) += 1;
    s.unique_count += r.unique ? 1 : 0;
    s.in_ball_count += r.in_ball ? 1 : 0;
    s.max_residual = std::max(s.max_residual, r.residual);
    s.max_defect = std::max(s.max_defect, r.defect);
  }
  const auto ok = static_cast<double>(distances.size());
  if (!distances.empty()) {
    std::sort(distances.begin(), distances.end());
    s.min_distance = distances.front();
    const std::size_t mid = distances.size() / 2;
    s.median_distance = distances.size() % 2 ? distances[mid] : 0.5 * (distances[mid - 1] + distances[mid]);
    s.uniqueness_rate = s.unique_count / ok;
    s.in_ball_rate = s.in_ball_count / ok;
  }
  return s;
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  ExperimentOutput out;
  out.records.resize(static_cast<std::size_t>(cfg.trials));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int t = next++; t < cfg.trials; t = next++) out.records[static_cast<std::size_t>(t)] = run_trial(cfg, t);
  };
  const int workers = std::min(cfg.threads, cfg.trials);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  out.summary = summarize(cfg, out.records);

  if (!cfg.csv_path.empty()) {
    std::ofstream f(cfg.csv_path);
    if (!f) throw Error(ErrorKind::InvalidInput, "cannot write '" + cfg.csv_path + "'");
    write_csv(f, cfg, out.records);
  }
  if (!cfg.summary_path.empty()) {
    std::ofstream f(cfg.summary_path);
    if (!f) throw Error(ErrorKind::InvalidInput, "cannot write '" + cfg.summary_path + "'");
    write_summary(f, out.summary);
  }
  return out;
}

ExperimentOutput run_sphere_genericity(ExperimentConfig cfg) {
  cfg.experiment = Experiment::SphereGenericity;
  return run_experiment(cfg);
}

ExperimentOutput run_rp2_equivariance(ExperimentConfig cfg) {
  cfg.experiment = Experiment::Rp2Equivariance;
  return run_experiment(cfg);
}

ExperimentOutput run_psr_genericity(ExperimentConfig cfg) {
  cfg.experiment = Experiment::PsrGenericity;
  return run_experiment(cfg);
}

ExperimentOutput run_psr_uniqueness(ExperimentConfig cfg) {
  cfg.experiment = Experiment::PsrUniqueness;
  return run_experiment(cfg);
}

void write_csv(std::ostream& out, const ExperimentConfig& cfg, const std::vector<TrialRecord>& records) {
  using literal::format_double;
  out << "trial,distance_to_A,residual,certified,unique,iterations,time_ms,status,defect,in_ball,resampled,digest,mean\n";
  for (const TrialRecord& r : records) {
    out << r.trial << ',' << format_double(r.distance_to_a) << ',' << format_double(r.residual) << ','
        << (r.certified ? "true" : "false") << ',' << (r.unique ? "true" : "false") << ',' << r.iterations << ','
        << (cfg.timing ? format_double(r.time_ms) : std::string("NA")) << ',' << r.status << ','
        << format_double(r.defect) << ',' << (r.in_ball ? "true" : "false") << ',' << r.resampled << ',' << std::hex
        << r.digest << std::dec << ",\"" << r.mean << "\"\n";
  }
}

void write_summary(std::ostream& out, const SummaryReport& s) {
  using literal::format_double;
  const ExperimentConfig& c = s.config;
  out << "experiment=" << to_string(c.experiment) << '\n'
      << "seed=" << c.seed << '\n'
      << "trials=" << s.trials << '\n'
      << "sample_size=" << c.sample_size << '\n'
      << "sampler=" << to_string(c.sampler) << '\n'
      << "sigma=" << format_double(c.sigma) << '\n'
      << "radius=" << format_double(c.radius) << '\n'
      << "m=" << c.m << '\n'
      << "k=" << format_double(c.k) << '\n'
      << "tol=" << format_double(c.tol) << '\n'
      << "atom_tol=" << format_double(c.atom_tol) << '\n'
      << "absolutely_continuous=" << (s.absolutely_continuous ? "true" : "false") << '\n'
      << "atoms=" << s.atoms << '\n'
      << "non_atoms=" << s.non_atoms << '\n'
      << "failures=" << s.failures << '\n'
      << "resampled=" << s.resampled << '\n'
      << "min_distance_to_A=" << format_double(s.min_distance) << '\n'
      << "median_distance_to_A=" << format_double(s.median_distance) << '\n'
      << "unique=" << s.unique_count << '\n'
      << "uniqueness_rate=" << format_double(s.uniqueness_rate) << '\n'
      << "in_ball=" << s.in_ball_count << '\n'
      << "in_ball_rate=" << format_double(s.in_ball_rate) << '\n'
      << "max_residual=" << format_double(s.max_residual) << '\n'
      << "max_defect=" << format_double(s.max_defect) << '\n';
}

}  // namespace karcher::lab
