#include "karcher/cli.hpp"

#include <CLI11.hpp>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "karcher/equivariant.hpp"
#include "karcher/errors.hpp"
#include "karcher/frechet.hpp"
#include "karcher/lab.hpp"
#include "karcher/literal.hpp"
#include "karcher/selftest.hpp"
#include "karcher/spd_psr.hpp"

namespace karcher {

namespace {

using literal::format_double;

constexpr const char* kGrammar =
    "manifold specs: euclidean:<n> | sphere:<n> | so:<m>:k=<k> | diagpos:<m> | product(<spec>;<spec>...)\n"
    "point literals: comma-separated numbers per factor (matrices row-major), product factors joined by ';'\n"
    "actions: antipodal:<n> | signed-perm:<m>:k=<k>\n"
    "point files: one literal per line, '#' starts a comment\n";

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<Point> gather_points(const Manifold& m, const std::string& file, const std::vector<std::string>& inline_points) {
  std::vector<Point> pts;
  if (!file.empty()) pts = literal::read_points_file(m, file);
  for (const std::string& s : inline_points) pts.push_back(literal::parse_point(m, s));
  if (pts.empty()) throw UsageError("no points given (use --points FILE or --point LITERAL)");
  return pts;
}

std::vector<spd::SpdMatrix> gather_spd(const std::string& file, const std::vector<std::string>& inline_samples) {
  std::vector<std::string> lines;
  if (!file.empty()) lines = literal::read_lines_file(file);
  lines.insert(lines.end(), inline_samples.begin(), inline_samples.end());
  if (lines.empty()) throw UsageError("no samples given (use --samples FILE or --sample LITERAL)");
  std::vector<spd::SpdMatrix> out;
  for (const std::string& l : lines) out.emplace_back(literal::parse_matrix(l));
  return out;
}

FiniteAction parse_action(const std::string& spec) {
  if (spec.rfind("antipodal:", 0) == 0) return antipodal_action(std::stoi(spec.substr(10)));
  if (spec.rfind("signed-perm:", 0) == 0) {
    const std::string rest = spec.substr(12);
    const auto colon = rest.find(':');
    const int m = std::stoi(rest.substr(0, colon));
    double k = 1.0;
    if (colon != std::string::npos) {
      if (rest.compare(colon + 1, 2, "k=") != 0) throw UsageError("expected signed-perm:<m>:k=<k>");
      k = std::stod(rest.substr(colon + 3));
    }
    return spd::signed_permutation_action(m, k);
  }
  throw UsageError("unknown action '" + spec + "'");
}

void print_bool(std::ostream& out, const char* key, bool v) { out << key << '=' << (v ? "true" : "false") << '\n'; }
void print_num(std::ostream& out, const char* key, double v) { out << key << '=' << format_double(v) << '\n'; }

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Frechet means on manifolds, quotients and SPD scaling-rotation space", "karcher"};
  app.require_subcommand(1);
  app.footer(kGrammar);

  std::string manifold_spec, points_file, a_lit, b_lit, action_spec, samples_file, config_file, csv_path,
      summary_path;
  std::vector<std::string> inline_points, inline_samples;
  double tol = kMeanTol, k = 1.0, gap_tol = spd::kGapTol;
  int m = 2, threads = 0;
  std::optional<std::uint64_t> seed;

  auto* mean = app.add_subcommand("mean", "Frechet mean by multistart Karcher descent");
  mean->add_option("--manifold", manifold_spec, "manifold spec")->required();
  mean->add_option("--points", points_file, "point file");
  mean->add_option("--point", inline_points, "inline point literal (repeatable)");
  mean->add_option("--tol", tol, "gradient tolerance");

  auto* efm = app.add_subcommand("efm", "equivariant Frechet mean on a cover");
  efm->add_option("--action", action_spec, "group action")->required();
  efm->add_option("--points", points_file, "file of cover representatives");
  efm->add_option("--point", inline_points, "inline representative (repeatable)");
  efm->add_option("--tol", tol, "objective tolerance");

  auto* psr_mean = app.add_subcommand("psr-mean", "partial scaling-rotation mean of SPD matrices");
  psr_mean->add_option("--m", m, "matrix size")->required();
  psr_mean->add_option("--k", k, "rotation weight");
  psr_mean->add_option("--samples", samples_file, "file of SPD matrices (row-major)");
  psr_mean->add_option("--sample", inline_samples, "inline SPD matrix (repeatable)");
  psr_mean->add_option("--tol", tol, "objective tolerance");
  psr_mean->add_option("--gap-tol", gap_tol, "minimum eigengap");

  auto* dist = app.add_subcommand("dist", "geodesic distance");
  dist->add_option("--manifold", manifold_spec, "manifold spec")->required();
  dist->add_option("--a", a_lit, "first point")->required();
  dist->add_option("--b", b_lit, "second point")->required();

  auto* psr_dist = app.add_subcommand("psr-dist", "scaling-rotation distance d_SR");
  psr_dist->add_option("--a", a_lit, "first SPD matrix")->required();
  psr_dist->add_option("--b", b_lit, "second SPD matrix")->required();
  psr_dist->add_option("--k", k, "rotation weight");
  psr_dist->add_option("--gap-tol", gap_tol, "minimum eigengap");

  auto* certify = app.add_subcommand("certify", "Afsari uniqueness certificate");
  certify->add_option("--manifold", manifold_spec, "manifold spec")->required();
  certify->add_option("--points", points_file, "point file");
  certify->add_option("--point", inline_points, "inline point literal (repeatable)");

  auto* constants = app.add_subcommand("constants", "PSR radius constants, or a manifold's metric constants");
  constants->add_option("--m", m, "matrix size");
  constants->add_option("--k", k, "rotation weight");
  constants->add_option("--manifold", manifold_spec, "manifold spec (prints r_inj, delta_sup, r_cx)");

  auto* experiment = app.add_subcommand("experiment", "run a Monte Carlo experiment");
  experiment->add_option("--config", config_file, "config file")->required();
  experiment->add_option("--csv", csv_path, "override the CSV path");
  experiment->add_option("--summary", summary_path, "override the summary path");
  experiment->add_option("--seed", seed, "override the seed");
  experiment->add_option("--threads", threads, "override the worker count");

  auto* selftest = app.add_subcommand("selftest", "run the invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return 2;
  }

  try {
    if (mean->parsed()) {
      const Manifold man = literal::parse_manifold(manifold_spec);
      const Configuration q(man, gather_points(man, points_file, inline_points));
      FrechetOptions options;
      options.tol = tol;
      const MeanResult r = frechet_mean(q, options);
      out << "manifold=" << man.descriptor() << '\n' << "n=" << q.size() << '\n';
      out << "minimizer=" << literal::format_point(man, r.minimizer) << '\n';
      print_num(out, "objective", r.objective);
      print_num(out, "grad_norm", r.grad_norm);
      print_num(out, "residual", r.barycenter_residual);
      out << "iterations=" << r.iterations << '\n';
      out << "classification=" << to_string(r.classification) << '\n';
      print_bool(out, "multistart_agreement", r.multistart_agreement);
      print_num(out, "multistart_spread", r.multistart_spread);
      out << "higher_critical_runs=" << r.higher_critical_runs << '\n';
      print_num(out, "all_runs_spread", r.all_runs_spread);
      out << "converged_runs=" << r.converged_runs << '\n';
      print_bool(out, "afsari_certified", r.afsari_certified);
    } else if (efm->parsed()) {
      const FiniteAction action = parse_action(action_spec);
      std::vector<QuotientPoint> q;
      for (Point& p : gather_points(action.cover(), points_file, inline_points)) q.push_back(QuotientPoint{std::move(p)});
      EfmOptions options;
      options.tol = tol;
      const EfmResult r = efm_solve(action, q, options);
      out << "action=" << action.name() << '\n' << "cover=" << action.cover().descriptor() << '\n';
      out << "minimizer=" << literal::format_point(action.cover(), r.minimizer) << '\n';
      print_num(out, "objective", r.objective);
      out << "outer_iterations=" << r.outer_iterations << '\n' << "orbit_size=" << r.orbit.size() << '\n';
      for (std::size_t i = 0; i < r.orbit.size(); ++i) {
        out << "orbit_" << i << '=' << literal::format_point(action.cover(), r.orbit[i]) << '\n';
      }
    } else if (psr_mean->parsed()) {
      const auto samples = gather_spd(samples_file, inline_samples);
      for (const auto& s : samples)
        if (s.size() != m) throw UsageError("sample size does not match --m " + std::to_string(m));
      spd::PsrOptions options;
      options.tol = tol;
      options.gap_tol = gap_tol;
      const spd::PsrMeanResult r = spd::psr_mean(samples, k, options);
      out << "U=" << literal::format_matrix(r.representative.rotation) << '\n';
      out << "D=" << literal::format_vector(r.representative.diagonal) << '\n';
      out << "S=" << literal::format_matrix(spd::compose(r.representative)) << '\n';
      print_num(out, "objective", r.objective);
      print_bool(out, "unique_up_to_G", r.unique_up_to_g);
      print_num(out, "restart_spread", r.restart_spread);
      out << "outer_iterations=" << r.outer_iterations << '\n';
    } else if (dist->parsed()) {
      const Manifold man = literal::parse_manifold(manifold_spec);
      print_num(out, "dist", man.dist(literal::parse_point(man, a_lit), literal::parse_point(man, b_lit)));
    } else if (psr_dist->parsed()) {
      const spd::SpdMatrix a(literal::parse_matrix(a_lit));
      const spd::SpdMatrix b(literal::parse_matrix(b_lit));
      print_num(out, "d_sr", spd::d_sr(a, b, k, gap_tol));
    } else if (certify->parsed()) {
      const Manifold man = literal::parse_manifold(manifold_spec);
      const AfsariCertificate c = afsari_certificate(Configuration(man, gather_points(man, points_file, inline_points)));
      print_bool(out, "certified", c.certified);
      print_num(out, "radius", c.radius);
      print_num(out, "r_cx", man.constants().r_cx);
      if (c.center) out << "center=" << literal::format_point(man, *c.center) << '\n';
    } else if (constants->parsed()) {
      if (!manifold_spec.empty()) {
        const MetricConstants c = literal::parse_manifold(manifold_spec).constants();
        print_num(out, "r_inj", c.r_inj);
        print_num(out, "delta_sup", c.delta_sup);
        print_num(out, "r_cx", c.r_cx);
      } else {
        const spd::PsrConstants c = spd::psr_constants(m, k);
        print_num(out, "beta_gp", c.beta_gp);
        print_num(out, "r_cx_cover", c.r_cx_cover);
        print_num(out, "r_inj_quotient", c.r_inj_quotient);
        print_num(out, "r_cx_quotient", c.r_cx_quotient);
      }
    } else if (experiment->parsed()) {
      lab::ExperimentConfig cfg = lab::parse_config_file(config_file);
      if (!csv_path.empty()) cfg.csv_path = csv_path;
      if (!summary_path.empty()) cfg.summary_path = summary_path;
      if (seed) cfg.seed = *seed;
      if (threads > 0) cfg.threads = threads;
      lab::write_summary(out, lab::run_experiment(cfg).summary);
    } else if (selftest->parsed()) {
      const SelftestResult r = run_selftest();
      for (const std::string& line : r.lines) out << line << '\n';
      out << "passed=" << r.passed << '\n' << "failed=" << r.failed << '\n';
      return r.failed == 0 ? 0 : 1;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n' << kGrammar;
    return 2;
  } catch (const Error& e) {
    out << "error=" << to_string(e.kind()) << '\n' << "detail=" << e.detail() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n' << kGrammar;
    return 2;
  }
  return 0;
}

}  // namespace karcher
