#include "karcher/selftest.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "karcher/equivariant.hpp"
#include "karcher/errors.hpp"
#include "karcher/frechet.hpp"
#include "karcher/lab.hpp"
#include "karcher/manifold.hpp"
#include "karcher/sampling.hpp"
#include "karcher/spd_psr.hpp"

namespace karcher {

namespace {

constexpr double kPi = std::numbers::pi;

struct Check {
  const char* name;
  std::function<std::string()> run;  // empty string on success
};

std::string expect_small(const char* what, double value, double bound) {
  if (value < bound) return {};
  std::ostringstream msg;
  msg << what << " = " << value << " (bound " << bound << ")";
  return msg.str();
}

std::string round_trip(const Manifold& m, std::mt19937_64& rng) {
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Point p = sampling::random_point(m, rng);
    const Point q = sampling::random_in_ball(m, p, 0.8, rng);
    worst = std::max(worst, m.dist(m.exp(p, m.log(p, q)), q));
    worst = std::max(worst, std::abs(m.dist(p, q) - m.dist(q, p)));
  }
  return expect_small((m.descriptor() + " exp/log round trip").c_str(), worst, 1e-10);
}

}  // namespace

SelftestResult run_selftest() {
  std::mt19937_64 rng(20240611);
  const std::vector<Check> checks{
      {"geom-core/sym_eig_reconstruction",
       [&] {
         const Mat s = sampling::symmetric_gaussian(rng, 4);
         const SymEig e = sym_eig(s);
         return expect_small("residual", (e.vectors * e.values.asDiagonal() * e.vectors.transpose() - s).norm(), 1e-12);
       }},
      {"geom-core/rcx_from_constants",
       [] { return expect_small("|r_cx(pi, 1) - pi/2|", std::abs(rcx_from_constants(kPi, 1.0) - kPi / 2.0), 1e-15); }},
      {"geom-core/log_exp_so3",
       [&] {
         const Mat r = sampling::haar_rotation(rng, 3);
         return expect_small("|exp(log R) - R|", (expm_skew(logm_rotation(r, 1e-8)) - r).norm(), 1e-12);
       }},
      {"manifolds/sphere", [&] { return round_trip(Manifold::sphere(2), rng); }},
      {"manifolds/so3", [&] { return round_trip(Manifold::special_orthogonal(3, 2.0), rng); }},
      {"manifolds/diagpos", [&] { return round_trip(Manifold::diag_pos(3), rng); }},
      {"manifolds/product",
       [&] { return round_trip(Manifold::product({Manifold::special_orthogonal(2), Manifold::diag_pos(2)}), rng); }},
      {"frechet/euclidean_average",
       [] {
         const Manifold e = Manifold::euclidean(1);
         Vec a(1), b(1);
         a << 0.0;
         b << 2.0;
         const MeanResult r = frechet_mean(Configuration(e, {e.point(a), e.point(b)}));
         return expect_small("|mean - 1|", std::abs(r.minimizer.coords(0) - 1.0), 1e-12);
       }},
      {"frechet/sphere_barycenter",
       [&] {
         const Manifold s2 = Manifold::sphere(2);
         const Point c = sampling::random_point(s2, rng);
         std::vector<Point> pts;
         for (int i = 0; i < 6; ++i) pts.push_back(sampling::random_in_ball(s2, c, 0.5, rng));
         const MeanResult r = frechet_mean(Configuration(s2, pts));
         if (!r.afsari_certified) return std::string("certificate false on a radius-0.5 cap");
         return expect_small("residual", r.barycenter_residual, 1e-9);
       }},
      {"equivariant/antipodal_group",
       [] { return antipodal_action(2).table_is_group() ? std::string() : std::string("table is not a group"); }},
      {"equivariant/rp2_projection",
       [&] {
         const FiniteAction a = antipodal_action(2);
         const Point c = sampling::random_point(a.cover(), rng);
         std::vector<QuotientPoint> q;
         for (int i = 0; i < 5; ++i) {
           Point p = sampling::random_in_ball(a.cover(), c, 0.6, rng);
           q.push_back(QuotientPoint{i % 2 ? a.act(1, p) : p});
         }
         const auto lifts = even_cover_lifts(a, QuotientPoint{c}, 0.7, q);
         const EfmResult e = efm_solve(a, q);
         const MeanResult m = frechet_mean(lifts[0]);
         return expect_small("projection defect", quotient_dist(a, QuotientPoint{m.minimizer}, e.downstairs_mean), 1e-8);
       }},
      {"spd-psr/group_order",
       [] {
         return spd::group_enumerate(3).size() == 24 && spd::group_enumerate(2).size() == 4
                    ? std::string()
                    : std::string("|G(m)| mismatch");
       }},
      {"spd-psr/fiber_exactness",
       [&] {
         const Mat a = sampling::symmetric_gaussian(rng, 3);
         const SymEig e = sym_eig(a);
         const spd::SpdMatrix s(sym_part(e.vectors * e.values.array().exp().matrix().asDiagonal() * e.vectors.transpose()));
         const spd::EigenPair lift = spd::eig_canonical(s);
         double worst = 0.0;
         for (const auto& h : spd::group_enumerate(3)) worst = std::max(worst, (spd::compose(spd::act(h, lift)) - s.matrix()).norm());
         return expect_small("|F(h.lift) - S|", worst, 1e-10);
       }},
      {"spd-psr/d_sr_oracle",
       [] {
         Mat a = Mat::Zero(2, 2), b = Mat::Zero(2, 2);
         a.diagonal() << 4.0, 1.0;
         b.diagonal() << 1.0, 4.0;
         return expect_small("|d_sr - pi/2|", std::abs(spd::d_sr(spd::SpdMatrix(a), spd::SpdMatrix(b), 1.0) - kPi / 2.0), 1e-10);
       }},
      {"spd-psr/constants",
       [] {
         const spd::PsrConstants c = spd::psr_constants(2, 1.0);
         return expect_small("|beta_gp - pi/2|", std::abs(c.beta_gp - kPi / 2.0), 1e-12);
       }},
      {"lab/determinism",
       [] {
         lab::ExperimentConfig cfg;
         cfg.trials = 5;
         cfg.seed = 7;
         std::ostringstream a, b;
         lab::write_csv(a, cfg, lab::run_experiment(cfg).records);
         lab::write_csv(b, cfg, lab::run_experiment(cfg).records);
         return a.str() == b.str() ? std::string() : std::string("CSV differs between identical runs");
       }},
  };

  SelftestResult out;
  for (const Check& c : checks) {
    std::string failure;
    try {
      failure = c.run();
    } catch (const std::exception& e) {
      failure = std::string("exception: ") + e.what();
    }
    if (failure.empty()) {
      ++out.passed;
      out.lines.push_back(std::string("PASS ") + c.name);
    } else {
      ++out.failed;
      out.lines.push_back(std::string("FAIL ") + c.name + ": " + failure);
    }
  }
  return out;
}

}  // namespace karcher
