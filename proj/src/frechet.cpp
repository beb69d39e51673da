#include "karcher/frechet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/SVD>

#include "karcher/errors.hpp"
#include "karcher/sampling.hpp"

namespace karcher {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDescentSlack = 1e-14;

double objective_raw(const Configuration& q, const Vec& p) {
  const Manifold& m = q.manifold();
  double sum = 0.0;
  for (const Point& x : q.points()) {
    const double d = m.dist_raw(p, x.coords);
    sum += d * d;
  }
  return sum / static_cast<double>(q.size());
}

Vec gradient_raw(const Configuration& q, const Vec& p, double cut_tol) {
  const Manifold& m = q.manifold();
  Vec y = Vec::Zero(m.ambient_size());
  for (const Point& x : q.points()) y += m.log_raw(p, x.coords, cut_tol);
  return y / static_cast<double>(q.size());
}

bool lexicographically_less(const Vec& a, const Vec& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

// SO(m) branch of the directional derivative at a cut point: the minimal
// logs of R = U^T Q are X0 + W (pi J) W^T, with W spanning the -1
// eigenspace and J any orthogonal complex structure there. The sup of
// <X_v, pi W J W^T> over J is pi times the nuclear norm of W^T X_v W.
double so_cut_sup(const Manifold& manifold, const Mat& r, const Mat& xv) {
  const int m = manifold.order();
  const SymEig eig = sym_eig(sym_part(r));
  std::vector<Eigen::Index> minus, rest;
  for (Eigen::Index i = 0; i < m; ++i) (eig.values(i) < -1.0 + 1e-10 ? minus : rest).push_back(i);
  if (minus.size() % 2 != 0) {
    throw Error(ErrorKind::InvalidInput, "rotation with an odd -1 eigenspace");
  }
  Mat w(m, static_cast<Eigen::Index>(minus.size()));
  for (std::size_t j = 0; j < minus.size(); ++j) w.col(static_cast<Eigen::Index>(j)) = eig.vectors.col(minus[j]);
  double sup = 0.0;
  if (!rest.empty()) {
    Mat wp(m, static_cast<Eigen::Index>(rest.size()));
    for (std::size_t j = 0; j < rest.size(); ++j) wp.col(static_cast<Eigen::Index>(j)) = eig.vectors.col(rest[j]);
    Mat restricted = wp.transpose() * r * wp;
    if (restricted.determinant() < 0.0) throw Error(ErrorKind::InvalidInput, "inconsistent rotation split");
    const Mat x0 = wp * logm_rotation(restricted, 0.0) * wp.transpose();
    sup += (xv.array() * x0.array()).sum();
  }
  if (!minus.empty()) {
    const Mat a = w.transpose() * xv * w;
    Eigen::JacobiSVD<Mat> svd(a);
    sup += kPi * svd.singularValues().sum();
  }
  return 0.5 * manifold.scale() * sup;
}

}  // namespace

Configuration::Configuration(Manifold manifold, std::vector<Point> points)
    : manifold_(std::move(manifold)), points_(std::move(points)) {
  if (points_.empty()) throw Error(ErrorKind::InvalidInput, "configuration needs N >= 1 points");
  for (const Point& p : points_) {
    if (p.manifold_id != manifold_.id() || p.coords.size() != manifold_.ambient_size()) {
      throw Error(ErrorKind::InvalidInput, "configuration point is not on " + manifold_.descriptor());
    }
  }
}

const char* to_string(Classification c) noexcept {
  switch (c) {
    case Classification::Short: return "short";
    case Classification::AlmostShort: return "almost_short";
    case Classification::BoundaryUnclassified: return "boundary_unclassified";
  }
  return "unknown";
}

double objective(const Configuration& q, const Point& p) {
  if (p.manifold_id != q.manifold().id()) throw Error(ErrorKind::InvalidInput, "objective: point on another manifold");
  return objective_raw(q, p.coords);
}

Tangent gradient_field(const Configuration& q, const Point& p, double cut_tol) {
  if (p.manifold_id != q.manifold().id()) throw Error(ErrorKind::InvalidInput, "gradient: point on another manifold");
  return Tangent{p, gradient_raw(q, p.coords, cut_tol)};
}

MeanResult karcher_descent(const Configuration& q, const Point& p0, double step, double tol, int max_iter,
                           std::vector<double>* trace) {
  const Manifold& m = q.manifold();
  if (p0.manifold_id != m.id()) throw Error(ErrorKind::InvalidInput, "karcher_descent: seed on another manifold");
  if (!(step > 0.0)) throw Error(ErrorKind::InvalidInput, "karcher_descent: step must be positive");

  auto grad_at = [&](const Vec& p) {
    try {
      return gradient_raw(q, p, kCutTol);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::CutLocus) throw;
      throw Error(ErrorKind::CutLocusEncountered, e.detail());
    }
  };

  Vec p = p0.coords;
  double f = objective_raw(q, p);
  Vec y = grad_at(p);
  double gnorm = std::sqrt(m.inner_raw(p, y, y));
  if (trace) trace->assign(1, f);

  int iterations = 0;
  while (gnorm >= tol) {
    if (iterations >= max_iter) {
      std::ostringstream msg;
      msg << "karcher_descent: " << max_iter << " iterations, |Y_Q| = " << gnorm;
      throw Error(ErrorKind::MaxIterExceeded, msg.str());
    }
    double t = step;
    bool accepted = false;
    Vec candidate;
    double fc = f;
    for (int halving = 0; halving < 60; ++halving, t *= 0.5) {
      candidate = m.exp_raw(p, t * y);
      fc = objective_raw(q, candidate);
      if (fc <= f + kDescentSlack * std::max(1.0, f)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      std::ostringstream msg;
      msg << "karcher_descent: line search stalled at |Y_Q| = " << gnorm;
      throw Error(ErrorKind::NoConvergence, msg.str());
    }
    p = std::move(candidate);
    f = fc;
    ++iterations;
    if (trace) trace->push_back(f);
    y = grad_at(p);
    gnorm = std::sqrt(m.inner_raw(p, y, y));
  }

  MeanResult out;
  out.minimizer = m.wrap(std::move(p));
  out.objective = f;
  out.grad_norm = gnorm;
  out.iterations = iterations;
  out.converged_runs = 1;
  return out;
}

MeanResult frechet_mean(const Configuration& q, double tol) {
  FrechetOptions options;
  options.tol = tol;
  return frechet_mean(q, options);
}

MeanResult frechet_mean(const Configuration& q, const FrechetOptions& options) {
  const Manifold& m = q.manifold();
  std::vector<Point> seeds = q.points();
  if (m.is_compact()) {
    std::mt19937_64 rng(options.seed);
    for (int i = 0; i < options.random_seeds; ++i) seeds.push_back(sampling::random_point(m, rng));
  }

  std::vector<MeanResult> runs;
  std::string last_error = "no seeds";
  for (const Point& seed : seeds) {
    try {
      runs.push_back(karcher_descent(q, seed, 1.0, options.tol, options.max_iter));
    } catch (const Error& e) {
      last_error = e.what();
    }
  }
  if (runs.empty()) throw Error(ErrorKind::NoConvergence, "frechet_mean: every start failed; last: " + last_error);

  const double tie = 10.0 * options.tol;
  double best_f = kInf;
  for (const MeanResult& r : runs) best_f = std::min(best_f, r.objective);
  const MeanResult* chosen = nullptr;
  for (const MeanResult& r : runs) {
    if (r.objective > best_f + tie) continue;
    if (!chosen || lexicographically_less(r.minimizer.coords, chosen->minimizer.coords)) chosen = &r;
  }

  MeanResult out = *chosen;
  out.converged_runs = static_cast<int>(runs.size());
  for (const MeanResult& r : runs) {
    const double d = m.dist_raw(out.minimizer.coords, r.minimizer.coords);
    out.all_runs_spread = std::max(out.all_runs_spread, d);
    if (r.objective > best_f + tie) {
      ++out.higher_critical_runs;
    } else {
      out.multistart_spread = std::max(out.multistart_spread, d);
    }
  }
  out.multistart_agreement = out.multistart_spread <= tie;
  out.afsari_certified = afsari_certificate(q).certified;
  const BarycenterCheck check = barycenter_check(q, out.minimizer, options.boundary_margin);
  out.barycenter_residual = check.residual;
  out.classification = check.classification;
  return out;
}

BarycenterCheck barycenter_check(const Configuration& q, const Point& p, double margin) {
  const Manifold& m = q.manifold();
  if (p.manifold_id != m.id()) throw Error(ErrorKind::InvalidInput, "barycenter_check: point on another manifold");
  BarycenterCheck out;
  for (const Point& x : q.points()) {
    if (m.cut_raw(p.coords, x.coords, kCutTol)) {
      throw Error(ErrorKind::CutLocus, "barycenter_check: a configuration point is an ordinary cut point of p");
    }
    if (m.cut_raw(p.coords, x.coords, margin)) out.classification = Classification::BoundaryUnclassified;
  }
  const Vec y = gradient_raw(q, p.coords, kCutTol);
  out.residual = std::sqrt(m.inner_raw(p.coords, y, y));
  return out;
}

AfsariCertificate afsari_certificate(const Configuration& q) {
  const Manifold& m = q.manifold();
  const auto& pts = q.points();
  auto radius_at = [&](const Vec& c, std::size_t* far) {
    double r = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double d = m.dist_raw(c, pts[i].coords);
      if (d > r || i == 0) {
        r = d;
        if (far) *far = i;
      }
    }
    return r;
  };

  Vec best = pts.front().coords;
  double best_r = radius_at(best, nullptr);
  for (const Point& p : pts) {
    const double r = radius_at(p.coords, nullptr);
    if (r < best_r) {
      best_r = r;
      best = p.coords;
    }
  }

  Vec c = best;
  for (int iter = 1; iter <= 200; ++iter) {
    std::size_t far = 0;
    const double r = radius_at(c, &far);
    if (r < best_r) {
      best_r = r;
      best = c;
    }
    if (r == 0.0) break;
    Vec v;
    try {
      v = m.log_raw(c, pts[far].coords, kCutTol);
    } catch (const Error&) {
      break;
    }
    c = m.exp_raw(c, v / static_cast<double>(iter + 1));
  }
  const double final_r = radius_at(c, nullptr);
  if (final_r < best_r) {
    best_r = final_r;
    best = c;
  }

  AfsariCertificate out;
  out.radius = best_r;
  out.center = m.wrap(best);
  const double r_cx = m.constants().r_cx;
  out.certified = std::isinf(r_cx) || best_r < r_cx - 1e-10;
  return out;
}

double forward_directional_derivative(const Manifold& manifold, const Point& q, const Point& p, const Tangent& v) {
  using Kind = Manifold::Kind;
  const Kind kind = manifold.kind();
  if (kind == Kind::Product) {
    throw Error(ErrorKind::UnsupportedManifold, "forward_directional_derivative: " + manifold.descriptor());
  }
  if (!manifold.in_cut_locus(p, q, kCutTol)) {
    return -2.0 * manifold.inner(p, v, manifold.log(p, q));
  }
  if (kind == Kind::Sphere) {
    // V_{q,p} is the whole radius-pi sphere of T_pM.
    return -2.0 * kPi * manifold.norm(p, v);
  }
  if (kind == Kind::SpecialOrthogonal) {
    manifold.norm(p, v);  // validates the base point
    const int n = manifold.order();
    const Mat u = as_matrix(p.coords, n);
    const Mat r = u.transpose() * as_matrix(q.coords, n);
    const Mat xv = u.transpose() * as_matrix(v.vec, n);
    return -2.0 * so_cut_sup(manifold, r, xv);
  }
  throw Error(ErrorKind::UnsupportedManifold, "forward_directional_derivative: " + manifold.descriptor());
}

}  // namespace karcher
