#include "karcher/equivariant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "karcher/errors.hpp"
#include "karcher/sampling.hpp"

namespace karcher {

namespace {

constexpr int kBetaSamples = 100000;

void check_on_cover(const FiniteAction& action, const Point& p) {
  if (p.manifold_id != action.cover().id()) {
    throw Error(ErrorKind::InvalidInput, "point is not on the cover " + action.cover().descriptor());
  }
}

}  // namespace

FiniteAction::FiniteAction(Manifold cover, std::vector<Element> elements, std::vector<std::vector<int>> table,
                           std::string name)
    : cover_(std::move(cover)), elements_(std::move(elements)), table_(std::move(table)), name_(std::move(name)) {
  const auto n = elements_.size();
  if (n == 0 || table_.size() != n) throw Error(ErrorKind::InvalidInput, "group table does not match element list");
  for (const auto& row : table_) {
    if (row.size() != n) throw Error(ErrorKind::InvalidInput, "group table is not square");
    for (int v : row)
      if (v < 0 || v >= static_cast<int>(n)) throw Error(ErrorKind::InvalidInput, "group table entry out of range");
  }
  inverse_.assign(n, -1);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (table_[a][b] == 0) inverse_[a] = static_cast<int>(b);
  if (std::find(inverse_.begin(), inverse_.end(), -1) != inverse_.end()) {
    throw Error(ErrorKind::InvalidInput, "group table lacks inverses");
  }
}

Point FiniteAction::act(int h, const Point& p) const {
  check_on_cover(*this, p);
  return cover_.wrap(act_raw(h, p.coords));
}

std::vector<Point> FiniteAction::orbit(const Point& p) const {
  std::vector<Point> out;
  out.reserve(elements_.size());
  for (int h = 0; h < order(); ++h) out.push_back(act(h, p));
  return out;
}

bool FiniteAction::table_is_group() const {
  const int n = order();
  for (int a = 0; a < n; ++a) {
    if (compose(0, a) != a || compose(a, 0) != a) return false;
    if (compose(a, inverse(a)) != 0 || compose(inverse(a), a) != 0) return false;
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (compose(compose(a, b), c) != compose(a, compose(b, c))) return false;
  }
  return true;
}

FiniteAction antipodal_action(int n) {
  Manifold sphere = Manifold::sphere(n);
  std::vector<FiniteAction::Element> elements{
      {"e", [](const Vec& x) { return x; }, std::nullopt},
      {"-1", [](const Vec& x) { return Vec(-x); }, std::numbers::pi},
  };
  return FiniteAction(std::move(sphere), std::move(elements), {{0, 1}, {1, 0}},
                      "antipodal:" + std::to_string(n));
}

bool same_orbit(const FiniteAction& action, const QuotientPoint& a, const QuotientPoint& b, double tol) {
  return quotient_dist(action, a, b) <= tol;
}

BetaEstimate beta(const FiniteAction& action) {
  BetaEstimate out;
  if (action.order() < 2) return out;
  bool exact = true;
  double floor = kInf;
  for (int h = 1; h < action.order(); ++h) {
    const auto& d = action.element(h).displacement_floor;
    if (!d) {
      exact = false;
      break;
    }
    floor = std::min(floor, *d);
  }
  if (exact) return BetaEstimate{floor, true};

  std::mt19937_64 rng(0xbe7aULL);
  const Manifold& cover = action.cover();
  double best = kInf;
  for (int s = 0; s < kBetaSamples; ++s) {
    const Point p = sampling::random_point(cover, rng);
    for (int h = 1; h < action.order(); ++h) best = std::min(best, cover.dist_raw(p.coords, action.act_raw(h, p.coords)));
  }
  return BetaEstimate{best, false};
}

int best_alignment(const FiniteAction& action, const Vec& q, const Vec& cover_point, double* distance) {
  const Manifold& cover = action.cover();
  int best_h = 0;
  double best = kInf;
  for (int h = 0; h < action.order(); ++h) {
    const double d = cover.dist_raw(action.act_raw(h, q), cover_point);
    if (d < best) {
      best = d;
      best_h = h;
    }
  }
  if (distance) *distance = best;
  return best_h;
}

double quotient_dist(const FiniteAction& action, const QuotientPoint& p, const QuotientPoint& q) {
  check_on_cover(action, p.representative);
  check_on_cover(action, q.representative);
  double d = kInf;
  best_alignment(action, q.representative.coords, p.representative.coords, &d);
  return d;
}

double d_evt(const FiniteAction& action, const QuotientPoint& q, const Point& cover_point) {
  check_on_cover(action, q.representative);
  check_on_cover(action, cover_point);
  double d = kInf;
  best_alignment(action, q.representative.coords, cover_point.coords, &d);
  return d;
}

double equivariant_objective(const FiniteAction& action, const std::vector<QuotientPoint>& q,
                             const Point& cover_point) {
  if (q.empty()) throw Error(ErrorKind::InvalidInput, "equivariant objective needs N >= 1");
  double sum = 0.0;
  for (const QuotientPoint& x : q) {
    const double d = d_evt(action, x, cover_point);
    sum += d * d;
  }
  return sum / static_cast<double>(q.size());
}

EfmResult efm_solve(const FiniteAction& action, const std::vector<QuotientPoint>& q, const EfmOptions& options) {
  if (q.empty()) throw Error(ErrorKind::InvalidInput, "efm_solve needs N >= 1");
  const Manifold& cover = action.cover();
  for (const QuotientPoint& x : q) check_on_cover(action, x.representative);

  Point p;
  if (options.initial) {
    check_on_cover(action, *options.initial);
    p = *options.initial;
  } else {
    double best = kInf;
    for (const QuotientPoint& x : q) {
      const double f = equivariant_objective(action, q, x.representative);
      if (f < best) {
        best = f;
        p = x.representative;
      }
    }
  }

  auto align = [&](const Point& at, std::vector<int>& hs, std::vector<Point>& lifts) {
    hs.resize(q.size());
    lifts.resize(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
      hs[i] = best_alignment(action, q[i].representative.coords, at.coords);
      lifts[i] = cover.wrap(action.act_raw(hs[i], q[i].representative.coords));
    }
  };

  EfmResult out;
  double f_prev = equivariant_objective(action, q, p);
  std::vector<int> prev_alignment;
  int stable = 0;
  bool converged = false;
  std::vector<int> hs;
  std::vector<Point> lifts;
  for (int outer = 1; outer <= options.max_outer; ++outer) {
    align(p, hs, lifts);
    stable = (hs == prev_alignment) ? stable + 1 : 0;
    MeanResult step;
    try {
      step = karcher_descent(Configuration(cover, lifts), p, 1.0, options.inner_tol);
    } catch (const Error& e) {
      throw Error(ErrorKind::NoConvergence, std::string("efm_solve: inner Karcher step failed: ") + e.what());
    }
    p = step.minimizer;
    const double f = equivariant_objective(action, q, p);
    out.objective_trace.push_back(f);
    out.outer_iterations = outer;
    const double decrease = f_prev - f;
    f_prev = f;
    prev_alignment = hs;
    if (decrease < options.tol && stable >= 1) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "efm_solve: no convergence after " << options.max_outer << " outer iterations";
    throw Error(ErrorKind::NoConvergence, msg.str());
  }

  align(p, out.alignment, out.aligned_lifts);
  out.minimizer = p;
  out.objective = f_prev;
  out.orbit = action.orbit(p);
  out.downstairs_mean = QuotientPoint{p};
  return out;
}

RadiusRelations radius_relations(const MetricConstants& cover, double beta_value) {
  return RadiusRelations{std::min(cover.r_inj, beta_value / 2.0), std::min(cover.r_cx, beta_value / 4.0)};
}

RadiusRelations radius_relations(const FiniteAction& action) {
  return radius_relations(action.cover().constants(), beta(action).value);
}

std::vector<Configuration> even_cover_lifts(const FiniteAction& action, const QuotientPoint& center, double r,
                                            const std::vector<QuotientPoint>& q) {
  const Manifold& cover = action.cover();
  check_on_cover(action, center.representative);
  const RadiusRelations radii = radius_relations(action);
  if (!(r < radii.r_inj)) {
    std::ostringstream msg;
    msg << "even_cover_lifts: r = " << r << " >= r_inj(M) = " << radii.r_inj;
    throw Error(ErrorKind::RadiusTooLarge, msg.str());
  }
  if (q.empty()) throw Error(ErrorKind::InvalidInput, "even_cover_lifts needs N >= 1");

  const Vec& c = center.representative.coords;
  std::vector<Point> base;
  base.reserve(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    check_on_cover(action, q[i].representative);
    int found = -1;
    for (int h = 0; h < action.order(); ++h) {
      const Vec lift = action.act_raw(h, q[i].representative.coords);
      if (cover.dist_raw(lift, c) < r) {
        if (found >= 0) {
          throw Error(ErrorKind::LiftAmbiguous, "even_cover_lifts: two fiber points of q_" + std::to_string(i) +
                                                    " inside one covering ball");
        }
        found = h;
        base.push_back(cover.wrap(lift));
      }
    }
    if (found < 0) {
      throw Error(ErrorKind::InvalidInput, "even_cover_lifts: q_" + std::to_string(i) + " is not inside B_r(center)");
    }
  }

  std::vector<Configuration> out;
  out.reserve(static_cast<std::size_t>(action.order()));
  for (int h = 0; h < action.order(); ++h) {
    std::vector<Point> lifted;
    lifted.reserve(base.size());
    for (const Point& b : base) lifted.push_back(cover.wrap(action.act_raw(h, b.coords)));
    out.emplace_back(cover, std::move(lifted));
  }
  return out;
}

}  // namespace karcher
