#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "karcher/frechet.hpp"
#include "karcher/manifold.hpp"

namespace karcher {

/// A free isometric action of a finite group G on a cover manifold.
/// Elements are indexed 0..|G|-1 with the identity at index 0;
/// compose(a, b) is the index of a*b.
class FiniteAction {
 public:
  using Isometry = std::function<Vec(const Vec&)>;

  struct Element {
    std::string label;
    Isometry map;
    /// Closed-form floor of the displacement d(p, h.p) when it is the
    /// infimum over the cover (e.g. constant displacement); empty otherwise.
    std::optional<double> displacement_floor;
  };

  FiniteAction(Manifold cover, std::vector<Element> elements, std::vector<std::vector<int>> table,
               std::string name);

  const Manifold& cover() const { return cover_; }
  const std::string& name() const { return name_; }
  int order() const { return static_cast<int>(elements_.size()); }
  const Element& element(int h) const { return elements_.at(static_cast<std::size_t>(h)); }
  int compose(int a, int b) const { return table_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]; }
  int inverse(int h) const { return inverse_[static_cast<std::size_t>(h)]; }

  Point act(int h, const Point& p) const;
  Vec act_raw(int h, const Vec& p) const { return elements_[static_cast<std::size_t>(h)].map(p); }
  std::vector<Point> orbit(const Point& p) const;

  /// Checks identity-first, closure, associativity and inverses on the table.
  bool table_is_group() const;

 private:
  Manifold cover_;
  std::vector<Element> elements_;
  std::vector<std::vector<int>> table_;
  std::vector<int> inverse_;
  std::string name_;
};

/// The antipodal Z2 action on S^n; the quotient is RP^n.
FiniteAction antipodal_action(int n);

/// A point of M = cover / G, stored as any representative on the cover.
struct QuotientPoint {
  Point representative;
};

inline constexpr double kQuotientEqualTol = 1e-9;

bool same_orbit(const FiniteAction& action, const QuotientPoint& a, const QuotientPoint& b,
                double tol = kQuotientEqualTol);

struct BetaEstimate {
  double value = kInf;
  bool exact = false;
};

/// inf over p and h != e of d(p, h.p). Exact when every non-identity
/// element carries a displacement floor; otherwise the minimum over 1e5
/// sampled points, flagged approximate.
BetaEstimate beta(const FiniteAction& action);

/// d(p, q) = min_h d(p.rep, h.q.rep).
double quotient_dist(const FiniteAction& action, const QuotientPoint& p, const QuotientPoint& q);

/// d_evt(q, p~) = min_h d(h.q.rep, p~).
double d_evt(const FiniteAction& action, const QuotientPoint& q, const Point& cover_point);

/// Index of the element h minimizing d(h.q, p~); ties go to the lowest index.
int best_alignment(const FiniteAction& action, const Vec& q, const Vec& cover_point, double* distance = nullptr);

/// f~_Q(p~) = (1/N) sum d_evt(q_i, p~)^2.
double equivariant_objective(const FiniteAction& action, const std::vector<QuotientPoint>& q,
                             const Point& cover_point);

struct EfmOptions {
  double tol = kMeanTol;
  double inner_tol = 1e-11;
  int max_outer = 500;
  /// Starting cover point; defaults to the representative with the lowest
  /// equivariant objective.
  std::optional<Point> initial;
};

struct EfmResult {
  Point minimizer;
  std::vector<Point> orbit;
  QuotientPoint downstairs_mean;
  double objective = 0.0;
  /// Lifts h_i . q_i.rep aligned to the minimizer, and the chosen h_i.
  std::vector<Point> aligned_lifts;
  std::vector<int> alignment;
  int outer_iterations = 0;
  /// Objective after each outer iteration (nonincreasing).
  std::vector<double> objective_trace;
};

/// Minimizes f~_Q by alternating alignment and a Karcher step on the cover.
/// Converged once the objective decrease is below tol and the alignment has
/// been stable for two consecutive outer iterations. Throws NoConvergence.
EfmResult efm_solve(const FiniteAction& action, const std::vector<QuotientPoint>& q, const EfmOptions& options = {});

struct RadiusRelations {
  double r_inj = kInf;
  double r_cx = kInf;
};

/// r_inj(M) = min{r_inj(cover), beta/2}, r_cx(M) = min{r_cx(cover), beta/4}.
RadiusRelations radius_relations(const MetricConstants& cover, double beta);
RadiusRelations radius_relations(const FiniteAction& action);

/// Equivariantly labelled lifts of a configuration inside B_r(center):
/// entry h is Q~^(h), the lifts lying in the ball around h.c~_e, where
/// c~_e = center.representative. Built as Q~^(h) = h . Q~^(e), so
/// h1 . Q~^(h2) = Q~^(h1 h2) holds exactly.
/// Throws RadiusTooLarge (r >= r_inj(M)), LiftAmbiguous, or InvalidInput
/// when some q_i is not within r of the center.
std::vector<Configuration> even_cover_lifts(const FiniteAction& action, const QuotientPoint& center, double r,
                                            const std::vector<QuotientPoint>& q);

}  // namespace karcher
