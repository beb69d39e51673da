#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "karcher/manifold.hpp"

namespace karcher {

/// Ordered N-tuple of points on one manifold, N >= 1.
class Configuration {
 public:
  Configuration(Manifold manifold, std::vector<Point> points);

  const Manifold& manifold() const { return manifold_; }
  const std::vector<Point>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }

 private:
  Manifold manifold_;
  std::vector<Point> points_;
};

enum class Classification { Short, AlmostShort, BoundaryUnclassified };

const char* to_string(Classification c) noexcept;

struct MeanResult {
  Point minimizer;
  double objective = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool multistart_agreement = true;
  bool afsari_certified = false;
  double barycenter_residual = 0.0;
  Classification classification = Classification::Short;
  /// Multistart bookkeeping. Agreement and multistart_spread refer to the
  /// runs whose objective is within 10 tol of the best one; runs that stop
  /// at a higher critical point (a non-global local minimum, which exists
  /// e.g. on SO(3) far from the data) are counted in higher_critical_runs
  /// and only enter all_runs_spread.
  int converged_runs = 0;
  double multistart_spread = 0.0;
  int higher_critical_runs = 0;
  double all_runs_spread = 0.0;
};

inline constexpr double kMeanTol = 1e-10;
inline constexpr int kMaxIter = 10000;
inline constexpr double kBoundaryMargin = 1e-6;

/// f_Q(p) = (1/N) sum_i d(p, q_i)^2.
double objective(const Configuration& q, const Point& p);

/// Y_Q(p) = (1/N) sum_i log_p(q_i). The Riemannian gradient of f_Q is
/// -2 Y_Q. Throws CutLocus if some q_i lies in CL(p).
Tangent gradient_field(const Configuration& q, const Point& p, double cut_tol = kCutTol);

/// Karcher iteration p <- exp_p(step * Y_Q(p)) with step halving whenever
/// f_Q fails to decrease. Stops once |Y_Q(p)| < tol.
///
/// Accepted steps never raise f_Q by more than 1e-14 * max(1, f_Q); that
/// slack absorbs round-off once the decrease drops below double precision.
/// If `trace` is non-null it receives f_Q at p0 and after every accepted
/// step. Throws MaxIterExceeded, CutLocusEncountered (an iterate hit the cut
/// locus of some q_i) or NoConvergence (the line search stalled).
MeanResult karcher_descent(const Configuration& q, const Point& p0, double step = 1.0, double tol = kMeanTol,
                           int max_iter = kMaxIter, std::vector<double>* trace = nullptr);

struct FrechetOptions {
  double tol = kMeanTol;
  int max_iter = kMaxIter;
  /// Extra seeds on compact manifolds, drawn from a fixed-seed generator.
  int random_seeds = 20;
  std::uint64_t seed = 0x5eedULL;
  double boundary_margin = kBoundaryMargin;
};

/// Multistart Karcher descent from every data point (plus random seeds on
/// compact manifolds). Returns the lowest-objective converged run; ties
/// within 10 tol go to the lexicographically smallest coordinates.
MeanResult frechet_mean(const Configuration& q, const FrechetOptions& options = {});
MeanResult frechet_mean(const Configuration& q, double tol);

struct BarycenterCheck {
  double residual = 0.0;
  Classification classification = Classification::Short;
};

/// residual = |(1/N) sum log_p(q_i)|. Points within kCutTol of CL(p) are
/// ordinary cut points (throws CutLocus); points within `margin` of CL(p)
/// make the classification BoundaryUnclassified.
BarycenterCheck barycenter_check(const Configuration& q, const Point& p, double margin = kBoundaryMargin);

struct AfsariCertificate {
  bool certified = false;
  std::optional<Point> center;
  double radius = kInf;
};

/// Looks for a ball of radius < r_cx containing every q_i. Candidate centers
/// are the q_i and a 200-step subgradient 1-center refinement. A false
/// result means "not certified", not "not unique".
AfsariCertificate afsari_certificate(const Configuration& q);

/// One-sided derivative of r_q^2 at p along v:
/// -2 sup { <v, v'> : |v'| = d(p, q), exp_p(v') = q }.
/// Supported on Euclidean, DiagPos, Sphere and SO(m); throws
/// UnsupportedManifold otherwise.
double forward_directional_derivative(const Manifold& manifold, const Point& q, const Point& p, const Tangent& v);

}  // namespace karcher
