#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace karcher {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// A manifold point in embedding coordinates. `manifold_id` ties the point
/// to the Manifold that created it (see Manifold::id()).
struct Point {
  std::uint64_t manifold_id = 0;
  Vec coords;
};

/// Tangent vector in the ambient representation of T_base M.
struct Tangent {
  Point base;
  Vec vec;
};

/// Injectivity radius, sectional-curvature supremum and the derived
/// convexity-type radius r_cx = 1/2 min{r_inj, pi/sqrt(delta_sup)}.
struct MetricConstants {
  double r_inj = kInf;
  double delta_sup = 0.0;
  double r_cx = kInf;

  static MetricConstants from(double r_inj, double delta_sup);
};

/// 1/2 min{r_inj, pi/sqrt(delta_sup)}, with pi/sqrt(delta_sup) = +inf when
/// delta_sup <= 0. Infinities propagate.
double rcx_from_constants(double r_inj, double delta_sup);

struct SymEig {
  Mat vectors;  // columns are eigenvectors, det = +1
  Vec values;   // descending
};

/// Cyclic Jacobi eigensolver for small symmetric matrices.
/// Throws InvalidInput if `s` is not symmetric within 1e-12.
SymEig sym_eig(const Mat& s);

Mat skew_part(const Mat& a);
Mat sym_part(const Mat& a);

/// Matrix exponential of a skew-symmetric matrix (an orthogonal matrix).
Mat expm_skew(const Mat& x);

/// Absolute arguments of the eigenvalues of an orthogonal matrix, one entry
/// per eigenvalue (so each rotation block contributes its angle twice).
std::vector<double> principal_angles(const Mat& r);

/// sqrt(sum over rotation blocks of angle^2): the length of the principal
/// logarithm under the metric 1/2 tr(X^T Y).
double rotation_norm(const Mat& r);

/// Largest rotation angle of an orthogonal matrix, in [0, pi].
double max_rotation_angle(const Mat& r);

/// Principal logarithm of a rotation matrix. Throws CutLocus when some
/// rotation angle lies within `cut_tol` of pi.
Mat logm_rotation(const Mat& r, double cut_tol);

/// Deterministic 64-bit FNV-1a hash.
std::uint64_t fnv1a(const void* data, std::size_t size,
                    std::uint64_t seed = 14695981039346656037ULL);

}  // namespace karcher
