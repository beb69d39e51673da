#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "karcher/geom_core.hpp"

namespace karcher {

inline constexpr double kCutTol = 1e-8;

/// A complete Riemannian manifold from a small closed family:
///
///   Euclidean(n)      R^n, coords are the vector itself.
///   Sphere(n)         unit sphere S^n in R^{n+1}.
///   SO(m, k)          rotations, coords are the row-major m x m matrix;
///                     metric k * g_SO with g_SO(X, Y) = 1/2 tr(X^T Y) on
///                     the Lie algebra.
///   DiagPos(m)        positive diagonal matrices, coords are the diagonal;
///                     log-Euclidean metric <u, v>_d = sum u_i v_i / d_i^2.
///   Product(...)      Riemannian product, coords concatenated.
///
/// Tangent vectors use the ambient representation: v with <x, v> = 0 on the
/// sphere, V = U X with X skew on SO(m), raw R^m on DiagPos.
///
/// Descriptors are immutable after construction; all operations are const
/// and thread-safe.
class Manifold {
 public:
  enum class Kind { Euclidean, Sphere, SpecialOrthogonal, DiagPos, Product };

  static Manifold euclidean(int n);
  static Manifold sphere(int n);
  static Manifold special_orthogonal(int m, double k = 1.0);
  static Manifold diag_pos(int m);
  static Manifold product(std::vector<Manifold> factors);

  Kind kind() const { return kind_; }
  /// n for Euclidean/Sphere, m for SO/DiagPos, factor count for products.
  int order() const { return order_; }
  double scale() const { return scale_; }
  int dim() const { return dim_; }
  int ambient_size() const { return ambient_; }
  bool is_compact() const;
  const MetricConstants& constants() const { return constants_; }
  const std::vector<Manifold>& factors() const { return factors_; }
  /// Offset of factor i inside product coordinates.
  int factor_offset(std::size_t i) const { return offsets_.at(i); }
  /// Canonical textual descriptor, e.g. "product(so:2:k=1;diagpos:2)".
  const std::string& descriptor() const { return descriptor_; }
  std::uint64_t id() const { return id_; }

  /// Validates the defining constraints within 1e-10; throws InvalidInput.
  Point point(const Vec& coords) const;
  bool contains(const Vec& coords, double tol = 1e-10) const;
  /// Nearest valid point (normalization / orthogonal polar factor / abs).
  Point retract(const Vec& coords) const;
  /// Validates the tangent-space constraint within 1e-10; throws InvalidInput.
  Tangent tangent(const Point& base, const Vec& vec) const;
  Tangent zero_tangent(const Point& base) const;
  /// Orthogonal projection of an ambient vector onto T_base.
  Tangent project(const Point& base, const Vec& ambient) const;
  /// Metric-orthonormal basis of T_base (Gram-Schmidt on projected ambient
  /// basis vectors, in ambient order).
  std::vector<Tangent> tangent_basis(const Point& base) const;

  Point exp(const Point& p, const Tangent& v) const;
  /// Minimal geodesic velocity from p to q. Throws CutLocus if q lies within
  /// `cut_tol` of CL(p).
  Tangent log(const Point& p, const Point& q, double cut_tol = kCutTol) const;
  double dist(const Point& p, const Point& q) const;
  double inner(const Point& p, const Tangent& u, const Tangent& v) const;
  double norm(const Point& p, const Tangent& v) const;
  bool in_cut_locus(const Point& p, const Point& q, double tol = kCutTol) const;

  // Coordinate-level kernels. No validation; used in hot loops.
  Vec exp_raw(const Vec& p, const Vec& v) const;
  Vec log_raw(const Vec& p, const Vec& q, double cut_tol) const;
  double dist_raw(const Vec& p, const Vec& q) const;
  double inner_raw(const Vec& p, const Vec& u, const Vec& v) const;
  bool cut_raw(const Vec& p, const Vec& q, double tol) const;
  Vec project_raw(const Vec& p, const Vec& v) const;

  Point wrap(Vec coords) const { return Point{id_, std::move(coords)}; }

 private:
  Manifold() = default;
  void finalize();
  void check_point(const Point& p, const char* what) const;
  void check_tangent(const Point& p, const Tangent& v) const;

  Kind kind_ = Kind::Euclidean;
  int order_ = 0;
  double scale_ = 1.0;
  int dim_ = 0;
  int ambient_ = 0;
  MetricConstants constants_;
  std::vector<Manifold> factors_;
  std::vector<int> offsets_;
  std::string descriptor_;
  std::uint64_t id_ = 0;
};

/// Helpers for the SO(m) coordinate layout.
Mat as_matrix(const Vec& coords, int m);
Vec as_coords(const Mat& a);

Tangent operator+(const Tangent& a, const Tangent& b);
Tangent operator-(const Tangent& a, const Tangent& b);
Tangent operator*(double s, const Tangent& a);

}  // namespace karcher
