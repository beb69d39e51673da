#pragma once

// Reference computations used by the tests. They deliberately avoid the
// library's own kernels: closed-form trigonometry, brute-force enumeration
// and grid search instead of Jacobi sweeps, Schur logs or Karcher descent.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

/// Eigenvalues of a symmetric 3x3 matrix, descending, by the trigonometric
/// solution of the characteristic cubic.
inline std::array<double, 3> sym3_eigenvalues(const Eigen::Matrix3d& a) {
  const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  const double q = a.trace() / 3.0;
  if (p1 == 0.0) {
    std::array<double, 3> d{a(0, 0), a(1, 1), a(2, 2)};
    std::sort(d.begin(), d.end(), std::greater<>());
    return d;
  }
  const double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) + (a(2, 2) - q) * (a(2, 2) - q) +
                    2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  const Eigen::Matrix3d b = (a - q * Eigen::Matrix3d::Identity()) / p;
  const double r = std::clamp(b.determinant() / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * kPi / 3.0);
  return {e1, 3.0 * q - e1 - e3, e3};
}

/// Rotation by theta in the plane.
inline Eigen::Matrix2d rot2(double theta) {
  Eigen::Matrix2d r;
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

/// Rodrigues' formula for the rotation about unit `axis` by `angle`.
inline Eigen::Matrix3d rodrigues(const Eigen::Vector3d& axis, double angle) {
  Eigen::Matrix3d k;
  k << 0, -axis.z(), axis.y(), axis.z(), 0, -axis.x(), -axis.y(), axis.x(), 0;
  return Eigen::Matrix3d::Identity() + std::sin(angle) * k + (1.0 - std::cos(angle)) * k * k;
}

/// Rotation angle of a 3x3 rotation from its trace.
inline double so3_angle(const Eigen::Matrix3d& r) { return std::acos(std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0)); }

/// Great-circle distance from the chord length (stable for small angles).
inline double sphere_dist(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double chord = (a - b).norm();
  return 2.0 * std::asin(std::min(1.0, chord / 2.0));
}

inline Eigen::Vector3d spherical(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

/// Minimizer of f over S^2 by a dense latitude-longitude grid followed by
/// repeated local grid refinement in a tangent chart around the incumbent.
inline Eigen::Vector3d sphere_grid_minimize(const std::function<double(const Eigen::Vector3d&)>& f, int levels = 12) {
  Eigen::Vector3d best = Eigen::Vector3d::UnitZ();
  double fbest = f(best);
  const int nt = 180, np = 360;
  for (int i = 0; i <= nt; ++i)
    for (int j = 0; j < np; ++j) {
      const Eigen::Vector3d x = spherical(kPi * i / nt, 2.0 * kPi * j / np);
      const double v = f(x);
      if (v < fbest) {
        fbest = v;
        best = x;
      }
    }
  double half = kPi / nt * 2.0;
  for (int level = 0; level < levels; ++level) {
    const Eigen::Vector3d a = std::abs(best.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
    const Eigen::Vector3d e1 = (a - a.dot(best) * best).normalized();
    const Eigen::Vector3d e2 = best.cross(e1);
    const Eigen::Vector3d center = best;
    const int n = 10;
    for (int i = -n; i <= n; ++i)
      for (int j = -n; j <= n; ++j) {
        const Eigen::Vector3d x = (center + half * (i * e1 + j * e2) / n).normalized();
        const double v = f(x);
        if (v < fbest) {
          fbest = v;
          best = x;
        }
      }
    half *= 0.25;
  }
  return best;
}

/// Every m x m matrix with entries in {-1, 0, 1}, exactly one nonzero per row
/// and column, and determinant +1, by exhaustive search over 3^(m*m) fillings.
inline std::vector<Eigen::MatrixXd> brute_force_signed_permutations(int m) {
  std::vector<Eigen::MatrixXd> out;
  const int cells = m * m;
  long total = 1;
  for (int i = 0; i < cells; ++i) total *= 3;
  for (long code = 0; code < total; ++code) {
    Eigen::MatrixXd h(m, m);
    long c = code;
    for (int i = 0; i < cells; ++i) {
      h(i / m, i % m) = static_cast<double>(c % 3) - 1.0;
      c /= 3;
    }
    bool ok = true;
    for (int i = 0; i < m && ok; ++i) ok = h.row(i).cwiseAbs().sum() == 1.0 && h.col(i).cwiseAbs().sum() == 1.0;
    if (ok && std::abs(h.determinant() - 1.0) < 1e-12) out.push_back(h);
  }
  return out;
}

/// Length of t -> curve(t), t in [0, 1], under the norm `speed_norm` applied
/// to central-difference velocities, by the composite midpoint rule.
inline double curve_length(const std::function<Eigen::MatrixXd(double)>& curve,
                           const std::function<double(const Eigen::MatrixXd&, const Eigen::MatrixXd&)>& speed_norm,
                           int steps = 2000) {
  double len = 0.0;
  const double dt = 1.0 / steps, h = 1e-6;
  for (int i = 0; i < steps; ++i) {
    const double t = (i + 0.5) * dt;
    const Eigen::MatrixXd at = curve(t);
    const Eigen::MatrixXd vel = (curve(t + h) - curve(t - h)) / (2.0 * h);
    len += speed_norm(at, vel) * dt;
  }
  return len;
}

}  // namespace oracle
