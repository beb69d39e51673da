#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/QR>

#include "karcher/manifold.hpp"

namespace karcher::sampling {

template <class Rng>
Vec gaussian(Rng& rng, Eigen::Index n, double sigma = 1.0) {
  std::normal_distribution<double> normal(0.0, sigma);
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

template <class Rng>
Vec uniform_sphere(Rng& rng, int n) {
  for (;;) {
    Vec v = gaussian(rng, n + 1);
    const double len = v.norm();
    if (len > 1e-12) return v / len;
  }
}

/// Haar-distributed rotation: QR of a Gaussian matrix with the sign fix,
/// followed by a column flip to land in SO(m).
template <class Rng>
Mat haar_rotation(Rng& rng, int m) {
  Mat a(m, m);
  for (int j = 0; j < m; ++j) a.col(j) = gaussian(rng, m);
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < m; ++i)
    if (r(i, i) < 0.0) q.col(i) *= -1.0;
  if (q.determinant() < 0.0) q.col(0) *= -1.0;
  return q;
}

/// Symmetric matrix with i.i.d. N(0, sigma^2) entries on and above the diagonal.
template <class Rng>
Mat symmetric_gaussian(Rng& rng, int m, double sigma = 1.0) {
  std::normal_distribution<double> normal(0.0, sigma);
  Mat a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) a(i, j) = a(j, i) = normal(rng);
  return a;
}

/// A point drawn from a fixed absolutely continuous law on the manifold:
/// uniform on spheres, Haar on SO(m), standard log-normal on DiagPos,
/// standard normal on Euclidean, independent on products.
template <class Rng>
Point random_point(const Manifold& manifold, Rng& rng) {
  switch (manifold.kind()) {
    case Manifold::Kind::Euclidean: return manifold.wrap(gaussian(rng, manifold.order()));
    case Manifold::Kind::Sphere: return manifold.wrap(uniform_sphere(rng, manifold.order()));
    case Manifold::Kind::SpecialOrthogonal:
      return manifold.wrap(as_coords(haar_rotation(rng, manifold.order())));
    case Manifold::Kind::DiagPos: return manifold.wrap(gaussian(rng, manifold.order()).array().exp().matrix());
    case Manifold::Kind::Product: {
      Vec out(manifold.ambient_size());
      const auto& factors = manifold.factors();
      for (std::size_t i = 0; i < factors.size(); ++i) {
        out.segment(manifold.factor_offset(i), factors[i].ambient_size()) = random_point(factors[i], rng).coords;
      }
      return manifold.wrap(std::move(out));
    }
  }
  return manifold.wrap(Vec::Zero(manifold.ambient_size()));
}

/// Random unit-norm tangent vector at p (Gaussian in an orthonormal basis).
template <class Rng>
Tangent random_unit_tangent(const Manifold& manifold, const Point& p, Rng& rng) {
  const auto basis = manifold.tangent_basis(p);
  Tangent v = manifold.zero_tangent(p);
  for (;;) {
    const Vec c = gaussian(rng, static_cast<Eigen::Index>(basis.size()));
    if (c.norm() < 1e-12) continue;
    for (std::size_t j = 0; j < basis.size(); ++j) v.vec += c(static_cast<Eigen::Index>(j)) * basis[j].vec;
    v.vec /= manifold.norm(p, v);
    return v;
  }
}

/// Point at geodesic distance < radius from center, uniform direction and
/// radius drawn as radius * u^(1/dim) (uniform in normal coordinates).
template <class Rng>
Point random_in_ball(const Manifold& manifold, const Point& center, double radius, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Tangent dir = random_unit_tangent(manifold, center, rng);
  const double r = radius * std::pow(unit(rng), 1.0 / manifold.dim());
  return manifold.exp(center, r * dir);
}

/// Von Mises-Fisher sample on S^2 around `mean` by inversion of the
/// cosine's marginal: w = 1 + log(u + (1 - u) e^{-2 kappa}) / kappa.
template <class Rng>
Vec von_mises_fisher_s2(const Vec& mean, double kappa, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  const double w = kappa > 0.0 ? 1.0 + std::log(u + (1.0 - u) * std::exp(-2.0 * kappa)) / kappa : 2.0 * u - 1.0;
  const double phi = 2.0 * std::numbers::pi * unit(rng);
  const double s = std::sqrt(std::max(0.0, 1.0 - w * w));
  // Orthonormal frame completing `mean`.
  Eigen::Vector3d m = mean.head<3>();
  Eigen::Vector3d a = std::abs(m.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
  Eigen::Vector3d e1 = (a - a.dot(m) * m).normalized();
  Eigen::Vector3d e2 = m.cross(e1);
  Eigen::Vector3d x = w * m + s * (std::cos(phi) * e1 + std::sin(phi) * e2);
  return x.normalized();
}

}  // namespace karcher::sampling
