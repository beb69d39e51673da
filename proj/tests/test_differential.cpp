#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "karcher/differential.hpp"
#include "karcher/frechet.hpp"
#include "karcher/sampling.hpp"

namespace karcher {
namespace {

Point euclid(const Manifold& e, std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return e.point(v);
}

TEST(FdGradient, SquaredNorm) {
  const Manifold e = Manifold::euclidean(2);
  const Tangent g = fd_gradient([](const Point& p) { return p.coords.squaredNorm(); }, e, euclid(e, {1.0, 0.0}));
  EXPECT_NEAR(g.vec(0), 2.0, 1e-8);
  EXPECT_NEAR(g.vec(1), 0.0, 1e-8);
}

TEST(FdGradient, ConstantFieldIsZero) {
  const Manifold s2 = Manifold::sphere(2);
  std::mt19937_64 rng(1);
  const Point p = sampling::random_point(s2, rng);
  EXPECT_LT(fd_gradient([](const Point&) { return 3.0; }, s2, p).vec.norm(), 1e-15);
}

TEST(FdGradient, SquaredDistanceOnSphere) {
  const Manifold s2 = Manifold::sphere(2);
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const Point q = sampling::random_point(s2, rng);
    const Point p = sampling::random_in_ball(s2, q, 2.5, rng);
    const auto f = [&](const Point& x) {
      const double d = s2.dist(x, q);
      return d * d;
    };
    const Tangent g = fd_gradient(f, s2, p);
    EXPECT_LT((g.vec + 2.0 * s2.log(p, q).vec).norm(), 1e-6);
  }
}

TEST(FdGradient, SecondOrderConvergence) {
  const Manifold e = Manifold::euclidean(2);
  const auto f = [](const Point& p) {
    const double x = p.coords(0), y = p.coords(1);
    return x * x * x + x * y * y;
  };
  const Point p = euclid(e, {0.7, -0.4});
  Vec exact(2);
  exact << 3 * 0.49 + 0.16, 2 * 0.7 * -0.4;
  const double e1 = (fd_gradient(f, e, p, 1e-2).vec - exact).norm();
  const double e2 = (fd_gradient(f, e, p, 5e-3).vec - exact).norm();
  EXPECT_NEAR(e1 / e2, 4.0, 0.2);
}

TEST(FdHessian, SquaredNormAtOrigin) {
  const Manifold e = Manifold::euclidean(3);
  EXPECT_NEAR(fd_hessian_min_abs_eig([](const Point& p) { return p.coords.squaredNorm(); }, e, euclid(e, {0, 0, 0})),
              2.0, 1e-4);
}

TEST(FdHessian, SaddleOfCoordinateProduct) {
  // Hessian of x*y is [[0, 1], [1, 0]] with eigenvalues +1 and -1.
  const Manifold e = Manifold::euclidean(2);
  const auto f = [](const Point& p) { return p.coords(0) * p.coords(1); };
  const Mat h = fd_hessian(f, e, euclid(e, {0, 0}));
  EXPECT_NEAR(h(0, 1), 1.0, 1e-6);
  EXPECT_NEAR(h(0, 0), 0.0, 1e-6);
  EXPECT_NEAR(fd_hessian_min_abs_eig(f, e, euclid(e, {0, 0})), 1.0, 1e-4);
}

TEST(FdHessian, PositiveAtCertifiedSphereMean) {
  const Manifold s2 = Manifold::sphere(2);
  std::mt19937_64 rng(3);
  const Point c = sampling::random_point(s2, rng);
  std::vector<Point> pts;
  for (int i = 0; i < 5; ++i) pts.push_back(sampling::random_in_ball(s2, c, 0.4, rng));
  const Configuration q(s2, pts);
  const MeanResult r = frechet_mean(q);
  ASSERT_TRUE(r.afsari_certified);
  const auto f = [&](const Point& p) { return objective(q, p); };
  ASSERT_LT(fd_gradient(f, s2, r.minimizer).vec.norm(), 1e-6);
  EXPECT_GT(fd_hessian_min_abs_eig(f, s2, r.minimizer), 0.1);
}

}  // namespace
}  // namespace karcher
