#include "karcher/differential.hpp"

#include <algorithm>
#include <cmath>

namespace karcher {

Tangent fd_gradient(const ScalarField& f, const Manifold& manifold, const Point& p, double h) {
  const auto basis = manifold.tangent_basis(p);
  Tangent grad = manifold.zero_tangent(p);
  for (const Tangent& e : basis) {
    const double plus = f(manifold.exp(p, h * e));
    const double minus = f(manifold.exp(p, -h * e));
    grad.vec += ((plus - minus) / (2.0 * h)) * e.vec;
  }
  return grad;
}

Mat fd_hessian(const ScalarField& f, const Manifold& manifold, const Point& p, double h) {
  const auto basis = manifold.tangent_basis(p);
  const auto n = static_cast<Eigen::Index>(basis.size());
  auto at = [&](Eigen::Index i, double si, Eigen::Index j, double sj) {
    Tangent v = manifold.zero_tangent(p);
    if (i >= 0) v.vec += si * basis[static_cast<std::size_t>(i)].vec;
    if (j >= 0) v.vec += sj * basis[static_cast<std::size_t>(j)].vec;
    return f(manifold.exp(p, v));
  };
  const double f0 = f(p);
  Mat hess(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    hess(i, i) = (at(i, h, -1, 0.0) - 2.0 * f0 + at(i, -h, -1, 0.0)) / (h * h);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = (at(i, h, j, h) - at(i, h, j, -h) - at(i, -h, j, h) + at(i, -h, j, -h)) / (4.0 * h * h);
      hess(i, j) = hess(j, i) = v;
    }
  }
  return hess;
}

double fd_hessian_min_abs_eig(const ScalarField& f, const Manifold& manifold, const Point& p, double h) {
  const Mat hess = fd_hessian(f, manifold, p, h);
  if (hess.size() == 0) return 0.0;
  const SymEig eig = sym_eig(hess);
  return eig.values.cwiseAbs().minCoeff();
}

}  // namespace karcher
