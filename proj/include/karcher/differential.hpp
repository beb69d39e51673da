#pragma once

#include <functional>

#include "karcher/manifold.hpp"

namespace karcher {

using ScalarField = std::function<double(const Point&)>;

inline constexpr double kFdStep = 1e-5;

/// Riemannian gradient by central differences along the metric-orthonormal
/// tangent basis: grad f = sum_j (f(exp(h e_j)) - f(exp(-h e_j))) / 2h * e_j.
Tangent fd_gradient(const ScalarField& f, const Manifold& manifold, const Point& p, double h = kFdStep);

/// Hessian of f o exp_p in normal coordinates (the tangent basis above).
Mat fd_hessian(const ScalarField& f, const Manifold& manifold, const Point& p, double h = kFdStep);

/// Smallest |eigenvalue| of fd_hessian. Meaningful at approximate critical
/// points, where it equals the Riemannian Hessian's.
double fd_hessian_min_abs_eig(const ScalarField& f, const Manifold& manifold, const Point& p,
                              double h = kFdStep);

}  // namespace karcher
