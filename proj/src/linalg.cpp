#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "karcher/errors.hpp"
#include "karcher/geom_core.hpp"

namespace karcher {

namespace {

constexpr double kPi = std::numbers::pi;

// Off-diagonal Frobenius norm of a square matrix.
double off_norm(const Mat& a) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (i != j) sum += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(sum);
}

Mat so2_exp(double theta) {
  Mat r(2, 2);
  const double c = std::cos(theta), s = std::sin(theta);
  r << c, -s, s, c;
  return r;
}

Mat so3_exp(const Mat& x) {
  const Eigen::Vector3d w(x(2, 1), x(0, 2), x(1, 0));
  const double theta = w.norm();
  Mat k = 0.5 * (x - x.transpose());
  Mat k2 = k * k;
  double a, b;
  if (theta < 1e-4) {
    const double t2 = theta * theta;
    a = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
    b = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / (theta * theta);
  }
  return Mat::Identity(3, 3) + a * k + b * k2;
}

// Scaling and squaring with a truncated Taylor series.
Mat general_exp(const Mat& x) {
  const Eigen::Index n = x.rows();
  const double norm = x.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.25) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.25)));
  const Mat y = x / std::ldexp(1.0, squarings);
  Mat result = Mat::Identity(n, n);
  Mat term = Mat::Identity(n, n);
  for (int k = 1; k <= 30; ++k) {
    term = term * y / static_cast<double>(k);
    result += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

std::vector<double> schur_arguments(const Mat& r) {
  Eigen::ComplexSchur<Mat> schur(r);
  const auto diag = schur.matrixT().diagonal();
  std::vector<double> out(static_cast<std::size_t>(diag.size()));
  for (Eigen::Index i = 0; i < diag.size(); ++i) out[static_cast<std::size_t>(i)] = std::arg(diag(i));
  return out;
}

Mat schur_log(const Mat& r, double cut_tol) {
  using CMat = Eigen::MatrixXcd;
  Eigen::ComplexSchur<Mat> schur(r);
  const CMat& t = schur.matrixT();
  const CMat& z = schur.matrixU();
  const Eigen::Index n = r.rows();
  Eigen::VectorXcd log_diag(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double theta = std::arg(t(i, i));
    if (std::abs(theta) > kPi - cut_tol) {
      std::ostringstream msg;
      msg << "rotation angle " << std::abs(theta) << " within " << cut_tol << " of pi";
      throw Error(ErrorKind::CutLocus, msg.str());
    }
    log_diag(i) = std::complex<double>(0.0, theta);
  }
  const CMat l = z * log_diag.asDiagonal() * z.adjoint();
  return skew_part(l.real());
}

}  // namespace

MetricConstants MetricConstants::from(double r_inj, double delta_sup) {
  return MetricConstants{r_inj, delta_sup, rcx_from_constants(r_inj, delta_sup)};
}

double rcx_from_constants(double r_inj, double delta_sup) {
  const double curvature_bound = delta_sup <= 0.0 ? kInf : kPi / std::sqrt(delta_sup);
  return 0.5 * std::min(r_inj, curvature_bound);
}

SymEig sym_eig(const Mat& s) {
  if (s.rows() != s.cols() || s.rows() == 0) {
    throw Error(ErrorKind::InvalidInput, "sym_eig needs a nonempty square matrix");
  }
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorKind::InvalidInput, "sym_eig input is not symmetric");
  }
  const Eigen::Index n = s.rows();
  Mat a = sym_part(s);
  Mat v = Mat::Identity(n, n);
  const double stop = 1e-13 * std::max(1.0, a.norm());

  for (int sweep = 0; sweep < 100 && off_norm(a) >= stop; ++sweep) {
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });
  SymEig out{Mat(n, n), Vec(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
    out.vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  if (out.vectors.determinant() < 0.0) out.vectors.col(n - 1) *= -1.0;
  return out;
}

Mat skew_part(const Mat& a) { return 0.5 * (a - a.transpose()); }

Mat sym_part(const Mat& a) { return 0.5 * (a + a.transpose()); }

Mat expm_skew(const Mat& x) {
  switch (x.rows()) {
    case 1: return Mat::Identity(1, 1);
    case 2: return so2_exp(0.5 * (x(1, 0) - x(0, 1)));
    case 3: return so3_exp(x);
    default: return general_exp(skew_part(x));
  }
}

std::vector<double> principal_angles(const Mat& r) {
  switch (r.rows()) {
    case 1: return {0.0};
    case 2: {
      const double theta = std::abs(std::atan2(0.5 * (r(1, 0) - r(0, 1)), 0.5 * (r(0, 0) + r(1, 1))));
      return {theta, theta};
    }
    case 3: {
      const double c = 0.5 * (r.trace() - 1.0);
      const Eigen::Vector3d w(0.5 * (r(2, 1) - r(1, 2)), 0.5 * (r(0, 2) - r(2, 0)),
                              0.5 * (r(1, 0) - r(0, 1)));
      const double theta = std::atan2(w.norm(), c);
      return {theta, theta, 0.0};
    }
    default: {
      auto args = schur_arguments(r);
      for (double& a : args) a = std::abs(a);
      return args;
    }
  }
}

double rotation_norm(const Mat& r) {
  double sum = 0.0;
  for (double a : principal_angles(r)) sum += a * a;
  return std::sqrt(0.5 * sum);
}

double max_rotation_angle(const Mat& r) {
  const auto angles = principal_angles(r);
  return *std::max_element(angles.begin(), angles.end());
}

Mat logm_rotation(const Mat& r, double cut_tol) {
  const Eigen::Index n = r.rows();
  if (n == 1) return Mat::Zero(1, 1);
  if (n == 2) {
    const double theta = std::atan2(0.5 * (r(1, 0) - r(0, 1)), 0.5 * (r(0, 0) + r(1, 1)));
    if (std::abs(theta) > kPi - cut_tol) {
      std::ostringstream msg;
      msg << "rotation angle " << std::abs(theta) << " within " << cut_tol << " of pi";
      throw Error(ErrorKind::CutLocus, msg.str());
    }
    Mat x(2, 2);
    x << 0.0, -theta, theta, 0.0;
    return x;
  }
  if (n == 3) {
    const double c = 0.5 * (r.trace() - 1.0);
    const Mat k = skew_part(r);
    const double s = Eigen::Vector3d(k(2, 1), k(0, 2), k(1, 0)).norm();
    const double theta = std::atan2(s, c);
    // The skew part loses the axis near pi; fall back to the Schur route there.
    if (theta < kPi - 0.1) {
      const double factor = s > 1e-300 ? theta / s : 1.0;
      return factor * k;
    }
  }
  return schur_log(r, cut_tol);
}

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace karcher
