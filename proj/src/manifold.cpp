#include "karcher/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include <Eigen/SVD>

#include "karcher/errors.hpp"

namespace karcher {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kConstraintTol = 1e-10;

std::string format_scale(double k) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", k);
  return buf;
}

// Sphere geodesic angle and the component of q orthogonal to p.
double sphere_angle(const Vec& p, const Vec& q, Vec* ortho = nullptr) {
  const double c = p.dot(q);
  Vec w = q - c * p;
  const double angle = std::atan2(w.norm(), c);
  if (ortho) *ortho = std::move(w);
  return angle;
}

}  // namespace

Mat as_matrix(const Vec& coords, int m) {
  Mat a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = coords(i * m + j);
  return a;
}

Vec as_coords(const Mat& a) {
  Vec v(a.rows() * a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) v(i * a.cols() + j) = a(i, j);
  return v;
}

Manifold Manifold::euclidean(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidInput, "euclidean dimension must be >= 1");
  Manifold m;
  m.kind_ = Kind::Euclidean;
  m.order_ = n;
  m.dim_ = n;
  m.ambient_ = n;
  m.constants_ = MetricConstants::from(kInf, 0.0);
  m.descriptor_ = "euclidean:" + std::to_string(n);
  m.finalize();
  return m;
}

Manifold Manifold::sphere(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidInput, "sphere dimension must be >= 1");
  Manifold m;
  m.kind_ = Kind::Sphere;
  m.order_ = n;
  m.dim_ = n;
  m.ambient_ = n + 1;
  m.constants_ = MetricConstants::from(kPi, 1.0);
  m.descriptor_ = "sphere:" + std::to_string(n);
  m.finalize();
  return m;
}

Manifold Manifold::special_orthogonal(int m_, double k) {
  if (m_ < 2) throw Error(ErrorKind::InvalidInput, "SO(m) needs m >= 2");
  if (!(k > 0.0) || !std::isfinite(k)) throw Error(ErrorKind::InvalidInput, "SO(m) scale k must be positive");
  Manifold m;
  m.kind_ = Kind::SpecialOrthogonal;
  m.order_ = m_;
  m.scale_ = k;
  m.dim_ = m_ * (m_ - 1) / 2;
  m.ambient_ = m_ * m_;
  m.constants_ = MetricConstants::from(std::sqrt(k) * kPi, 0.25 / k);
  m.descriptor_ = "so:" + std::to_string(m_) + ":k=" + format_scale(k);
  m.finalize();
  return m;
}

Manifold Manifold::diag_pos(int m_) {
  if (m_ < 1) throw Error(ErrorKind::InvalidInput, "DiagPos(m) needs m >= 1");
  Manifold m;
  m.kind_ = Kind::DiagPos;
  m.order_ = m_;
  m.dim_ = m_;
  m.ambient_ = m_;
  m.constants_ = MetricConstants::from(kInf, 0.0);
  m.descriptor_ = "diagpos:" + std::to_string(m_);
  m.finalize();
  return m;
}

Manifold Manifold::product(std::vector<Manifold> factors) {
  if (factors.empty()) throw Error(ErrorKind::InvalidInput, "product needs at least one factor");
  Manifold m;
  m.kind_ = Kind::Product;
  m.order_ = static_cast<int>(factors.size());
  double r_inj = kInf;
  double delta = factors.size() > 1 ? 0.0 : -kInf;
  std::string desc = "product(";
  int offset = 0;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const Manifold& f = factors[i];
    m.offsets_.push_back(offset);
    offset += f.ambient_;
    m.dim_ += f.dim_;
    r_inj = std::min(r_inj, f.constants_.r_inj);
    // Mixed planes are flat, so max(delta_i, 0) bounds the product's curvature.
    delta = std::max(delta, f.constants_.delta_sup);
    if (i) desc += ";";
    desc += f.descriptor_;
  }
  m.ambient_ = offset;
  m.constants_ = MetricConstants::from(r_inj, delta);
  m.descriptor_ = desc + ")";
  m.factors_ = std::move(factors);
  m.finalize();
  return m;
}

void Manifold::finalize() { id_ = fnv1a(descriptor_.data(), descriptor_.size()); }

bool Manifold::is_compact() const {
  switch (kind_) {
    case Kind::Sphere:
    case Kind::SpecialOrthogonal: return true;
    case Kind::Euclidean:
    case Kind::DiagPos: return false;
    case Kind::Product:
      return std::all_of(factors_.begin(), factors_.end(), [](const Manifold& f) { return f.is_compact(); });
  }
  return false;
}

bool Manifold::contains(const Vec& x, double tol) const {
  if (x.size() != ambient_ || !x.allFinite()) return false;
  switch (kind_) {
    case Kind::Euclidean: return true;
    case Kind::Sphere: return std::abs(x.norm() - 1.0) <= tol;
    case Kind::SpecialOrthogonal: {
      const Mat u = as_matrix(x, order_);
      const double orth = (u.transpose() * u - Mat::Identity(order_, order_)).cwiseAbs().maxCoeff();
      return orth <= tol && u.determinant() > 0.0;
    }
    case Kind::DiagPos: return (x.array() > 0.0).all();
    case Kind::Product:
      for (std::size_t i = 0; i < factors_.size(); ++i) {
        const Manifold& f = factors_[i];
        if (!f.contains(x.segment(offsets_[i], f.ambient_), tol)) return false;
      }
      return true;
  }
  return false;
}

Point Manifold::point(const Vec& coords) const {
  if (!contains(coords, kConstraintTol)) {
    std::ostringstream msg;
    msg << "coordinates do not define a point of " << descriptor_ << ": [" << coords.transpose() << "]";
    throw Error(ErrorKind::InvalidInput, msg.str());
  }
  return wrap(coords);
}

Point Manifold::retract(const Vec& x) const {
  if (x.size() != ambient_) throw Error(ErrorKind::InvalidInput, "retract: wrong coordinate count");
  switch (kind_) {
    case Kind::Euclidean: return wrap(x);
    case Kind::Sphere: {
      const double n = x.norm();
      if (!(n > 0.0)) throw Error(ErrorKind::InvalidInput, "cannot retract the zero vector to the sphere");
      return wrap(x / n);
    }
    case Kind::SpecialOrthogonal: {
      const Mat a = as_matrix(x, order_);
      Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
      Mat u = svd.matrixU();
      const Mat& v = svd.matrixV();
      if ((u * v.transpose()).determinant() < 0.0) u.col(order_ - 1) *= -1.0;
      return wrap(as_coords(u * v.transpose()));
    }
    case Kind::DiagPos: {
      if (!(x.array() > 0.0).all()) throw Error(ErrorKind::InvalidInput, "DiagPos entries must be positive");
      return wrap(x);
    }
    case Kind::Product: {
      Vec out(ambient_);
      for (std::size_t i = 0; i < factors_.size(); ++i) {
        const Manifold& f = factors_[i];
        out.segment(offsets_[i], f.ambient_) = f.retract(x.segment(offsets_[i], f.ambient_)).coords;
      }
      return wrap(std::move(out));
    }
  }
  return wrap(x);
}

void Manifold::check_point(const Point& p, const char* what) const {
  if (p.manifold_id != id_ || p.coords.size() != ambient_) {
    throw Error(ErrorKind::InvalidInput, std::string(what) + " is not a point of " + descriptor_);
  }
}

void Manifold::check_tangent(const Point& p, const Tangent& v) const {
  check_point(p, "base point");
  const double scale = 1.0 + p.coords.cwiseAbs().maxCoeff();
  if (v.base.manifold_id != id_ || v.base.coords.size() != p.coords.size() ||
      (v.base.coords - p.coords).cwiseAbs().maxCoeff() > 1e-12 * scale || v.vec.size() != ambient_) {
    throw Error(ErrorKind::InvalidInput, "tangent vector is not based at the given point of " + descriptor_);
  }
}

Tangent Manifold::tangent(const Point& base, const Vec& vec) const {
  check_point(base, "base point");
  if (vec.size() != ambient_) throw Error(ErrorKind::InvalidInput, "tangent: wrong coordinate count");
  const Vec residual = vec - project_raw(base.coords, vec);
  if (residual.cwiseAbs().maxCoeff() > kConstraintTol * (1.0 + vec.cwiseAbs().maxCoeff())) {
    throw Error(ErrorKind::InvalidInput, "vector is not tangent to " + descriptor_ + " at the base point");
  }
  return Tangent{base, vec};
}

Tangent Manifold::zero_tangent(const Point& base) const {
  check_point(base, "base point");
  return Tangent{base, Vec::Zero(ambient_)};
}

Tangent Manifold::project(const Point& base, const Vec& ambient) const {
  check_point(base, "base point");
  return Tangent{base, project_raw(base.coords, ambient)};
}

std::vector<Tangent> Manifold::tangent_basis(const Point& base) const {
  check_point(base, "base point");
  std::vector<Vec> basis;
  basis.reserve(static_cast<std::size_t>(dim_));
  for (int j = 0; j < ambient_ && static_cast<int>(basis.size()) < dim_; ++j) {
    Vec v = project_raw(base.coords, Vec::Unit(ambient_, j));
    // Two Gram-Schmidt passes keep the basis orthonormal to round-off.
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& b : basis) v -= inner_raw(base.coords, b, v) * b;
    const double n = std::sqrt(inner_raw(base.coords, v, v));
    if (n > 1e-8) basis.push_back(v / n);
  }
  std::vector<Tangent> out;
  out.reserve(basis.size());
  for (Vec& b : basis) out.push_back(Tangent{base, std::move(b)});
  return out;
}

Point Manifold::exp(const Point& p, const Tangent& v) const {
  check_tangent(p, v);
  return wrap(exp_raw(p.coords, v.vec));
}

Tangent Manifold::log(const Point& p, const Point& q, double cut_tol) const {
  check_point(p, "p");
  check_point(q, "q");
  return Tangent{p, log_raw(p.coords, q.coords, cut_tol)};
}

double Manifold::dist(const Point& p, const Point& q) const {
  check_point(p, "p");
  check_point(q, "q");
  return dist_raw(p.coords, q.coords);
}

double Manifold::inner(const Point& p, const Tangent& u, const Tangent& v) const {
  check_tangent(p, u);
  check_tangent(p, v);
  return inner_raw(p.coords, u.vec, v.vec);
}

double Manifold::norm(const Point& p, const Tangent& v) const { return std::sqrt(inner(p, v, v)); }

bool Manifold::in_cut_locus(const Point& p, const Point& q, double tol) const {
  check_point(p, "p");
  check_point(q, "q");
  return cut_raw(p.coords, q.coords, tol);
}

Vec Manifold::exp_raw(const Vec& p, const Vec& v) const {
  switch (kind_) {
    case Kind::Euclidean: return p + v;
    case Kind::Sphere: {
      const double t = v.norm();
      if (t == 0.0) return p;
      Vec out = std::cos(t) * p + (std::sin(t) / t) * v;
      return out / out.norm();
    }
    case Kind::SpecialOrthogonal: {
      const Mat u = as_matrix(p, order_);
      const Mat x = skew_part(u.transpose() * as_matrix(v, order_));
      return as_coords(u * expm_skew(x));
    }
    case Kind::DiagPos: return (p.array() * (v.array() / p.array()).exp()).matrix();
    case Kind::Product: {
      Vec out(ambient_);
      for (std::size_t i = 0; i < factors_.size(); ++i) {
        const Manifold& f = factors_[i];
        const int o = offsets_[i], n = f.ambient_;
        out.segment(o, n) = f.exp_raw(p.segment(o, n), v.segment(o, n));
      }
      return out;
    }
  }
  return p;
}

Vec Manifold::log_raw(const Vec& p, const Vec& q, double cut_tol) const {
  switch (kind_) {
    case Kind::Euclidean: return q - p;
    case Kind::Sphere: {
      Vec w;
      const double angle = sphere_angle(p, q, &w);
      if (angle > kPi - cut_tol) {
        std::ostringstream msg;
        msg << "sphere points at angle " << angle << " (antipodal within " << cut_tol << ")";
        throw Error(ErrorKind::CutLocus, msg.str());
      }
      const double s = w.norm();
      if (s == 0.0) return Vec::Zero(ambient_);
      return (angle / s) * w;
    }
    case Kind::SpecialOrthogonal: {
      const Mat u = as_matrix(p, order_);
      const Mat r = u.transpose() * as_matrix(q, order_);
      return as_coords(u * logm_rotation(r, cut_tol));
    }
    case Kind::DiagPos: return (p.array() * (q.array() / p.array()).log()).matrix();
    case Kind::Product: {
      Vec out(ambient_);
      for (std::size_t i = 0; i < factors_.size(); ++i) {
        const Manifold& f = factors_[i];
        const int o = offsets_[i], n = f.ambient_;
        out.segment(o, n) = f.log_raw(p.segment(o, n), q.segment(o, n), cut_tol);
      }
      return out;
    }
  }
  return p;
}

double Manifold::dist_raw(const Vec& p, const Vec& q) const {
  switch (kind_) {
    case Kind::Euclidean: return (q - p).norm();
    case Kind::Sphere: return sphere_angle(p, q);
    case Kind::SpecialOrthogonal: {
      const Mat r = as_matrix(p, order_).transpose() * as_matrix(q, order_);
      return std::sqrt(scale_) * rotation_norm(r);
    }
    case Kind::DiagPos: return (q.array().log() - p.array().log()).matrix().norm();
    case Kind::Product: {
      double sum = 0.0;
      for (std::size_t i = 0; i < factors_.size(); ++i) {
        const Manifold& f = factors_[i];
        const int o = offsets_[i], n = f.ambient_;
        const double d = f.dist_raw(p.segment(o, n), q.segment(o, n));
        sum += d * d;
      }
      return std::sqrt(sum);
    }
  }
  return 0.0;
}

double Manifold::inner_raw(const Vec& p, const Vec& u, const Vec& v) const {
  switch (kind_) {
    case Kind::Euclidean:
    case Kind::Sphere: return u.dot(v);
    case Kind::SpecialOrthogonal: {
      // U^T is an isometry from T_U SO(m) to so(m), so 1/2 tr(X^T Y) = 1/2 <u, v>_F.
      return 0.5 * scale_ * u.dot(v);
    }
    case Kind::DiagPos: return (u.array() * v.array() / (p.array() * p.array())).sum();
    case Kind::Product: {
      double sum = 0.0;
      for (std::size_t i = 0; i < factors_.size(); ++i) {
        const Manifold& f = factors_[i];
        const int o = offsets_[i], n = f.ambient_;
        sum += f.inner_raw(p.segment(o, n), u.segment(o, n), v.segment(o, n));
      }
      return sum;
    }
  }
  return 0.0;
}

bool Manifold::cut_raw(const Vec& p, const Vec& q, double tol) const {
  switch (kind_) {
    case Kind::Euclidean:
    case Kind::DiagPos: return false;
    case Kind::Sphere: return sphere_angle(p, q) > kPi - tol;
    case Kind::SpecialOrthogonal: {
      const Mat r = as_matrix(p, order_).transpose() * as_matrix(q, order_);
      return max_rotation_angle(r) > kPi - tol;
    }
    case Kind::Product:
      for (std::size_t i = 0; i < factors_.size(); ++i) {
        const Manifold& f = factors_[i];
        const int o = offsets_[i], n = f.ambient_;
        if (f.cut_raw(p.segment(o, n), q.segment(o, n), tol)) return true;
      }
      return false;
  }
  return false;
}

Vec Manifold::project_raw(const Vec& p, const Vec& v) const {
  switch (kind_) {
    case Kind::Euclidean:
    case Kind::DiagPos: return v;
    case Kind::Sphere: return v - p.dot(v) * p;
    case Kind::SpecialOrthogonal: {
      const Mat u = as_matrix(p, order_);
      return as_coords(u * skew_part(u.transpose() * as_matrix(v, order_)));
    }
    case Kind::Product: {
      Vec out(ambient_);
      for (std::size_t i = 0; i < factors_.size(); ++i) {
        const Manifold& f = factors_[i];
        const int o = offsets_[i], n = f.ambient_;
        out.segment(o, n) = f.project_raw(p.segment(o, n), v.segment(o, n));
      }
      return out;
    }
  }
  return v;
}

Tangent operator+(const Tangent& a, const Tangent& b) { return Tangent{a.base, a.vec + b.vec}; }
Tangent operator-(const Tangent& a, const Tangent& b) { return Tangent{a.base, a.vec - b.vec}; }
Tangent operator*(double s, const Tangent& a) { return Tangent{a.base, s * a.vec}; }

}  // namespace karcher
