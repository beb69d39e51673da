#include "karcher/spd_psr.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "karcher/errors.hpp"

namespace karcher::spd {

namespace {

constexpr double kPi = std::numbers::pi;

void check_group_order(int m) {
  if (m < 2 || m > 5) throw Error(ErrorKind::OutOfRange, "G(m) is supported for 2 <= m <= 5, got m = " + std::to_string(m));
}

int permutation_sign(const std::vector<int>& perm) {
  int sign = 1;
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = i + 1; j < perm.size(); ++j)
      if (perm[i] > perm[j]) sign = -sign;
  return sign;
}

struct GroupCache {
  std::vector<SignedPermutation> elements;
  std::vector<Mat> matrices;
};

const GroupCache& cached_group(int m) {
  check_group_order(m);
  static const std::array<GroupCache, 6> cache = [] {
    std::array<GroupCache, 6> c;
    for (int n = 2; n <= 5; ++n) {
      c[static_cast<std::size_t>(n)].elements = group_enumerate(n);
      for (const auto& h : c[static_cast<std::size_t>(n)].elements) c[static_cast<std::size_t>(n)].matrices.push_back(h.matrix());
    }
    return c;
  }();
  return cache[static_cast<std::size_t>(m)];
}

EigenPair act_matrix(const Mat& h, const EigenPair& pair) {
  return EigenPair{pair.rotation * h.transpose(), (h * pair.diagonal.asDiagonal() * h.transpose()).diagonal()};
}

void check_pair(const EigenPair& p, int m) {
  if (p.rotation.rows() != m || p.rotation.cols() != m || p.diagonal.size() != m) {
    throw Error(ErrorKind::InvalidInput, "eigen pair has the wrong size");
  }
}

}  // namespace

SpdMatrix::SpdMatrix(Mat entries) : entries_(std::move(entries)) {
  if (entries_.rows() == 0 || entries_.rows() != entries_.cols() || !entries_.allFinite()) {
    throw Error(ErrorKind::InvalidInput, "SPD matrix must be square, finite and nonempty");
  }
  const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
  if ((entries_ - entries_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorKind::InvalidInput, "SPD matrix is not symmetric");
  }
  entries_ = sym_part(entries_);
  if (!(sym_eig(entries_).values.minCoeff() > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "matrix is not positive definite");
  }
}

Mat SignedPermutation::matrix() const {
  const auto m = static_cast<Eigen::Index>(perm.size());
  Mat h = Mat::Zero(m, m);
  for (Eigen::Index j = 0; j < m; ++j) h(perm[static_cast<std::size_t>(j)], j) = signs[static_cast<std::size_t>(j)];
  return h;
}

std::vector<SignedPermutation> group_enumerate(int m) {
  check_group_order(m);
  std::vector<SignedPermutation> out;
  std::vector<int> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    const int psign = permutation_sign(perm);
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
      std::vector<int> signs(static_cast<std::size_t>(m));
      int product = 1;
      for (int j = 0; j < m; ++j) {
        signs[static_cast<std::size_t>(j)] = (mask >> j) & 1u ? -1 : 1;
        product *= signs[static_cast<std::size_t>(j)];
      }
      if (psign * product == 1) out.push_back(SignedPermutation{perm, signs});
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

EigenPair act(const SignedPermutation& h, const EigenPair& pair) {
  check_pair(pair, static_cast<int>(h.perm.size()));
  return act_matrix(h.matrix(), pair);
}

Mat compose(const EigenPair& pair) {
  return pair.rotation * pair.diagonal.asDiagonal() * pair.rotation.transpose();
}

double top_stratum_gap(const SpdMatrix& s) {
  const Vec values = sym_eig(s.matrix()).values;
  double gap = kInf;
  for (Eigen::Index i = 0; i + 1 < values.size(); ++i) gap = std::min(gap, values(i) - values(i + 1));
  return gap;
}

EigenPair eig_canonical(const SpdMatrix& s, double gap_tol) {
  SymEig eig = sym_eig(s.matrix());
  const Eigen::Index m = eig.values.size();
  double gap = kInf;
  for (Eigen::Index i = 0; i + 1 < m; ++i) gap = std::min(gap, eig.values(i) - eig.values(i + 1));
  if (gap < gap_tol) {
    std::ostringstream msg;
    msg << "minimum eigengap " << gap << " < " << gap_tol << " for spectrum [" << eig.values.transpose() << "]";
    throw Error(ErrorKind::DegenerateSpectrum, msg.str());
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) {
      if (std::abs(eig.vectors(i, j)) > 1e-12) {
        if (eig.vectors(i, j) < 0.0) eig.vectors.col(j) *= -1.0;
        break;
      }
    }
  }
  if (eig.vectors.determinant() < 0.0) eig.vectors.col(m - 1) *= -1.0;
  return EigenPair{std::move(eig.vectors), std::move(eig.values)};
}

Manifold psr_cover(int m, double k) {
  return Manifold::product({Manifold::special_orthogonal(m, k), Manifold::diag_pos(m)});
}

Point to_cover(const Manifold& cover, const EigenPair& pair) {
  const auto m = pair.rotation.rows();
  Vec coords(m * m + m);
  coords << as_coords(pair.rotation), pair.diagonal;
  return cover.point(coords);
}

EigenPair from_cover(const Point& p, int m) {
  if (p.coords.size() != m * m + m) throw Error(ErrorKind::InvalidInput, "cover point has the wrong size");
  return EigenPair{as_matrix(p.coords.head(m * m), m), p.coords.tail(m)};
}

FiniteAction signed_permutation_action(int m, double k) {
  const GroupCache& group = cached_group(m);
  Manifold cover = psr_cover(m, k);
  const int n = static_cast<int>(group.elements.size());
  std::vector<FiniteAction::Element> elements;
  elements.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Mat h = group.matrices[static_cast<std::size_t>(i)];
    const auto& e = group.elements[static_cast<std::size_t>(i)];
    std::ostringstream label;
    for (int j = 0; j < m; ++j) label << (e.signs[static_cast<std::size_t>(j)] < 0 ? "-" : "+") << e.perm[static_cast<std::size_t>(j)];
    auto map = [h, m](const Vec& x) {
      const EigenPair moved = act_matrix(h, EigenPair{as_matrix(x.head(m * m), m), x.tail(m)});
      Vec out(m * m + m);
      out << as_coords(moved.rotation), moved.diagonal;
      return out;
    };
    std::optional<double> floor;
    // d_SO(U h^T, U) is constant in U; the diagonal term vanishes on scalar D.
    if (i != 0) floor = std::sqrt(k) * rotation_norm(h);
    elements.push_back({label.str(), std::move(map), floor});
  }
  std::vector<std::vector<int>> table(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), -1));
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const Mat ab = group.matrices[static_cast<std::size_t>(a)] * group.matrices[static_cast<std::size_t>(b)];
      for (int c = 0; c < n; ++c) {
        if ((group.matrices[static_cast<std::size_t>(c)] - ab).cwiseAbs().maxCoeff() < 0.5) {
          table[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = c;
          break;
        }
      }
    }
  }
  std::ostringstream name;
  name << "signed-perm:" << m << ":k=" << k;
  return FiniteAction(std::move(cover), std::move(elements), std::move(table), name.str());
}

double pair_dist(const EigenPair& a, const EigenPair& b, double k) {
  const double rot = rotation_norm(a.rotation.transpose() * b.rotation);
  const double diag = (b.diagonal.array().log() - a.diagonal.array().log()).matrix().norm();
  return std::sqrt(k * rot * rot + diag * diag);
}

double d_psr(const SpdMatrix& s, const EigenPair& p, double k, double gap_tol) {
  const EigenPair lift = eig_canonical(s, gap_tol);
  check_pair(p, s.size());
  double best = kInf;
  for (const Mat& h : cached_group(s.size()).matrices) best = std::min(best, pair_dist(act_matrix(h, lift), p, k));
  return best;
}

double d_sr(const SpdMatrix& a, const SpdMatrix& b, double k, double gap_tol) {
  if (a.size() != b.size()) throw Error(ErrorKind::InvalidInput, "d_sr: matrices of different sizes");
  const EigenPair la = eig_canonical(a, gap_tol);
  const EigenPair lb = eig_canonical(b, gap_tol);
  double best = kInf;
  for (const Mat& h : cached_group(a.size()).matrices) best = std::min(best, pair_dist(la, act_matrix(h, lb), k));
  return best;
}

double psr_objective(const std::vector<SpdMatrix>& samples, const EigenPair& p, double k, double gap_tol) {
  if (samples.empty()) throw Error(ErrorKind::InvalidInput, "psr_objective needs N >= 1");
  double sum = 0.0;
  for (const SpdMatrix& s : samples) {
    const double d = d_psr(s, p, k, gap_tol);
    sum += d * d;
  }
  return sum / static_cast<double>(samples.size());
}

PsrMeanResult psr_mean(const std::vector<SpdMatrix>& samples, double k, const PsrOptions& options) {
  if (samples.empty()) throw Error(ErrorKind::InvalidInput, "psr_mean needs N >= 1");
  const int m = samples.front().size();
  for (const SpdMatrix& s : samples)
    if (s.size() != m) throw Error(ErrorKind::InvalidInput, "psr_mean: samples of different sizes");

  const FiniteAction action = signed_permutation_action(m, k);
  const Manifold& cover = action.cover();
  std::vector<EigenPair> lifts;
  std::vector<QuotientPoint> q;
  for (const SpdMatrix& s : samples) {
    lifts.push_back(eig_canonical(s, options.gap_tol));
    q.push_back(QuotientPoint{to_cover(cover, lifts.back())});
  }

  EfmOptions efm;
  efm.tol = options.tol;
  EfmResult best = efm_solve(action, q, efm);

  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> pick_sample(0, samples.size() - 1);
  std::uniform_int_distribution<int> pick_element(0, action.order() - 1);
  std::vector<EfmResult> restarts;
  for (int r = 0; r < options.restarts; ++r) {
    const std::size_t s = pick_sample(rng);
    const int h = pick_element(rng);
    efm.initial = action.act(h, q[s].representative);
    restarts.push_back(efm_solve(action, q, efm));
  }
  for (const EfmResult& r : restarts)
    if (r.objective < best.objective - options.tol) best = r;

  PsrMeanResult out;
  out.restart_spread = 0.0;
  for (const EfmResult& r : restarts) {
    out.restart_spread = std::max(out.restart_spread, quotient_dist(action, best.downstairs_mean, r.downstairs_mean));
  }
  out.unique_up_to_g = out.restart_spread < options.orbit_tol;
  out.representative = from_cover(best.minimizer, m);
  for (const Point& p : best.aligned_lifts) out.aligned_lifts.push_back(from_cover(p, m));
  out.objective = best.objective;
  out.outer_iterations = best.outer_iterations;
  return out;
}

PsrConstants psr_constants(int m, double k) {
  const GroupCache& group = cached_group(m);
  if (!(k > 0.0)) throw Error(ErrorKind::InvalidInput, "psr_constants: k must be positive");
  double beta_gp = kInf;
  for (std::size_t i = 1; i < group.matrices.size(); ++i) beta_gp = std::min(beta_gp, rotation_norm(group.matrices[i]));
  if (beta_gp > kPi / 2.0 + 1e-12) throw Error(ErrorKind::InvalidInput, "beta_gp exceeds pi/2");
  const double root_k = std::sqrt(k);
  return PsrConstants{beta_gp, rcx_from_constants(root_k * kPi, 0.25 / k), root_k * beta_gp / 2.0,
                      root_k * beta_gp / 4.0};
}

}  // namespace karcher::spd
