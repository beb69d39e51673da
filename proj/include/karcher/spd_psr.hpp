#pragma once

#include <cstdint>
#include <vector>

#include "karcher/equivariant.hpp"
#include "karcher/manifold.hpp"

namespace karcher::spd {

inline constexpr double kGapTol = 1e-8;

/// Symmetric positive-definite matrix (symmetric within 1e-12, all
/// eigenvalues > 0). Throws InvalidInput otherwise.
class SpdMatrix {
 public:
  explicit SpdMatrix(Mat entries);

  const Mat& matrix() const { return entries_; }
  int size() const { return static_cast<int>(entries_.rows()); }

 private:
  Mat entries_;
};

/// Eigendecomposition (U, D) in SO(m) x Diag+(m) with U diag(D) U^T = S.
struct EigenPair {
  Mat rotation;
  Vec diagonal;
};

/// Even signed permutation: column j of the matrix is signs[j] * e_{perm[j]}.
/// det = sgn(perm) * prod(signs) = +1.
struct SignedPermutation {
  std::vector<int> perm;
  std::vector<int> signs;

  Mat matrix() const;
};

/// All of G(m) for 2 <= m <= 5, identity first, then permutations in
/// lexicographic order with sign patterns in binary order. |G(m)| = 2^(m-1) m!.
std::vector<SignedPermutation> group_enumerate(int m);

/// h . (U, D) = (U h^T, h D h^T). Preserves U D U^T and is an isometry of
/// k g_SO + g_D+.
EigenPair act(const SignedPermutation& h, const EigenPair& pair);

/// U diag(D) U^T.
Mat compose(const EigenPair& pair);

/// Minimum consecutive gap of the sorted spectrum.
double top_stratum_gap(const SpdMatrix& s);

/// Deterministic fiber point: eigenvalues descending, first nonzero entry
/// of every eigenvector positive, then the last column negated if det = -1.
/// Throws DegenerateSpectrum if the minimum eigengap is below gap_tol.
EigenPair eig_canonical(const SpdMatrix& s, double gap_tol = kGapTol);

/// The cover SO(m, k) x Diag+(m) and conversions to its points.
Manifold psr_cover(int m, double k);
Point to_cover(const Manifold& cover, const EigenPair& pair);
EigenPair from_cover(const Point& p, int m);

/// G(m) acting on psr_cover(m, k). Displacement floors are sqrt(k) d_SO(h, I),
/// so beta() is exact.
FiniteAction signed_permutation_action(int m, double k);

/// Product-metric distance on SO(m, k) x Diag+(m).
double pair_dist(const EigenPair& a, const EigenPair& b, double k);

/// min_h d~(h . eig_canonical(S), p~).
double d_psr(const SpdMatrix& s, const EigenPair& p, double k, double gap_tol = kGapTol);

/// min_h d~(eig_canonical(S1), h . eig_canonical(S2)).
double d_sr(const SpdMatrix& a, const SpdMatrix& b, double k, double gap_tol = kGapTol);

/// (1/N) sum d_psr(S_i, p~)^2.
double psr_objective(const std::vector<SpdMatrix>& samples, const EigenPair& p, double k, double gap_tol = kGapTol);

struct PsrOptions {
  double tol = 1e-10;
  double gap_tol = kGapTol;
  int restarts = 5;
  double orbit_tol = 1e-7;
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
};

struct PsrMeanResult {
  EigenPair representative;
  std::vector<EigenPair> aligned_lifts;
  double objective = 0.0;
  bool unique_up_to_g = false;
  /// Largest quotient distance between the restart results and the
  /// representative's orbit.
  double restart_spread = 0.0;
  int outer_iterations = 0;
};

/// PSR mean via the equivariant Frechet mean on the cover, started at the
/// canonical lift with the lowest objective, plus `restarts` runs from
/// random group-translated sample lifts.
PsrMeanResult psr_mean(const std::vector<SpdMatrix>& samples, double k, const PsrOptions& options = {});

struct PsrConstants {
  double beta_gp = 0.0;
  double r_cx_cover = 0.0;
  double r_inj_quotient = 0.0;
  double r_cx_quotient = 0.0;
};

/// beta_gp = min over h != e of d_SO(h, I) (unscaled), then
/// (beta_gp, sqrt(k) pi / 2, sqrt(k) beta_gp / 2, sqrt(k) beta_gp / 4).
PsrConstants psr_constants(int m, double k);

}  // namespace karcher::spd
