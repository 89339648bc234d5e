// Numerical certificates for the small-divisor machinery's auxiliary
// inequalities: lattice exponential sums, the off-diagonal operator-norm
// estimate, and the compound weight bound used by the measure estimates.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>

namespace beamnf {

// Which lattice norm |k| uses.  The l1 norm is the working choice throughout;
// the sup norm exists only for sensitivity experiments.
enum class KNorm { l1, linf };

// One evaluated inequality: left side, right side, and the margin
// right - left (recorded even when negative).  `pass` is decided in the log
// domain so it stays meaningful if a side overflows; `cross_check_rel` is the
// relative difference between the direct and log-domain evaluations of the
// left side (-1 when the direct path overflowed and no comparison was made).
struct BoundCheck {
  std::string lemma;
  std::string params;
  double left = 0.0;
  double right = 0.0;
  double margin = 0.0;
  bool pass = false;
  double cross_check_rel = -1.0;
};

// sum_{k in Z^n} |k|^v e^{-2|k|sigma}  <=  (v/e)^v sigma^{-(v+n)} (1+e)^n,
// with the v = 0 form  sum e^{-2|k|sigma} <= sigma^{-n} (1+e)^n.
// The sum is truncated at |k| = k_trunc and closed with a geometric tail
// majorant; throws std::invalid_argument when k_trunc is too small for the
// tail ratio to drop below one.
BoundCheck expsum_bound(int n, double sigma, double v_pow, int k_trunc,
                        KNorm norm = KNorm::l1);

// B_ij = |A_ij| / |i-j| off the diagonal, B_ii = 0; checks
// ||B|| <= (pi/sqrt 3) ||A|| in the spectral norm.  Norms come from power
// iteration on the Gram matrix with `trials` random restarts.
BoundCheck hilbert_like_bound(const Eigen::MatrixXd& A, int trials);

// sqrt(2^b sum_{k in Z^b} |k|^p [(1+v^2)(|k|+1)^{2b+2}]^4 e^{-2|k|sigma})
//   <=  (16(2b+3)/e)^{4b+6} sigma^{-(5b+6)}
// evaluated for BOTH powers p: the statement form p = 2 (index 0) and the
// stronger intermediate form p = 4 (index 1), against the same right side.
std::array<BoundCheck, 2> compound_bound(int b, double sigma, int v,
                                         int k_trunc, KNorm norm = KNorm::l1);

}  // namespace beamnf
