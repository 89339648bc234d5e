// Polynomial Hamiltonians in (z, zbar) with trigonometric coefficients in a
// finite set of angles: the carrier type for every object the normal-form
// iteration manipulates (perturbations, generators, corrections, remainders).
//
// A term is  c * z^gam * zbar^kap * exp(i<k,theta>)  with
//   k    : integer Fourier vector over the active angles (|k|_inf <= k_max),
//   gam  : mode -> exponent map for z   (modes 0..n_modes),
//   kap  : mode -> exponent map for zbar,
//   |gam| + |kap| <= deg_max.
// The action variables J never appear: every stored object is J-independent,
// and the <omega,J> part of the normal form acts only through angle
// derivatives (see divisor_action).
#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace beamnf {

using cplx = std::complex<double>;

// Truncation box shared by all objects of one run.
struct Trunc {
  int n_modes = 4;  // modes 0..n_modes retained
  int k_max = 3;    // per-component Fourier cap |k_i| <= k_max
  int deg_max = 4;  // total (z,zbar)-degree cap
  friend bool operator==(const Trunc&, const Trunc&) = default;
};

// Weighted-norm parameters: sequence weight j^p e^{a j} (mode 0 weight 1),
// angle strip half-width s, amplitude radius r.
struct NormParams {
  double a = 0.0;  // >= 0
  double p = 1.0;  // > 0
  double s = 0.3;  // > 0
  double r = 1.0;  // > 0
};

// Sparse exponent list: sorted (mode, power>0) pairs.
using ExpList = std::vector<std::pair<int, int>>;

struct TermKey {
  std::vector<int> k;  // size = owner's angle count
  ExpList gam;
  ExpList kap;
  auto operator<=>(const TermKey&) const = default;
};

int exp_total(const ExpList& e);          // sum of powers
int exp_power(const ExpList& e, int mode);  // power of one mode (0 if absent)
ExpList exp_add(const ExpList& a, const ExpList& b);
ExpList exp_dec(const ExpList& e, int mode);  // decrement one power (must exist)

struct Term {
  TermKey key;
  cplx coeff;
};

class PolyHamiltonian {
 public:
  PolyHamiltonian() = default;
  PolyHamiltonian(int n_angles, Trunc tr) : b_(n_angles), tr_(tr) {}

  int n_angles() const { return b_; }
  const Trunc& trunc() const { return tr_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  const std::map<TermKey, cplx>& terms() const { return terms_; }

  // Majorant mass (sum of |coeff|) of everything discarded by the Fourier or
  // degree caps, accumulated over the object's history.
  double dropped_mass() const { return dropped_mass_; }
  void add_dropped_mass(double m) { dropped_mass_ += m; }

  // Accumulate one term.  Out-of-box Fourier vectors / degrees are not stored;
  // their |coeff| goes to dropped_mass.  Exponent lists need not be sorted.
  void add_term(const std::vector<int>& k, ExpList gam, ExpList kap, cplx c);
  void add_term(const TermKey& key, cplx c);

  cplx coefficient(const TermKey& key) const;  // 0 if absent

  PolyHamiltonian& operator+=(const PolyHamiltonian& o);
  PolyHamiltonian& operator*=(double s);
  PolyHamiltonian& operator*=(cplx s);

  // Remove |coeff| < rel_tol * max|coeff| (numerical-noise control).
  void prune(double rel_tol = 1e-14);

  // Re-key all terms onto n_angles_new >= current (zero-padded k).
  PolyHamiltonian embedded(int n_angles_new) const;

 private:
  int b_ = 0;
  Trunc tr_;
  std::map<TermKey, cplx> terms_;
  double dropped_mass_ = 0.0;
};

PolyHamiltonian operator+(PolyHamiltonian a, const PolyHamiltonian& b);
PolyHamiltonian operator-(PolyHamiltonian a, const PolyHamiltonian& b);
PolyHamiltonian operator*(PolyHamiltonian a, double s);
PolyHamiltonian operator*(PolyHamiltonian a, cplx s);

// Product (used by assemblers and property tests; the step itself only ever
// multiplies within the degree cap).
PolyHamiltonian multiply(const PolyHamiltonian& f, const PolyHamiltonian& g);

// Canonical bracket of J-independent Hamiltonians:
//   {f, g} = i * sum_j (df/dz_j dg/dzbar_j - df/dzbar_j dg/dz_j).
// Degrees combine as deg(f-term) + deg(g-term) - 2; Fourier vectors add.
PolyHamiltonian poisson_bracket(const PolyHamiltonian& f,
                                const PolyHamiltonian& g);

namespace detail {
// Test hook: force the reference (term-by-term map) accumulation path of
// poisson_bracket instead of the packed-key fast path.  Both paths produce
// bit-identical coefficients; tests assert that equivalence.
extern bool force_reference_bracket;
}  // namespace detail

// Split at (z,zbar)-degree 2: low = degree <= 2, high = degree >= 3.
struct DegreeSplit {
  PolyHamiltonian low;
  PolyHamiltonian high;
};
DegreeSplit degree_split(const PolyHamiltonian& h);
PolyHamiltonian degree_part(const PolyHamiltonian& h, int deg);  // exact degree

// Lie series  h o Phi_F = sum_{n=0..order} ad_F^n h / n!   with
// ad_F h = {h, F}.  Requires deg(F) <= 2 so the degree never grows.
// tail_bound is a geometric majorant of the dropped part computed from the
// scalar majorants of the last two retained brackets; ratio >= 1 reports a
// non-contracting series (diverged = true; the result is still returned).
struct LieResult {
  PolyHamiltonian h;
  double tail_bound = 0.0;
  double ratio = 0.0;
  bool diverged = false;
};
LieResult lie_transform(const PolyHamiltonian& h, const PolyHamiltonian& f,
                        int order, const NormParams& np);

// Sum over terms of |c| e^{|k|_1 s} prod_j (r / w_j)^{gam_j + kap_j}:
// an upper bound for sup |H| on the domain {|Im theta| < s, ||z||_{a,p} < r}.
double sup_majorant(const PolyHamiltonian& h, const NormParams& np);

// Majorant of the weighted vector-field norm
//   |X_H|_r = |Y|_inf / r^2 + (||U||_{a,p+2} + ||V||_{a,p+2}) / r
// with Y the angle-gradient block (J-direction), U, V the z / zbar blocks.
// Obtained by replacing coefficients by moduli, e^{i<k,theta>} by e^{|k|_1 s}
// and |z_j| by r / w_j, so it dominates the true sup over the domain.
double vf_majorant_norm(const PolyHamiltonian& h, const NormParams& np);

// Sequence norm sqrt(|z_0|^2 + sum_{j>=1} |z_j|^2 j^{2p} e^{2aj}).
double seq_norm(const std::vector<cplx>& z, double a, double p);
double mode_weight(int j, double a, double p);  // 1 for j = 0

// Reality: coefficient(-k, kap, gam) == conj(coefficient(k, gam, kap))
// for every stored term, within rel_tol relative to the pair's magnitude.
bool check_real(const PolyHamiltonian& h, double rel_tol = 1e-12);

// Pointwise evaluation (test/oracle support; angles may be complex).
cplx eval(const PolyHamiltonian& h, const std::vector<cplx>& theta,
          const std::vector<cplx>& z, const std::vector<cplx>& zbar);

// Partial derivatives as new PolyHamiltonians (shared by norm code and the
// affine-flow builder).
PolyHamiltonian d_dz(const PolyHamiltonian& h, int mode);
PolyHamiltonian d_dzbar(const PolyHamiltonian& h, int mode);

struct IncompatibleTruncation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace beamnf
