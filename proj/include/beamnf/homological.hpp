// Small-divisor solve for one iteration step: screening, exact coefficient
// division for the degree <= 2 generator, the cubic-against-linear
// correction bracket, and the normal-form update extracted from the
// unsolvable (zero-divisor) keys.
#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "beamnf/algebra.hpp"

namespace beamnf {

// Frequencies the normal form carries at one step: external angle
// frequencies omega (length = active angle count) and the drifting normal
// frequencies Omega per retained mode (length n_modes + 1), with the
// unperturbed baseline Omega0 kept for drift accounting.
struct NormalFormState {
  int v = 0;
  std::vector<double> omega;
  std::vector<double> Omega;
  std::vector<double> Omega0;
  // cumulative per-mode drift applied at each past step (diagnostics)
  std::vector<std::vector<double>> drift_history;
};

// A sampled frequency vector fell inside an excluded resonance zone: the
// offending Fourier vector and mode signature travel with the exception.
struct ResonantParameter : std::runtime_error {
  std::vector<int> k, l;
  ResonantParameter(std::vector<int> k_, std::vector<int> l_,
                    const std::string& msg)
      : std::runtime_error(msg), k(std::move(k_)), l(std::move(l_)) {}
};

struct RealityViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mode signature gamma - kappa of a term, as a dense vector over modes 0..n.
std::vector<int> mode_signature(const TermKey& key, int n_modes);

// True for keys on a structurally zero divisor: k = 0 with gamma = kappa.
// These never enter a coefficient division (they feed the normal-form
// update instead).
bool structurally_excluded(const TermKey& key);

// <k, omega> + <l, Omega> for a mode signature l (entries gamma_j - kappa_j);
// |l|_1 <= 2 is the only class the solve ever meets.
double divisor(const NormalFormState& ns, const std::vector<int>& k,
               const std::vector<int>& l);

// max(1, |sum_j j^2 l_j|): the quadratic mode weight in the screening bound.
double angle_bracket2(const std::vector<int>& l);

// Screening inequality at step v with strip parameter alpha_v:
//   |divisor| >= alpha_v <l>_2 / ((1 + v^2)(|k|_1 + 1)^{2 b_v + 2}).
struct ScreenResult {
  bool pass = false;
  double value = 0.0;      // the divisor
  double threshold = 0.0;  // right-hand side
  double margin = 0.0;     // |value| - threshold
};
ScreenResult screen(const NormalFormState& ns, double alpha_v,
                    const std::vector<int>& k, const std::vector<int>& l);

// Diagonal action of the normal form: each term of f is multiplied by
// i (<k,omega> + <gamma - kappa, Omega>).  This is the exact left-hand side
// the coefficient division inverts.
PolyHamiltonian bracket_with_N(const NormalFormState& ns,
                               const PolyHamiltonian& f);

// Degree <= 1 solve: generator coefficients source / (i divisor); the
// angle-average constant (k = 0, degree 0) is returned unsolved.
struct F1Result {
  PolyHamiltonian f;
  cplx r00_avg = 0.0;
};
F1Result solve_F1(const PolyHamiltonian& r_low01, const NormalFormState& ns,
                  double alpha_v);

// Degree-2 correction {degree-3 part of p_high, f1}; output is pure
// degree 2 by construction (asserted).
PolyHamiltonian correction_W(const PolyHamiltonian& p_high,
                             const PolyHamiltonian& f1);

// Degree-2 solve; the k = 0 diagonal z_j zbar_j coefficients are routed to
// b11_diag (they drive the frequency update) instead of being divided.
struct F2Result {
  PolyHamiltonian f;
  std::vector<cplx> b11_diag;  // length n_modes + 1
};
F2Result solve_F2(const PolyHamiltonian& b2, const NormalFormState& ns,
                  double alpha_v);

// Frequency update from the unsolved averages: d_omega_j = eps_v * Re
// b11_diag[j], d_const = eps_v * Re r00_avg.  Imaginary residue above
// 1e-10 relative is a RealityViolation.
struct NormalUpdate {
  std::vector<double> d_omega;
  double d_const = 0.0;
};
NormalUpdate normal_update(cplx r00_avg, const std::vector<cplx>& b11_diag,
                           double eps_v);

// True when no stored generator term sits on a structurally zero divisor
// (k = 0 with gamma = kappa) and the degree cap 2 holds.
bool generator_excluded_ok(const PolyHamiltonian& f);

// Majorant norm of  -bracket_with_N(f) + r + {p_high, f}^{low} - delta_n:
// the defining identity of the solve, zero up to rounding when all pieces
// come from one completed solve.
double residual_check(const NormalFormState& ns, const PolyHamiltonian& r,
                      const PolyHamiltonian& p_high, const PolyHamiltonian& f,
                      const PolyHamiltonian& delta_n, const NormParams& np);

}  // namespace beamnf
