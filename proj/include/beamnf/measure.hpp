// Resonant-zone geometry and the Monte Carlo estimate of the excluded
// parameter measure: strict zone membership tests, the small-|k| emptiness
// certificate with its validity gate, and the sampled excluded fraction
// per epsilon with confidence intervals, union bounds, and the neglected
// |k|-tail majorant.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "beamnf/homological.hpp"

namespace beamnf {

// One resonant zone: parameter vectors omega with
//   |<k, omega> + <l, Omega_v>| < threshold,
// threshold = alpha_v <l>_2 / ((1 + v^2)(|k|_1 + 1)^{2 b_v + 2}).
struct ZoneSpec {
  int v = 0;
  std::vector<int> k;  // Fourier vector, dim b_v
  std::vector<int> l;  // mode signature, |l|_1 <= 2
  double threshold = 0.0;
};

// Builds the zone with its threshold from the step data. Throws
// std::invalid_argument when (k, l) = 0 or k.size() != b_v.
ZoneSpec make_zone(int v, int b_v, std::vector<int> k, std::vector<int> l,
                   double alpha_v);

// Strict membership: |<k,omega> + <l,Omega>| < threshold (boundary points
// are outside). omega must have dim b_v.
bool zone_test(const std::vector<double>& omega, const ZoneSpec& zone,
               const NormalFormState& state);

// Small-|k| emptiness certificate: true iff |k|_1 <= beta <l>_2 / 4, valid
// only under the gate beta > 6 alpha0 (std::invalid_argument otherwise).
bool case1_empty(const std::vector<int>& k, const std::vector<int>& l,
                 double beta, double alpha0);

// All mode-signature vectors with |l|_1 <= 2 over modes 0..n_modes,
// including l = 0.
std::vector<std::vector<int>> mode_vectors_deg2(int n_modes);

// Spectral-gap estimate: min over enumerated l != 0 of |<l,Omega0>| / <l>_2.
double estimate_beta(const std::vector<double>& Omega0);

struct MeasureConfig {
  double m = 1.0;
  double rho = 1.0;
  double s0 = 0.4;  // schedule inputs (only alpha_v and b_v are consumed)
  double r0 = 1.0;
  int n_modes = 4;
  int k_meas = 6;  // |k|_inf cutoff of the zone enumeration
  std::vector<int> b_sched{1, 2, 3};
  std::uint64_t seed = 12345;
  // test hooks
  double alpha_scale = 1.0;         // scales every alpha_v (0: empty zones)
  double threshold_override = -1.0;  // >= 0: fixed threshold for every zone
};

struct MeasureRow {
  double eps = 0.0;
  long samples = 0;
  long excluded_count = 0;
  double fraction = 0.0;
  double ci_low = 0.0;   // Wilson 95% interval
  double ci_high = 0.0;
  double beta_est = 0.0;
  bool case1_active = false;  // gate beta_est > 6 alpha0 held at this eps
  long certified_zones = 0;
  long certified_hits = 0;  // samples inside certified zones (must be 0)
  long active_zones = 0;
  double tail_bound = 0.0;  // measure majorant of the neglected |k| > K tail
  double bound_2x = 0.0;    // sum over active zones of 2 threshold / |k|_1
  double bound_6x = 0.0;    // per-direction total with the factor 6, all zones
};

struct MeasureEstimate {
  std::vector<MeasureRow> rows;             // one per grid epsilon, in order
  double fitted_C = 0.0;        // fraction(eps_max) / eps_max^{rho/48}
  double fitted_exponent = 0.0;  // log-log least squares over positive rows
  std::string csv() const;
};

// Samples omega uniformly in [0,1]^{b_{v_max}} and reports, per epsilon in
// the grid, the fraction excluded by any enumerated zone across steps
// 0..v_max. The same seed is used for every epsilon so the excluded sets
// nest and fractions are monotone in epsilon by construction.
MeasureEstimate mc_measure(int v_max, long samples,
                           const std::vector<double>& eps_grid,
                           const MeasureConfig& config);

}  // namespace beamnf
