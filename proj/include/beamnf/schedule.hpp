// Iteration schedule: per-step smallness, screening, analyticity-loss and
// domain-radius parameters, all derived from (eps, rho, s0, r0) and the
// angle-count schedule by fixed recursions.
#pragma once

#include <vector>

namespace beamnf {

struct ScheduleRow {
  int v = 0;
  double eps = 0;     // eps_v, target remainder scale at the start of step v
  double alpha = 0;   // screening level alpha_v = eps_v^(rho/18)
  double M = 0;       // cumulative frequency-drift budget M_v
  double lambda = 0;  // lambda_v = alpha_v / (M_v + 1)
  double sigma = 0;   // per-step analyticity loss sigma_v
  double s = 0;       // angle-strip half-width s_v
  double r = 0;       // mode-domain radius r_v
  double d = 0;       // d_v = (r_v - r_{v+1})/4
  int b = 0;          // active angle count b_v
};

struct Schedule {
  double eps = 0, rho = 0, s0 = 0, r0 = 0;
  bool sigma0_adjusted = false;  // true when s0/24 exceeded the 1/20 cap
  std::vector<ScheduleRow> rows; // rows 0 .. v_max
};

// Rows obey: eps_0 = eps^(1/2), eps_{v+1} = eps_v^(1+rho/2),
// alpha_v = eps_v^(rho/18), M_0 = 0, M_1 = eps_0^(1-rho/4),
// M_v + 1 = (M_1 + 1)(2 - 2^(1-v)) for v >= 1, lambda_v = alpha_v/(M_v+1),
// sigma_0 = min(s0/24, 1/20), sigma_{v+1} = sigma_v/2,
// s_{v+1} = s_v - 6 sigma_v (hence s_v >= s0/2),
// r_v = (1 - tau_v) r0 with tau_v = (sum_{j<=v} j^-2)/(2 sum_{j>=1} j^-2)
// (hence r_v >= r0/2), d_v = (r_v - r_{v+1})/4.  The angle counts come from
// b_sched, extended past its end by +1 per step so they stay strictly
// increasing.
Schedule build_schedule(double eps, double rho, double s0, double r0,
                        const std::vector<int>& b_sched, int v_max);

}  // namespace beamnf
