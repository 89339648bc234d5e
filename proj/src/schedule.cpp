#include "beamnf/schedule.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace beamnf {

Schedule build_schedule(double eps, double rho, double s0, double r0,
                        const std::vector<int>& b_sched, int v_max) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("build_schedule: need 0 < eps < 1");
  if (!(rho > 0.0 && rho <= 1.0))
    throw std::invalid_argument("build_schedule: need 0 < rho <= 1");
  if (!(s0 > 0.0) || !(r0 > 0.0))
    throw std::invalid_argument("build_schedule: need s0, r0 > 0");
  if (b_sched.empty())
    throw std::invalid_argument("build_schedule: empty angle-count schedule");
  if (v_max < 0) throw std::invalid_argument("build_schedule: v_max < 0");
  for (std::size_t i = 0; i < b_sched.size(); ++i) {
    if (b_sched[i] <= 0 || (i > 0 && b_sched[i] <= b_sched[i - 1]))
      throw std::invalid_argument(
          "build_schedule: angle counts must be positive and increasing");
  }

  Schedule sc;
  sc.eps = eps;
  sc.rho = rho;
  sc.s0 = s0;
  sc.r0 = r0;
  sc.sigma0_adjusted = s0 / 24.0 > 1.0 / 20.0;

  const double eps0 = std::sqrt(eps);
  const double m1 = std::pow(eps0, 1.0 - rho / 4.0);
  const double sigma0 = std::min(s0 / 24.0, 1.0 / 20.0);
  const double zeta2 = std::numbers::pi * std::numbers::pi / 6.0;

  auto b_of = [&](int v) {
    const int last = static_cast<int>(b_sched.size()) - 1;
    return v <= last ? b_sched[v] : b_sched[last] + (v - last);
  };
  auto tau_of = [&](int v) {
    double sum = 0.0;
    for (int j = 1; j <= v; ++j) sum += 1.0 / (static_cast<double>(j) * j);
    return sum / (2.0 * zeta2);
  };

  double eps_v = eps0;
  double sigma_v = sigma0;
  double s_v = s0;
  sc.rows.resize(v_max + 1);
  for (int v = 0; v <= v_max; ++v) {
    ScheduleRow& row = sc.rows[v];
    row.v = v;
    row.eps = eps_v;
    row.alpha = std::pow(eps_v, rho / 18.0);
    row.M = v == 0 ? 0.0 : (m1 + 1.0) * (2.0 - std::ldexp(1.0, 1 - v)) - 1.0;
    row.lambda = row.alpha / (row.M + 1.0);
    row.sigma = sigma_v;
    row.s = s_v;
    row.r = (1.0 - tau_of(v)) * r0;
    row.d = (row.r - (1.0 - tau_of(v + 1)) * r0) / 4.0;
    row.b = b_of(v);

    eps_v = std::pow(eps_v, 1.0 + rho / 2.0);
    s_v -= 6.0 * sigma_v;
    sigma_v /= 2.0;
  }
  return sc;
}

}  // namespace beamnf
