// PDE residual and direct Galerkin integration. Deliberately independent
// of the Poisson-algebra layer: space is handled by explicit cosine-series
// arithmetic, time by finite differences and a symmetric one-step method.
#include "beamnf/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "beamnf/beam.hpp"

namespace beamnf {

namespace {

constexpr double kPi = std::numbers::pi;

// phi_0 = (2 pi)^{-1/2}, phi_j = cos(j x)/sqrt(pi)
double basis(int j, double x) {
  return j == 0 ? 1.0 / std::sqrt(2.0 * kPi) : std::cos(j * x) / std::sqrt(kPi);
}

double uniform_step(const std::vector<double>& t) {
  const double h = t[1] - t[0];
  for (std::size_t i = 1; i + 1 < t.size(); ++i)
    if (std::abs(t[i + 1] - t[i] - h) > 1e-9 * std::max(1.0, std::abs(h)))
      throw std::invalid_argument("time grid must be uniform");
  if (h <= 0.0) throw std::invalid_argument("time grid must increase");
  return h;
}

}  // namespace

Reconstruction reconstruct_solution(const IterationState& state,
                                    const std::vector<double>& t_grid,
                                    int n_x, double a, double p) {
  if (n_x < 1) throw std::invalid_argument("need at least one space point");
  const auto& mu = state.ns.Omega0;
  const int n_modes = static_cast<int>(mu.size()) - 1;

  Reconstruction rec;
  rec.t = t_grid;
  rec.x.resize(n_x);
  for (int i = 0; i < n_x; ++i) rec.x[i] = -kPi + 2.0 * kPi * i / n_x;

  std::vector<std::vector<double>> phi(n_modes + 1,
                                       std::vector<double>(n_x));
  for (int j = 0; j <= n_modes; ++j)
    for (int i = 0; i < n_x; ++i) phi[j][i] = basis(j, rec.x[i]);

  rec.q.reserve(t_grid.size());
  rec.u.reserve(t_grid.size());
  rec.q_norm.reserve(t_grid.size());
  std::vector<double> theta(state.ns.omega.size());
  for (double t : t_grid) {
    for (std::size_t i = 0; i < theta.size(); ++i)
      theta[i] = state.ns.omega[i] * t;
    const EmbeddingPoint pt = compose_embedding(state, theta);
    std::vector<double> ut(n_x, 0.0);
    for (int j = 0; j <= n_modes; ++j) {
      const double w = pt.q[j] / std::sqrt(mu[j]);
      for (int i = 0; i < n_x; ++i) ut[i] += w * phi[j][i];
    }
    std::vector<cplx> qc(pt.q.begin(), pt.q.end());
    rec.q_norm.push_back(seq_norm(qc, a, p + 2.0));
    rec.q.push_back(pt.q);
    rec.u.push_back(std::move(ut));
  }
  return rec;
}

ResidualReport pde_residual(const Reconstruction& rec, const PsiEval& psi,
                            double m, double fourth_deriv_scale) {
  if (rec.t.size() < 3)
    throw std::invalid_argument(
        "invalid-input: residual needs at least 3 time points");
  if (rec.q.size() != rec.t.size() || rec.u.size() != rec.t.size())
    throw std::invalid_argument("reconstruction grids are inconsistent");
  const double h = uniform_step(rec.t);
  const int n_x = static_cast<int>(rec.x.size());
  const int n_modes = static_cast<int>(rec.q[0].size()) - 1;
  const auto mu = beam_frequencies(m, n_modes);

  std::vector<std::vector<double>> phi(n_modes + 1,
                                       std::vector<double>(n_x));
  for (int j = 0; j <= n_modes; ++j)
    for (int i = 0; i < n_x; ++i) phi[j][i] = basis(j, rec.x[i]);

  ResidualReport rep;
  rep.h = h;
  double sum_sq = 0.0;
  long count = 0;
  for (std::size_t it = 1; it + 1 < rec.t.size(); ++it) {
    double pv[4];
    for (int l = 0; l < 4; ++l) pv[l] = psi(l, rec.t[it]);
    // spectral fourth derivative from the mode coefficients
    std::vector<double> uxxxx(n_x, 0.0);
    for (int j = 1; j <= n_modes; ++j) {
      const double w = fourth_deriv_scale * std::pow(double(j), 4) *
                       rec.q[it][j] / std::sqrt(mu[j]);
      for (int i = 0; i < n_x; ++i) uxxxx[i] += w * phi[j][i];
    }
    for (int i = 0; i < n_x; ++i) {
      const double u = rec.u[it][i];
      const double utt =
          (rec.u[it + 1][i] - 2.0 * u + rec.u[it - 1][i]) / (h * h);
      const double r = utt + uxxxx[i] + m * u + pv[0] + pv[1] * u +
                       pv[2] * u * u + pv[3] * u * u * u;
      rep.sup_residual = std::max(rep.sup_residual, std::abs(r));
      sum_sq += r * r;
      ++count;
    }
  }
  rep.l2_residual = std::sqrt(sum_sq / count);

  // discretization-error estimate h^2/12 * sup |d^4 u / dt^4| by fourth
  // central differences (available once the grid has 5 points)
  double d4max = 0.0;
  for (std::size_t it = 2; it + 2 < rec.t.size(); ++it)
    for (int i = 0; i < n_x; ++i) {
      const double d4 = (rec.u[it - 2][i] - 4.0 * rec.u[it - 1][i] +
                         6.0 * rec.u[it][i] - 4.0 * rec.u[it + 1][i] +
                         rec.u[it + 2][i]) /
                        (h * h * h * h);
      d4max = std::max(d4max, std::abs(d4));
    }
  rep.disc_error_est = h * h / 12.0 * d4max;

  for (double n : rec.q_norm) {
    rep.q_norm_max = std::max(rep.q_norm_max, n);
    rep.q_norm_mean += n;
  }
  if (!rec.q_norm.empty()) rep.q_norm_mean /= rec.q_norm.size();
  return rep;
}

namespace {

// exact Galerkin projection of the forcing terms by cosine-series
// convolution: returns P_j = <psi_0 + psi_1 u + psi_2 u^2 + psi_3 u^3,
// phi_j> for the current mode amplitudes
void project_forcing(const std::vector<double>& q,
                     const std::vector<double>& mu, const double pv[4],
                     std::vector<double>& P) {
  const int n = static_cast<int>(q.size()) - 1;
  const int w = 3 * n;  // exponential indices -w..w, stored with offset
  // u = sum_k ce[k] e^{ikx}
  std::vector<double> ce(2 * w + 1, 0.0);
  ce[w] = q[0] / std::sqrt(2.0 * kPi * mu[0]);
  for (int j = 1; j <= n; ++j) {
    const double c = q[j] / (2.0 * std::sqrt(kPi * mu[j]));
    ce[w + j] = c;
    ce[w - j] = c;
  }
  std::vector<double> fhat(2 * w + 1, 0.0);
  fhat[w] += pv[0];
  if (pv[1] != 0.0)
    for (int k = -n; k <= n; ++k) fhat[w + k] += pv[1] * ce[w + k];
  if (pv[2] != 0.0 || pv[3] != 0.0) {
    std::vector<double> u2(2 * w + 1, 0.0);
    for (int i = -n; i <= n; ++i)
      for (int j = -n; j <= n; ++j) u2[w + i + j] += ce[w + i] * ce[w + j];
    if (pv[2] != 0.0)
      for (int k = -2 * n; k <= 2 * n; ++k) fhat[w + k] += pv[2] * u2[w + k];
    if (pv[3] != 0.0)
      for (int i = -2 * n; i <= 2 * n; ++i)
        for (int j = -n; j <= n; ++j)
          fhat[w + i + j] += pv[3] * u2[w + i] * ce[w + j];
  }
  // <f, phi_0> = sqrt(2 pi) fhat_0;  <f, phi_j> = 2 sqrt(pi) fhat_j
  P.assign(n + 1, 0.0);
  P[0] = std::sqrt(2.0 * kPi) * fhat[w];
  for (int j = 1; j <= n; ++j) P[j] = 2.0 * std::sqrt(kPi) * fhat[w + j];
}

}  // namespace

IntegrateResult direct_integrate(const std::vector<double>& q0,
                                 const std::vector<double>& v0,
                                 const PsiEval& psi, double m, double t_end,
                                 double h) {
  if (q0.empty() || q0.size() != v0.size())
    throw std::invalid_argument("initial data sizes are inconsistent");
  if (h <= 0.0 || t_end <= 0.0)
    throw std::invalid_argument("need positive step and horizon");
  const int n = static_cast<int>(q0.size()) - 1;
  const auto mu = beam_frequencies(m, n);

  IntegrateResult res;
  res.step_warning = mu[n] * h > 0.5;
  res.local_error_est = std::pow(mu[n] * h, 3) / 6.0;

  const long steps = std::max<long>(1, std::lround(t_end / h));
  std::vector<double> q = q0, v = v0, P, acc(n + 1), acc1(n + 1);
  auto accel = [&](const std::vector<double>& qq, double t,
                   std::vector<double>& out) {
    double pv[4];
    for (int l = 0; l < 4; ++l) pv[l] = psi(l, t);
    project_forcing(qq, mu, pv, P);
    for (int j = 0; j <= n; ++j)
      out[j] = -mu[j] * mu[j] * qq[j] - std::sqrt(mu[j]) * P[j];
  };
  auto energy = [&](const std::vector<double>& qq,
                    const std::vector<double>& vv) {
    double e = 0.0;
    for (int j = 0; j <= n; ++j)
      e += 0.5 * (vv[j] * vv[j] + mu[j] * mu[j] * qq[j] * qq[j]);
    return e;
  };

  const double e0 = energy(q, v);
  res.t.push_back(0.0);
  res.q.push_back(q);
  res.v.push_back(v);
  accel(q, 0.0, acc);
  for (long s = 0; s < steps; ++s) {
    const double t1 = (s + 1) * h;
    for (int j = 0; j <= n; ++j)
      q[j] += h * v[j] + 0.5 * h * h * acc[j];
    accel(q, t1, acc1);
    for (int j = 0; j <= n; ++j) v[j] += 0.5 * h * (acc[j] + acc1[j]);
    acc.swap(acc1);
    res.t.push_back(t1);
    res.q.push_back(q);
    res.v.push_back(v);
    res.energy_drift = std::max(
        res.energy_drift,
        std::abs(energy(q, v) - e0) / std::max(std::abs(e0), 1e-300));
  }
  return res;
}

double default_step(double m, int n_modes) {
  const auto mu = beam_frequencies(m, n_modes);
  return 2.0 * kPi / (20.0 * mu[n_modes]);
}

double linear_response_amplitude(double A, double nu, double m) {
  const double mu0 = std::sqrt(m);
  return -std::sqrt(2.0 * kPi * mu0) * A / (m - nu * nu);
}

}  // namespace beamnf
