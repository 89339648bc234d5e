// Independent physical validation of a run: reconstruct u(t, x) from the
// embedding chain, measure the beam-PDE residual (central differences in
// time, exact spectral fourth derivative in space), and cross-check with a
// direct Galerkin integration that shares no code with the algebra layer.
#pragma once

#include <functional>
#include <vector>

#include "beamnf/driver.hpp"

namespace beamnf {

// Pointwise forcing levels at time t: psi(l, t) = psi_l(omega t), l = 0..3.
using PsiEval = std::function<double(int, double)>;

// Mode trajectories and the field u(t, x) = sum_j q_j(t) phi_j(x)/sqrt(mu_j)
// with the orthonormal even basis phi_0 = (2 pi)^{-1/2},
// phi_j = cos(j x)/sqrt(pi).
struct Reconstruction {
  std::vector<double> t;
  std::vector<double> x;                // n_x uniform points on [-pi, pi)
  std::vector<std::vector<double>> q;   // q[it][j]
  std::vector<std::vector<double>> u;   // u[it][ix]
  std::vector<double> q_norm;           // ||q(t)||_{a, p+2} per time point
};

// Evaluates the embedding at theta = omega t over the time grid. The mode
// frequencies mu_j are the state's unperturbed Omega0.
Reconstruction reconstruct_solution(const IterationState& state,
                                    const std::vector<double>& t_grid,
                                    int n_x, double a, double p);

struct ResidualReport {
  double sup_residual = 0.0;  // sup over interior time points and the x grid
  double l2_residual = 0.0;   // RMS over the same grid points
  double disc_error_est = 0.0;  // h^2/12 * sup |4th time difference of u|
  double q_norm_max = 0.0;
  double q_norm_mean = 0.0;
  double h = 0.0;  // time step of the grid
};

// Residual of u_tt + u_xxxx + m u + psi_0 + psi_1 u + psi_2 u^2 + psi_3 u^3:
// u_tt by second-order central differences, u_xxxx spectrally (j^4 on the
// mode coefficients, exact on the cosine truncation). fourth_deriv_scale
// multiplies j^4 and exists as a negative-control hook (default exact).
// Throws std::invalid_argument for fewer than 3 or non-uniform time points.
ResidualReport pde_residual(const Reconstruction& rec, const PsiEval& psi,
                            double m, double fourth_deriv_scale = 1.0);

struct IntegrateResult {
  std::vector<double> t;
  std::vector<std::vector<double>> q;  // q[it][j]
  std::vector<std::vector<double>> v;  // time derivatives
  double energy_drift = 0.0;  // max |E - E(0)| / |E(0)|, linear-part energy
  bool step_warning = false;  // mu_max h too large for the local error
  double local_error_est = 0.0;  // (mu_max h)^3 / 6 per-step scale
};

// Fixed-step velocity-Verlet (time-symmetric, second order) on the
// Galerkin-truncated mode system
//   qddot_j + mu_j^2 q_j + sqrt(mu_j) <psi_0 + psi_1 u + psi_2 u^2
//                                      + psi_3 u^3, phi_j> = 0,
// with the projections computed exactly by cosine-series convolution.
IntegrateResult direct_integrate(const std::vector<double>& q0,
                                 const std::vector<double>& v0,
                                 const PsiEval& psi, double m, double t_end,
                                 double h);

// Default step (1/20) * 2 pi / mu_N: resolves the fastest retained mode.
double default_step(double m, int n_modes);

// Steady response of mode 0 to psi_0 = A cos(nu t):
// q_0(t) = amp * cos(nu t) with amp = -sqrt(2 pi mu_0) A / (mu_0^2 - nu^2).
double linear_response_amplitude(double A, double nu, double m);

}  // namespace beamnf
