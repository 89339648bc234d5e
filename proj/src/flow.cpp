#include "beamnf/flow.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace beamnf {

namespace {

// Assemble the affine field xdot = M x + c for the stacked coordinates
// x = (z_0..z_n, zbar_0..zbar_n) at fixed angles.
void affine_field(const PolyHamiltonian& gen, const std::vector<double>& theta,
                  Eigen::MatrixXcd& M, Eigen::VectorXcd& c) {
  const int n = gen.trunc().n_modes + 1;
  M = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  c = Eigen::VectorXcd::Zero(2 * n);
  if (static_cast<int>(theta.size()) < gen.n_angles())
    throw std::invalid_argument("time1_flow: not enough angle values");

  const cplx i_unit(0.0, 1.0);
  for (const auto& [key, coef] : gen.terms()) {
    if (exp_total(key.gam) + exp_total(key.kap) > 2)
      throw std::invalid_argument("time1_flow: generator has degree > 2");
    double phase_arg = 0.0;
    for (std::size_t a = 0; a < key.k.size(); ++a)
      phase_arg += key.k[a] * theta[a];
    const cplx base = coef * std::exp(i_unit * phase_arg);

    // Derivative with respect to z_j (gamma side) feeds zbardot_j = -i dF/dz_j;
    // the remaining monomial factor is either 1 or a single coordinate.
    auto route = [&](const ExpList& diff_side, const ExpList& other_side,
                     bool z_side) {
      for (const auto& [j, pw] : diff_side) {
        cplx val = base * static_cast<double>(pw);
        const int row = z_side ? n + j : j;  // z-derivative drives zbar row
        const cplx fac = z_side ? -i_unit : i_unit;
        // Residual monomial: diff_side with power reduced, plus other_side.
        int rem_mode = -1;
        bool rem_on_z = true;
        int rem_count = 0;
        if (pw == 2) {
          rem_mode = j;
          rem_on_z = z_side;
          rem_count = 1;
        }
        for (const auto& [m, p2] : diff_side)
          if (m != j) {
            rem_mode = m;
            rem_on_z = z_side;
            rem_count += p2;
          }
        for (const auto& [m, p2] : other_side) {
          rem_mode = m;
          rem_on_z = !z_side;
          rem_count += p2;
        }
        if (rem_count == 0) {
          c(row) += fac * val;
        } else {
          const int col = rem_on_z ? rem_mode : n + rem_mode;
          M(row, col) += fac * val;
        }
      }
    };
    route(key.gam, key.kap, /*z_side=*/true);
    route(key.kap, key.gam, /*z_side=*/false);
  }
}

}  // namespace

AffineFlow time1_flow(const PolyHamiltonian& gen,
                      const std::vector<double>& theta) {
  Eigen::MatrixXcd M;
  Eigen::VectorXcd c;
  affine_field(gen, theta, M, c);
  const int dim = static_cast<int>(M.rows());

  // Scale so the substep is well inside the Taylor radius, exponentiate by
  // series, then square the affine map back up.
  const double norm = M.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  while (norm * std::ldexp(1.0, -squarings) > 0.25) ++squarings;
  const double h = std::ldexp(1.0, -squarings);

  const Eigen::MatrixXcd Mh = M * h;
  Eigen::MatrixXcd E = Eigen::MatrixXcd::Identity(dim, dim);
  Eigen::MatrixXcd phi1 = Eigen::MatrixXcd::Identity(dim, dim);
  Eigen::MatrixXcd pow = Eigen::MatrixXcd::Identity(dim, dim);
  double fact = 1.0;
  for (int k = 1; k <= 24; ++k) {
    pow = pow * Mh;
    fact *= k;
    E += pow / fact;
    phi1 += pow / (fact * (k + 1));
  }
  Eigen::VectorXcd f = h * (phi1 * c);

  AffineFlow flow{std::move(E), std::move(f)};
  for (int s = 0; s < squarings; ++s) {
    flow.f = flow.E * flow.f + flow.f;
    flow.E = flow.E * flow.E;
  }
  return flow;
}

EmbeddingPoint compose_embedding(const std::vector<PolyHamiltonian>& chain,
                                 const std::vector<double>& theta_full,
                                 int n_modes) {
  const int n = n_modes + 1;
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(2 * n);
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    if (it->trunc().n_modes != n_modes)
      throw std::invalid_argument("compose_embedding: mode count mismatch");
    const std::vector<double> theta(
        theta_full.begin(), theta_full.begin() + it->n_angles());
    const AffineFlow flow = time1_flow(*it, theta);
    x = flow.E * x + flow.f;
  }
  EmbeddingPoint pt;
  pt.z.resize(n);
  pt.zbar.resize(n);
  pt.q.resize(n);
  for (int j = 0; j < n; ++j) {
    pt.z[j] = x(j);
    pt.zbar[j] = x(n + j);
    const cplx q = (pt.z[j] + pt.zbar[j]) / std::sqrt(2.0);
    if (std::abs(q.imag()) > 1e-9 * (1.0 + std::abs(q)))
      throw std::runtime_error("compose_embedding: non-real displacement");
    pt.q[j] = q.real();
  }
  return pt;
}

}  // namespace beamnf
