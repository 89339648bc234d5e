// Closed-form time-1 flows of degree <= 2 generators at frozen angles.  The
// Hamiltonian vector field of such a generator is affine in (z, zbar), so
// its time-1 map is an exact affine map computed by scaled-and-squared
// matrix exponentials — no series truncation.
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "beamnf/algebra.hpp"

namespace beamnf {

// x(1) = E x(0) + f on the stacked vector x = (z_0..z_n, zbar_0..zbar_n).
struct AffineFlow {
  Eigen::MatrixXcd E;
  Eigen::VectorXcd f;
};

// Time-1 flow of  zdot_j = +i dF/dzbar_j,  zbardot_j = -i dF/dz_j  at fixed
// real angles.  Requires deg(F) <= 2.
AffineFlow time1_flow(const PolyHamiltonian& gen,
                      const std::vector<double>& theta);

// Image of the reference point z = zbar = 0 under the recorded generator
// chain: the last generator's flow is applied to the point first, matching
// the composition order of the coordinate changes.  theta_full supplies at
// least as many angles as the widest generator; each flow reads its own
// prefix.  q_j = (z_j + zbar_j)/sqrt(2) is returned as the real part (the
// imaginary residue, zero for real chains, is checked against 1e-9).
struct EmbeddingPoint {
  std::vector<cplx> z, zbar;
  std::vector<double> q;
};
EmbeddingPoint compose_embedding(const std::vector<PolyHamiltonian>& chain,
                                 const std::vector<double>& theta_full,
                                 int n_modes);

}  // namespace beamnf
