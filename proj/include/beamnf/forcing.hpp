// Almost-periodic forcing as a finite hierarchy of trigonometric blocks on
// growing angle sets, with geometric-in-exponent weights.  Blocks are pure
// data; the driver assembles their beam potentials and activates them one
// per iteration step.
#pragma once

#include <array>
#include <string>
#include <vector>

#include "beamnf/algebra.hpp"

namespace beamnf {

struct ForcingBlock {
  int index = 0;            // position j in the hierarchy
  int n_angles = 1;         // b_j: the block sees angles 0 .. b_j - 1
  int new_angle_begin = 0;  // b_{j-1}; angles >= this are new in this block
  // Angle-only coefficient objects for the four forcing levels (constant,
  // linear, quadratic, cubic in the displacement).
  std::array<PolyHamiltonian, 4> psi;
};

struct ForcingHierarchy {
  double eps = 1e-4;  // base amplitude, in (0,1)
  double rho = 1.0;   // weight-growth exponent, in (0,1]
  double c0 = 1.0;    // amplitude / derivative bound for every block
  std::vector<int> b;  // strictly increasing block dimensions b_0 < b_1 < ...
  std::vector<ForcingBlock> blocks;
};

// Weight of block j: eps^{(1+rho)^j}.
double block_weight(int j, double eps, double rho);

// Sum of weighted block evaluations at real angles; throws
// std::invalid_argument if theta is shorter than a block needs, or if the
// result has a non-negligible imaginary part (broken symmetry).
double eval_psi(const ForcingHierarchy& h, int l,
                const std::vector<double>& theta);

// Coefficient-majorant validation of the forcing bounds: per block and
// level, sum |c_k| <= c0 and, for each of the block's NEW angles i,
// sum |k_i||c_k| <= c0; conjugate symmetry; psi_0 not identically zero.
struct H2Report {
  struct Row {
    int block = 0;
    int l = 0;
    double sup_majorant = 0.0;
    double max_new_angle_derivative = 0.0;
    bool conj_symmetric = true;
    bool ok = true;
  };
  bool pass = false;
  bool psi0_nonzero = false;
  std::vector<Row> rows;
  std::string summary() const;
};
H2Report validate_H2(const ForcingHierarchy& h);

}  // namespace beamnf
