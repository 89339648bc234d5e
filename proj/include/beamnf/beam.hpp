// Clamped-mass beam chain on the circle, restricted to the even cosine
// modes: dispersion, basis overlap integrals, and assembly of the
// angle-forced potential Hamiltonian in complex mode variables.
#pragma once

#include <array>
#include <vector>

#include "beamnf/algebra.hpp"

namespace beamnf {

// Linear frequency of mode j for mass parameter m > 0: sqrt(j^4 + m).
double beam_mu(int j, double m);

// (mu_0, ..., mu_n): the unperturbed frequency vector of the retained modes.
std::vector<double> beam_frequencies(double m, int n_modes);

// Overlap integrals of the orthonormal cosine basis on [0, 2pi],
//   phi_0 = 1/sqrt(2 pi),  phi_j = cos(j x)/sqrt(pi)  (j >= 1):
// closed-form evaluation of  int phi_i phi_j phi_l dx  and the four-factor
// analogue.  Zero unless some signed combination of the modes vanishes.
double overlap3(int i, int j, int l);
double overlap4(int i, int j, int l, int n);

// Potential part of the forced beam Hamiltonian,
//   int_0^{2pi} ( psi0 u + psi1 u^2/2 + psi2 u^3/3 + psi3 u^4/4 ) dx ,
// for the mode-truncated displacement
//   u(x) = sum_{j=0..n_modes} (z_j + zbar_j) phi_j(x) / sqrt(2 mu_j).
// psi[l] are angle-only coefficient objects (zero z-degree, shared angle
// set); the result carries the same angle set and truncation box.
PolyHamiltonian assemble_forced_potential(
    const std::array<PolyHamiltonian, 4>& psi, double m);

}  // namespace beamnf
