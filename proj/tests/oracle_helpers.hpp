// Shared independent oracles for the test suites.  Everything here goes
// through pointwise evaluation (beamnf::eval) or plain numerics only, so the
// structured algebra paths under test are cross-checked by a different route.
#pragma once

#include <complex>
#include <random>
#include <vector>

#include "beamnf/algebra.hpp"
#include "beamnf/rng.hpp"

namespace oracle {

using beamnf::cplx;
using beamnf::PolyHamiltonian;

// ---------------------------------------------------------------------------
// Finite-difference partials of H at a point, treating z and zbar as
// independent complex variables (H is polynomial, hence holomorphic in each).
// Central differences with a real step; error O(step^2 * |H'''|).
inline cplx fd_dz(const PolyHamiltonian& h, const std::vector<cplx>& th,
                  std::vector<cplx> z, const std::vector<cplx>& zb, int j,
                  double step = 1e-5) {
  z[j] += step;
  cplx up = beamnf::eval(h, th, z, zb);
  z[j] -= 2 * step;
  cplx dn = beamnf::eval(h, th, z, zb);
  return (up - dn) / (2 * step);
}

inline cplx fd_dzbar(const PolyHamiltonian& h, const std::vector<cplx>& th,
                     const std::vector<cplx>& z, std::vector<cplx> zb, int j,
                     double step = 1e-5) {
  zb[j] += step;
  cplx up = beamnf::eval(h, th, z, zb);
  zb[j] -= 2 * step;
  cplx dn = beamnf::eval(h, th, z, zb);
  return (up - dn) / (2 * step);
}

// Pointwise Poisson bracket i * sum_j (f_z g_zbar - f_zbar g_z) by finite
// differences — the independent check for the structured bracket.
inline cplx fd_bracket_value(const PolyHamiltonian& f,
                             const PolyHamiltonian& g,
                             const std::vector<cplx>& th,
                             const std::vector<cplx>& z,
                             const std::vector<cplx>& zb) {
  int n = static_cast<int>(z.size());
  cplx acc = 0.0;
  for (int j = 0; j < n; ++j) {
    acc += fd_dz(f, th, z, zb, j) * fd_dzbar(g, th, z, zb, j) -
           fd_dzbar(f, th, z, zb, j) * fd_dz(g, th, z, zb, j);
  }
  return cplx(0.0, 1.0) * acc;
}

// ---------------------------------------------------------------------------
// Reference flow of a generator: integrates
//   dz_j/dt = +i dF/dzbar_j,   dzbar_j/dt = -i dF/dz_j
// at fixed angles with classical RK4 and finite-difference gradients.
// Used to validate both the closed-form affine flow and lie_transform.
struct FlowPoint {
  std::vector<cplx> z, zb;
};

inline FlowPoint rk4_generator_flow(const PolyHamiltonian& f,
                                    const std::vector<cplx>& th, FlowPoint p,
                                    double t_end = 1.0, int steps = 200) {
  const int n = static_cast<int>(p.z.size());
  const cplx I(0.0, 1.0);
  auto deriv = [&](const FlowPoint& q) {
    FlowPoint d{std::vector<cplx>(n), std::vector<cplx>(n)};
    for (int j = 0; j < n; ++j) {
      d.z[j] = I * fd_dzbar(f, th, q.z, q.zb, j);
      d.zb[j] = -I * fd_dz(f, th, q.z, q.zb, j);
    }
    return d;
  };
  auto axpy = [&](const FlowPoint& a, double s, const FlowPoint& b) {
    FlowPoint r = a;
    for (int j = 0; j < n; ++j) {
      r.z[j] += s * b.z[j];
      r.zb[j] += s * b.zb[j];
    }
    return r;
  };
  double h = t_end / steps;
  for (int it = 0; it < steps; ++it) {
    FlowPoint k1 = deriv(p);
    FlowPoint k2 = deriv(axpy(p, h / 2, k1));
    FlowPoint k3 = deriv(axpy(p, h / 2, k2));
    FlowPoint k4 = deriv(axpy(p, h, k3));
    for (int j = 0; j < n; ++j) {
      p.z[j] += h / 6 * (k1.z[j] + 2.0 * k2.z[j] + 2.0 * k3.z[j] + k4.z[j]);
      p.zb[j] += h / 6 * (k1.zb[j] + 2.0 * k2.zb[j] + 2.0 * k3.zb[j] + k4.zb[j]);
    }
  }
  return p;
}

// ---------------------------------------------------------------------------
// Random inputs.
inline double rnd(std::mt19937_64& g, double lo = -1.0, double hi = 1.0) {
  return lo + (hi - lo) * beamnf::u01(g);
}

// Random real (conjugate-symmetric) PolyHamiltonian with given degree cap.
inline PolyHamiltonian random_real_poly(std::mt19937_64& g, int b,
                                        beamnf::Trunc tr, int max_deg,
                                        int n_terms) {
  PolyHamiltonian h(b, tr);
  for (int t = 0; t < n_terms; ++t) {
    std::vector<int> k(b);
    for (auto& ki : k) ki = static_cast<int>(g() % (2 * tr.k_max + 1)) - tr.k_max;
    int deg = static_cast<int>(g() % (max_deg + 1));
    beamnf::ExpList gam, kap;
    for (int d = 0; d < deg; ++d) {
      int mode = static_cast<int>(g() % (tr.n_modes + 1));
      if (g() & 1)
        gam = beamnf::exp_add(gam, {{mode, 1}});
      else
        kap = beamnf::exp_add(kap, {{mode, 1}});
    }
    cplx c(rnd(g), rnd(g));
    h.add_term(k, gam, kap, c);
    // conjugate partner keeps the object real
    std::vector<int> mk(b);
    for (int i = 0; i < b; ++i) mk[i] = -k[i];
    h.add_term(mk, kap, gam, std::conj(c));
  }
  return h;
}

inline std::vector<cplx> random_cvec(std::mt19937_64& g, int n, double scale) {
  std::vector<cplx> v(n);
  for (auto& x : v) x = cplx(rnd(g), rnd(g)) * scale;
  return v;
}

inline std::vector<cplx> real_angles(std::mt19937_64& g, int b) {
  std::vector<cplx> th(b);
  for (auto& t : th) t = 2 * 3.14159265358979312 * beamnf::u01(g);
  return th;
}

// Largest coefficient discrepancy over the union of term keys.
inline double max_coeff_diff(const PolyHamiltonian& a,
                             const PolyHamiltonian& b) {
  double m = 0.0;
  for (const auto& [key, c] : a.terms())
    m = std::max(m, std::abs(c - b.coefficient(key)));
  for (const auto& [key, c] : b.terms())
    m = std::max(m, std::abs(c - a.coefficient(key)));
  return m;
}

inline double max_abs_coeff(const PolyHamiltonian& a) {
  double m = 0.0;
  for (const auto& [key, c] : a.terms()) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace oracle
