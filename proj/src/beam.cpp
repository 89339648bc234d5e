#include "beamnf/beam.hpp"

#include <cmath>
#include <stdexcept>

namespace beamnf {

namespace {
constexpr double PI = 3.14159265358979323846;

// Shared closed form: with z zero modes and nonzero modes S,
//   int prod phi = (2pi)^{-z/2} pi^{-|S|/2} * I(S),
//   I(S) = 2pi                        if S is empty,
//        = 2pi/2^{|S|} * #{sign choices with sum_i s_i S_i = 0}  otherwise.
double overlap(const std::vector<int>& modes) {
  std::vector<int> s;
  int zeros = 0;
  for (int m : modes) {
    if (m < 0) throw std::invalid_argument("overlap: negative mode");
    if (m == 0)
      ++zeros;
    else
      s.push_back(m);
  }
  double pref = std::pow(2 * PI, -0.5 * zeros) * std::pow(PI, -0.5 * s.size());
  if (s.empty()) return pref * 2 * PI;
  int hits = 0;
  int combos = 1 << s.size();
  for (int mask = 0; mask < combos; ++mask) {
    int sum = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
      sum += (mask >> i & 1) ? s[i] : -s[i];
    if (sum == 0) ++hits;
  }
  return pref * (2 * PI / combos) * hits;
}
}  // namespace

double beam_mu(int j, double m) {
  return std::sqrt(static_cast<double>(j) * j * j * j + m);
}

std::vector<double> beam_frequencies(double m, int n_modes) {
  std::vector<double> mu(n_modes + 1);
  for (int j = 0; j <= n_modes; ++j) mu[j] = beam_mu(j, m);
  return mu;
}

double overlap3(int i, int j, int l) { return overlap({i, j, l}); }

double overlap4(int i, int j, int l, int n) { return overlap({i, j, l, n}); }

PolyHamiltonian assemble_forced_potential(
    const std::array<PolyHamiltonian, 4>& psi, double m) {
  const int b = psi[0].n_angles();
  const Trunc tr = psi[0].trunc();
  for (const auto& p : psi) {
    if (p.n_angles() != b || !(p.trunc() == tr))
      throw IncompatibleTruncation("assemble: forcing objects disagree");
    for (const auto& [key, c] : p.terms())
      if (!key.gam.empty() || !key.kap.empty())
        throw IncompatibleTruncation("assemble: forcing must be angle-only");
  }
  const int n = tr.n_modes;
  std::vector<double> mu = beam_frequencies(m, n);

  PolyHamiltonian out(b, tr);

  // linear: sqrt(pi) psi0 (z0 + zbar0) / sqrt(mu0)
  for (const auto& [key, c] : psi[0].terms()) {
    cplx w = c * std::sqrt(PI) / std::sqrt(mu[0]);
    out.add_term(key.k, ExpList{{0, 1}}, {}, w);
    out.add_term(key.k, {}, ExpList{{0, 1}}, w);
  }

  // quadratic: psi1/4 * sum_j (z_j + zbar_j)^2 / mu_j
  for (const auto& [key, c] : psi[1].terms()) {
    for (int j = 0; j <= n; ++j) {
      cplx w = c / (4 * mu[j]);
      out.add_term(key.k, ExpList{{j, 2}}, {}, w);
      out.add_term(key.k, ExpList{{j, 1}}, ExpList{{j, 1}}, 2.0 * w);
      out.add_term(key.k, {}, ExpList{{j, 2}}, w);
    }
  }

  // cubic: sqrt(2)/12 psi2 * sum over ordered triples of
  //   overlap3 / sqrt(mu_i mu_j mu_l) * prod (z + zbar)
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      for (int l = 0; l <= n; ++l) {
        double g3 = overlap3(i, j, l);
        if (g3 == 0.0) continue;
        double base = std::sqrt(2.0) / 12.0 * g3 /
                      std::sqrt(mu[i] * mu[j] * mu[l]);
        int tuple[3] = {i, j, l};
        for (const auto& [key, c] : psi[2].terms()) {
          for (int mask = 0; mask < 8; ++mask) {
            ExpList gam, kap;
            for (int t = 0; t < 3; ++t) {
              if (mask >> t & 1)
                kap = exp_add(kap, {{tuple[t], 1}});
              else
                gam = exp_add(gam, {{tuple[t], 1}});
            }
            out.add_term(key.k, std::move(gam), std::move(kap), c * base);
          }
        }
      }

  // quartic: psi3/16 * sum over ordered quadruples of
  //   overlap4 / sqrt(mu_i mu_j mu_l mu_q) * prod (z + zbar)
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      for (int l = 0; l <= n; ++l)
        for (int q = 0; q <= n; ++q) {
          double g4 = overlap4(i, j, l, q);
          if (g4 == 0.0) continue;
          double base =
              g4 / (16.0 * std::sqrt(mu[i] * mu[j] * mu[l] * mu[q]));
          int tuple[4] = {i, j, l, q};
          for (const auto& [key, c] : psi[3].terms()) {
            for (int mask = 0; mask < 16; ++mask) {
              ExpList gam, kap;
              for (int t = 0; t < 4; ++t) {
                if (mask >> t & 1)
                  kap = exp_add(kap, {{tuple[t], 1}});
                else
                  gam = exp_add(gam, {{tuple[t], 1}});
              }
              out.add_term(key.k, std::move(gam), std::move(kap), c * base);
            }
          }
        }

  return out;
}

}  // namespace beamnf
