#include "beamnf/homological.hpp"

#include <cmath>
#include <sstream>

namespace beamnf {

namespace {
const cplx I(0.0, 1.0);

int l1(const std::vector<int>& v) {
  int s = 0;
  for (int x : v) s += std::abs(x);
  return s;
}

std::string pair_text(const std::vector<int>& k, const std::vector<int>& l) {
  std::ostringstream os;
  os << "k=(";
  for (std::size_t i = 0; i < k.size(); ++i) os << (i ? "," : "") << k[i];
  os << ") l=(";
  for (std::size_t i = 0; i < l.size(); ++i) os << (i ? "," : "") << l[i];
  os << ")";
  return os.str();
}
}  // namespace

std::vector<int> mode_signature(const TermKey& key, int n_modes) {
  std::vector<int> l(n_modes + 1, 0);
  for (const auto& [m, p] : key.gam) l[m] += p;
  for (const auto& [m, p] : key.kap) l[m] -= p;
  return l;
}

bool structurally_excluded(const TermKey& key) {
  for (int ki : key.k)
    if (ki != 0) return false;
  return key.gam == key.kap;
}

double divisor(const NormalFormState& ns, const std::vector<int>& k,
               const std::vector<int>& l) {
  if (k.size() != ns.omega.size())
    throw std::invalid_argument("divisor: Fourier size mismatch");
  if (l.size() > ns.Omega.size())
    throw std::invalid_argument("divisor: mode signature too long");
  if (l1(l) > 2)
    throw std::invalid_argument("divisor: |l|_1 > 2 is out of class");
  double d = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) d += k[i] * ns.omega[i];
  for (std::size_t j = 0; j < l.size(); ++j) d += l[j] * ns.Omega[j];
  return d;
}

double angle_bracket2(const std::vector<int>& l) {
  double s = 0.0;
  for (std::size_t j = 0; j < l.size(); ++j)
    s += static_cast<double>(j) * static_cast<double>(j) * l[j];
  return std::max(1.0, std::abs(s));
}

ScreenResult screen(const NormalFormState& ns, double alpha_v,
                    const std::vector<int>& k, const std::vector<int>& l) {
  ScreenResult sc;
  sc.value = divisor(ns, k, l);
  const int bv = static_cast<int>(ns.omega.size());
  sc.threshold = alpha_v * angle_bracket2(l) /
                 ((1.0 + static_cast<double>(ns.v) * ns.v) *
                  std::pow(l1(k) + 1.0, 2 * bv + 2));
  sc.margin = std::abs(sc.value) - sc.threshold;
  sc.pass = sc.margin >= 0.0;
  return sc;
}

PolyHamiltonian bracket_with_N(const NormalFormState& ns,
                               const PolyHamiltonian& f) {
  PolyHamiltonian out(f.n_angles(), f.trunc());
  for (const auto& [key, c] : f.terms()) {
    std::vector<int> l = mode_signature(key, f.trunc().n_modes);
    double d = 0.0;
    for (std::size_t i = 0; i < key.k.size(); ++i) d += key.k[i] * ns.omega[i];
    for (std::size_t j = 0; j < l.size(); ++j) d += l[j] * ns.Omega[j];
    out.add_term(key, I * d * c);
  }
  return out;
}

namespace {
// Shared division kernel: solve i * divisor * F = source term-by-term,
// routing structurally excluded keys to the caller.
template <typename Route>
PolyHamiltonian divide(const PolyHamiltonian& src, const NormalFormState& ns,
                       double alpha_v, Route&& route) {
  PolyHamiltonian f(src.n_angles(), src.trunc());
  for (const auto& [key, c] : src.terms()) {
    if (structurally_excluded(key)) {
      route(key, c);
      continue;
    }
    std::vector<int> l = mode_signature(key, src.trunc().n_modes);
    auto sc = screen(ns, alpha_v, key.k, l);
    if (!sc.pass)
      throw ResonantParameter(key.k, l,
                              "excluded resonance zone hit: " +
                                  pair_text(key.k, l));
    f.add_term(key, c / (I * sc.value));
  }
  return f;
}
}  // namespace

F1Result solve_F1(const PolyHamiltonian& r_low01, const NormalFormState& ns,
                  double alpha_v) {
  F1Result res;
  for (const auto& [key, c] : r_low01.terms())
    if (exp_total(key.gam) + exp_total(key.kap) > 1)
      throw std::invalid_argument("solve_F1: input degree exceeds one");
  res.f = divide(r_low01, ns, alpha_v,
                 [&](const TermKey&, cplx c) { res.r00_avg += c; });
  return res;
}

PolyHamiltonian correction_W(const PolyHamiltonian& p_high,
                             const PolyHamiltonian& f1) {
  for (const auto& [key, c] : f1.terms())
    if (exp_total(key.gam) + exp_total(key.kap) > 1)
      throw std::invalid_argument("correction_W: generator part not linear");
  auto w = poisson_bracket(degree_part(p_high, 3), f1);
  // degree arithmetic: 3 + (<=1) - 2 never leaves degree <= 2, and the
  // degree-0 generator part contributes nothing (no z-gradient)
  for (const auto& [key, c] : w.terms())
    if (exp_total(key.gam) + exp_total(key.kap) != 2)
      throw std::logic_error("correction_W: non-quadratic output term");
  return w;
}

F2Result solve_F2(const PolyHamiltonian& b2, const NormalFormState& ns,
                  double alpha_v) {
  F2Result res;
  res.b11_diag.assign(b2.trunc().n_modes + 1, cplx(0.0, 0.0));
  for (const auto& [key, c] : b2.terms())
    if (exp_total(key.gam) + exp_total(key.kap) != 2)
      throw std::invalid_argument("solve_F2: input is not pure degree 2");
  res.f = divide(b2, ns, alpha_v, [&](const TermKey& key, cplx c) {
    // k = 0 and gamma = kappa at degree 2 means exactly one z_j zbar_j
    res.b11_diag[key.gam[0].first] += c;
  });
  return res;
}

NormalUpdate normal_update(cplx r00_avg, const std::vector<cplx>& b11_diag,
                           double eps_v) {
  NormalUpdate u;
  auto real_part = [](cplx c, const char* what) {
    if (std::abs(c.imag()) > 1e-10 * (1.0 + std::abs(c)))
      throw RealityViolation(std::string("normal_update: ") + what +
                             " has imaginary residue");
    return c.real();
  };
  u.d_const = eps_v * real_part(r00_avg, "angle average");
  u.d_omega.reserve(b11_diag.size());
  for (cplx c : b11_diag)
    u.d_omega.push_back(eps_v * real_part(c, "diagonal"));
  return u;
}

bool generator_excluded_ok(const PolyHamiltonian& f) {
  for (const auto& [key, c] : f.terms()) {
    if (exp_total(key.gam) + exp_total(key.kap) > 2) return false;
    if (structurally_excluded(key)) return false;
  }
  return true;
}

double residual_check(const NormalFormState& ns, const PolyHamiltonian& r,
                      const PolyHamiltonian& p_high, const PolyHamiltonian& f,
                      const PolyHamiltonian& delta_n, const NormParams& np) {
  PolyHamiltonian resid = bracket_with_N(ns, f) * (-1.0);
  resid += r;
  resid += degree_split(poisson_bracket(p_high, f)).low;
  resid += delta_n * (-1.0);
  return sup_majorant(resid, np);
}

}  // namespace beamnf
