#include "beamnf/algebra.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>

namespace beamnf {

namespace {

// Sorted-by-mode, merged, positive-power form shared by every key.
ExpList canonical(ExpList e) {
  std::sort(e.begin(), e.end());
  ExpList out;
  for (const auto& [m, p] : e) {
    if (p == 0) continue;
    if (!out.empty() && out.back().first == m)
      out.back().second += p;
    else
      out.emplace_back(m, p);
  }
  return out;
}

cplx pow_int(cplx z, int n) {
  cplx r = 1.0;
  for (int i = 0; i < n; ++i) r *= z;
  return r;
}

void require(bool ok, const char* what) {
  if (!ok) throw IncompatibleTruncation(what);
}

// ---------------------------------------------------------------------------
// Packed-key fast path for poisson_bracket.
//
// For small truncation boxes the whole TermKey fits one 64-bit word: each
// angle index is stored biased by k_max, each mode exponent in its own field.
// Field widths leave headroom for one addition of two in-box keys, so key
// arithmetic never carries across fields and out-of-box products are detected
// by per-field range checks.  Products are accumulated in a hash map keyed by
// the packed word with exactly the same per-key arrival order, first-store
// value, and erase-on-exact-zero behaviour as PolyHamiltonian::add_term, so
// the resulting coefficients are bit-identical to the reference path.
// ---------------------------------------------------------------------------

struct PackSpec {
  bool ok = false;
  int b = 0;
  int k_max = 0, deg_max = 0, n_fields_m = 0;
  int kb = 0, mb = 0;           // bits per angle / per mode field
  int gam_base = 0, kap_base = 0;
  std::uint64_t kmask = 0, mmask = 0;
  std::uint64_t bias = 0;       // the zero key: every angle field = k_max
};

PackSpec make_pack_spec(int b, const Trunc& tr) {
  PackSpec s;
  s.b = b;
  s.k_max = tr.k_max;
  s.deg_max = tr.deg_max;
  s.n_fields_m = tr.n_modes + 1;
  if (b < 0 || tr.k_max < 0 || tr.deg_max < 0 || tr.n_modes < 0) return s;
  // headroom for the sum of two stored fields: angle values live in
  // [0, 2 k_max] each, exponents in [0, deg_max] each
  s.kb = std::bit_width(static_cast<unsigned>(4 * tr.k_max) | 1u);
  s.mb = std::bit_width(static_cast<unsigned>(2 * tr.deg_max) | 1u);
  const long long bits =
      static_cast<long long>(b) * s.kb + 2ll * s.n_fields_m * s.mb;
  if (bits > 64) return s;
  s.kmask = (std::uint64_t(1) << s.kb) - 1;
  s.mmask = (std::uint64_t(1) << s.mb) - 1;
  s.gam_base = b * s.kb;
  s.kap_base = s.gam_base + s.n_fields_m * s.mb;
  for (int i = 0; i < b; ++i)
    s.bias |= static_cast<std::uint64_t>(tr.k_max) << (i * s.kb);
  s.ok = true;
  return s;
}

std::uint64_t pack_key(const TermKey& key, const PackSpec& s) {
  std::uint64_t v = 0;
  for (int i = 0; i < s.b; ++i)
    v |= static_cast<std::uint64_t>(key.k[i] + s.k_max) << (i * s.kb);
  for (const auto& [m, p] : key.gam)
    v |= static_cast<std::uint64_t>(p) << (s.gam_base + m * s.mb);
  for (const auto& [m, p] : key.kap)
    v |= static_cast<std::uint64_t>(p) << (s.kap_base + m * s.mb);
  return v;
}

TermKey unpack_key(std::uint64_t v, const PackSpec& s) {
  TermKey key;
  key.k.resize(s.b);
  for (int i = 0; i < s.b; ++i)
    key.k[i] = static_cast<int>((v >> (i * s.kb)) & s.kmask) - s.k_max;
  for (int m = 0; m < s.n_fields_m; ++m) {
    const int p = static_cast<int>((v >> (s.gam_base + m * s.mb)) & s.mmask);
    if (p != 0) key.gam.emplace_back(m, p);
  }
  for (int m = 0; m < s.n_fields_m; ++m) {
    const int p = static_cast<int>((v >> (s.kap_base + m * s.mb)) & s.mmask);
    if (p != 0) key.kap.emplace_back(m, p);
  }
  return key;
}

void bracket_packed(const PolyHamiltonian& f, const PolyHamiltonian& g,
                    const PackSpec& s, PolyHamiltonian& out) {
  const cplx I(0.0, 1.0);

  struct Packed {
    std::uint64_t key;
    cplx c;
    int deg;
  };
  std::vector<Packed> gs;
  gs.reserve(g.size());
  for (const auto& [k2, c2] : g.terms())
    gs.push_back({pack_key(k2, s), c2, exp_total(k2.gam) + exp_total(k2.kap)});

  // one entry per exponent of the f term that can contract with a g term
  struct Contraction {
    std::uint64_t own;    // exponent bit removed from the f side
    std::uint64_t other;  // exponent bit removed from the g side
    int other_shift;      // field of the matching exponent on the g side
    cplx pref;            // +/- i * (exponent on the f side)
  };
  std::vector<Contraction> cons;

  std::unordered_map<std::uint64_t, cplx> acc;
  acc.reserve(1 << 13);

  const std::uint64_t klo = static_cast<std::uint64_t>(s.k_max);
  const std::uint64_t khi = static_cast<std::uint64_t>(3 * s.k_max);
  for (const auto& [k1, c1] : f.terms()) {
    const std::uint64_t p1 = pack_key(k1, s);
    const int deg1 = exp_total(k1.gam) + exp_total(k1.kap);
    cons.clear();
    for (const auto& [j, g1j] : k1.gam)
      cons.push_back({std::uint64_t(1) << (s.gam_base + j * s.mb),
                      std::uint64_t(1) << (s.kap_base + j * s.mb),
                      s.kap_base + j * s.mb, I * static_cast<double>(g1j)});
    for (const auto& [j, k1j] : k1.kap)
      cons.push_back({std::uint64_t(1) << (s.kap_base + j * s.mb),
                      std::uint64_t(1) << (s.gam_base + j * s.mb),
                      s.gam_base + j * s.mb, -I * static_cast<double>(k1j)});
    if (cons.empty()) continue;
    for (const Packed& t2 : gs) {
      for (const Contraction& e : cons) {
        const int other =
            static_cast<int>((t2.key >> e.other_shift) & s.mmask);
        if (other == 0) continue;
        const cplx coeff =
            e.pref * static_cast<double>(other) * c1 * t2.c;
        if (coeff == cplx(0.0, 0.0)) continue;
        if (deg1 + t2.deg - 2 > s.deg_max) {
          out.add_dropped_mass(std::abs(coeff));
          continue;
        }
        // angle fields of the raw sum hold k1_i + k2_i + 2 k_max
        const std::uint64_t raw = (p1 - e.own) + (t2.key - e.other);
        bool in_range = true;
        for (int i = 0; i < s.b; ++i) {
          const std::uint64_t v = (raw >> (i * s.kb)) & s.kmask;
          if (v < klo || v > khi) {
            in_range = false;
            break;
          }
        }
        if (!in_range) {
          out.add_dropped_mass(std::abs(coeff));
          continue;
        }
        auto [it, fresh] = acc.try_emplace(raw - s.bias, coeff);
        if (!fresh) {
          it->second += coeff;
          if (it->second == cplx(0.0, 0.0)) acc.erase(it);
        }
      }
    }
  }
  for (const auto& [pk, c] : acc) out.add_term(unpack_key(pk, s), c);
}

}  // namespace

int exp_total(const ExpList& e) {
  int t = 0;
  for (const auto& [m, p] : e) t += p;
  return t;
}

int exp_power(const ExpList& e, int mode) {
  for (const auto& [m, p] : e)
    if (m == mode) return p;
  return 0;
}

ExpList exp_add(const ExpList& a, const ExpList& b) {
  ExpList c = a;
  c.insert(c.end(), b.begin(), b.end());
  return canonical(std::move(c));
}

ExpList exp_dec(const ExpList& e, int mode) {
  ExpList out;
  bool found = false;
  for (const auto& [m, p] : e) {
    if (m == mode) {
      found = true;
      if (p > 1) out.emplace_back(m, p - 1);
    } else {
      out.emplace_back(m, p);
    }
  }
  if (!found) throw std::logic_error("exp_dec: mode not present");
  return out;
}

void PolyHamiltonian::add_term(const std::vector<int>& k, ExpList gam,
                               ExpList kap, cplx c) {
  if (c == cplx(0.0, 0.0)) return;
  require(static_cast<int>(k.size()) == b_, "add_term: angle count mismatch");
  TermKey key{k, canonical(std::move(gam)), canonical(std::move(kap))};
  bool in_box = exp_total(key.gam) + exp_total(key.kap) <= tr_.deg_max;
  for (int ki : k) in_box = in_box && std::abs(ki) <= tr_.k_max;
  for (const auto& [m, p] : key.gam) in_box = in_box && m >= 0 && m <= tr_.n_modes;
  for (const auto& [m, p] : key.kap) in_box = in_box && m >= 0 && m <= tr_.n_modes;
  if (!in_box) {
    dropped_mass_ += std::abs(c);
    return;
  }
  auto [it, fresh] = terms_.try_emplace(std::move(key), c);
  if (!fresh) {
    it->second += c;
    if (it->second == cplx(0.0, 0.0)) terms_.erase(it);
  }
}

void PolyHamiltonian::add_term(const TermKey& key, cplx c) {
  add_term(key.k, key.gam, key.kap, c);
}

cplx PolyHamiltonian::coefficient(const TermKey& key) const {
  TermKey canon{key.k, canonical(key.gam), canonical(key.kap)};
  auto it = terms_.find(canon);
  return it == terms_.end() ? cplx(0.0, 0.0) : it->second;
}

PolyHamiltonian& PolyHamiltonian::operator+=(const PolyHamiltonian& o) {
  require(b_ == o.b_ && tr_ == o.tr_, "operator+=: mismatched objects");
  for (const auto& [key, c] : o.terms_) {
    auto [it, fresh] = terms_.try_emplace(key, c);
    if (!fresh) {
      it->second += c;
      if (it->second == cplx(0.0, 0.0)) terms_.erase(it);
    }
  }
  dropped_mass_ += o.dropped_mass_;
  return *this;
}

PolyHamiltonian& PolyHamiltonian::operator*=(double s) {
  return (*this) *= cplx(s, 0.0);
}

PolyHamiltonian& PolyHamiltonian::operator*=(cplx s) {
  if (s == cplx(0.0, 0.0)) {
    terms_.clear();
    dropped_mass_ = 0.0;
    return *this;
  }
  for (auto& [key, c] : terms_) c *= s;
  dropped_mass_ *= std::abs(s);
  return *this;
}

void PolyHamiltonian::prune(double rel_tol) {
  double mx = 0.0;
  for (const auto& [key, c] : terms_) mx = std::max(mx, std::abs(c));
  double cut = rel_tol * mx;
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (std::abs(it->second) < cut)
      it = terms_.erase(it);
    else
      ++it;
  }
}

PolyHamiltonian PolyHamiltonian::embedded(int n_angles_new) const {
  require(n_angles_new >= b_, "embedded: cannot shrink angle count");
  PolyHamiltonian out(n_angles_new, tr_);
  out.dropped_mass_ = dropped_mass_;
  for (const auto& [key, c] : terms_) {
    std::vector<int> k = key.k;
    k.resize(n_angles_new, 0);
    out.terms_.emplace(TermKey{std::move(k), key.gam, key.kap}, c);
  }
  return out;
}

PolyHamiltonian operator+(PolyHamiltonian a, const PolyHamiltonian& b) {
  a += b;
  return a;
}

PolyHamiltonian operator-(PolyHamiltonian a, const PolyHamiltonian& b) {
  PolyHamiltonian nb = b;
  nb *= -1.0;
  a += nb;
  return a;
}

PolyHamiltonian operator*(PolyHamiltonian a, double s) {
  a *= s;
  return a;
}

PolyHamiltonian operator*(PolyHamiltonian a, cplx s) {
  a *= s;
  return a;
}

PolyHamiltonian multiply(const PolyHamiltonian& f, const PolyHamiltonian& g) {
  require(f.n_angles() == g.n_angles() && f.trunc() == g.trunc(),
          "multiply: mismatched objects");
  PolyHamiltonian out(f.n_angles(), f.trunc());
  out.add_dropped_mass(f.dropped_mass() + g.dropped_mass());
  const int b = f.n_angles();
  std::vector<int> k(b);
  for (const auto& [k1, c1] : f.terms()) {
    for (const auto& [k2, c2] : g.terms()) {
      for (int i = 0; i < b; ++i) k[i] = k1.k[i] + k2.k[i];
      out.add_term(k, exp_add(k1.gam, k2.gam), exp_add(k1.kap, k2.kap),
                   c1 * c2);
    }
  }
  out.prune();
  return out;
}

namespace detail {
bool force_reference_bracket = false;
}  // namespace detail

PolyHamiltonian poisson_bracket(const PolyHamiltonian& f,
                                const PolyHamiltonian& g) {
  require(f.n_angles() == g.n_angles() && f.trunc() == g.trunc(),
          "poisson_bracket: mismatched objects");
  PolyHamiltonian out(f.n_angles(), f.trunc());
  out.add_dropped_mass(f.dropped_mass() + g.dropped_mass());
  const PackSpec spec = make_pack_spec(f.n_angles(), f.trunc());
  if (spec.ok && !detail::force_reference_bracket &&
      f.size() * g.size() >= 4096) {
    bracket_packed(f, g, spec, out);
    out.prune();
    return out;
  }
  const int b = f.n_angles();
  const cplx I(0.0, 1.0);
  std::vector<int> k(b);
  for (const auto& [k1, c1] : f.terms()) {
    for (const auto& [k2, c2] : g.terms()) {
      // contract each mode that appears with a z on one side and a zbar on
      // the other: i * (gam1_j kap2_j - kap1_j gam2_j) at the reduced key
      for (const auto& [j, g1j] : k1.gam) {
        int k2j = exp_power(k2.kap, j);
        if (k2j == 0) continue;
        for (int i = 0; i < b; ++i) k[i] = k1.k[i] + k2.k[i];
        out.add_term(k, exp_add(exp_dec(k1.gam, j), k2.gam),
                     exp_add(k1.kap, exp_dec(k2.kap, j)),
                     I * static_cast<double>(g1j) *
                         static_cast<double>(k2j) * c1 * c2);
      }
      for (const auto& [j, k1j] : k1.kap) {
        int g2j = exp_power(k2.gam, j);
        if (g2j == 0) continue;
        for (int i = 0; i < b; ++i) k[i] = k1.k[i] + k2.k[i];
        out.add_term(k, exp_add(k1.gam, exp_dec(k2.gam, j)),
                     exp_add(exp_dec(k1.kap, j), k2.kap),
                     -I * static_cast<double>(k1j) *
                         static_cast<double>(g2j) * c1 * c2);
      }
    }
  }
  out.prune();
  return out;
}

DegreeSplit degree_split(const PolyHamiltonian& h) {
  DegreeSplit sp{PolyHamiltonian(h.n_angles(), h.trunc()),
                 PolyHamiltonian(h.n_angles(), h.trunc())};
  for (const auto& [key, c] : h.terms()) {
    if (exp_total(key.gam) + exp_total(key.kap) <= 2)
      sp.low.add_term(key, c);
    else
      sp.high.add_term(key, c);
  }
  return sp;
}

PolyHamiltonian degree_part(const PolyHamiltonian& h, int deg) {
  PolyHamiltonian out(h.n_angles(), h.trunc());
  for (const auto& [key, c] : h.terms())
    if (exp_total(key.gam) + exp_total(key.kap) == deg) out.add_term(key, c);
  return out;
}

LieResult lie_transform(const PolyHamiltonian& h, const PolyHamiltonian& f,
                        int order, const NormParams& np) {
  require(degree_split(f).high.empty(),
          "lie_transform: generator degree exceeds two");
  LieResult res;
  res.h = h;
  PolyHamiltonian term = h;
  double m_prev = sup_majorant(h, np);
  for (int n = 1; n <= order; ++n) {
    term = poisson_bracket(term, f);
    term *= 1.0 / n;
    if (term.empty()) {
      res.tail_bound = 0.0;
      res.ratio = 0.0;
      return res;
    }
    res.h += term;
    double m_n = sup_majorant(term, np);
    res.ratio = m_prev > 0.0 ? m_n / m_prev : 0.0;
    m_prev = m_n;
  }
  if (res.ratio < 1.0) {
    res.tail_bound = m_prev * res.ratio / (1.0 - res.ratio);
  } else {
    res.tail_bound = std::numeric_limits<double>::infinity();
    res.diverged = true;
  }
  res.h.prune();
  return res;
}

double mode_weight(int j, double a, double p) {
  return j == 0 ? 1.0 : std::pow(j, p) * std::exp(a * j);
}

namespace {
double term_majorant(const TermKey& key, cplx c, const NormParams& np) {
  int k1 = 0;
  for (int ki : key.k) k1 += std::abs(ki);
  double v = std::abs(c) * std::exp(k1 * np.s);
  for (const auto& [m, p] : key.gam)
    v *= pow_int(np.r / mode_weight(m, np.a, np.p), p).real();
  for (const auto& [m, p] : key.kap)
    v *= pow_int(np.r / mode_weight(m, np.a, np.p), p).real();
  return v;
}
}  // namespace

double sup_majorant(const PolyHamiltonian& h, const NormParams& np) {
  double s = 0.0;
  for (const auto& [key, c] : h.terms()) s += term_majorant(key, c, np);
  return s;
}

double vf_majorant_norm(const PolyHamiltonian& h, const NormParams& np) {
  const int b = h.n_angles();
  const int n = h.trunc().n_modes;
  std::vector<double> y(b, 0.0), u(n + 1, 0.0), v(n + 1, 0.0);
  for (const auto& [key, c] : h.terms()) {
    double base = term_majorant(key, c, np);
    for (int a = 0; a < b; ++a) y[a] += std::abs(key.k[a]) * base;
    // differentiating one z_j (or zbar_j) removes one r / w_j factor
    for (const auto& [j, p] : key.kap)
      u[j] += p * base / (np.r / mode_weight(j, np.a, np.p));
    for (const auto& [j, p] : key.gam)
      v[j] += p * base / (np.r / mode_weight(j, np.a, np.p));
  }
  double ymax = 0.0;
  for (double ya : y) ymax = std::max(ymax, ya);
  double un = 0.0, vn = 0.0;
  for (int j = 0; j <= n; ++j) {
    double wj = mode_weight(j, np.a, np.p + 2);
    un += u[j] * u[j] * wj * wj;
    vn += v[j] * v[j] * wj * wj;
  }
  return ymax / (np.r * np.r) + (std::sqrt(un) + std::sqrt(vn)) / np.r;
}

double seq_norm(const std::vector<cplx>& z, double a, double p) {
  double s = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    double w = mode_weight(static_cast<int>(j), a, p);
    s += std::norm(z[j]) * w * w;
  }
  return std::sqrt(s);
}

bool check_real(const PolyHamiltonian& h, double rel_tol) {
  for (const auto& [key, c] : h.terms()) {
    std::vector<int> mk(key.k.size());
    for (std::size_t i = 0; i < mk.size(); ++i) mk[i] = -key.k[i];
    cplx partner = h.coefficient({mk, key.kap, key.gam});
    if (std::abs(partner - std::conj(c)) >
        rel_tol * (std::abs(c) + std::abs(partner) + 1e-300))
      return false;
  }
  return true;
}

cplx eval(const PolyHamiltonian& h, const std::vector<cplx>& theta,
          const std::vector<cplx>& z, const std::vector<cplx>& zbar) {
  const cplx I(0.0, 1.0);
  cplx acc = 0.0;
  for (const auto& [key, c] : h.terms()) {
    cplx phase = 0.0;
    for (std::size_t a = 0; a < key.k.size(); ++a)
      phase += static_cast<double>(key.k[a]) * theta[a];
    cplx t = c * std::exp(I * phase);
    for (const auto& [m, p] : key.gam) t *= pow_int(z[m], p);
    for (const auto& [m, p] : key.kap) t *= pow_int(zbar[m], p);
    acc += t;
  }
  return acc;
}

PolyHamiltonian d_dz(const PolyHamiltonian& h, int mode) {
  PolyHamiltonian out(h.n_angles(), h.trunc());
  for (const auto& [key, c] : h.terms()) {
    int p = exp_power(key.gam, mode);
    if (p == 0) continue;
    out.add_term(key.k, exp_dec(key.gam, mode), key.kap,
                 c * static_cast<double>(p));
  }
  return out;
}

PolyHamiltonian d_dzbar(const PolyHamiltonian& h, int mode) {
  PolyHamiltonian out(h.n_angles(), h.trunc());
  for (const auto& [key, c] : h.terms()) {
    int p = exp_power(key.kap, mode);
    if (p == 0) continue;
    out.add_term(key.k, key.gam, exp_dec(key.kap, mode),
                 c * static_cast<double>(p));
  }
  return out;
}

}  // namespace beamnf
