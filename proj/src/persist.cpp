#include "beamnf/persist.hpp"

#include <cmath>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace beamnf {

namespace {

std::string hexd(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

double parse_hexd(const std::string& tok) {
  char* end = nullptr;
  const double x = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str())
    throw std::runtime_error("snapshot parse: bad float token '" + tok + "'");
  return x;
}

std::string expect(std::istream& is, const char* what) {
  std::string tok;
  if (!(is >> tok))
    throw std::runtime_error(std::string("snapshot parse: missing ") + what);
  return tok;
}

void expect_word(std::istream& is, const std::string& word) {
  const std::string tok = expect(is, word.c_str());
  if (tok != word)
    throw std::runtime_error("snapshot parse: expected '" + word + "', got '" +
                             tok + "'");
}

int expect_int(std::istream& is, const char* what) {
  return std::stoi(expect(is, what));
}

void write_exps(std::ostream& os, const ExpList& e) {
  os << ' ' << e.size();
  for (const auto& [mode, pw] : e) os << ' ' << mode << ' ' << pw;
}

ExpList read_exps(std::istream& is) {
  const int n = expect_int(is, "support size");
  ExpList e;
  for (int i = 0; i < n; ++i) {
    const int mode = expect_int(is, "mode");
    const int pw = expect_int(is, "power");
    e.push_back({mode, pw});
  }
  return e;
}

void write_dvec(std::ostream& os, const char* tag,
                const std::vector<double>& v) {
  os << tag << ' ' << v.size();
  for (double x : v) os << ' ' << hexd(x);
  os << '\n';
}

std::vector<double> read_dvec(std::istream& is, const char* tag) {
  expect_word(is, tag);
  const int n = expect_int(is, "vector size");
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = parse_hexd(expect(is, "vector entry"));
  return v;
}

}  // namespace

void write_poly(std::ostream& os, const PolyHamiltonian& h) {
  const Trunc& tr = h.trunc();
  os << "poly " << h.n_angles() << ' ' << tr.n_modes << ' ' << tr.k_max << ' '
     << tr.deg_max << ' ' << h.terms().size() << ' ' << hexd(h.dropped_mass())
     << '\n';
  for (const auto& [key, coef] : h.terms()) {
    os << "t " << key.k.size();
    for (int ki : key.k) os << ' ' << ki;
    write_exps(os, key.gam);
    write_exps(os, key.kap);
    os << ' ' << hexd(coef.real()) << ' ' << hexd(coef.imag()) << '\n';
  }
}

PolyHamiltonian read_poly(std::istream& is) {
  expect_word(is, "poly");
  const int b = expect_int(is, "angle count");
  Trunc tr;
  tr.n_modes = expect_int(is, "n_modes");
  tr.k_max = expect_int(is, "k_max");
  tr.deg_max = expect_int(is, "deg_max");
  const int n_terms = expect_int(is, "term count");
  const double dropped = parse_hexd(expect(is, "dropped mass"));
  PolyHamiltonian h(b, tr);
  for (int t = 0; t < n_terms; ++t) {
    expect_word(is, "t");
    const int kb = expect_int(is, "k size");
    if (kb != b) throw std::runtime_error("snapshot parse: k size mismatch");
    std::vector<int> k(kb);
    for (int& ki : k) ki = expect_int(is, "k entry");
    const ExpList gam = read_exps(is);
    const ExpList kap = read_exps(is);
    const double re = parse_hexd(expect(is, "re"));
    const double im = parse_hexd(expect(is, "im"));
    h.add_term(k, gam, kap, cplx(re, im));
  }
  h.add_dropped_mass(dropped);
  return h;
}

void write_state(std::ostream& os, const IterationState& st,
                 const ScheduleRow& row) {
  os << "state " << st.v << ' ' << st.blocks_activated << ' '
     << hexd(st.const_total) << '\n';
  os << "schedule " << row.v << ' ' << row.b << ' ' << hexd(row.eps) << ' '
     << hexd(row.alpha) << ' ' << hexd(row.M) << ' ' << hexd(row.lambda) << ' '
     << hexd(row.sigma) << ' ' << hexd(row.s) << ' ' << hexd(row.r) << ' '
     << hexd(row.d) << '\n';
  os << "ns " << st.ns.v << '\n';
  write_dvec(os, "omega", st.ns.omega);
  write_dvec(os, "Omega", st.ns.Omega);
  write_dvec(os, "Omega0", st.ns.Omega0);
  os << "drift_rows " << st.ns.drift_history.size() << '\n';
  for (const auto& r : st.ns.drift_history) write_dvec(os, "drift", r);
  write_poly(os, st.low);
  write_poly(os, st.high);
  os << "chain " << st.chain.size() << '\n';
  for (const auto& f : st.chain) write_poly(os, f);
}

IterationState read_state(std::istream& is, ScheduleRow* row_out) {
  IterationState st;
  expect_word(is, "state");
  st.v = expect_int(is, "v");
  st.blocks_activated = expect_int(is, "blocks_activated");
  st.const_total = parse_hexd(expect(is, "const_total"));

  expect_word(is, "schedule");
  ScheduleRow row;
  row.v = expect_int(is, "schedule v");
  row.b = expect_int(is, "schedule b");
  row.eps = parse_hexd(expect(is, "eps"));
  row.alpha = parse_hexd(expect(is, "alpha"));
  row.M = parse_hexd(expect(is, "M"));
  row.lambda = parse_hexd(expect(is, "lambda"));
  row.sigma = parse_hexd(expect(is, "sigma"));
  row.s = parse_hexd(expect(is, "s"));
  row.r = parse_hexd(expect(is, "r"));
  row.d = parse_hexd(expect(is, "d"));
  if (row_out) *row_out = row;

  expect_word(is, "ns");
  st.ns.v = expect_int(is, "ns v");
  st.ns.omega = read_dvec(is, "omega");
  st.ns.Omega = read_dvec(is, "Omega");
  st.ns.Omega0 = read_dvec(is, "Omega0");
  expect_word(is, "drift_rows");
  const int nd = expect_int(is, "drift row count");
  for (int i = 0; i < nd; ++i)
    st.ns.drift_history.push_back(read_dvec(is, "drift"));
  st.low = read_poly(is);
  st.high = read_poly(is);
  expect_word(is, "chain");
  const int nc = expect_int(is, "chain length");
  st.chain.clear();
  for (int i = 0; i < nc; ++i) st.chain.push_back(read_poly(is));
  return st;
}

std::string state_to_string(const IterationState& st, const ScheduleRow& row) {
  std::ostringstream os;
  write_state(os, st, row);
  return os.str();
}

IterationState state_from_string(const std::string& text,
                                 ScheduleRow* row_out) {
  std::istringstream is(text);
  return read_state(is, row_out);
}

std::string report_json(const StepReport& rep) {
  std::ostringstream os;
  char buf[40];
  auto num = [&](const char* key, double x, bool comma = true) {
    if (std::isfinite(x)) {
      std::snprintf(buf, sizeof buf, "%.17g", x);
      os << '"' << key << "\":" << buf << (comma ? "," : "");
    } else {
      os << '"' << key << "\":null" << (comma ? "," : "");
    }
  };
  os << "{\"kind\":\"" << rep.kind << "\",";
  os << "\"v\":" << rep.v << ",\"b\":" << rep.b << ",";
  num("eps", rep.eps_v);
  num("alpha", rep.alpha_v);
  num("s", rep.s);
  num("r", rep.r);
  num("low_sup", rep.low_sup);
  num("low_vf", rep.low_vf);
  num("low_rel", rep.low_rel);
  num("high_sup", rep.high_sup);
  num("field_norm", rep.field_norm);
  num("f_sup", rep.f_sup);
  num("f_vf", rep.f_vf);
  num("residual_abs", rep.residual_abs);
  num("residual_rel", rep.residual_rel);
  num("min_screen_margin", rep.min_screen_margin);
  num("omega_drift_max", rep.omega_drift_max);
  num("delta_const", rep.delta_const);
  num("scheduled_ratio", rep.scheduled_ratio);
  num("realized_ratio", rep.realized_ratio);
  num("ratio_quotient", rep.ratio_quotient);
  num("dropped_low", rep.dropped_low);
  num("dropped_high", rep.dropped_high);
  num("lie_tail_max", rep.lie_tail_max);
  os << "\"lie_diverged\":" << (rep.lie_diverged ? "true" : "false") << ",";
  os << "\"n_low_terms\":" << rep.n_low_terms
     << ",\"n_high_terms\":" << rep.n_high_terms << "}";
  return os.str();
}

}  // namespace beamnf
