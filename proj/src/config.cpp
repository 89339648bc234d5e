// Config parsing, validation, and adapters.  The JSON document is the single
// configuration surface; field order in the emitted document is fixed so
// identical configs produce byte-identical echoes.
#include "beamnf/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "beamnf/rng.hpp"
#include "json.hpp"

namespace beamnf {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string join_items(const std::vector<std::string>& msgs) {
  std::string all = "config validation failed:";
  for (const auto& m : msgs) all += "\n  - " + m;
  return all;
}

ordered_json to_doc(const RunConfig& c) {
  ordered_json j;
  j["m"] = c.m;
  j["eps"] = c.eps;
  j["rho"] = c.rho;
  j["s0"] = c.s0;
  j["r0"] = c.r0;
  j["a"] = c.a;
  j["p"] = c.p;
  j["c0"] = c.c0;
  j["n_modes"] = c.n_modes;
  j["k_max"] = c.k_max;
  j["deg_max"] = c.deg_max;
  j["k_force"] = c.k_force;
  j["k_meas"] = c.k_meas;
  j["lie_order"] = c.lie_order;
  j["b"] = c.b;
  j["v_max"] = c.v_max;
  ordered_json forcing;
  forcing["cos"] = c.forcing_cos;
  ordered_json terms = ordered_json::array();
  for (const auto& t : c.forcing_terms) {
    ordered_json ot;
    ot["block"] = t.block;
    ot["level"] = t.level;
    ot["k"] = t.k;
    ot["re"] = t.re;
    ot["im"] = t.im;
    terms.push_back(ot);
  }
  forcing["terms"] = terms;
  j["forcing"] = forcing;
  ordered_json om;
  om["source"] = c.omega_source;
  om["values"] = c.omega;
  om["seed"] = c.seed;
  j["omega"] = om;
  j["samples"] = c.samples;
  j["eps_grid"] = c.eps_grid;
  j["n_x"] = c.n_x;
  j["n_t"] = c.n_t;
  j["window_periods"] = c.window_periods;
  j["out_dir"] = c.out_dir;
  j["command"] = c.command;
  return j;
}

// Typed field readers that report (rather than throw on) mismatches.
struct Reader {
  const ordered_json& j;
  std::string scope;
  std::vector<std::string>& errors;

  void num(const char* key, double& out) const {
    if (!j.contains(key)) return;
    if (!j[key].is_number())
      errors.push_back(scope + key + ": expected a number");
    else
      out = j[key].get<double>();
  }
  void integer(const char* key, int& out) const {
    if (!j.contains(key)) return;
    if (!j[key].is_number_integer())
      errors.push_back(scope + key + ": expected an integer");
    else
      out = j[key].get<int>();
  }
  void uinteger(const char* key, std::uint64_t& out) const {
    if (!j.contains(key)) return;
    if (!j[key].is_number_integer() || j[key].get<double>() < 0)
      errors.push_back(scope + key + ": expected a nonnegative integer");
    else
      out = j[key].get<std::uint64_t>();
  }
  void str(const char* key, std::string& out) const {
    if (!j.contains(key)) return;
    if (!j[key].is_string())
      errors.push_back(scope + key + ": expected a string");
    else
      out = j[key].get<std::string>();
  }
  template <typename T>
  void vec(const char* key, std::vector<T>& out) const {
    if (!j.contains(key)) return;
    if (!j[key].is_array()) {
      errors.push_back(scope + key + ": expected an array");
      return;
    }
    out.clear();
    for (const auto& e : j[key]) {
      if (!e.is_number()) {
        errors.push_back(scope + key + ": expected numeric entries");
        return;
      }
      out.push_back(e.get<T>());
    }
  }
  void check_keys(std::initializer_list<const char*> known) const {
    for (auto it = j.begin(); it != j.end(); ++it) {
      bool ok = false;
      for (const char* k : known)
        if (it.key() == k) ok = true;
      if (!ok) errors.push_back(scope + "unknown field '" + it.key() + "'");
    }
  }
};

}  // namespace

ConfigError::ConfigError(std::vector<std::string> msgs)
    : std::runtime_error(join_items(msgs)), items(std::move(msgs)) {}

std::vector<std::string> validate_config(const RunConfig& c) {
  std::vector<std::string> e;
  auto bad = [&e](const std::string& msg) { e.push_back(msg); };

  if (!(c.m > 0.0)) bad("m: must be > 0");
  if (!(c.eps > 0.0 && c.eps < 1.0)) bad("eps: must satisfy 0 < eps < 1");
  if (!(c.rho > 0.0 && c.rho <= 1.0)) bad("rho: must satisfy 0 < rho <= 1");
  if (!(c.s0 > 0.0)) bad("s0: must be > 0");
  if (!(c.r0 > 0.0)) bad("r0: must be > 0");
  if (!(c.a > 0.0)) bad("a: must be > 0");
  if (!(c.p > 0.0)) bad("p: must be > 0");
  if (!(c.c0 > 0.0)) bad("c0: must be > 0");
  if (c.n_modes < 0) bad("n_modes: must be >= 0");
  if (c.k_max < 1) bad("k_max: must be >= 1");
  if (c.deg_max < 2) bad("deg_max: must be >= 2");
  if (c.k_force < 1 || c.k_force > c.k_max)
    bad("k_force: must satisfy 1 <= k_force <= k_max");
  if (c.k_meas < 1) bad("k_meas: must be >= 1");
  if (c.lie_order < 1) bad("lie_order: must be >= 1");
  if (c.v_max < 0) bad("v_max: must be >= 0");

  if (c.b.empty() || c.b.front() < 1) {
    bad("b: must be a non-empty list of positive block sizes");
  } else {
    for (std::size_t i = 1; i < c.b.size(); ++i)
      if (c.b[i] <= c.b[i - 1]) {
        bad("b: block sizes must be strictly increasing");
        break;
      }
  }

  if (c.omega_source != "explicit" && c.omega_source != "seeded")
    bad("omega.source: must be 'explicit' or 'seeded'");
  if (c.omega_source == "explicit" && !c.omega.empty() && !c.b.empty() &&
      static_cast<int>(c.omega.size()) < c.b.back())
    bad("omega.values: explicit vector shorter than the widest block needs");
  for (double w : c.omega)
    if (!std::isfinite(w)) {
      bad("omega.values: entries must be finite");
      break;
    }

  if (c.forcing_cos.size() > c.b.size())
    bad("forcing.cos: more shorthand rows than blocks");
  for (std::size_t jb = 0; jb < c.forcing_cos.size(); ++jb)
    for (int l = 0; l < 4; ++l) {
      const double amp = c.forcing_cos[jb][l];
      if (!std::isfinite(amp)) {
        bad("forcing.cos: amplitudes must be finite");
        l = 4;
        jb = c.forcing_cos.size() - 1;
      } else if (std::fabs(amp) > c.c0) {
        char buf[96];
        std::snprintf(buf, sizeof buf,
                      "forcing.cos: row %zu level %d amplitude exceeds c0",
                      jb, l);
        bad(buf);
      }
    }
  for (std::size_t i = 0; i < c.forcing_terms.size(); ++i) {
    const auto& t = c.forcing_terms[i];
    const std::string tag = "forcing.terms[" + std::to_string(i) + "]: ";
    if (t.block < 0 || t.block >= static_cast<int>(c.b.size())) {
      bad(tag + "block index out of range");
      continue;
    }
    if (t.level < 0 || t.level > 3) bad(tag + "level must be in 0..3");
    if (static_cast<int>(t.k.size()) != c.b[t.block])
      bad(tag + "frequency vector length must equal the block's angle count");
    bool zero = true;
    for (int ki : t.k) {
      if (std::abs(ki) > c.k_force)
        bad(tag + "frequency component exceeds k_force");
      if (ki != 0) zero = false;
    }
    if (!std::isfinite(t.re) || !std::isfinite(t.im))
      bad(tag + "coefficient must be finite");
    else if (zero && t.im != 0.0)
      bad(tag + "zero-frequency coefficient must be real");
  }

  if (c.samples < 1) bad("samples: must be >= 1");
  if (c.eps_grid.empty()) bad("eps_grid: must be non-empty");
  for (double g : c.eps_grid)
    if (!(g > 0.0 && g < 1.0)) {
      bad("eps_grid: entries must satisfy 0 < eps < 1");
      break;
    }
  if (c.n_x < 4) bad("n_x: must be >= 4");
  if (c.n_t < 3) bad("n_t: must be >= 3");
  if (!(c.window_periods > 0.0)) bad("window_periods: must be > 0");
  if (c.out_dir.empty()) bad("out_dir: must be non-empty");
  if (c.command != "run" && c.command != "sweep" && c.command != "measure" &&
      c.command != "verify" && c.command != "bounds")
    bad("command: must be run|sweep|measure|verify|bounds");
  return e;
}

std::string config_to_json(const RunConfig& c) {
  return to_doc(c).dump(2) + "\n";
}

RunConfig config_from_json(const std::string& text,
                           std::vector<std::string>& errors) {
  RunConfig c;
  ordered_json j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    errors.push_back("parse: document is not valid JSON");
    return c;
  }
  if (!j.is_object()) {
    errors.push_back("parse: top level must be an object");
    return c;
  }

  Reader r{j, "", errors};
  r.check_keys({"m", "eps", "rho", "s0", "r0", "a", "p", "c0", "n_modes",
                "k_max", "deg_max", "k_force", "k_meas", "lie_order", "b",
                "v_max", "forcing", "omega", "samples", "eps_grid", "n_x",
                "n_t", "window_periods", "out_dir", "command"});
  r.num("m", c.m);
  r.num("eps", c.eps);
  r.num("rho", c.rho);
  r.num("s0", c.s0);
  r.num("r0", c.r0);
  r.num("a", c.a);
  r.num("p", c.p);
  r.num("c0", c.c0);
  r.integer("n_modes", c.n_modes);
  r.integer("k_max", c.k_max);
  r.integer("deg_max", c.deg_max);
  r.integer("k_force", c.k_force);
  r.integer("k_meas", c.k_meas);
  r.integer("lie_order", c.lie_order);
  r.vec("b", c.b);
  r.integer("v_max", c.v_max);
  r.integer("samples", c.samples);
  r.vec("eps_grid", c.eps_grid);
  r.integer("n_x", c.n_x);
  r.integer("n_t", c.n_t);
  r.num("window_periods", c.window_periods);
  r.str("out_dir", c.out_dir);
  r.str("command", c.command);

  if (!j.contains("forcing")) {
    errors.push_back("forcing: missing required block table");
  } else if (!j["forcing"].is_object()) {
    errors.push_back("forcing: expected an object with 'cos' and/or 'terms'");
  } else {
    const auto& jf = j["forcing"];
    Reader rf{jf, "forcing.", errors};
    rf.check_keys({"cos", "terms"});
    c.forcing_cos.clear();
    c.forcing_terms.clear();
    if (jf.contains("cos")) {
      if (!jf["cos"].is_array()) {
        errors.push_back("forcing.cos: expected an array of 4-element rows");
      } else {
        for (const auto& row : jf["cos"]) {
          if (!row.is_array() || row.size() != 4) {
            errors.push_back(
                "forcing.cos: each row needs exactly 4 amplitudes");
            break;
          }
          std::array<double, 4> amps{};
          bool ok = true;
          for (int l = 0; l < 4; ++l) {
            if (!row[l].is_number()) {
              errors.push_back("forcing.cos: amplitudes must be numbers");
              ok = false;
              break;
            }
            amps[l] = row[l].get<double>();
          }
          if (!ok) break;
          c.forcing_cos.push_back(amps);
        }
      }
    }
    if (jf.contains("terms")) {
      if (!jf["terms"].is_array()) {
        errors.push_back("forcing.terms: expected an array of objects");
      } else {
        for (const auto& jt : jf["terms"]) {
          if (!jt.is_object()) {
            errors.push_back("forcing.terms: entries must be objects");
            break;
          }
          RunConfig::ForcingTerm t;
          Reader rt{jt, "forcing.terms.", errors};
          rt.check_keys({"block", "level", "k", "re", "im"});
          rt.integer("block", t.block);
          rt.integer("level", t.level);
          rt.vec("k", t.k);
          rt.num("re", t.re);
          rt.num("im", t.im);
          c.forcing_terms.push_back(t);
        }
      }
    }
  }

  if (j.contains("omega")) {
    if (!j["omega"].is_object()) {
      errors.push_back("omega: expected an object");
    } else {
      Reader ro{j["omega"], "omega.", errors};
      ro.check_keys({"source", "values", "seed"});
      ro.str("source", c.omega_source);
      ro.vec("values", c.omega);
      ro.uinteger("seed", c.seed);
    }
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  if (path.empty()) {
    RunConfig c;
    auto items = validate_config(c);
    if (!items.empty()) throw ConfigError(std::move(items));
    return c;
  }
  std::ifstream f(path);
  if (!f) throw ConfigError({"config file not readable: " + path});
  std::stringstream ss;
  ss << f.rdbuf();
  std::vector<std::string> errors;
  RunConfig c = config_from_json(ss.str(), errors);
  if (errors.empty()) {
    auto items = validate_config(c);
    errors.insert(errors.end(), items.begin(), items.end());
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return c;
}

std::string effective_config_line(const RunConfig& c) {
  ordered_json j;
  j["config"] = to_doc(c);
  return j.dump();
}

std::vector<double> default_omega(int count) {
  static const int primes[] = {2,  3,  5,  7,  11, 13, 17,  19,  23,  29, 31,
                               37, 41, 43, 47, 53, 59, 61,  67,  71,  73, 79,
                               83, 89, 97, 101, 103, 107, 109, 113, 127, 131};
  if (count < 0 || count > static_cast<int>(std::size(primes)))
    throw std::invalid_argument(
        "invalid-input: default frequency table holds at most 32 entries");
  std::vector<double> w(count);
  for (int i = 0; i < count; ++i) {
    const double s = std::sqrt(static_cast<double>(primes[i]));
    w[i] = s - std::floor(s);
  }
  return w;
}

std::vector<double> resolve_omega(const RunConfig& c) {
  const int need = c.b.empty() ? 0 : c.b.back();
  if (c.omega_source == "seeded") {
    std::mt19937_64 gen(c.seed);
    std::vector<double> w(need);
    for (double& x : w) x = u01(gen);
    return w;
  }
  if (!c.omega.empty()) return c.omega;
  return default_omega(need);
}

DriverConfig driver_config(const RunConfig& c) {
  DriverConfig d;
  d.m = c.m;
  d.eps = c.eps;
  d.rho = c.rho;
  d.s0 = c.s0;
  d.r0 = c.r0;
  d.a = c.a;
  d.p = c.p;
  d.trunc = Trunc{c.n_modes, c.k_max, c.deg_max};
  d.lie_order = c.lie_order;
  d.v_max = c.v_max;
  d.omega_full = resolve_omega(c);
  return d;
}

ForcingHierarchy build_hierarchy(const RunConfig& c) {
  const Trunc tr{c.n_modes, c.k_max, c.deg_max};
  ForcingHierarchy fh;
  fh.eps = c.eps;
  fh.rho = c.rho;
  fh.c0 = c.c0;
  fh.b = c.b;
  for (std::size_t jb = 0; jb < c.b.size(); ++jb) {
    ForcingBlock blk;
    blk.index = static_cast<int>(jb);
    blk.n_angles = c.b[jb];
    blk.new_angle_begin = jb == 0 ? 0 : c.b[jb - 1];
    for (int l = 0; l < 4; ++l) blk.psi[l] = PolyHamiltonian(c.b[jb], tr);
    if (jb < c.forcing_cos.size()) {
      const int newest = c.b[jb] - 1;
      for (int l = 0; l < 4; ++l) {
        const double amp = c.forcing_cos[jb][l];
        if (amp == 0.0) continue;
        std::vector<int> k(c.b[jb], 0);
        k[newest] = 1;
        blk.psi[l].add_term(k, {}, {}, amp / 2.0);
        k[newest] = -1;
        blk.psi[l].add_term(k, {}, {}, amp / 2.0);
      }
    }
    fh.blocks.push_back(blk);
  }
  for (const auto& t : c.forcing_terms) {
    auto& psi = fh.blocks.at(t.block).psi[t.level];
    const std::complex<double> coeff(t.re, t.im);
    bool zero = true;
    for (int ki : t.k)
      if (ki != 0) zero = false;
    if (zero) {
      psi.add_term(t.k, {}, {}, coeff.real());
      continue;
    }
    std::vector<int> neg(t.k.size());
    for (std::size_t i = 0; i < t.k.size(); ++i) neg[i] = -t.k[i];
    psi.add_term(t.k, {}, {}, coeff);
    psi.add_term(neg, {}, {}, std::conj(coeff));
  }
  return fh;
}

MeasureConfig measure_config(const RunConfig& c) {
  MeasureConfig mc;
  mc.m = c.m;
  mc.rho = c.rho;
  mc.s0 = c.s0;
  mc.r0 = c.r0;
  mc.n_modes = c.n_modes;
  mc.k_meas = c.k_meas;
  mc.b_sched = c.b;
  mc.seed = c.seed;
  return mc;
}

}  // namespace beamnf
