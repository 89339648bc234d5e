// Command-line front end: run / sweep / measure / verify / bounds.
// Every artifact starts with a one-line echo of the effective configuration;
// reports are line-oriented JSON so they concatenate and post-process
// cleanly.  Exit codes: 0 ok, 2 config error, 3 resonant parameter,
// 4 divergence warning, 5 missing artifacts.
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "beamnf/bounds.hpp"
#include "beamnf/config.hpp"
#include "beamnf/persist.hpp"
#include "beamnf/rng.hpp"
#include "beamnf/verify.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using beamnf::RunConfig;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitResonant = 3;
constexpr int kExitDivergence = 4;
constexpr int kExitMissing = 5;
constexpr int kExitSuiteFail = 1;

struct CliOpts {
  std::string config_path;
  std::string out_dir;
  std::string eps_grid;
  std::int64_t seed = -1;
};

void fail_config(const std::vector<std::string>& items) {
  std::cerr << "config error:\n";
  for (const auto& m : items) std::cerr << "  - " << m << "\n";
}

// Loads the config file (or defaults), applies flag overrides, revalidates.
// Returns false (after printing the itemized messages) on any violation.
bool prepare(const CliOpts& opts, const std::string& command, RunConfig& cfg) {
  try {
    cfg = beamnf::load_config(opts.config_path);
  } catch (const beamnf::ConfigError& e) {
    fail_config(e.items);
    return false;
  }
  cfg.command = command;
  if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  if (!opts.eps_grid.empty()) {
    std::vector<double> grid;
    std::stringstream ss(opts.eps_grid);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        std::size_t used = 0;
        grid.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        fail_config({"epsilon-grid: '" + tok + "' is not a number"});
        return false;
      }
    }
    cfg.eps_grid = grid;
  }
  auto items = beamnf::validate_config(cfg);
  if (!items.empty()) {
    fail_config(items);
    return false;
  }
  return true;
}

std::ofstream open_artifact(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  std::ofstream f(fs::path(cfg.out_dir) / name,
                  std::ios::out | std::ios::trunc);
  return f;
}

// Forcing hierarchy restricted to the blocks a state has activated, as a
// residual-checker callback psi_l(t) with theta = omega t.
beamnf::PsiEval make_psi(const beamnf::ForcingHierarchy& fh,
                         int blocks_activated,
                         const std::vector<double>& omega_full) {
  beamnf::ForcingHierarchy active = fh;
  active.blocks.resize(
      std::min<std::size_t>(blocks_activated, fh.blocks.size()));
  return [active, omega_full](int l, double t) {
    std::vector<double> theta(omega_full.size());
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = omega_full[i] * t;
    return eval_psi(active, l, theta);
  };
}

// Verification window: window_periods periods of the slowest active angle.
double window_length(const beamnf::IterationState& st, const RunConfig& cfg) {
  double wmin = 0.0;
  for (double w : st.ns.omega)
    if (w > 0.0 && (wmin == 0.0 || w < wmin)) wmin = w;
  if (wmin == 0.0) wmin = 1.0;
  return cfg.window_periods * 2.0 * std::numbers::pi / wmin;
}

std::vector<double> time_grid(double t_end, int n_t) {
  std::vector<double> t(n_t);
  for (int i = 0; i < n_t; ++i) t[i] = t_end * i / (n_t - 1);
  return t;
}

// Least-squares slope of log(y) against log(x) over positive pairs.
bool loglog_slope(const std::vector<double>& x, const std::vector<double>& y,
                  double& slope) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  if (lx.size() < 2 || lx.size() != x.size()) return false;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(lx.size());
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return false;
  slope = (n * sxy - sx * sy) / den;
  return true;
}

int cmd_run(const RunConfig& cfg) {
  const beamnf::ForcingHierarchy fh = beamnf::build_hierarchy(cfg);
  const auto h2 = beamnf::validate_H2(fh);
  std::vector<std::string> h2_items;
  for (const auto& row : h2.rows)
    if (!row.ok)
      h2_items.push_back("forcing: block " + std::to_string(row.block) +
                         " level " + std::to_string(row.l) +
                         " violates the amplitude/derivative budget");
  if (!h2_items.empty()) {
    fail_config(h2_items);
    return kExitConfig;
  }

  const beamnf::DriverConfig dc = beamnf::driver_config(cfg);
  const beamnf::RunResult res = beamnf::run(dc, fh);

  auto report = open_artifact(cfg, "report.jsonl");
  report << beamnf::effective_config_line(cfg) << "\n";
  {
    ordered_json j;
    j["forcing_check"] = {{"pass", h2.pass},
                          {"psi0_nonzero", h2.psi0_nonzero}};
    report << j.dump() << "\n";
  }
  for (const auto& rep : res.reports) report << beamnf::report_json(rep) << "\n";
  if (res.stopped_early) {
    ordered_json j;
    j["stop"] = {{"reason", res.stop_reason},
                 {"k", res.offending_k},
                 {"l", res.offending_l}};
    report << j.dump() << "\n";
  }

  for (const auto& st : res.snapshots) {
    std::ofstream snap(fs::path(cfg.out_dir) /
                       ("state_v" + std::to_string(st.v) + ".txt"));
    beamnf::write_state(snap, st, res.schedule.rows.at(st.v));
  }

  if (!res.snapshots.empty()) {
    const auto& st = res.snapshots.back();
    auto samples = open_artifact(cfg, "embedding_samples.csv");
    samples << "# " << beamnf::effective_config_line(cfg) << "\n";
    samples << "t";
    for (int j = 0; j <= cfg.n_modes; ++j) samples << ",q_" << j;
    samples << "\n";
    const auto tg = time_grid(window_length(st, cfg), cfg.n_t);
    char buf[40];
    for (double t : tg) {
      std::vector<double> theta(dc.omega_full.size());
      for (std::size_t i = 0; i < theta.size(); ++i)
        theta[i] = dc.omega_full[i] * t;
      const auto pt = beamnf::compose_embedding(st, theta);
      std::snprintf(buf, sizeof buf, "%.17g", t);
      samples << buf;
      for (double q : pt.q) {
        std::snprintf(buf, sizeof buf, "%.17g", q);
        samples << "," << buf;
      }
      samples << "\n";
    }
  }

  if (res.stopped_early)
    return res.stop_reason == "resonant-parameter" ? kExitResonant
                                                   : kExitDivergence;
  return kExitOk;
}

int cmd_sweep(const RunConfig& cfg) {
  if (cfg.eps_grid.size() < 3) {
    fail_config({"epsilon-grid: a sweep needs at least 3 grid points"});
    return kExitConfig;
  }
  auto out = open_artifact(cfg, "sweep.jsonl");
  out << beamnf::effective_config_line(cfg) << "\n";

  std::vector<double> eps_ok, sup_ok, rem_ok;
  bool any_zero = false;
  for (double e : cfg.eps_grid) {
    RunConfig sub = cfg;
    sub.eps = e;
    const auto fh = beamnf::build_hierarchy(sub);
    const auto dc = beamnf::driver_config(sub);
    const auto res = beamnf::run(dc, fh);
    ordered_json j;
    j["eps"] = e;
    if (res.stopped_early) {
      j["status"] = res.stop_reason;
      out << j.dump() << "\n";
      continue;
    }
    const auto& st = res.snapshots.back();
    const auto tg = time_grid(window_length(st, sub), sub.n_t);
    const auto rec =
        beamnf::reconstruct_solution(st, tg, 8, sub.a, sub.p);
    const double sup_q =
        rec.q_norm.empty()
            ? 0.0
            : *std::max_element(rec.q_norm.begin(), rec.q_norm.end());
    const double rem = res.reports.back().low_vf;
    j["status"] = "ok";
    j["sup_q"] = sup_q;
    j["low_vf"] = rem;
    j["low_rel"] = res.reports.back().low_rel;
    out << j.dump() << "\n";
    if (sup_q == 0.0) any_zero = true;
    eps_ok.push_back(e);
    sup_ok.push_back(sup_q);
    rem_ok.push_back(rem);
  }

  ordered_json fit;
  double slope_q = 0.0, slope_rem = 0.0;
  if (!any_zero && loglog_slope(eps_ok, sup_ok, slope_q)) {
    fit["fit"]["slope_q"] = slope_q;
    if (loglog_slope(eps_ok, rem_ok, slope_rem))
      fit["fit"]["slope_remainder"] = slope_rem;
    else
      fit["fit"]["slope_remainder"] = nullptr;
    fit["fit"]["points"] = eps_ok.size();
  } else {
    fit["fit"]["slope_q"] = nullptr;
    fit["fit"]["note"] =
        any_zero ? "undefined: zero-amplitude response in the grid"
                 : "undefined: fewer than 2 successful runs";
  }
  out << fit.dump() << "\n";
  return kExitOk;
}

int cmd_measure(const RunConfig& cfg) {
  try {
    const auto est = beamnf::mc_measure(cfg.v_max, cfg.samples, cfg.eps_grid,
                                        beamnf::measure_config(cfg));
    auto out = open_artifact(cfg, "measure.csv");
    out << "# " << beamnf::effective_config_line(cfg) << "\n";
    out << est.csv();
  } catch (const std::invalid_argument& e) {
    fail_config({e.what()});
    return kExitConfig;
  }
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg) {
  const fs::path dir(cfg.out_dir);
  std::vector<std::string> missing;
  if (!fs::exists(dir / "report.jsonl"))
    missing.push_back("run report not found: " +
                      (dir / "report.jsonl").string());
  int v_last = -1;
  if (fs::exists(dir)) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      const std::string name = entry.path().filename().string();
      int v = -1;
      if (std::sscanf(name.c_str(), "state_v%d.txt", &v) == 1)
        v_last = std::max(v_last, v);
    }
  }
  if (v_last < 0)
    missing.push_back("no state snapshots (state_v*.txt) in " + dir.string());
  if (!missing.empty()) {
    std::cerr << "missing artifacts:\n";
    for (const auto& m : missing) std::cerr << "  - " << m << "\n";
    return kExitMissing;
  }

  std::ifstream snap(dir / ("state_v" + std::to_string(v_last) + ".txt"));
  const beamnf::IterationState st = beamnf::read_state(snap);

  const auto fh = beamnf::build_hierarchy(cfg);
  const auto dc = beamnf::driver_config(cfg);
  const auto psi = make_psi(fh, st.blocks_activated, dc.omega_full);

  const auto tg = time_grid(window_length(st, cfg), cfg.n_t);
  const auto rec = beamnf::reconstruct_solution(st, tg, cfg.n_x, cfg.a, cfg.p);
  const auto rep = beamnf::pde_residual(rec, psi, cfg.m);

  auto out = open_artifact(cfg, "verify.jsonl");
  out << beamnf::effective_config_line(cfg) << "\n";
  {
    ordered_json j;
    j["residual"] = {{"state_v", v_last},
                     {"sup_residual", rep.sup_residual},
                     {"l2_residual", rep.l2_residual},
                     {"disc_error_est", rep.disc_error_est},
                     {"q_norm_max", rep.q_norm_max},
                     {"q_norm_mean", rep.q_norm_mean},
                     {"h", rep.h}};
    out << j.dump() << "\n";
  }

  // Independent time integration from the reconstruction's initial data.
  const double ht = rec.t[1] - rec.t[0];
  std::vector<double> q0 = rec.q[0], v0(q0.size());
  for (std::size_t jm = 0; jm < v0.size(); ++jm)
    v0[jm] =
        (-3.0 * rec.q[0][jm] + 4.0 * rec.q[1][jm] - rec.q[2][jm]) / (2.0 * ht);
  const int refine = std::max(
      1, static_cast<int>(std::ceil(ht / beamnf::default_step(cfg.m, cfg.n_modes))));
  const auto direct = beamnf::direct_integrate(q0, v0, psi, cfg.m,
                                               rec.t.back(), ht / refine);
  double max_dev = 0.0;
  for (std::size_t it = 0; it < rec.t.size(); ++it) {
    const std::size_t di = it * refine;
    if (di >= direct.q.size()) break;
    for (std::size_t jm = 0; jm < q0.size(); ++jm)
      max_dev = std::max(max_dev,
                         std::fabs(direct.q[di][jm] - rec.q[it][jm]));
  }
  {
    ordered_json j;
    j["direct"] = {{"max_dev", max_dev},
                   {"energy_drift", direct.energy_drift},
                   {"step_warning", direct.step_warning},
                   {"local_error_est", direct.local_error_est},
                   {"refine", refine}};
    out << j.dump() << "\n";
  }
  return kExitOk;
}

void append_check(std::ofstream& out, const beamnf::BoundCheck& c,
                  bool& all_pass, int& count) {
  ordered_json j;
  j["lemma"] = c.lemma;
  j["params"] = c.params;
  j["left"] = c.left;
  j["right"] = c.right;
  j["margin"] = c.margin;
  j["pass"] = c.pass;
  j["cross_check_rel"] = c.cross_check_rel;
  out << j.dump() << "\n";
  all_pass = all_pass && c.pass;
  ++count;
}

int cmd_bounds(const RunConfig& cfg) {
  auto out = open_artifact(cfg, "bounds.jsonl");
  out << beamnf::effective_config_line(cfg) << "\n";
  bool all_pass = true;
  int count = 0;

  for (int n : {1, 2, 3})
    for (double sigma : {0.25, 0.5, 1.0})
      append_check(out, beamnf::expsum_bound(n, sigma, 0.0, 800), all_pass,
                   count);

  std::mt19937_64 gen(cfg.seed);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXd A(50, 50);
    for (int i = 0; i < 50; ++i)
      for (int j = 0; j < 50; ++j) A(i, j) = 2.0 * beamnf::u01(gen) - 1.0;
    append_check(out, beamnf::hilbert_like_bound(A, 4), all_pass, count);
  }

  const double sigma0 = std::min(cfg.s0 / 24.0, 1.0 / 20.0);
  for (int b : {1, 2})
    for (int v : {0, 1, 2})
      for (double s : {sigma0, sigma0 / 2.0}) {
        const int k_trunc = static_cast<int>(400.0 / s);
        for (const auto& c : beamnf::compound_bound(b, s, v, k_trunc))
          append_check(out, c, all_pass, count);
      }

  ordered_json j;
  j["suite_pass"] = all_pass;
  j["checks"] = count;
  out << j.dump() << "\n";
  return all_pass ? kExitOk : kExitSuiteFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Truncated normal-form engine for the forced nonlinear beam equation"};
  app.require_subcommand(1);

  CliOpts opts;
  std::vector<CLI::App*> subs;
  for (const char* name : {"run", "sweep", "measure", "verify", "bounds"}) {
    CLI::App* s = app.add_subcommand(name);
    s->add_option("--config", opts.config_path, "configuration file (JSON)");
    s->add_option("--seed", opts.seed, "override the RNG seed");
    s->add_option("--out", opts.out_dir, "output directory");
    s->add_option("--epsilon-grid", opts.eps_grid,
                  "comma-separated epsilon values");
    subs.push_back(s);
  }
  subs[0]->description("execute a normal-form iteration run");
  subs[1]->description("amplitude-scaling sweep over the epsilon grid");
  subs[2]->description("Monte Carlo resonance-measure estimate");
  subs[3]->description("residual-check a finished run's artifacts");
  subs[4]->description("evaluate the auxiliary-inequality suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  RunConfig cfg;
  if (!prepare(opts, command, cfg)) return kExitConfig;

  try {
    if (command == "run") return cmd_run(cfg);
    if (command == "sweep") return cmd_sweep(cfg);
    if (command == "measure") return cmd_measure(cfg);
    if (command == "verify") return cmd_verify(cfg);
    return cmd_bounds(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
