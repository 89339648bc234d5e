#include "beamnf/driver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "beamnf/beam.hpp"

namespace beamnf {

namespace {

// ad_F^m h for m = 1..L (stops early once a power vanishes identically).
std::vector<PolyHamiltonian> ad_powers(const PolyHamiltonian& h,
                                       const PolyHamiltonian& f, int order) {
  std::vector<PolyHamiltonian> out;
  PolyHamiltonian t = h;
  for (int m = 1; m <= order; ++m) {
    t = poisson_bracket(t, f);
    if (t.terms().empty()) break;
    out.push_back(t);
  }
  return out;
}

// Weighted sum  sum_m w_m ad^m h  with a geometric tail estimate from the
// last two weighted majorants.  first_m selects where the sum starts.
struct SeriesSum {
  PolyHamiltonian sum;
  double tail = 0.0;
  bool diverged = false;
};
SeriesSum weighted_series(const std::vector<PolyHamiltonian>& ads,
                          const std::vector<double>& weights, int first_m,
                          int n_angles, const Trunc& tr, const NormParams& np) {
  SeriesSum out{PolyHamiltonian(n_angles, tr)};
  double prev = -1.0, last = -1.0;
  for (std::size_t i = first_m - 1; i < ads.size(); ++i) {
    const PolyHamiltonian piece = ads[i] * weights[i];
    out.sum += piece;
    prev = last;
    last = sup_majorant(piece, np);
  }
  if (last <= 0.0) return out;  // series terminated exactly
  if (prev > 0.0 && last < prev) {
    const double ratio = last / prev;
    out.tail = last * ratio / (1.0 - ratio);
  } else if (prev < 0.0) {
    out.tail = last;  // single term: conservative
  } else {
    out.tail = std::numeric_limits<double>::infinity();
    out.diverged = true;
  }
  return out;
}

PolyHamiltonian weighted_block(const ForcingHierarchy& fh, int j, double m) {
  PolyHamiltonian p = assemble_forced_potential(fh.blocks.at(j).psi, m);
  return p * block_weight(j, fh.eps, fh.rho);
}

void fill_state_norms(const IterationState& st, const ScheduleRow& row,
                      const DriverConfig& cfg, StepReport& rep) {
  const NormParams np{cfg.a, cfg.p, row.s, row.r};
  rep.v = st.v;
  rep.b = st.low.n_angles();
  rep.eps_v = row.eps;
  rep.alpha_v = row.alpha;
  rep.s = row.s;
  rep.r = row.r;
  rep.low_sup = sup_majorant(st.low, np);
  rep.low_vf = vf_majorant_norm(st.low, np);
  rep.low_rel = rep.low_vf / row.eps;
  rep.high_sup = sup_majorant(st.high, np);
  rep.dropped_low = st.low.dropped_mass();
  rep.dropped_high = st.high.dropped_mass();
  rep.n_low_terms = static_cast<int>(st.low.terms().size());
  rep.n_high_terms = static_cast<int>(st.high.terms().size());
  double drift = 0.0;
  for (std::size_t j = 0; j < st.ns.Omega.size(); ++j)
    drift = std::max(drift, std::abs(st.ns.Omega[j] - st.ns.Omega0[j]));
  rep.omega_drift_max = drift;
}

std::vector<double> omega_prefix(const DriverConfig& cfg, int b) {
  if (static_cast<int>(cfg.omega_full.size()) < b)
    throw std::invalid_argument(
        "driver: omega_full shorter than the active angle count");
  return {cfg.omega_full.begin(), cfg.omega_full.begin() + b};
}

}  // namespace

IterationState initial_state(const DriverConfig& cfg,
                             const ForcingHierarchy& fh, const Schedule& sched,
                             StepReport& report) {
  if (fh.blocks.empty())
    throw std::invalid_argument("driver: forcing hierarchy has no blocks");
  IterationState st;
  st.v = 0;
  st.blocks_activated = 1;
  const int b0 = fh.blocks[0].n_angles;
  st.ns.v = 0;
  st.ns.omega = omega_prefix(cfg, b0);
  st.ns.Omega = beam_frequencies(cfg.m, cfg.trunc.n_modes);
  st.ns.Omega0 = st.ns.Omega;

  const PolyHamiltonian p0 = weighted_block(fh, 0, cfg.m);
  const DegreeSplit parts = degree_split(p0);
  st.low = parts.low;
  st.high = parts.high;

  report = StepReport{};
  report.kind = "split";
  fill_state_norms(st, sched.rows.at(0), cfg, report);
  report.field_norm =
      vf_majorant_norm(p0, NormParams{cfg.a, cfg.p, sched.rows[0].s,
                                      sched.rows[0].r});
  return st;
}

IterationState kam_step(const IterationState& state, const Schedule& sched,
                        const DriverConfig& cfg, const ForcingHierarchy& fh,
                        StepReport& report) {
  const int v = state.v;
  const ScheduleRow& row = sched.rows.at(v);
  const ScheduleRow& next_row = sched.rows.at(v + 1);
  const NormParams np{cfg.a, cfg.p, row.s, row.r};
  const int b = state.low.n_angles();
  const Trunc tr = state.low.trunc();

  report = StepReport{};
  report.kind = "step";
  const double low_vf_before = vf_majorant_norm(state.low, np);

  // --- solve the homological equation ---------------------------------
  PolyHamiltonian low01 = degree_part(state.low, 0) + degree_part(state.low, 1);
  PolyHamiltonian s2 = degree_part(state.low, 2);
  const F1Result f1 = solve_F1(low01, state.ns, row.alpha);
  const PolyHamiltonian w = correction_W(state.high, f1.f);
  const PolyHamiltonian b2 = s2 + w;
  const F2Result f2 = solve_F2(b2, state.ns, row.alpha);
  const PolyHamiltonian f = f1.f + f2.f;
  const NormalUpdate upd = normal_update(f1.r00_avg, f2.b11_diag, 1.0);

  // Defect of the defining identity, with the new normal part spelled out.
  PolyHamiltonian delta_n(b, tr);
  delta_n.add_term(std::vector<int>(b, 0), {}, {}, upd.d_const);
  for (std::size_t j = 0; j < upd.d_omega.size(); ++j)
    delta_n.add_term(std::vector<int>(b, 0), {{static_cast<int>(j), 1}},
                     {{static_cast<int>(j), 1}}, upd.d_omega[j]);
  report.residual_abs =
      residual_check(state.ns, state.low, state.high, f, delta_n, np);
  report.residual_rel =
      report.residual_abs / std::max(sup_majorant(state.low, np), 1e-300);

  double min_margin = std::numeric_limits<double>::infinity();
  auto scan_margins = [&](const PolyHamiltonian& src) {
    for (const auto& [key, coef] : src.terms()) {
      (void)coef;
      if (structurally_excluded(key)) continue;
      const ScreenResult sr = screen(
          state.ns, row.alpha, key.k, mode_signature(key, tr.n_modes));
      min_margin = std::min(min_margin, sr.margin);
    }
  };
  scan_margins(low01);
  scan_margins(b2);
  report.min_screen_margin = std::isfinite(min_margin) ? min_margin : -1.0;
  report.f_sup = sup_majorant(f, np);
  report.f_vf = vf_majorant_norm(f, np);
  report.delta_const = upd.d_const;

  // --- transform: series remainders ------------------------------------
  const int L = cfg.lie_order;
  std::vector<double> w_shift(L), w_plain(L);
  double fact = 1.0;
  for (int m = 1; m <= L; ++m) {
    fact *= m;
    w_plain[m - 1] = 1.0 / fact;            // 1/m!
    w_shift[m - 1] = 1.0 / (fact * (m + 1));  // 1/(m+1)!
  }

  const PolyHamiltonian t1 = bracket_with_N(state.ns, f) * (-1.0);
  const auto ads_t1 = ad_powers(t1, f, L);
  const auto ads_s = ad_powers(state.low, f, L);
  const auto ads_p = ad_powers(state.high, f, L);

  const SeriesSum a_sum = weighted_series(ads_t1, w_shift, 1, b, tr, np);
  const SeriesSum b_sum = weighted_series(ads_s, w_plain, 1, b, tr, np);
  const SeriesSum c_sum = weighted_series(ads_p, w_plain, 2, b, tr, np);
  const DegreeSplit c_parts = degree_split(c_sum.sum);
  // First-order bracket of the high part: its low part is the correction
  // already absorbed into the solve; only the high part survives here.
  PolyHamiltonian d_high(b, tr);
  if (!ads_p.empty()) d_high = degree_split(ads_p[0]).high;

  PolyHamiltonian s_next = a_sum.sum + b_sum.sum + c_parts.low;
  PolyHamiltonian h_next = state.high + d_high + c_parts.high;

  report.lie_tail_max = std::max({a_sum.tail, b_sum.tail, c_sum.tail});
  report.lie_diverged = a_sum.diverged || b_sum.diverged || c_sum.diverged;

  // --- activate the next forcing block, pushed through the whole chain --
  IterationState out;
  out.v = v + 1;
  out.chain = state.chain;
  out.chain.push_back(f);
  out.blocks_activated = state.blocks_activated;
  out.const_total = state.const_total + upd.d_const;

  int b_next = b;
  const int jnext = v + 1;
  if (jnext < static_cast<int>(fh.blocks.size())) {
    b_next = fh.blocks[jnext].n_angles;
    if (b_next != next_row.b)
      throw std::invalid_argument(
          "driver: block angle count disagrees with the schedule");
    PolyHamiltonian q = weighted_block(fh, jnext, cfg.m);
    for (const PolyHamiltonian& gen : out.chain) {
      const LieResult lr = lie_transform(q, gen.embedded(b_next), L, np);
      q = lr.h;
      report.lie_tail_max = std::max(report.lie_tail_max, lr.tail_bound);
      report.lie_diverged = report.lie_diverged || lr.diverged;
    }
    const DegreeSplit q_parts = degree_split(q);
    s_next = s_next.embedded(b_next) + q_parts.low;
    h_next = h_next.embedded(b_next) + q_parts.high;
    out.blocks_activated = state.blocks_activated + 1;
  }

  out.low = std::move(s_next);
  out.high = std::move(h_next);
  out.ns = state.ns;
  out.ns.v = v + 1;
  out.ns.omega = omega_prefix(cfg, b_next);
  for (std::size_t j = 0; j < upd.d_omega.size(); ++j)
    out.ns.Omega[j] += upd.d_omega[j];
  out.ns.drift_history.push_back(upd.d_omega);

  fill_state_norms(out, next_row, cfg, report);
  const double low_vf_after = report.low_vf;
  report.scheduled_ratio = next_row.eps / row.eps;
  if (low_vf_before > 0.0) {
    report.realized_ratio = low_vf_after / low_vf_before;
    report.ratio_quotient = report.realized_ratio / report.scheduled_ratio;
  }
  return out;
}

namespace {

void run_loop(const DriverConfig& cfg, const ForcingHierarchy& fh,
              RunResult& res, IterationState state) {
  // Recomputed from the state so a resumed run makes the same stop
  // decisions as an uninterrupted one.
  const ScheduleRow& srow = res.schedule.rows.at(state.v);
  double prev_rel =
      vf_majorant_norm(state.low, NormParams{cfg.a, cfg.p, srow.s, srow.r}) /
      srow.eps;
  while (state.v < cfg.v_max) {
    StepReport rep;
    try {
      state = kam_step(state, res.schedule, cfg, fh, rep);
    } catch (const ResonantParameter& e) {
      res.stopped_early = true;
      res.stop_reason = "resonant-parameter";
      res.offending_k = e.k;
      res.offending_l = e.l;
      return;
    }
    res.reports.push_back(rep);
    res.snapshots.push_back(state);
    if (rep.lie_diverged ||
        (rep.low_rel > prev_rel && rep.low_rel > 0.0)) {
      res.stopped_early = true;
      res.stop_reason = "divergence-warning";
      return;
    }
    prev_rel = rep.low_rel;
  }
}

}  // namespace

RunResult run(const DriverConfig& cfg, const ForcingHierarchy& fh) {
  RunResult res;
  res.schedule =
      build_schedule(cfg.eps, cfg.rho, cfg.s0, cfg.r0, fh.b, cfg.v_max);
  StepReport split;
  IterationState st = initial_state(cfg, fh, res.schedule, split);
  res.reports.push_back(split);
  res.snapshots.push_back(st);
  run_loop(cfg, fh, res, std::move(st));
  return res;
}

RunResult resume(const DriverConfig& cfg, const ForcingHierarchy& fh,
                 IterationState state) {
  RunResult res;
  res.schedule =
      build_schedule(cfg.eps, cfg.rho, cfg.s0, cfg.r0, fh.b, cfg.v_max);
  run_loop(cfg, fh, res, std::move(state));
  return res;
}

EmbeddingPoint compose_embedding(const IterationState& state,
                                 const std::vector<double>& theta) {
  return compose_embedding(state.chain, theta,
                           state.low.trunc().n_modes);
}

}  // namespace beamnf
