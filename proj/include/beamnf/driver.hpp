// Iteration orchestration: per-step pipeline (split -> solve -> transform ->
// reassemble), lazy activation of forcing blocks, generator-chain recording,
// and per-step norm reporting.
#pragma once

#include <string>
#include <vector>

#include "beamnf/algebra.hpp"
#include "beamnf/flow.hpp"
#include "beamnf/forcing.hpp"
#include "beamnf/homological.hpp"
#include "beamnf/schedule.hpp"

namespace beamnf {

struct DriverConfig {
  double m = 1.0;          // beam mass parameter
  double eps = 1e-4;       // overall forcing size
  double rho = 1.0;        // hierarchy exponent
  double s0 = 0.4;         // initial angle-strip half-width
  double r0 = 1.0;         // initial mode-domain radius
  double a = 0.1;          // mode-weight exponential rate
  double p = 0.5;          // mode-weight polynomial power
  Trunc trunc{4, 3, 4};    // n_modes, k_max, deg_max
  int lie_order = 8;       // series order for transforming degree >= 3 parts
  int v_max = 3;           // number of steps run() executes
  std::vector<double> omega_full;  // >= widest activated block's angle count
};

struct IterationState {
  int v = 0;
  NormalFormState ns;
  PolyHamiltonian low;   // degree <= 2 remainder, current angle count
  PolyHamiltonian high;  // degree >= 3 part, current angle count
  std::vector<PolyHamiltonian> chain;  // generators, one per completed step
  int blocks_activated = 0;   // forcing blocks folded into low/high so far
  double const_total = 0.0;   // accumulated dropped constants (logged)

  IterationState() : low(1, Trunc{}), high(1, Trunc{}) {}
};

// One line of the run report.  kind is "split" for the initial decomposition
// row and "step" for an executed step.  Fields that do not apply to a row
// hold -1.
struct StepReport {
  std::string kind;
  int v = 0;             // state index the row describes
  int b = 0;             // active angle count
  double eps_v = 0, alpha_v = 0, s = 0, r = 0;
  double low_sup = 0, low_vf = 0, low_rel = 0;  // degree <= 2 remainder
  double high_sup = 0;                          // degree >= 3 part
  double field_norm = -1;   // split row: vector-field norm of the raw block
  double f_sup = -1, f_vf = -1;                 // generator norms
  double residual_abs = -1, residual_rel = -1;  // solve identity defect
  double min_screen_margin = -1;  // min over divisors used this step
  double omega_drift_max = 0;     // max_j |Omega_j - Omega0_j|
  double delta_const = 0;         // dropped constant logged this step
  double scheduled_ratio = -1;    // eps_{v}/eps_{v-1} for the step taken
  double realized_ratio = -1;     // low_vf ratio across the step
  double ratio_quotient = -1;     // realized / scheduled
  double dropped_low = 0, dropped_high = 0;  // out-of-box mass in the objects
  double lie_tail_max = 0;  // largest series tail estimate this step
  bool lie_diverged = false;
  int n_low_terms = 0, n_high_terms = 0;
};

struct RunResult {
  Schedule schedule;
  std::vector<StepReport> reports;
  std::vector<IterationState> snapshots;  // state after each report row
  bool stopped_early = false;
  std::string stop_reason;  // "resonant-parameter" | "divergence-warning"
  std::vector<int> offending_k, offending_l;
};

// One step v -> v+1: solve the generator, update the normal form, reassemble
// the degree <= 2 remainder from the series remainders plus the low part of
// the freshly activated block pushed through the whole chain, and extend the
// degree >= 3 part per its bracket update.  Throws ResonantParameter when a
// screen fails; series-divergence warnings land in the report.
IterationState kam_step(const IterationState& state, const Schedule& sched,
                        const DriverConfig& cfg, const ForcingHierarchy& fh,
                        StepReport& report);

// Initial decomposition of the first forcing block (no generator yet).
IterationState initial_state(const DriverConfig& cfg,
                             const ForcingHierarchy& fh, const Schedule& sched,
                             StepReport& report);

// Full run: initial split plus cfg.v_max steps, stopping early at a
// resonant parameter or a divergence warning (partial reports retained).
RunResult run(const DriverConfig& cfg, const ForcingHierarchy& fh);

// Continue a run from a saved state (its v counts completed steps); emits
// report rows only for the steps it executes.
RunResult resume(const DriverConfig& cfg, const ForcingHierarchy& fh,
                 IterationState state);

// Torus point at angles theta: the chain's affine time-1 flows applied to
// z = zbar = 0, last generator first.
EmbeddingPoint compose_embedding(const IterationState& state,
                                 const std::vector<double>& theta);

}  // namespace beamnf
