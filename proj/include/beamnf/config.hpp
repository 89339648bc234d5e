// Run configuration: one structured document carrying every tunable, with
// itemized validation, JSON round-trip, and adapters that assemble the
// driver, forcing, and measure inputs from a single source of truth.
#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "beamnf/driver.hpp"
#include "beamnf/forcing.hpp"
#include "beamnf/measure.hpp"

namespace beamnf {

struct RunConfig {
  // model and schedule scalars
  double m = 1.0;    // beam mass parameter
  double eps = 1e-4; // overall forcing size
  double rho = 1.0;  // hierarchy exponent in (0,1]
  double s0 = 0.4;   // initial angle-strip half-width
  double r0 = 1.0;   // initial mode-domain radius
  double a = 0.1;    // mode-weight exponential rate
  double p = 0.5;    // mode-weight polynomial power
  double c0 = 1.0;   // forcing amplitude/derivative budget per block

  // truncations
  int n_modes = 4;   // spatial modes 0..n_modes
  int k_max = 3;     // algebra Fourier cap per angle component
  int deg_max = 4;   // total (z,zbar)-degree cap
  int k_force = 2;   // sup-norm cap on forcing-table frequency vectors
  int k_meas = 6;    // enumeration cap for the measure estimate
  int lie_order = 8; // series order for degree >= 3 transforms

  std::vector<int> b{1, 2, 3};  // block angle counts, strictly increasing
  int v_max = 3;                // iteration steps

  // forcing block table: shorthand rows give per-level cosine amplitudes on
  // block j's newest angle; explicit terms add arbitrary frequency vectors
  // (the conjugate partner is filled in automatically).
  struct ForcingTerm {
    int block = 0;
    int level = 0;          // 0..3: constant, linear, quadratic, cubic
    std::vector<int> k;     // length b[block], |k_i| <= k_force
    double re = 0.0, im = 0.0;
  };
  std::vector<std::array<double, 4>> forcing_cos{
      {1.0, 0.5, 0.25, 0.125},
      {0.5, 0.25, 0.125, 0.0625},
      {0.25, 0.125, 0.0625, 0.03125}};
  std::vector<ForcingTerm> forcing_terms;

  // forcing frequencies: an explicit vector or a seeded uniform draw
  std::string omega_source = "explicit";  // "explicit" | "seeded"
  std::vector<double> omega;  // empty => square-root-of-prime fractional parts
  std::uint64_t seed = 12345;

  // measure estimate
  int samples = 10000;
  std::vector<double> eps_grid{1e-6, 1e-5, 1e-4};

  // verification grids
  int n_x = 64;                  // spatial sample points
  int n_t = 512;                 // time samples across the window
  double window_periods = 1.0;   // window length in slowest-angle periods

  // plumbing
  std::string out_dir = "out";
  std::string command = "run";
};

// Thrown by load_config on parse or validation failure; `items` lists every
// violation found, one message per line.
struct ConfigError : std::runtime_error {
  std::vector<std::string> items;
  explicit ConfigError(std::vector<std::string> msgs);
};

// All structural constraints, itemized; empty means valid.
std::vector<std::string> validate_config(const RunConfig& cfg);

// Canonical JSON document (stable field order) and its inverse.  Unknown
// keys and type mismatches are reported into `errors`; parsing continues so
// every problem is listed in one pass.  A document missing the "forcing"
// table is an error: the physical input has no silent default.
std::string config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const std::string& text,
                           std::vector<std::string>& errors);

// Reads, parses, and validates a config file; throws ConfigError. An empty
// path yields the built-in defaults (which do carry the nominal table).
RunConfig load_config(const std::string& path);

// One-line canonical echo of the effective configuration, prepended to every
// output artifact.
std::string effective_config_line(const RunConfig& cfg);

// Fractional parts of the square roots of the first `count` primes.
std::vector<double> default_omega(int count);

// The frequency vector a run uses: explicit (padded from default_omega when
// empty), or a seeded uniform sample of length b.back().
std::vector<double> resolve_omega(const RunConfig& cfg);

// Adapters into the component inputs.
DriverConfig driver_config(const RunConfig& cfg);
ForcingHierarchy build_hierarchy(const RunConfig& cfg);
MeasureConfig measure_config(const RunConfig& cfg);

}  // namespace beamnf
