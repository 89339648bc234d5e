// Configuration round-trip, itemized validation, and adapter wiring into
// the driver, forcing, and measure components.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "beamnf/config.hpp"
#include "doctest.h"

using namespace beamnf;

namespace {
bool mentions(const std::vector<std::string>& items, const std::string& sub) {
  for (const auto& s : items)
    if (s.find(sub) != std::string::npos) return true;
  return false;
}
}  // namespace

TEST_CASE("defaults are a valid configuration") {
  RunConfig cfg;
  CHECK(validate_config(cfg).empty());
}

TEST_CASE("json round-trip is byte-identical") {
  RunConfig cfg;
  cfg.eps = 2.5e-5;
  cfg.b = {1, 3, 4};
  cfg.omega = {0.1, 0.2, 0.3, 0.4};
  cfg.forcing_terms.push_back({1, 2, {1, -1, 0}, 0.25, 0.0});
  const std::string doc = config_to_json(cfg);
  std::vector<std::string> errs;
  RunConfig back = config_from_json(doc, errs);
  CHECK(errs.empty());
  CHECK(config_to_json(back) == doc);
  CHECK(effective_config_line(back) == effective_config_line(cfg));
}

TEST_CASE("file loading applies overrides on top of defaults") {
  const char* path = "/tmp/beamnf_test_config.json";
  {
    std::ofstream f(path);
    f << R"({"eps": 1e-5, "v_max": 2,
             "forcing": {"cos": [[0.5, 0, 0, 0]]}})";
  }
  RunConfig cfg = load_config(path);
  CHECK(cfg.eps == 1e-5);
  CHECK(cfg.v_max == 2);
  CHECK(cfg.m == 1.0);           // untouched default
  CHECK(cfg.k_force == 2);       // untouched default
  CHECK(cfg.forcing_cos.size() == 1);
  CHECK(cfg.forcing_cos[0][0] == 0.5);
  std::remove(path);
}

TEST_CASE("a config file without a forcing table is rejected") {
  std::vector<std::string> errs;
  config_from_json(R"({"eps": 1e-5})", errs);
  CHECK(mentions(errs, "forcing"));
}

TEST_CASE("validation lists every violated field") {
  RunConfig cfg;
  cfg.m = -1.0;
  cfg.rho = 1.5;
  cfg.eps = 1.0;
  cfg.b = {2, 2};
  cfg.k_force = 9;  // exceeds k_max
  cfg.samples = 0;
  cfg.omega_source = "psychic";
  auto items = validate_config(cfg);
  CHECK(mentions(items, "m:"));
  CHECK(mentions(items, "rho:"));
  CHECK(mentions(items, "eps:"));
  CHECK(mentions(items, "b:"));
  CHECK(mentions(items, "k_force:"));
  CHECK(mentions(items, "samples:"));
  CHECK(mentions(items, "omega"));
  CHECK(items.size() >= 7);
}

TEST_CASE("explicit omega shorter than the widest block is flagged") {
  RunConfig cfg;
  cfg.omega = {0.5};  // b.back() = 3
  auto items = validate_config(cfg);
  CHECK(mentions(items, "omega"));
}

TEST_CASE("forcing term validation: block, level, length, frequency cap") {
  RunConfig cfg;
  cfg.forcing_terms.push_back({7, 0, {1}, 0.1, 0.0});       // bad block
  cfg.forcing_terms.push_back({0, 9, {1}, 0.1, 0.0});       // bad level
  cfg.forcing_terms.push_back({1, 0, {1}, 0.1, 0.0});       // wrong k length
  cfg.forcing_terms.push_back({0, 0, {5}, 0.1, 0.0});       // |k| > k_force
  cfg.forcing_terms.push_back({0, 0, {0}, 0.1, 0.3});       // complex at k=0
  auto items = validate_config(cfg);
  CHECK(items.size() >= 5);
  CHECK(mentions(items, "forcing"));
}

TEST_CASE("unknown keys are reported by name") {
  std::vector<std::string> errs;
  config_from_json(
      R"({"epz": 1, "forcing": {"cos": [[1,0,0,0]], "tremz": []}})", errs);
  CHECK(mentions(errs, "epz"));
  CHECK(mentions(errs, "tremz"));
}

TEST_CASE("malformed json yields a parse error, not a crash") {
  std::vector<std::string> errs;
  config_from_json("{ not json", errs);
  CHECK(!errs.empty());
  CHECK(mentions(errs, "parse"));
}

TEST_CASE("load_config throws ConfigError with the items attached") {
  const char* path = "/tmp/beamnf_bad_config.json";
  {
    std::ofstream f(path);
    f << R"({"m": -3, "forcing": {"cos": [[1,0,0,0]]}})";
  }
  CHECK_THROWS_AS(load_config(path), ConfigError);
  try {
    load_config(path);
  } catch (const ConfigError& e) {
    CHECK(mentions(e.items, "m:"));
  }
  std::remove(path);
  CHECK_THROWS_AS(load_config("/tmp/definitely_missing_9471.json"),
                  ConfigError);
}

TEST_CASE("default omega is the fractional parts of prime square roots") {
  auto w = default_omega(4);
  REQUIRE(w.size() == 4);
  CHECK(w[0] == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-15));
  CHECK(w[1] == doctest::Approx(std::sqrt(3.0) - 1.0).epsilon(1e-15));
  CHECK(w[2] == doctest::Approx(std::sqrt(5.0) - 2.0).epsilon(1e-15));
  CHECK(w[3] == doctest::Approx(std::sqrt(7.0) - 2.0).epsilon(1e-15));
}

TEST_CASE("resolve_omega: explicit default, explicit custom, seeded") {
  RunConfig cfg;
  auto w = resolve_omega(cfg);
  REQUIRE(w.size() >= 3);
  CHECK(w[0] == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-15));

  cfg.omega = {0.9, 0.8, 0.7};
  CHECK(resolve_omega(cfg) == cfg.omega);

  cfg.omega_source = "seeded";
  auto s1 = resolve_omega(cfg);
  auto s2 = resolve_omega(cfg);
  REQUIRE(s1.size() == 3);
  CHECK(s1 == s2);  // deterministic in the seed
  for (double x : s1) {
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  cfg.seed = 999;
  CHECK(resolve_omega(cfg) != s1);
}

TEST_CASE("adapters carry the shared fields through") {
  RunConfig cfg;
  cfg.eps = 3e-5;
  cfg.v_max = 2;
  DriverConfig dc = driver_config(cfg);
  CHECK(dc.eps == 3e-5);
  CHECK(dc.v_max == 2);
  CHECK(dc.trunc.n_modes == cfg.n_modes);
  CHECK(dc.trunc.k_max == cfg.k_max);
  CHECK(dc.omega_full.size() >= 3);

  MeasureConfig mc = measure_config(cfg);
  CHECK(mc.m == cfg.m);
  CHECK(mc.k_meas == cfg.k_meas);
  CHECK(mc.b_sched == cfg.b);
  CHECK(mc.seed == cfg.seed);
}

TEST_CASE("build_hierarchy: shorthand rows become newest-angle cosines") {
  RunConfig cfg;
  ForcingHierarchy fh = build_hierarchy(cfg);
  REQUIRE(fh.blocks.size() == 3);
  CHECK(fh.eps == cfg.eps);
  CHECK(fh.b == cfg.b);
  // block 0, level 0: cos(theta_0) with amplitude 1 -> psi(theta=0) = 1
  CHECK(eval_psi(fh, 0, {0.0, 0.0, 0.0}) ==
        doctest::Approx(block_weight(0, cfg.eps, cfg.rho) * 1.0 +
                        block_weight(1, cfg.eps, cfg.rho) * 0.5 +
                        block_weight(2, cfg.eps, cfg.rho) * 0.25)
            .epsilon(1e-12));
  CHECK(validate_H2(fh).pass);
}

TEST_CASE("build_hierarchy: explicit terms get conjugate closure") {
  RunConfig cfg;
  cfg.forcing_cos.clear();
  cfg.forcing_cos.push_back({0.0, 0.0, 0.0, 0.0});
  cfg.forcing_terms.push_back({1, 1, {1, -1}, 0.0, 0.25});
  ForcingHierarchy fh = build_hierarchy(cfg);
  auto rep = validate_H2(fh);
  // conjugate symmetry must hold for every row
  for (const auto& row : rep.rows) CHECK(row.conj_symmetric);
  // i c e^{i(t0 - t1)} + conj = -2 * 0.25 * sin(t0 - t1)
  const double v = eval_psi(fh, 1, {0.5, 0.1, 0.0});
  const double w1 = block_weight(1, cfg.eps, cfg.rho);
  CHECK(v == doctest::Approx(-2.0 * 0.25 * std::sin(0.4) * w1).epsilon(1e-10));
}
