// Independent physical validation: PDE residual of reconstructed solutions
// (central differences in t, spectral fourth derivative in x), direct
// Galerkin time integration with a symmetric second-order method, and the
// closed-form linear-response oracle.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>
#include <vector>

#include "beamnf/beam.hpp"
#include "beamnf/driver.hpp"
#include "beamnf/forcing.hpp"
#include "beamnf/verify.hpp"
#include "doctest.h"

using namespace beamnf;

namespace {

constexpr double kPi = std::numbers::pi;

PolyHamiltonian cosine(int b, const Trunc& tr, int i, double amp = 1.0) {
  PolyHamiltonian h(b, tr);
  std::vector<int> k(b, 0);
  k[i] = 1;
  h.add_term(k, {}, {}, amp / 2.0);
  k[i] = -1;
  h.add_term(k, {}, {}, amp / 2.0);
  return h;
}

ForcingHierarchy make_hierarchy(double eps, double rho,
                                const std::vector<int>& b, const Trunc& tr,
                                const std::vector<std::array<double, 4>>& amps) {
  ForcingHierarchy fh;
  fh.eps = eps;
  fh.rho = rho;
  fh.c0 = 1.0;
  fh.b = b;
  for (std::size_t j = 0; j < b.size(); ++j) {
    ForcingBlock blk;
    blk.index = static_cast<int>(j);
    blk.n_angles = b[j];
    blk.new_angle_begin = j == 0 ? 0 : b[j - 1];
    const int angle = b[j] - 1;
    for (int l = 0; l < 4; ++l) {
      const double a = j < amps.size() ? amps[j][l] : 0.0;
      blk.psi[l] =
          a != 0.0 ? cosine(b[j], tr, angle, a) : PolyHamiltonian(b[j], tr);
    }
    fh.blocks.push_back(blk);
  }
  return fh;
}

std::vector<double> grid(double t0, double t1, int n) {
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = t0 + (t1 - t0) * i / (n - 1);
  return t;
}

PsiEval zero_psi_eval() {
  return [](int, double) { return 0.0; };
}

// Hand-built reconstruction of u = cos(jx) cos(mu_j t): the exact solution
// of the unforced linear beam, expressed through the mode normalization
// u = q_j phi_j / sqrt(mu_j) with phi_j = cos(jx)/sqrt(pi).
Reconstruction linear_mode_rec(int j, double m, int n_modes,
                               const std::vector<double>& t, int n_x) {
  const auto mu = beam_frequencies(m, n_modes);
  Reconstruction rec;
  rec.t = t;
  rec.x.resize(n_x);
  for (int i = 0; i < n_x; ++i) rec.x[i] = -kPi + 2.0 * kPi * i / n_x;
  rec.q.assign(t.size(), std::vector<double>(n_modes + 1, 0.0));
  rec.u.assign(t.size(), std::vector<double>(n_x, 0.0));
  for (std::size_t it = 0; it < t.size(); ++it) {
    const double ct = std::cos(mu[j] * t[it]);
    rec.q[it][j] = std::sqrt(kPi * mu[j]) * ct;
    for (int ix = 0; ix < n_x; ++ix)
      rec.u[it][ix] = std::cos(j * rec.x[ix]) * ct;
  }
  rec.q_norm.assign(t.size(), 0.0);
  return rec;
}

}  // namespace

TEST_CASE("reconstruct_solution: empty chain is the zero solution") {
  IterationState st;
  st.ns.omega = {0.5};
  st.ns.Omega0 = beam_frequencies(1.0, 3);
  st.ns.Omega = st.ns.Omega0;
  auto rec = reconstruct_solution(st, grid(0.0, 5.0, 11), 16, 0.1, 0.5);
  CHECK(rec.t.size() == 11);
  CHECK(rec.x.size() == 16);
  for (const auto& qt : rec.q)
    for (double q : qt) CHECK(q == 0.0);
  for (const auto& ut : rec.u)
    for (double u : ut) CHECK(u == 0.0);
  for (double n : rec.q_norm) CHECK(n == 0.0);
}

TEST_CASE("pde_residual: zero solution, zero forcing") {
  IterationState st;
  st.ns.omega = {0.5};
  st.ns.Omega0 = beam_frequencies(1.0, 2);
  st.ns.Omega = st.ns.Omega0;
  auto rec = reconstruct_solution(st, grid(0.0, 4.0, 9), 8, 0.0, 1.0);
  auto rep = pde_residual(rec, zero_psi_eval(), 1.0);
  CHECK(rep.sup_residual == 0.0);
  CHECK(rep.l2_residual == 0.0);
}

TEST_CASE("pde_residual: exact linear mode leaves only the O(h^2) error") {
  const double m = 1.0;
  const int j = 2;
  const double mu = std::sqrt(16.0 + m);
  const double period = 2.0 * kPi / mu;

  auto run_with = [&](int nt) {
    auto rec = linear_mode_rec(j, m, 3, grid(0.0, 2.0 * period, nt), 96);
    return pde_residual(rec, zero_psi_eval(), m);
  };
  auto rep = run_with(401);
  const double h = 2.0 * period / 400;
  const double predict = mu * mu * mu * mu * h * h / 12.0;
  CHECK(rep.sup_residual > 0.85 * predict);
  CHECK(rep.sup_residual < 1.15 * predict);
  CHECK(rep.l2_residual > 0.0);
  CHECK(rep.l2_residual < rep.sup_residual);
  // the reported discretization estimate has the same h^2 size
  CHECK(rep.disc_error_est > 0.3 * rep.sup_residual);
  CHECK(rep.disc_error_est < 3.0 * rep.sup_residual);

  // halving h divides the residual by ~4 (second order)
  auto fine = run_with(801);
  CHECK(rep.sup_residual / fine.sup_residual > 3.6);
  CHECK(rep.sup_residual / fine.sup_residual < 4.4);

  // negative control: perturbing the spectral fourth derivative must break
  // the exactness (the j^4 multiplier is load-bearing)
  auto rec = linear_mode_rec(j, m, 3, grid(0.0, 2.0 * period, 401), 96);
  auto broken = pde_residual(rec, zero_psi_eval(), m, 1.001);
  CHECK(broken.sup_residual > 5.0 * rep.sup_residual);
}

TEST_CASE("pde_residual: zero solution, constant-level forcing survives") {
  IterationState st;
  st.ns.omega = {0.5};
  st.ns.Omega0 = beam_frequencies(1.0, 2);
  st.ns.Omega = st.ns.Omega0;
  auto t = grid(0.0, 10.0, 41);
  auto rec = reconstruct_solution(st, t, 8, 0.0, 1.0);
  PsiEval psi = [](int l, double tt) {
    return l == 0 ? 0.3 * std::cos(0.7 * tt) : 0.0;
  };
  auto rep = pde_residual(rec, psi, 1.0);
  double expect = 0.0;
  for (std::size_t i = 1; i + 1 < t.size(); ++i)
    expect = std::max(expect, std::abs(0.3 * std::cos(0.7 * t[i])));
  CHECK(rep.sup_residual == expect);  // exactly the inhomogeneity
  CHECK(rep.l2_residual > 0.0);
}

TEST_CASE("pde_residual: fewer than 3 time points rejected") {
  IterationState st;
  st.ns.omega = {0.5};
  st.ns.Omega0 = beam_frequencies(1.0, 1);
  st.ns.Omega = st.ns.Omega0;
  auto rec = reconstruct_solution(st, grid(0.0, 1.0, 2), 8, 0.0, 1.0);
  CHECK_THROWS_AS(pde_residual(rec, zero_psi_eval(), 1.0),
                  std::invalid_argument);
}

TEST_CASE("direct_integrate: harmonic oscillator pin, second order") {
  const double m = 1.0;
  const int n_modes = 1;
  const double mu = std::sqrt(1.0 + m);
  const double t_end = 3.0 * 2.0 * kPi / mu;

  auto err_at = [&](double h) {
    auto res = direct_integrate({0.0, 1.0}, {0.0, 0.0}, zero_psi_eval(), m,
                                t_end, h);
    double err = 0.0;
    for (std::size_t i = 0; i < res.t.size(); ++i)
      err = std::max(err, std::abs(res.q[i][1] - std::cos(mu * res.t[i])));
    return err;
  };
  const double h = default_step(m, n_modes);
  const double e1 = err_at(h), e2 = err_at(h / 2.0);
  CHECK(e2 < 0.03);
  CHECK(e1 / e2 > 3.4);
  CHECK(e1 / e2 < 4.6);
}

TEST_CASE("direct_integrate: unforced energy drift stays O(h^2)") {
  const double m = 1.0;
  const double h = default_step(m, 2);
  auto res = direct_integrate({0.3, -0.2, 0.5}, {0.1, 0.4, -0.3},
                              zero_psi_eval(), m, 1000.0 * h, h);
  CHECK(res.t.size() == 1001);
  CHECK(res.energy_drift < 0.05);  // bounded oscillation, no secular growth
  CHECK_FALSE(res.step_warning);

  // the drift is O(h^2): halving the step divides it by ~4
  auto fine = direct_integrate({0.3, -0.2, 0.5}, {0.1, 0.4, -0.3},
                               zero_psi_eval(), m, 1000.0 * h, h / 2.0);
  CHECK(fine.energy_drift < res.energy_drift / 3.0);

  // a reckless step trips the warning
  auto bad = direct_integrate({0.3, -0.2, 0.5}, {0.1, 0.4, -0.3},
                              zero_psi_eval(), m, 10.0, 0.5);
  CHECK(bad.step_warning);
}

TEST_CASE("direct_integrate: psi0 forcing drives only mode 0, matches the "
          "closed-form response") {
  const double m = 1.0, nu = 0.37, A = 0.01;
  PsiEval psi = [&](int l, double t) {
    return l == 0 ? A * std::cos(nu * t) : 0.0;
  };
  const double amp = linear_response_amplitude(A, nu, m);
  // starting on the response orbit there is no homogeneous component
  auto res = direct_integrate({amp, 0.0, 0.0}, {0.0, 0.0, 0.0}, psi, m, 40.0,
                              0.01);
  double err = 0.0;
  for (std::size_t i = 0; i < res.t.size(); ++i) {
    err = std::max(err,
                   std::abs(res.q[i][0] - amp * std::cos(nu * res.t[i])));
    CHECK(res.q[i][1] == 0.0);  // psi0 projects onto mode 0 alone
    CHECK(res.q[i][2] == 0.0);
  }
  CHECK(err < 1e-5);
}

TEST_CASE("linear_response_amplitude: sign and magnitude") {
  // q0'' + m q0 = -sqrt(2 pi mu0) A cos(nu t)
  const double got = linear_response_amplitude(0.01, 0.37, 1.0);
  const double expect =
      -std::sqrt(2.0 * kPi * 1.0) * 0.01 / (1.0 - 0.37 * 0.37);
  CHECK(got == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("two-step constant-forcing run: reconstruction equals the "
          "closed-form response in time") {
  const Trunc tr{2, 3, 4};
  const double eps = 1e-3, w = 0.37;
  const ForcingHierarchy fh =
      make_hierarchy(eps, 1.0, {1}, tr, {{{1.0, 0, 0, 0}}});
  DriverConfig cfg;
  cfg.m = 1.0;
  cfg.eps = eps;
  cfg.trunc = tr;
  cfg.v_max = 2;
  cfg.omega_full = {w};
  const RunResult res = run(cfg, fh);
  REQUIRE_FALSE(res.stopped_early);
  const IterationState& st = res.snapshots.back();

  auto t = grid(0.0, 30.0, 1501);
  auto rec = reconstruct_solution(st, t, 16, 0.0, 1.0);
  const double amp = linear_response_amplitude(eps, w, 1.0);
  for (std::size_t i = 0; i < t.size(); i += 125) {
    CHECK(rec.q[i][0] ==
          doctest::Approx(amp * std::cos(w * t[i])).epsilon(1e-9));
    // u is flat in x: mode 0 only, u = q0 phi_0 / sqrt(mu_0)
    CHECK(rec.u[i][3] ==
          doctest::Approx(rec.q[i][0] / std::sqrt(2.0 * kPi)).epsilon(1e-12));
  }

  // residual of the reconstruction vs the activated forcing: O(h^2) only
  ForcingHierarchy active = fh;
  active.blocks.resize(st.blocks_activated);
  PsiEval psi = [&](int l, double tt) {
    return eval_psi(active, l, {w * tt});
  };
  auto rep = pde_residual(rec, psi, 1.0);
  CHECK(rep.sup_residual < 1e-8);

  // the zero-step state misses the whole forcing: residual = sup |psi_0|
  DriverConfig cfg0 = cfg;
  cfg0.v_max = 0;
  const RunResult res0 = run(cfg0, fh);
  auto rec0 = reconstruct_solution(res0.snapshots.back(), t, 16, 0.0, 1.0);
  auto rep0 = pde_residual(rec0, psi, 1.0);
  CHECK(rep0.sup_residual > 0.9 * eps);
  CHECK(rep.sup_residual < 1e-4 * rep0.sup_residual);
}

TEST_CASE("residual decreases monotonically with iteration steps") {
  const Trunc tr{2, 3, 4};
  const ForcingHierarchy fh = make_hierarchy(
      1e-3, 1.0, {1, 2}, tr,
      {{{0.7, 0.3, 0.2, 0.1}}, {{0.5, 0.2, 0.1, 0.05}}});
  DriverConfig cfg;
  cfg.m = 1.0;
  cfg.eps = 1e-3;
  cfg.trunc = tr;
  cfg.v_max = 2;
  cfg.omega_full = {0.4142135623730951, 0.7320508075688772};
  const RunResult res = run(cfg, fh);
  REQUIRE_FALSE(res.stopped_early);
  REQUIRE(res.snapshots.size() == 3);

  std::vector<double> sup;
  for (const auto& st : res.snapshots) {
    const auto t = grid(0.0, 2.0 * kPi / 0.4142135623730951, 2001);
    auto rec = reconstruct_solution(st, t, 32, cfg.a, cfg.p);
    ForcingHierarchy active = fh;
    active.blocks.resize(st.blocks_activated);
    const std::vector<double> om = st.ns.omega;
    PsiEval psi = [&](int l, double tt) {
      std::vector<double> th(om.size());
      for (std::size_t i = 0; i < om.size(); ++i) th[i] = om[i] * tt;
      return eval_psi(active, l, th);
    };
    auto rep = pde_residual(rec, psi, cfg.m);
    sup.push_back(rep.sup_residual);
    if (&st != &res.snapshots.front()) {
      CHECK(rep.q_norm_max > 0.0);
      CHECK(rep.q_norm_max >= rep.q_norm_mean);
    }
  }
  CHECK(sup[0] > sup[1]);
  CHECK(sup[1] > sup[2]);
  CHECK(sup[2] <= 0.1 * sup[0]);
}

TEST_CASE("default_step resolves the fastest retained mode") {
  CHECK(default_step(1.0, 4) ==
        doctest::Approx(2.0 * kPi / (20.0 * std::sqrt(257.0))).epsilon(1e-15));
}
