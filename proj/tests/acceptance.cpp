// Acceptance checks: one PASS/FAIL line per criterion. Optional arguments select criteria by number.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "ibssd/bessel.hpp"
#include "ibssd/commands.hpp"
#include "ibssd/diagnostics.hpp"
#include "ibssd/log.hpp"
#include "ibssd/spectral.hpp"
#include "quadrature.hpp"

using namespace ibssd;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

PhysParams params(double mu) {
  PhysParams p;
  p.mu = mu;
  return p;
}

InterfaceState ellipse(const GridSpec& g) { return init_ellipse(0.32, 0.24, Vec2(0.5, 0.5), g.N_b, g.L_b).state; }

double div_ratio(const FluidState& f, double L) {
  const double umax = std::max(f.u.cwiseAbs().maxCoeff(), f.v.cwiseAbs().maxCoeff());
  if (umax == 0.0) return 0.0;
  return divergence(f.u, f.v, L).cwiseAbs().maxCoeff() / umax;
}

double circularity(const StepState& s) {
  const Vec& sa = s.iface.s_alpha;
  return (sa.maxCoeff() - sa.minCoeff()) / sa.mean();
}

/// Largest fluid divergence ratio seen by any probe; every stepped fluid state is checked.
double g_max_div = 0.0;
long g_fluid_states = 0;

ProbeResult probe(Scheme scheme, Eigen::Index N, double mu, double dt, long steps) {
  const PhysParams p = params(mu);
  const GridSpec g = GridSpec::make(N, p.L, p.L_b);
  ProbeOptions opts;
  opts.observer = [&](const DiagnosticsRecord& r, const StepState& s, const SchemeConfig&) {
    if (s.fluid.size() == 0 || !r.stable || r.step == 0) return;
    g_max_div = std::max(g_max_div, div_ratio(s.fluid, p.L));
    ++g_fluid_states;
  };
  return stability_probe(ellipse(g), g, p, default_scheme_config(scheme, dt), steps, opts);
}

std::string verdict_text(const ProbeResult& r) {
  return r.stable ? "stable" : "unstable@" + std::to_string(r.steps_run);
}

Verdict adjointness() {
  const GridSpec grid = GridSpec::make(64, 1.0, 0.4 * kPi);
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  std::normal_distribution<double> nd;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double r = 0.05 + 0.35 * ud(rng), cx = 1.5 * ud(rng) - 0.25, cy = ud(rng), amp = 0.3 * ud(rng);
    const int mode = 1 + static_cast<int>(6 * ud(rng));
    CurveSamples c;
    c.x.resize(grid.N_b);
    c.y.resize(grid.N_b);
    for (Eigen::Index j = 0; j < grid.N_b; ++j) {
      const double t = kTwoPi * j / grid.N_b;
      c.x(j) = cx + r * (1.0 + amp * std::cos(mode * t)) * std::cos(t);
      c.y(j) = cy + r * (1.0 + amp * std::cos(mode * t)) * std::sin(t);
    }
    Grid u(grid.N, grid.N);
    Vec gv(grid.N_b);
    for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = nd(rng);
    for (Eigen::Index i = 0; i < gv.size(); ++i) gv(i) = nd(rng);
    const double lhs = inner_product_omega(u, spread(c, gv, grid), grid.h());
    const double rhs = inner_product_gamma(interpolate(c, u, grid), gv, grid.dalpha());
    const double scale = std::sqrt(inner_product_omega(u, u, grid.h()) * inner_product_gamma(gv, gv, grid.dalpha()));
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return {worst <= 1e-12, "100 curves, max relative gap " + fmt("%.2e", worst)};
}

Verdict divergence_free() {
  // Direct solves on random smooth forces, plus every fluid state produced by criteria 3 and 5.
  std::mt19937 rng(7);
  std::normal_distribution<double> nd;
  double worst = 0.0;
  for (Eigen::Index N : {32, 64, 128}) {
    Grid fx(N, N), fy(N, N);
    for (Eigen::Index i = 0; i < fx.size(); ++i) {
      fx(i) = nd(rng);
      fy(i) = nd(rng);
    }
    fx.array() -= fx.mean();
    fy.array() -= fy.mean();
    worst = std::max(worst, div_ratio(steady_stokes_grid_solve(fx, fy, 1.0), 1.0));
    worst = std::max(worst, div_ratio(unsteady_stokes_step(FluidState::zero(N), fx, fy, 1.0, 0.01, 0.05), 1.0));
    worst = std::max(worst, div_ratio(crank_nicolson_stokes_step(FluidState::zero(N), fx, fy, 1.0, 0.01, 0.05), 1.0));
  }
  worst = std::max(worst, g_max_div);
  return {worst <= 1e-10,
          "max |div u|/|u| " + fmt("%.2e", worst) + " over 9 direct solves and " + std::to_string(g_fluid_states) +
              " stepped states"};
}

Verdict energy_monotone() {
  bool ok = true;
  std::ostringstream detail;
  for (double mu : {1.0, 0.01}) {
    for (double dt : {0.1, 1.0, 10.0}) {
      const ProbeResult r = probe(Scheme::stable_steady, 64, mu, dt, 100);
      ok = ok && r.stable && r.steps_run == 100 && r.energy_non_increasing;
      if (!r.energy_non_increasing || !r.stable) detail << " stable_steady mu=" << mu << " dt=" << dt << " violated;";
    }
    for (double dt : {0.005, 0.05, 1.0}) {
      const ProbeResult r = probe(Scheme::stable_unsteady, 64, mu, dt, 100);
      ok = ok && r.stable && r.steps_run == 100 && r.energy_non_increasing;
      if (!r.energy_non_increasing || !r.stable) detail << " stable_unsteady mu=" << mu << " dt=" << dt << " violated;";
    }
  }
  return {ok, "12 runs x 100 steps, N=64, mu in {1, 0.01}" + detail.str()};
}

Verdict steady_dichotomy() {
  const ProbeResult e01 = probe(Scheme::explicit_steady, 128, 1.0, 0.1, 200);
  const ProbeResult e1 = probe(Scheme::explicit_steady, 128, 1.0, 1.0, 20);
  const ProbeResult s10 = probe(Scheme::ssd1_steady, 128, 1.0, 10.0, 20);
  const ProbeResult i10 = probe(Scheme::ifrk4_steady, 128, 1.0, 10.0, 20);
  const double cs = circularity(s10.final_state), ci = circularity(i10.final_state);
  const bool pass = e01.stable && !e1.stable && s10.stable && i10.stable && cs < 1e-2 && ci < 1e-2;
  return {pass, "explicit 0.1 " + verdict_text(e01) + ", explicit 1 " + verdict_text(e1) + ", ssd1 10 " +
                    verdict_text(s10) + " (spread " + fmt("%.1e", cs) + "), ifrk4 10 " + verdict_text(i10) +
                    " (spread " + fmt("%.1e", ci) + ")"};
}

Verdict unsteady_dichotomy() {
  const ProbeResult e1 = probe(Scheme::explicit_unsteady, 128, 0.01, 0.005, 200);
  const ProbeResult e2 = probe(Scheme::explicit_unsteady, 128, 0.01, 0.05, 20);
  const ProbeResult s = probe(Scheme::ssd1_unsteady, 128, 0.01, 1.0, 20);
  const bool pass = e1.stable && !e2.stable && s.stable;
  return {pass, "explicit 0.005 " + verdict_text(e1) + ", explicit 0.05 " + verdict_text(e2) + ", ssd1 1 " +
                    verdict_text(s) + " (spread " + fmt("%.1e", circularity(s.final_state)) + ")"};
}

Verdict second_order_rate() {
  bool pass = true;
  std::ostringstream detail;
  for (double mu : {0.05, 0.01}) {
    const PhysParams p = params(mu);
    const GridSpec g = GridSpec::make(256, p.L, p.L_b);
    const ConvergenceReport r =
        run_convergence_study(ellipse(g), g, p, default_scheme_config(Scheme::second_order_unsteady, 1.0 / 16),
                              {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128}, 1.0);
    pass = pass && r.completed && std::abs(r.rate_X - 2.0) <= 0.4;
    detail << "mu=" << mu << " X-rate " << fmt("%.3f", r.rate_X) << " u-rate " << fmt("%.3f", r.rate_u) << "; ";
  }
  return {pass, detail.str()};
}

Verdict kernel_identity() {
  // (1/pi) int_R K0(beta|a - a'|) cos(k a') da' = cos(k a) (2/pi) int_0^inf K0(beta u) cos(k u) du,
  // the quadrature using the standard library K0.
  double worst = 0.0;
  const Eigen::Index n = 64;
  const Vec alpha = Vec::LinSpaced(n, 0.0, kTwoPi - kTwoPi / n);
  for (int k : {1, 2, 4, 8}) {
    for (double beta : {0.5, 2.0, 10.0}) {
      double integral = 0.0;
      const double upper = 80.0 / beta;
      const double piece = std::min(0.5, upper / 64.0);
      for (double a = 0.0; a < upper; a += piece) {
        integral += oracle::tanh_sinh(
            [&](double u, double, double) { return std::cyl_bessel_k(0.0, beta * u) * std::cos(k * u); }, a,
            a + piece);
      }
      const Vec f = (k * alpha.array()).cos();
      const Vec spectral = apply_symbol_1d(f, [&](double m) { return k0_convolution_symbol(beta, m); });
      worst = std::max(worst, (spectral - (2.0 / oracle::pi) * integral * f).cwiseAbs().maxCoeff());
    }
  }
  return {worst <= 1e-6, "12 (k, beta) pairs, max deviation " + fmt("%.2e", worst)};
}

Verdict symbol_asymptotics() {
  const auto make = [](double mu) {
    SsdSymbolParams p;
    p.mu = mu;
    p.dt = 0.1;
    p.lambda = std::sqrt(p.rho / (mu * p.dt));
    p.s_min = 1.0;
    p.s_max_excess = 0.5;
    p.gamma = 1.0 - 1.0 / 1.5;
    return p;
  };
  const SsdSymbolParams big = make(1e4), small = make(1e-6);
  double worst = 0.0;
  for (int k = 1; k <= 8; ++k) {
    const double steady = -(big.S_b / (4.0 * big.mu)) * k;
    worst = std::max(worst, std::abs(ssd_symbol_T(k, big) / steady - 1.0));
    worst = std::max(worst, std::abs(ssd_symbol_S(k, big) / (big.s_max_excess * steady) - 1.0));
    const double T_small = -(small.S_b * std::sqrt(small.dt)) / (2.0 * small.s_min * std::sqrt(small.rho * small.mu)) * k * k;
    worst = std::max(worst, std::abs(ssd_symbol_T(k, small) / T_small - 1.0));
    const double beta = small.lambda * small.s_min;
    const double S_small = -(small.S_b * small.dt * small.s_max_excess) / (2.0 * small.rho * small.s_min * small.s_min) *
                           std::pow(k, 3) * (1.0 - k / std::sqrt(beta * beta + k * k));
    worst = std::max(worst, std::abs(ssd_symbol_S(k, small) / S_small - 1.0));
  }
  return {worst <= 0.01, "k=1..8, max relative deviation " + fmt("%.2e", worst)};
}

double area_ratio(Scheme scheme, double mu, double dt, double T) {
  const PhysParams p = params(mu);
  const GridSpec g = GridSpec::make(64, p.L, p.L_b);
  const ProbeResult r = stability_probe(ellipse(g), g, p, default_scheme_config(scheme, dt), steps_for(T, dt));
  if (!r.stable) return 0.0;
  return enclosed_area(r.final_state.curve) / (kPi * 0.32 * 0.24);
}

Verdict area_loss() {
  const double steady = area_ratio(Scheme::ssd1_steady, 1.0, 4.0, 20.0);
  const double unsteady = area_ratio(Scheme::ssd1_unsteady, 0.01, 0.25, 2.0);
  return {steady >= 0.95 && unsteady >= 0.95, "ssd1_steady dt=4 keeps " + fmt("%.3f", steady) +
                                                  ", ssd1_unsteady dt=1/4 keeps " + fmt("%.3f", unsteady) +
                                                  " of the initial area"};
}

Verdict cost_scaling() {
  RunConfig base;
  base.name = "acceptance";
  base.output_dir = (std::filesystem::temp_directory_path() / "ibssd_acceptance").string();
  base.phys.mu = 0.01;
  base.dt = 0.01;
  std::ostringstream log;
  const CostResult ssd =
      cmd_cost(base, {Scheme::ssd1_steady, Scheme::ssd1_unsteady}, {64, 128, 256}, 15, log);
  const CostResult stable = cmd_cost(base, {Scheme::stable_steady, Scheme::stable_unsteady}, {128}, 3, log);
  const auto at128 = [](const CostResult& r, Scheme s) {
    for (const CostRow& row : r.rows)
      if (row.scheme == s && row.N == 128) return row.seconds_per_step;
    return std::nan("");
  };
  const double e1 = ssd.time_exponent.at(Scheme::ssd1_steady), e2 = ssd.time_exponent.at(Scheme::ssd1_unsteady);
  const double r1 = at128(stable, Scheme::stable_steady) / at128(ssd, Scheme::ssd1_steady);
  const double r2 = at128(stable, Scheme::stable_unsteady) / at128(ssd, Scheme::ssd1_unsteady);
  const bool pass = e1 <= 2.4 && e2 <= 2.4 && r1 >= 10.0 && r2 >= 10.0;
  return {pass, "ssd1 exponents " + fmt("%.2f", e1) + "/" + fmt("%.2f", e2) + ", stable/ssd1 at N=128 " +
                    fmt("%.0f", r1) + "x/" + fmt("%.0f", r2) + "x"};
}

}  // namespace

int main(int argc, char** argv) {
  set_warning_handler([](const std::string&) {});
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  // Criterion 2 also inspects the fluid states of criteria 3 and 5, so it runs after them.
  const std::vector<std::pair<int, std::function<Verdict()>>> criteria{
      {1, adjointness},      {3, energy_monotone},    {5, unsteady_dichotomy}, {2, divergence_free},
      {4, steady_dichotomy}, {6, second_order_rate},  {7, kernel_identity},    {8, symbol_asymptotics},
      {9, area_loss},        {10, cost_scaling}};
  const char* names[] = {"",
                         "spread/interpolate adjointness",
                         "discrete divergence",
                         "energy non-increasing",
                         "steady stability dichotomy",
                         "unsteady stability dichotomy",
                         "second-order convergence",
                         "K0 kernel identity",
                         "SSD symbol asymptotics",
                         "area loss",
                         "cost scaling"};
  int failures = 0;
  for (const auto& [id, check] : criteria) {
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %s: %s (%s) [%.1fs]\n", id, v.pass ? "PASS" : "FAIL", names[id], v.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !v.pass;
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
