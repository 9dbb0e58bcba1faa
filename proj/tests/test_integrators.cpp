#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <tuple>
#include <vector>

#include "ibssd/integrators.hpp"
#include "ibssd/log.hpp"
#include "ibssd/spectral.hpp"

using namespace ibssd;

namespace {

struct QuietWarnings {
  std::vector<std::string> seen;
  WarningHandler previous;
  QuietWarnings() {
    previous = set_warning_handler([this](const std::string& m) { seen.push_back(m); });
  }
  ~QuietWarnings() { set_warning_handler(previous); }
};

double curve_distance(const CurveSamples& a, const CurveSamples& b, double dalpha) {
  return std::sqrt(((a.x - b.x).squaredNorm() + (a.y - b.y).squaredNorm()) * dalpha);
}

PhysParams model_params(double mu) {
  PhysParams p;
  p.mu = mu;
  return p;
}

InterfaceState model_ellipse(const GridSpec& g) {
  return init_ellipse(0.32, 0.24, Vec2(0.5, 0.5), g.N_b, g.L_b).state;
}

/// Rest circle: radius L_b / 2 pi, so s_alpha = 1 and the elastic force vanishes.
InterfaceState rest_circle(const GridSpec& g) {
  const double r = g.L_b / kTwoPi;
  return init_ellipse(r, r, Vec2(0.5, 0.5), g.N_b, g.L_b).state;
}

StepState run(Scheme scheme, const InterfaceState& init, const GridSpec& g, const PhysParams& p, double dt,
              int steps) {
  SchemeConfig c = default_scheme_config(scheme, dt);
  StepState st = make_step_state(init, g);
  for (int n = 0; n < steps; ++n) st = advance(st, g, p, c);
  return st;
}

double potential(const StepState& s, double S_b) {
  return 0.5 * S_b * (s.iface.s_alpha.array() - 1.0).square().sum() * s.iface.dalpha();
}

double kinetic(const StepState& s, const GridSpec& g, double rho) {
  return 0.5 * rho * (s.fluid.u.squaredNorm() + s.fluid.v.squaredNorm()) * g.h() * g.h();
}

}  // namespace

TEST_CASE("scheme names round trip") {
  for (Scheme s : all_schemes()) CHECK(scheme_from_string(to_string(s)) == s);
  CHECK(all_schemes().size() == 11);
  CHECK(is_steady(Scheme::ifrk4_steady));
  CHECK_FALSE(is_steady(Scheme::second_order_unsteady));
  try {
    scheme_from_string("rk45");
    FAIL("expected usage error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::usage);
  }
  CHECK(steady_velocity_from_string(to_string(SteadyVelocity::boundary_integral)) ==
        SteadyVelocity::boundary_integral);
}

TEST_CASE("config validation and defaults") {
  SchemeConfig c;
  CHECK_NOTHROW(c.validate());
  c.dt = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c.dt = 0.1;
  c.tolerance = 1e-3;
  CHECK_THROWS_AS(c.validate(), Error);
  c.tolerance = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);

  CHECK(default_scheme_config(Scheme::ssd1_unsteady, 1.0).rescale);
  CHECK(default_scheme_config(Scheme::ssd2_unsteady, 1.0).rescale);
  CHECK_FALSE(default_scheme_config(Scheme::ssd1_steady, 1.0).rescale);
  CHECK_FALSE(default_scheme_config(Scheme::second_order_unsteady, 1.0).rescale);
  CHECK(default_scheme_config(Scheme::stable_steady, 0.5).dt == 0.5);
}

TEST_CASE("make_step_state checks the grid") {
  const GridSpec g = GridSpec::make(16, 1.0, 0.4 * kPi);
  const InterfaceState s = model_ellipse(g);
  const StepState st = make_step_state(s, g);
  CHECK(st.fluid.size() == 16);
  CHECK(st.fluid.u.cwiseAbs().maxCoeff() == 0.0);
  CHECK(st.curve.size() == g.N_b);
  const GridSpec other = GridSpec::make(32, 1.0, 0.4 * kPi);
  CHECK_THROWS_AS(make_step_state(s, other), Error);
}

TEST_CASE("equilibrium circle is a fixed point of every scheme") {
  QuietWarnings quiet;
  const PhysParams p = model_params(0.01);
  const GridSpec g = GridSpec::make(32, 1.0, p.L_b);
  const InterfaceState circle = rest_circle(g);
  const StepState st0 = make_step_state(circle, g);
  for (Scheme scheme : all_schemes()) {
    CAPTURE(to_string(scheme));
    SchemeConfig c = default_scheme_config(scheme, 0.1);
    StepState st = st0;
    for (int n = 0; n < 3; ++n) st = advance(st, g, p, c);
    CHECK((st.iface.s_alpha - circle.s_alpha).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((st.iface.phi - circle.phi).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(curve_distance(st.curve, st0.curve, g.dalpha()) <= 1e-10);
    CHECK(st.fluid.u.cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(st.fluid.v.cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(st.step == 3);
    CHECK(st.t == doctest::Approx(0.3));
  }
}

TEST_CASE("equilibrium start disables rescaling with a warning") {
  QuietWarnings quiet;
  const PhysParams p = model_params(0.01);
  const GridSpec g = GridSpec::make(32, 1.0, p.L_b);
  SchemeConfig c = default_scheme_config(Scheme::ssd1_unsteady, 0.1);
  advance(make_step_state(rest_circle(g), g), g, p, c);
  CHECK(c.C_V == 1.0);
  CHECK(c.C_U == 1.0);
  CHECK_FALSE(quiet.seen.empty());
}

TEST_CASE("rescaling coefficients") {
  QuietWarnings quiet;
  Vec a(4), b(4);
  a << 1.0, -3.0, 2.0, 0.5;
  b << 0.5, 1.0, -1.5, 0.25;
  RescalingCoefficients r = compute_rescaling_coefficients(a, b, b, a);
  CHECK(r.C_V == doctest::Approx(2.0));
  CHECK(r.C_U == doctest::Approx(0.5));
  CHECK_FALSE(r.V_disabled);
  CHECK(quiet.seen.empty());

  r = compute_rescaling_coefficients(a, a, b, b);
  CHECK(r.C_V == 1.0);
  CHECK(r.C_U == 1.0);

  r = compute_rescaling_coefficients(a, Vec::Zero(4), b, b);
  CHECK(r.C_V == 1.0);
  CHECK(r.V_disabled);
  CHECK_FALSE(r.U_disabled);
  CHECK(quiet.seen.size() == 1);

  r = compute_rescaling_coefficients(a, b, Vec::Zero(4), b);
  CHECK(r.C_U == 1.0);
  CHECK(r.U_disabled);
}

TEST_CASE("rescaling is computed once and reused") {
  QuietWarnings quiet;
  const PhysParams p = model_params(0.01);
  const GridSpec g = GridSpec::make(64, 1.0, p.L_b);
  SchemeConfig c = default_scheme_config(Scheme::ssd1_unsteady, 1.0);
  StepState st = advance(make_step_state(model_ellipse(g), g), g, p, c);
  CHECK(c.rescale_ready);
  const double C_V = c.C_V, C_U = c.C_U;
  CHECK(std::isfinite(C_V));
  CHECK(C_V > 0.0);
  CHECK(std::isfinite(C_U));
  CHECK(C_U > 0.0);
  st = advance(st, g, p, c);
  CHECK(c.C_V == C_V);
  CHECK(c.C_U == C_U);
}

TEST_CASE("lawson rk4 is exact on a pure linear mode") {
  Vec lambda(3);
  lambda << 0.0, 2.0, 50.0;
  CVec y(3);
  y << Complex(1.0, 0.5), Complex(-2.0, 1.0), Complex(0.3, 0.0);
  const double h = 0.7;
  const CVec out = lawson_rk4_step(y, lambda, h, [](const CVec& v) { return CVec(CVec::Zero(v.size())); });
  for (Eigen::Index i = 0; i < 3; ++i) CHECK(std::abs(out(i) - std::exp(-lambda(i) * h) * y(i)) <= 1e-15);
}

TEST_CASE("lawson rk4 is fourth order") {
  // y' = -2 y + sin(y); reference from a fine run.
  Vec lambda(1);
  lambda << 2.0;
  const auto N = [](const CVec& v) { return CVec(v.array().sin()); };
  const auto solve = [&](int steps) {
    CVec y(1);
    y << Complex(1.0, 0.0);
    for (int n = 0; n < steps; ++n) y = lawson_rk4_step(y, lambda, 1.0 / steps, N);
    return y(0);
  };
  const Complex ref = solve(4096);
  const double e1 = std::abs(solve(8) - ref), e2 = std::abs(solve(16) - ref);
  CHECK(std::log2(e1 / e2) == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("ssd1 steady contracts a high stretching mode at the frozen-coefficient rate") {
  QuietWarnings quiet;
  PhysParams p;
  p.L_b = kTwoPi;
  p.L = 8.0;
  const GridSpec g = GridSpec::make(64, 8.0, kTwoPi);
  InterfaceState s;
  s.L_b = kTwoPi;
  s.s_alpha.resize(g.N_b);
  s.phi = Vec::Zero(g.N_b);
  const double eps = 1e-4;
  for (Eigen::Index j = 0; j < g.N_b; ++j) s.s_alpha(j) = 1.0 + eps * std::cos(32.0 * j * s.dalpha());
  s.ref.start = Vec2(5.0, 4.0);
  s.ref.half = Vec2(3.0, 4.0);
  for (double dt : {0.01, 0.1, 1.0}) {
    SchemeConfig c = default_scheme_config(Scheme::ssd1_steady, dt);
    c.steady_velocity = SteadyVelocity::boundary_integral;
    const StepState next = advance(make_step_state(s, g), g, p, c);
    const double amp = 2.0 * std::abs(forward_1d(next.iface.s_alpha)(32));
    const double predicted = 1.0 / (1.0 + dt * p.S_b / (4.0 * p.mu) * 32.0);
    CHECK(amp / eps == doctest::Approx(predicted).epsilon(1e-3));
  }
}

TEST_CASE("all schemes agree with the explicit scheme at small steps") {
  QuietWarnings quiet;
  for (bool steady : {true, false}) {
    const PhysParams p = model_params(steady ? 1.0 : 0.01);
    const GridSpec g = GridSpec::make(32, 1.0, p.L_b);
    const InterfaceState init = model_ellipse(g);
    const StepState ref = run(steady ? Scheme::explicit_steady : Scheme::explicit_unsteady, init, g, p, 1e-4, 10);
    for (Scheme scheme : all_schemes()) {
      if (is_steady(scheme) != steady) continue;
      CAPTURE(to_string(scheme));
      const StepState st = run(scheme, init, g, p, 1e-4, 10);
      CHECK(curve_distance(st.curve, ref.curve, g.dalpha()) <= 1e-5);
      CHECK(st.t == doctest::Approx(1e-3));
    }
  }
}

TEST_CASE("second-kind schemes differ from first-kind ones at second order") {
  QuietWarnings quiet;
  const auto gap = [](Scheme a, Scheme b, double mu, double dt) {
    const PhysParams p = model_params(mu);
    const GridSpec g = GridSpec::make(32, 1.0, p.L_b);
    const InterfaceState init = model_ellipse(g);
    const StepState sa = run(a, init, g, p, dt, 1), sb = run(b, init, g, p, dt, 1);
    return (sa.iface.s_alpha - sb.iface.s_alpha).norm() + (sa.iface.phi - sb.iface.phi).norm();
  };
  for (auto [a, b, mu] : {std::tuple{Scheme::ssd1_steady, Scheme::ssd2_steady, 1.0},
                          std::tuple{Scheme::ssd1_unsteady, Scheme::ssd2_unsteady, 0.01}}) {
    CAPTURE(to_string(b));
    const double g1 = gap(a, b, mu, 1e-3), g2 = gap(a, b, mu, 5e-4);
    CHECK(g1 <= 1e-4);
    CHECK(g1 / g2 >= 3.0);
  }
}

TEST_CASE("ifrk4 steady is fourth order with the boundary integral velocity") {
  QuietWarnings quiet;
  const PhysParams p = model_params(1.0);
  const GridSpec g = GridSpec::make(128, 1.0, p.L_b);
  const InterfaceState init = model_ellipse(g);
  std::vector<CurveSamples> finals;
  for (double dt : {0.2, 0.1, 0.05, 0.025}) {
    SchemeConfig c = default_scheme_config(Scheme::ifrk4_steady, dt);
    c.steady_velocity = SteadyVelocity::boundary_integral;
    StepState st = make_step_state(init, g);
    for (long n = 0, steps = std::lround(0.8 / dt); n < steps; ++n) st = advance(st, g, p, c);
    finals.push_back(st.curve);
  }
  const double e0 = curve_distance(finals[0], finals[1], g.dalpha());
  const double e1 = curve_distance(finals[1], finals[2], g.dalpha());
  const double e2 = curve_distance(finals[2], finals[3], g.dalpha());
  CHECK(e0 / e1 == doctest::Approx(16.0).epsilon(0.25));
  CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.25));
}

TEST_CASE("stable schemes do not increase the energy") {
  QuietWarnings quiet;
  for (auto [scheme, mu, dt] : {std::tuple{Scheme::stable_steady, 1.0, 10.0},
                                std::tuple{Scheme::stable_unsteady, 0.01, 1.0},
                                std::tuple{Scheme::stable_unsteady, 0.01, 0.05}}) {
    CAPTURE(to_string(scheme));
    CAPTURE(dt);
    const PhysParams p = model_params(mu);
    const GridSpec g = GridSpec::make(32, 1.0, p.L_b);
    SchemeConfig c = default_scheme_config(scheme, dt);
    StepState st = make_step_state(model_ellipse(g), g);
    const double E0 = potential(st, p.S_b);
    double E = E0;
    for (int n = 0; n < 15; ++n) {
      st = advance(st, g, p, c);
      const double next = potential(st, p.S_b) + kinetic(st, g, p.rho);
      CHECK(next <= E + 1e-12 * E0);
      E = next;
    }
    CHECK(E < E0);
  }
}

TEST_CASE("krylov and dense paths of the stable schemes agree") {
  QuietWarnings quiet;
  for (auto [scheme, mu] : {std::tuple{Scheme::stable_steady, 1.0}, std::tuple{Scheme::stable_unsteady, 0.01}}) {
    CAPTURE(to_string(scheme));
    const PhysParams p = model_params(mu);
    const GridSpec g = GridSpec::make(32, 1.0, p.L_b);
    const StepState st0 = make_step_state(model_ellipse(g), g);
    SchemeConfig dense = default_scheme_config(scheme, 0.5);
    SchemeConfig krylov = dense;
    krylov.dense_limit = 0;
    const StepState a = advance(st0, g, p, dense);
    const StepState b = advance(st0, g, p, krylov);
    CHECK((a.iface.s_alpha - b.iface.s_alpha).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((a.iface.phi - b.iface.phi).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("second order scheme converges at rate two") {
  QuietWarnings quiet;
  const PhysParams p = model_params(0.05);
  const GridSpec g = GridSpec::make(64, 1.0, p.L_b);
  const InterfaceState init = model_ellipse(g);
  std::vector<CurveSamples> finals;
  for (int steps : {8, 16, 32, 64}) finals.push_back(run(Scheme::second_order_unsteady, init, g, p, 0.5 / steps, steps).curve);
  const double e0 = curve_distance(finals[0], finals[1], g.dalpha());
  const double e1 = curve_distance(finals[1], finals[2], g.dalpha());
  const double e2 = curve_distance(finals[2], finals[3], g.dalpha());
  CHECK(std::log2(e0 / e1) == doctest::Approx(2.0).epsilon(0.2));
  CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("first order schemes converge at rate one") {
  QuietWarnings quiet;
  const PhysParams p = model_params(0.05);
  const GridSpec g = GridSpec::make(32, 1.0, p.L_b);
  const InterfaceState init = model_ellipse(g);
  for (Scheme scheme : {Scheme::ssd1_steady, Scheme::ssd1_unsteady, Scheme::explicit_unsteady}) {
    CAPTURE(to_string(scheme));
    std::vector<CurveSamples> finals;
    for (int steps : {20, 40, 80}) finals.push_back(run(scheme, init, g, p, 0.2 / steps, steps).curve);
    const double e0 = curve_distance(finals[0], finals[1], g.dalpha());
    const double e1 = curve_distance(finals[1], finals[2], g.dalpha());
    CHECK(std::log2(e0 / e1) == doctest::Approx(1.0).epsilon(0.2));
  }
}

TEST_CASE("explicit steady scheme blows up at a large step") {
  QuietWarnings quiet;
  const PhysParams p = model_params(1.0);
  const GridSpec g = GridSpec::make(64, 1.0, p.L_b);
  SchemeConfig c = default_scheme_config(Scheme::explicit_steady, 2.0);
  StepState st = make_step_state(model_ellipse(g), g);
  const double E0 = potential(st, p.S_b);
  bool unstable = false;
  try {
    for (int n = 0; n < 20 && !unstable; ++n) {
      st = advance(st, g, p, c);
      unstable = potential(st, p.S_b) > 10.0 * E0;
    }
  } catch (const BlowupError& e) {
    unstable = true;
    CHECK(e.step() >= 1);
  }
  CHECK(unstable);
}
