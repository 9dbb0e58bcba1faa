#include "ibssd/diagnostics.hpp"

#include <cmath>

namespace ibssd {

double kinetic_energy(const FluidState& fluid, double rho, double h) {
  return 0.5 * rho * (fluid.u.squaredNorm() + fluid.v.squaredNorm()) * h * h;
}

double potential_energy(const Eigen::Ref<const Vec>& s_alpha, double S_b, double dalpha) {
  return 0.5 * S_b * (s_alpha.array() - 1.0).square().sum() * dalpha;
}

DiagnosticsRecord diagnostics(const StepState& s, const GridSpec& g, const PhysParams& p, bool steady) {
  DiagnosticsRecord r;
  r.step = s.step;
  r.t = s.t;
  r.K = steady || s.fluid.size() == 0 ? 0.0 : kinetic_energy(s.fluid, p.rho, g.h());
  r.P = potential_energy(s.iface.s_alpha, p.S_b, s.iface.dalpha());
  r.E = r.K + r.P;
  r.area = enclosed_area(s.curve);
  r.max_u = s.max_u;
  r.min_salpha = s.iface.s_alpha.minCoeff();
  r.max_salpha = s.iface.s_alpha.maxCoeff();
  return r;
}

namespace {

bool finite(const StepState& s) {
  return s.iface.s_alpha.allFinite() && s.iface.phi.allFinite() && s.curve.x.allFinite() &&
         s.curve.y.allFinite() && (s.fluid.size() == 0 || (s.fluid.u.allFinite() && s.fluid.v.allFinite()));
}

bool outside_box(const CurveSamples& c, double L) {
  const auto out = [L](const Vec& v) { return v.minCoeff() < -L || v.maxCoeff() > 2.0 * L; };
  return out(c.x) || out(c.y);
}

}  // namespace

ProbeResult stability_probe(const StepState& start, const GridSpec& g, const PhysParams& p, const SchemeConfig& config,
                            long steps, const ProbeOptions& opts) {
  SchemeConfig c = config;
  const bool steady = is_steady(c.scheme);
  ProbeResult out;
  StepState st = start;
  DiagnosticsRecord rec = diagnostics(st, g, p, steady);
  out.E0 = out.max_E = rec.E;
  if (opts.observer) opts.observer(rec, st, c);
  double prev_E = rec.E;
  double u_ref = 0.0;

  const auto fail = [&](const std::string& reason) {
    out.stable = false;
    out.reason = reason;
  };
  for (long n = 0; n < steps && out.stable; ++n) {
    try {
      st = advance(st, g, p, c);
    } catch (const BlowupError& e) {
      fail(e.what());
      out.steps_run = n + 1;
      if (opts.observer) {
        // The failed step has no usable state: report it with NaN fields.
        const double nan = std::nan("");
        DiagnosticsRecord bad{st.step + 1, st.t + c.dt, nan, nan, nan, nan, nan, nan, nan, false};
        opts.observer(bad, st, c);
      }
      break;
    }
    out.steps_run = n + 1;
    rec = diagnostics(st, g, p, steady);
    if (!finite(st) || !std::isfinite(rec.E)) {
      fail("non-finite state");
    } else if (out.E0 > 0.0 && rec.E > opts.energy_factor * out.E0) {
      fail("energy exceeded " + std::to_string(opts.energy_factor) + " E0");
    } else if (outside_box(st.curve, p.L)) {
      fail("curve left the domain");
    } else if (u_ref > 0.0 && rec.max_u > opts.velocity_factor * u_ref) {
      fail("velocity runaway");
    }
    if (u_ref == 0.0 && rec.max_u > 0.0) u_ref = rec.max_u;
    if (rec.E > prev_E + 1e-12 * out.E0) out.energy_non_increasing = false;
    if (std::isfinite(rec.E)) out.max_E = std::max(out.max_E, rec.E);
    prev_E = rec.E;
    rec.stable = out.stable;
    if (opts.observer) opts.observer(rec, st, c);
  }
  out.final_state = std::move(st);
  out.config = c;
  return out;
}

ProbeResult stability_probe(const InterfaceState& init, const GridSpec& g, const PhysParams& p, const SchemeConfig& c,
                            long steps, const ProbeOptions& opts) {
  return stability_probe(make_step_state(init, g), g, p, c, steps, opts);
}

double fit_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(y[i] > 0.0) || !(x[i] > 0.0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::nan("");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

long steps_for(double T, double dt) {
  if (!(dt > 0.0) || !(T >= 0.0)) throw Error(ErrorKind::parameter, "need dt > 0 and T >= 0");
  const long n = std::lround(T / dt);
  if (std::abs(n * dt - T) > 1e-9 * std::max(1.0, T)) throw Error(ErrorKind::parameter, "T is not a multiple of dt");
  return n;
}

namespace {

double weighted_l2(const Vec& a, const Vec& b, double w) {
  if (a.size() != b.size()) throw Error(ErrorKind::shape_mismatch, "observable sizes differ between runs");
  return std::sqrt(w * (a - b).squaredNorm());
}

}  // namespace

ConvergenceReport convergence_study(const std::vector<double>& dts, const std::function<Observables(double)>& solve) {
  for (size_t i = 1; i < dts.size(); ++i) {
    if (std::abs(dts[i] - 0.5 * dts[i - 1]) > 1e-12 * dts[i - 1])
      throw Error(ErrorKind::parameter, "dt list must halve successively");
  }
  ConvergenceReport r;
  if (dts.empty()) return r;
  std::vector<double> all = dts;
  all.push_back(0.5 * dts.back());

  std::vector<Observables> obs;
  try {
    for (double dt : all) obs.push_back(solve(dt));
  } catch (const Error& e) {
    r.completed = false;
    r.error = e.what();
  }
  for (size_t i = 0; i + 1 < obs.size(); ++i) {
    r.dt.push_back(all[i]);
    r.e_X.push_back(weighted_l2(obs[i].X, obs[i + 1].X, obs[i].X_weight));
    r.e_u.push_back(weighted_l2(obs[i].u, obs[i + 1].u, obs[i].u_weight));
  }
  for (size_t i = 0; i + 1 < r.dt.size(); ++i) {
    r.pair_rate_X.push_back(std::log2(r.e_X[i] / r.e_X[i + 1]));
    r.pair_rate_u.push_back(std::log2(r.e_u[i] / r.e_u[i + 1]));
  }
  r.rate_X = fit_log_slope(r.dt, r.e_X);
  r.rate_u = fit_log_slope(r.dt, r.e_u);
  return r;
}

ConvergenceReport run_convergence_study(const InterfaceState& init, const GridSpec& g, const PhysParams& p,
                                        const SchemeConfig& base, const std::vector<double>& dts, double T) {
  for (double dt : dts) steps_for(T, 0.5 * dt);
  const auto solve = [&](double dt) {
    SchemeConfig c = base;
    c.dt = dt;
    c.rescale_ready = false;
    StepState st = make_step_state(init, g);
    for (long n = 0, steps = steps_for(T, dt); n < steps; ++n) st = advance(st, g, p, c);
    Observables o;
    o.X.resize(2 * st.curve.size());
    o.X << st.curve.x, st.curve.y;
    o.X_weight = g.dalpha();
    o.u.resize(2 * st.fluid.u.size());
    o.u << st.fluid.u.reshaped(), st.fluid.v.reshaped();
    o.u_weight = g.h() * g.h();
    return o;
  };
  return convergence_study(dts, solve);
}

}  // namespace ibssd
