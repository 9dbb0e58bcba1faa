#include "ibssd/presets.hpp"

#include <sstream>

namespace ibssd {

namespace {

std::string dt_tag(double dt) {
  std::ostringstream os;
  os << dt;
  return os.str();
}

RunConfig make_run(const std::string& preset, Scheme scheme, Eigen::Index N, double mu, double dt, double T) {
  RunConfig c;
  c.scheme = scheme;
  c.N = N;
  c.phys.mu = mu;
  c.dt = dt;
  c.T = T;
  c.name = preset + "_" + to_string(scheme) + "_mu" + dt_tag(mu) + "_dt" + dt_tag(dt);
  return c;
}

Preset named(const std::string& name, const std::string& description) {
  Preset p;
  p.name = name;
  p.description = description;
  return p;
}

std::vector<Preset> build() {
  std::vector<Preset> out;
  {
    Preset p = named("steady-fig1", "steady energy, four schemes, dt in {0.1, 1}, N=128, S_b=mu=1, T=20");
    for (double dt : {0.1, 1.0})
      for (Scheme s : {Scheme::explicit_steady, Scheme::ssd1_steady, Scheme::ifrk4_steady, Scheme::stable_steady})
        p.runs.push_back(make_run(p.name, s, 128, 1.0, dt, 20.0));
    out.push_back(p);
  }
  {
    Preset p = named("steady-fig2", "steady energy at dt=10 for ssd1 and ifrk4, N=128, 20 steps");
    for (Scheme s : {Scheme::ssd1_steady, Scheme::ifrk4_steady}) p.runs.push_back(make_run(p.name, s, 128, 1.0, 10.0, 200.0));
    out.push_back(p);
  }
  {
    Preset p = named("steady-fig3", "final configurations after 20 steps at dt=10 (snapshots of step 0 and 20)");
    for (Scheme s : {Scheme::ssd1_steady, Scheme::ifrk4_steady}) {
      RunConfig c = make_run(p.name, s, 128, 1.0, 10.0, 200.0);
      c.snapshot_every = 20;
      p.runs.push_back(c);
    }
    out.push_back(p);
  }
  {
    Preset p = named("unsteady-fig4", "unsteady energy, explicit vs ssd1 vs stable, dt in {0.005, 0.05}, N=128, mu=0.01, T=1");
    for (double dt : {0.005, 0.05})
      for (Scheme s : {Scheme::explicit_unsteady, Scheme::ssd1_unsteady, Scheme::stable_unsteady})
        p.runs.push_back(make_run(p.name, s, 128, 0.01, dt, 1.0));
    out.push_back(p);
  }
  {
    Preset p = named("unsteady-fig5", "unsteady energy at dt=1 for ssd1 and stable, N=128, mu=0.01, 20 steps");
    for (Scheme s : {Scheme::ssd1_unsteady, Scheme::stable_unsteady}) p.runs.push_back(make_run(p.name, s, 128, 0.01, 1.0, 20.0));
    out.push_back(p);
  }
  {
    Preset p = named("unsteady-fig6", "final configurations after 20 steps at dt=1 (snapshots of step 0 and 20)");
    for (Scheme s : {Scheme::stable_unsteady, Scheme::ssd1_unsteady}) {
      RunConfig c = make_run(p.name, s, 128, 0.01, 1.0, 20.0);
      c.snapshot_every = 20;
      p.runs.push_back(c);
    }
    out.push_back(p);
  }
  {
    Preset p = named("conv-fig7-table3", "second-order temporal convergence, N=256, T=1, dt=1/16..1/128, mu in {0.05, 0.01}");
    p.kind = PresetKind::convergence;
    for (double mu : {0.05, 0.01}) {
      RunConfig c = make_run(p.name, Scheme::second_order_unsteady, 256, mu, 1.0 / 16, 1.0);
      c.name = p.name + "_mu" + dt_tag(mu);
      p.runs.push_back(c);
    }
    p.dts = {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};
    out.push_back(p);
  }
  {
    Preset p = named("stab-fig8", "second-order semi-implicit vs explicit midpoint at dt=0.02, N=128, mu=0.01, T=1");
    for (Scheme s : {Scheme::second_order_unsteady, Scheme::explicit2_unsteady})
      p.runs.push_back(make_run(p.name, s, 128, 0.01, 0.02, 1.0));
    out.push_back(p);
  }
  return out;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = build();
  return all;
}

const Preset& find_preset(const std::string& name) {
  for (const Preset& p : presets())
    if (p.name == name) return p;
  throw Error(ErrorKind::usage, "unknown preset '" + name + "'");
}

}  // namespace ibssd
