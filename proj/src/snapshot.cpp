#include "ibssd/snapshot.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ibssd {

namespace {

using nlohmann::json;

json array(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vec vec(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json grid_array(const Grid& g) {
  const Vec flat = g.reshaped();
  return array(flat);
}

Grid grid(const json& j, Eigen::Index n) {
  const Vec flat = vec(j);
  if (flat.size() != n * n) throw Error(ErrorKind::io, "snapshot grid field has the wrong size");
  return flat.reshaped(n, n);
}

}  // namespace

std::string snapshot_to_string(const Snapshot& s) {
  const StepState& st = s.state;
  json j;
  j["format_version"] = kSnapshotVersion;
  j["step"] = st.step;
  j["t"] = st.t;
  j["max_u"] = st.max_u;
  j["grid"] = {{"N", s.grid.N}, {"L", s.grid.L}, {"N_b", s.grid.N_b}, {"L_b", s.grid.L_b}};
  j["phys"] = {{"rho", s.phys.rho}, {"mu", s.phys.mu}, {"S_b", s.phys.S_b},
               {"L", s.phys.L},     {"L_b", s.phys.L_b}, {"t0", s.phys.t0}};
  j["scheme"] = {{"name", to_string(s.scheme.scheme)},
                 {"dt", s.scheme.dt},
                 {"tolerance", s.scheme.tolerance},
                 {"rescale", s.scheme.rescale},
                 {"C_V", s.scheme.C_V},
                 {"C_U", s.scheme.C_U},
                 {"rescale_ready", s.scheme.rescale_ready},
                 {"steady_velocity", to_string(s.scheme.steady_velocity)},
                 {"dense_limit", s.scheme.dense_limit},
                 {"two_thirds_filter", s.scheme.two_thirds_filter},
                 {"drift_tolerance", s.scheme.drift_tolerance}};
  j["interface"] = {{"L_b", st.iface.L_b},
                    {"s_alpha", array(st.iface.s_alpha)},
                    {"phi", array(st.iface.phi)},
                    {"ref_start", {st.iface.ref.start.x(), st.iface.ref.start.y()}},
                    {"ref_half", {st.iface.ref.half.x(), st.iface.ref.half.y()}}};
  j["curve"] = {{"x", array(st.curve.x)}, {"y", array(st.curve.y)}};
  j["fluid"] = {{"N", st.fluid.size()},
                {"u", grid_array(st.fluid.u)},
                {"v", grid_array(st.fluid.v)},
                {"p", grid_array(st.fluid.p)}};
  return j.dump(1) + "\n";
}

Snapshot snapshot_from_string(const std::string& text) {
  try {
    const json j = json::parse(text);
    const int version = j.at("format_version").get<int>();
    if (version != kSnapshotVersion)
      throw Error(ErrorKind::io, "unsupported snapshot version " + std::to_string(version));
    Snapshot s;
    const json& g = j.at("grid");
    s.grid = GridSpec{g.at("N").get<Eigen::Index>(), g.at("L").get<double>(), g.at("N_b").get<Eigen::Index>(),
                      g.at("L_b").get<double>()};
    const json& p = j.at("phys");
    s.phys.rho = p.at("rho");
    s.phys.mu = p.at("mu");
    s.phys.S_b = p.at("S_b");
    s.phys.L = p.at("L");
    s.phys.L_b = p.at("L_b");
    s.phys.t0 = p.at("t0");
    const json& c = j.at("scheme");
    s.scheme.scheme = scheme_from_string(c.at("name"));
    s.scheme.dt = c.at("dt");
    s.scheme.tolerance = c.at("tolerance");
    s.scheme.rescale = c.at("rescale");
    s.scheme.C_V = c.at("C_V");
    s.scheme.C_U = c.at("C_U");
    s.scheme.rescale_ready = c.at("rescale_ready");
    s.scheme.steady_velocity = steady_velocity_from_string(c.at("steady_velocity"));
    s.scheme.dense_limit = c.at("dense_limit");
    s.scheme.two_thirds_filter = c.at("two_thirds_filter");
    s.scheme.drift_tolerance = c.at("drift_tolerance");

    StepState& st = s.state;
    st.step = j.at("step");
    st.t = j.at("t");
    st.max_u = j.at("max_u");
    const json& i = j.at("interface");
    st.iface.L_b = i.at("L_b");
    st.iface.s_alpha = vec(i.at("s_alpha"));
    st.iface.phi = vec(i.at("phi"));
    const auto a = i.at("ref_start").get<std::vector<double>>(), b = i.at("ref_half").get<std::vector<double>>();
    if (a.size() != 2 || b.size() != 2) throw Error(ErrorKind::io, "reference points need two coordinates");
    st.iface.ref.start = Vec2(a[0], a[1]);
    st.iface.ref.half = Vec2(b[0], b[1]);
    st.curve.x = vec(j.at("curve").at("x"));
    st.curve.y = vec(j.at("curve").at("y"));
    const json& f = j.at("fluid");
    const auto n = f.at("N").get<Eigen::Index>();
    st.fluid.u = grid(f.at("u"), n);
    st.fluid.v = grid(f.at("v"), n);
    st.fluid.p = grid(f.at("p"), n);

    s.grid.validate();
    s.phys.validate();
    s.scheme.validate();
    validate_state(st.iface);
    if (st.iface.size() != s.grid.N_b || st.curve.size() != s.grid.N_b || n != s.grid.N)
      throw Error(ErrorKind::io, "snapshot arrays disagree with its grid");
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::io, std::string("malformed snapshot: ") + e.what());
  }
}

void save_snapshot(const std::string& path, const Snapshot& s) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path);
  out << snapshot_to_string(s);
  if (!out) throw Error(ErrorKind::io, "failed writing " + path);
}

Snapshot load_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return snapshot_from_string(ss.str());
}

}  // namespace ibssd
