#include "ibssd/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ibssd/diagnostics.hpp"

namespace ibssd {

namespace {

Error usage(const std::string& key, const std::string& what) { return Error(ErrorKind::usage, key + ": " + what); }

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    // Accept simple fractions such as 1/16.
    const auto slash = v.find('/');
    if (slash != std::string::npos) return to_double(key, v.substr(0, slash)) / to_double(key, v.substr(slash + 1));
    throw usage(key, "expected a number, got '" + v + "'");
  }
  return out;
}

long to_long(const std::string& key, const std::string& v) {
  long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw usage(key, "expected an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw usage(key, "expected true or false, got '" + v + "'");
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

double parse_number(const std::string& key, const std::string& value) { return to_double(key, trim(value)); }

std::vector<double> parse_number_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!trim(item).empty()) out.push_back(parse_number(key, item));
  }
  return out;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "name", "scheme", "N", "N_b", "dt", "T", "rho", "mu", "S_b", "L", "L_b", "a", "b", "cx", "cy", "rescale",
      "tolerance", "steady_velocity", "two_thirds_filter", "dense_limit", "output_dir", "snapshot_every",
      "resume_from"};
  return keys;
}

void apply_setting(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  try {
    if (key == "name") c.name = v;
    else if (key == "scheme") c.scheme = scheme_from_string(v);
    else if (key == "N") c.N = to_long(key, v);
    else if (key == "N_b") c.N_b = to_long(key, v);
    else if (key == "dt") c.dt = to_double(key, v);
    else if (key == "T") c.T = to_double(key, v);
    else if (key == "rho") c.phys.rho = to_double(key, v);
    else if (key == "mu") c.phys.mu = to_double(key, v);
    else if (key == "S_b") c.phys.S_b = to_double(key, v);
    else if (key == "L") c.phys.L = to_double(key, v);
    else if (key == "L_b") c.phys.L_b = to_double(key, v);
    else if (key == "a") c.a = to_double(key, v);
    else if (key == "b") c.b = to_double(key, v);
    else if (key == "cx") c.cx = to_double(key, v);
    else if (key == "cy") c.cy = to_double(key, v);
    else if (key == "rescale") c.rescale = v == "auto" ? std::nullopt : std::optional<bool>(to_bool(key, v));
    else if (key == "tolerance") c.tolerance = to_double(key, v);
    else if (key == "steady_velocity") c.steady_velocity = steady_velocity_from_string(v);
    else if (key == "two_thirds_filter") c.two_thirds_filter = to_bool(key, v);
    else if (key == "dense_limit") c.dense_limit = to_long(key, v);
    else if (key == "output_dir") c.output_dir = v;
    else if (key == "snapshot_every") c.snapshot_every = to_long(key, v);
    else if (key == "resume_from") c.resume_from = v;
    else throw usage(key, "unknown key");
  } catch (const Error& e) {
    if (std::string(e.what()).rfind(std::string(to_string(ErrorKind::usage)) + ": " + key + ":", 0) == 0) throw;
    throw usage(key, e.what());
  }
}

RunConfig parse_config(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::usage, "line " + std::to_string(number) + ": expected key = value");
    apply_setting(base, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::usage, "cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::string format_config(const RunConfig& c) {
  std::ostringstream os;
  os << "name = " << c.name << "\n"
     << "scheme = " << to_string(c.scheme) << "\n"
     << "N = " << c.N << "\n"
     << "N_b = " << c.N_b << "\n"
     << "dt = " << num(c.dt) << "\n"
     << "T = " << num(c.T) << "\n"
     << "rho = " << num(c.phys.rho) << "\n"
     << "mu = " << num(c.phys.mu) << "\n"
     << "S_b = " << num(c.phys.S_b) << "\n"
     << "L = " << num(c.phys.L) << "\n"
     << "L_b = " << num(c.phys.L_b) << "\n"
     << "a = " << num(c.a) << "\n"
     << "b = " << num(c.b) << "\n"
     << "cx = " << num(c.cx) << "\n"
     << "cy = " << num(c.cy) << "\n"
     << "rescale = " << (c.rescale ? (*c.rescale ? "true" : "false") : "auto") << "\n"
     << "tolerance = " << num(c.tolerance) << "\n"
     << "steady_velocity = " << to_string(c.steady_velocity) << "\n"
     << "two_thirds_filter = " << (c.two_thirds_filter ? "true" : "false") << "\n"
     << "dense_limit = " << c.dense_limit << "\n"
     << "output_dir = " << c.output_dir << "\n"
     << "snapshot_every = " << c.snapshot_every << "\n";
  if (!c.resume_from.empty()) os << "resume_from = " << c.resume_from << "\n";
  return os.str();
}

void RunConfig::validate() const {
  const auto check = [](const std::string& key, const auto& fn) {
    try {
      fn();
    } catch (const Error& e) {
      throw usage(key, e.what());
    }
  };
  if (name.empty() || name.find('/') != std::string::npos) throw usage("name", "must be a non-empty file stem");
  if (N < 4 || N % 2) throw usage("N", "must be even and at least 4");
  if (N_b < 0 || N_b % 2) throw usage("N_b", "must be even (0 selects 2N)");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw usage("dt", "must be positive");
  if (!(T >= 0.0) || !std::isfinite(T)) throw usage("T", "must be non-negative");
  check("T", [&] { steps_for(T, dt); });
  check("phys", [&] { phys.validate(); });
  if (!(a > 0.0) || !(b > 0.0)) throw usage("a", "ellipse semi-axes must be positive");
  if (!(tolerance > 0.0) || tolerance > 1e-4) throw usage("tolerance", "must lie in (0, 1e-4]");
  if (dense_limit < 0) throw usage("dense_limit", "must be non-negative");
  if (snapshot_every < 0) throw usage("snapshot_every", "must be non-negative");
  check("N", [&] { grid().validate(); });
}

GridSpec RunConfig::grid() const { return GridSpec::make(N, phys.L, phys.L_b, N_b); }

SchemeConfig RunConfig::scheme_config() const {
  SchemeConfig c = default_scheme_config(scheme, dt);
  if (rescale) c.rescale = *rescale;
  c.tolerance = tolerance;
  c.steady_velocity = steady_velocity;
  c.two_thirds_filter = two_thirds_filter;
  c.dense_limit = dense_limit;
  return c;
}

InterfaceState RunConfig::initial_interface() const {
  return init_ellipse(a, b, Vec2(cx, cy), grid().N_b, phys.L_b).state;
}

long RunConfig::steps() const { return steps_for(T, dt); }

}  // namespace ibssd
