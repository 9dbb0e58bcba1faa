#pragma once

// Run configuration and its key = value text form.
//
// Grammar: one "key = value" pair per line. Blank lines and text after '#'
// are ignored. Values are numbers, booleans (true/false) or bare strings.
// Later assignments override earlier ones.

#include <optional>
#include <string>
#include <vector>

#include "ibssd/integrators.hpp"

namespace ibssd {

struct RunConfig {
  std::string name = "run";
  Scheme scheme = Scheme::ssd1_unsteady;
  Eigen::Index N = 64;
  Eigen::Index N_b = 0;  // 0 means 2N
  double dt = 0.01;
  double T = 1.0;
  PhysParams phys;
  double a = 0.32;  // ellipse semi-axes and centre
  double b = 0.24;
  double cx = 0.5;
  double cy = 0.5;
  std::optional<bool> rescale;  // unset: per-scheme default
  double tolerance = 1e-10;
  SteadyVelocity steady_velocity = SteadyVelocity::grid;
  bool two_thirds_filter = false;
  Eigen::Index dense_limit = 256;
  std::string output_dir = ".";
  long snapshot_every = 0;  // 0: final snapshot only
  std::string resume_from;  // snapshot path; empty starts from the ellipse

  /// Throws ErrorKind::usage naming the offending field.
  void validate() const;
  GridSpec grid() const;
  SchemeConfig scheme_config() const;
  InterfaceState initial_interface() const;
  long steps() const;
};

/// Parses a number or a simple fraction such as 1/16. Throws ErrorKind::usage naming key.
double parse_number(const std::string& key, const std::string& value);
/// Comma-separated list of parse_number values; empty input gives an empty list.
std::vector<double> parse_number_list(const std::string& key, const std::string& value);

/// Every key accepted by apply_setting, in documentation order.
const std::vector<std::string>& config_keys();

/// Throws ErrorKind::usage for unknown keys or malformed values.
void apply_setting(RunConfig& c, const std::string& key, const std::string& value);

RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

/// Text that parse_config maps back to the same configuration.
std::string format_config(const RunConfig& c);

}  // namespace ibssd
