#pragma once

// Named experiments: the steady and unsteady stability figures, the temporal
// convergence table and the second-order stability comparison.

#include <string>
#include <vector>

#include "ibssd/config.hpp"

namespace ibssd {

enum class PresetKind { run, convergence };

struct Preset {
  std::string name;
  std::string description;
  PresetKind kind = PresetKind::run;
  std::vector<RunConfig> runs;  // for convergence presets: one base configuration per study
  std::vector<double> dts;      // convergence presets only
};

const std::vector<Preset>& presets();
/// Throws ErrorKind::usage for unknown names.
const Preset& find_preset(const std::string& name);

}  // namespace ibssd
