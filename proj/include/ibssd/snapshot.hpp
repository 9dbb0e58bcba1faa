#pragma once

// Versioned JSON snapshots of a running simulation. Numbers are written in the
// shortest form that parses back to the same double.

#include <string>

#include "ibssd/integrators.hpp"

namespace ibssd {

inline constexpr int kSnapshotVersion = 1;

struct Snapshot {
  StepState state;
  GridSpec grid;
  PhysParams phys;
  SchemeConfig scheme;
};

std::string snapshot_to_string(const Snapshot& s);
/// Throws ErrorKind::io for malformed documents or a different format version.
Snapshot snapshot_from_string(const std::string& text);

void save_snapshot(const std::string& path, const Snapshot& s);
Snapshot load_snapshot(const std::string& path);

}  // namespace ibssd
