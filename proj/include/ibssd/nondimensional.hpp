#pragma once

// Physical parameters, their dimensionless groups and the canonical presets.

#include <string>
#include <vector>

#include "ibssd/types.hpp"

namespace ibssd {

struct PhysParams {
  double rho = 1.0;
  double mu = 1.0;
  double S_b = 1.0;
  double L = 1.0;
  double L_b = 0.4 * kPi;  // rest length of the membrane: a circle of radius 0.2
  double t0 = 1.0;

  void validate() const;
};

struct DimensionlessGroups {
  double elastic = 0.0;         // S_b t0 / (mu L)
  double viscous = 0.0;         // mu t0 / (rho L^2)
  double length_ratio = 0.0;    // L_b / L
  double reduced = 0.0;         // mu^2 / (rho L S_b), the only unsteady group once t0 = mu L / S_b
};

DimensionlessGroups dimensionless_groups(const PhysParams& p);

/// t0 = mu L / S_b, the elastic relaxation time.
double characteristic_time(const PhysParams& p);

/// Groups that remain free after choosing t0 = mu L / S_b: {mu^2/(rho L S_b), L_b/L}
/// for unsteady flow and {L_b/L} for steady flow.
std::vector<double> reduced_groups(const PhysParams& p, bool steady);

/// S_b = 1, rho = 1, L = 1, with mu from the canonical set.
PhysParams canonical_params(double mu);
const std::vector<double>& canonical_viscosities();

}  // namespace ibssd
