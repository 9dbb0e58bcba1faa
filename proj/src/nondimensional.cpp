#include "ibssd/nondimensional.hpp"

#include <cmath>

namespace ibssd {

void PhysParams::validate() const {
  const auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(rho)) throw Error(ErrorKind::parameter, "rho must be positive");
  if (!positive(mu)) throw Error(ErrorKind::parameter, "mu must be positive");
  if (!positive(S_b)) throw Error(ErrorKind::parameter, "S_b must be positive");
  if (!positive(L)) throw Error(ErrorKind::parameter, "L must be positive");
  if (!positive(L_b)) throw Error(ErrorKind::parameter, "L_b must be positive");
  if (!positive(t0)) throw Error(ErrorKind::parameter, "t0 must be positive");
}

DimensionlessGroups dimensionless_groups(const PhysParams& p) {
  p.validate();
  DimensionlessGroups g;
  g.elastic = p.S_b * p.t0 / (p.mu * p.L);
  g.viscous = p.mu * p.t0 / (p.rho * p.L * p.L);
  g.length_ratio = p.L_b / p.L;
  g.reduced = p.mu * p.mu / (p.rho * p.L * p.S_b);
  return g;
}

double characteristic_time(const PhysParams& p) {
  p.validate();
  return p.mu * p.L / p.S_b;
}

std::vector<double> reduced_groups(const PhysParams& p, bool steady) {
  const DimensionlessGroups g = dimensionless_groups(p);
  if (steady) return {g.length_ratio};
  return {g.reduced, g.length_ratio};
}

PhysParams canonical_params(double mu) {
  PhysParams p;
  p.mu = mu;
  p.validate();
  return p;
}

const std::vector<double>& canonical_viscosities() {
  static const std::vector<double> values{0.1, 0.05, 0.01, 0.005};
  return values;
}

}  // namespace ibssd
