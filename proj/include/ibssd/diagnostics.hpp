#pragma once

// Energies, stability verdicts and temporal convergence studies.

#include <functional>
#include <string>
#include <vector>

#include "ibssd/integrators.hpp"

namespace ibssd {

struct DiagnosticsRecord {
  long step = 0;
  double t = 0.0;
  double K = 0.0;
  double P = 0.0;
  double E = 0.0;  // K + P
  double area = 0.0;
  double max_u = 0.0;
  double min_salpha = 0.0;
  double max_salpha = 0.0;
  bool stable = true;
};

/// (rho / 2) sum |u|^2 h^2.
double kinetic_energy(const FluidState& fluid, double rho, double h);
/// (S_b / 2) sum (s_alpha - 1)^2 dalpha.
double potential_energy(const Eigen::Ref<const Vec>& s_alpha, double S_b, double dalpha);

/// Diagnostics of a state. Steady schemes carry no kinetic energy.
DiagnosticsRecord diagnostics(const StepState& s, const GridSpec& g, const PhysParams& p, bool steady);

struct ProbeOptions {
  double energy_factor = 10.0;    // unstable once E > energy_factor * E0
  double velocity_factor = 1e6;   // unstable once max|u| > velocity_factor * first nonzero max|u|
  // Sees every record with its state and the scheme configuration as advanced, including the starting one.
  std::function<void(const DiagnosticsRecord&, const StepState&, const SchemeConfig&)> observer;
};

struct ProbeResult {
  bool stable = true;
  long steps_run = 0;
  std::string reason;  // empty when stable
  double E0 = 0.0;
  double max_E = 0.0;
  bool energy_non_increasing = true;  // E^{n+1} <= E^n + 1e-12 E0 at every step
  StepState final_state;
  SchemeConfig config;  // with the rescaling coefficients fixed during the run
};

/// Runs c.scheme for the given number of steps. Unstable iff the energy exceeds
/// energy_factor E0, a field becomes non-finite, the curve leaves the domain
/// box by more than L, or max|u| runs away. Solver failures propagate.
ProbeResult stability_probe(const StepState& start, const GridSpec& g, const PhysParams& p, const SchemeConfig& c,
                            long steps, const ProbeOptions& opts = {});
ProbeResult stability_probe(const InterfaceState& init, const GridSpec& g, const PhysParams& p, const SchemeConfig& c,
                            long steps, const ProbeOptions& opts = {});

/// Fields compared between runs of a convergence study, with their l2 weights.
struct Observables {
  Vec X;
  double X_weight = 1.0;
  Vec u;
  double u_weight = 1.0;
};

struct ConvergenceReport {
  std::vector<double> dt;   // e_T is reported for each of these
  std::vector<double> e_X;  // ||X(T; dt) - X(T; dt/2)||
  std::vector<double> e_u;
  std::vector<double> pair_rate_X;  // log2(e(dt) / e(dt/2)) per consecutive pair
  std::vector<double> pair_rate_u;
  double rate_X = 0.0;  // least-squares slope of log e against log dt
  double rate_u = 0.0;
  bool completed = true;
  std::string error;  // set when a run failed; earlier errors are kept
};

/// Least-squares slope of log y against log x over the entries with y > 0.
double fit_log_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Runs solve(dt) for every dt and for dt_min / 2; dts must halve successively.
ConvergenceReport convergence_study(const std::vector<double>& dts, const std::function<Observables(double)>& solve);

/// convergence_study for a scheme run from init to time T.
ConvergenceReport run_convergence_study(const InterfaceState& init, const GridSpec& g, const PhysParams& p,
                                        const SchemeConfig& base, const std::vector<double>& dts, double T);

/// Number of steps of size dt in T. Throws ErrorKind::parameter unless T is a multiple of dt.
long steps_for(double T, double dt);

}  // namespace ibssd
