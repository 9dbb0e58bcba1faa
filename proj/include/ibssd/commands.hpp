#pragma once

// Driver commands behind the ibssd executable. Each writes its artifacts to
// the configuration's output directory and returns what it measured.

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ibssd/config.hpp"
#include "ibssd/diagnostics.hpp"
#include "ibssd/presets.hpp"
#include "ibssd/work_counters.hpp"

namespace ibssd {

enum class ExitCode : int { ok = 0, failure = 1, unstable = 2, solver_failure = 3, usage = 64 };

/// Maps an error to the exit code reported for it.
ExitCode exit_code_for(const Error& e);

inline constexpr const char* kDiagnosticsHeader = "step,t,K,P,E,area,max_u,min_salpha,max_salpha,stable";
std::string csv_row(const DiagnosticsRecord& r);

struct RunResult {
  ProbeResult probe;
  std::string csv_path;
  std::string summary_path;
  std::string final_snapshot;
  long warnings = 0;
};

/// Step loop with a diagnostics CSV (<name>.csv), a JSON summary (<name>.json)
/// and snapshots (<name>_step<k>.json, <name>_final.json).
RunResult cmd_run(const RunConfig& c, std::ostream& log);

struct ConvergenceResult {
  ConvergenceReport report;
  std::string csv_path;
  std::string summary_path;
};

/// Self-convergence study of c.scheme to time c.T over the halving chain dts
/// (<name>_convergence.csv and <name>_convergence.json).
ConvergenceResult cmd_convergence(const RunConfig& c, const std::vector<double>& dts, std::ostream& log);

struct SweepCell {
  Scheme scheme = Scheme::explicit_steady;
  Eigen::Index N = 0;
  double mu = 0.0;
  double dt = 0.0;
  bool stable = true;
  long steps_run = 0;
  std::string reason;
};

struct SweepResult {
  std::vector<SweepCell> cells;  // scheme-major, then N, mu, dt
  std::string csv_path;
  std::string summary_path;
};

/// Stability verdict for every (scheme, N, mu, dt) over the horizon base.T,
/// run on up to `threads` workers (<name>_sweep.csv, <name>_sweep_summary.csv
/// with the largest stable dt per scheme, N and mu).
SweepResult cmd_sweep(const RunConfig& base, const std::vector<Scheme>& schemes, const std::vector<Eigen::Index>& Ns,
                      const std::vector<double>& mus, const std::vector<double>& dts, int threads, std::ostream& log);

struct CostRow {
  Scheme scheme = Scheme::explicit_steady;
  Eigen::Index N = 0;
  double seconds_per_step = 0.0;
  double fft_per_step = 0.0;  // 1-D and 2-D transforms
  double fluid_solves_per_step = 0.0;
  double dense_solves_per_step = 0.0;
  double krylov_iterations_per_step = 0.0;
};

struct CostResult {
  std::vector<CostRow> rows;
  std::map<Scheme, double> time_exponent;  // least-squares slope of log time against log N
  std::string csv_path;
};

/// Fastest per-step wall time and mean operation counts after one warm-up step, measured
/// sequentially for each scheme and N (<name>_cost.csv).
CostResult cmd_cost(const RunConfig& base, const std::vector<Scheme>& schemes, const std::vector<Eigen::Index>& Ns,
                    long steps, std::ostream& log);

/// Runs every configuration of a preset; returns the most severe exit code.
ExitCode run_preset(const Preset& p, const std::string& output_dir, std::ostream& log);

}  // namespace ibssd
