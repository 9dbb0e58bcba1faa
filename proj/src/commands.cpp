#include "ibssd/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

#include "ibssd/log.hpp"
#include "ibssd/snapshot.hpp"
#include "json.hpp"

namespace ibssd {

namespace {

using nlohmann::json;

std::string path_in(const RunConfig& c, const std::string& file) {
  std::filesystem::create_directories(c.output_dir);
  return (std::filesystem::path(c.output_dir) / file).string();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path);
  return out;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Counts warnings on this thread and echoes the first few to a stream.
class WarningTap {
 public:
  WarningTap(std::ostream* log, const std::string& prefix) {
    previous_ = set_warning_handler([this, log, prefix](const std::string& m) {
      if (log && count_ < 5) *log << prefix << "warning: " << m << "\n";
      ++count_;
    });
  }
  ~WarningTap() { set_warning_handler(previous_); }
  long count() const { return count_; }

 private:
  WarningHandler previous_;
  long count_ = 0;
};

double json_number(double v) { return std::isfinite(v) ? v : std::nan(""); }

}  // namespace

ExitCode exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::usage:
    case ErrorKind::parameter:
      return ExitCode::usage;
    case ErrorKind::solver:
    case ErrorKind::solver_stall:
    case ErrorKind::no_steady_solution:
      return ExitCode::solver_failure;
    case ErrorKind::blowup:
      return ExitCode::unstable;
    default:
      return ExitCode::failure;
  }
}

std::string csv_row(const DiagnosticsRecord& r) {
  return std::to_string(r.step) + "," + g17(r.t) + "," + g17(r.K) + "," + g17(r.P) + "," + g17(r.E) + "," +
         g17(r.area) + "," + g17(r.max_u) + "," + g17(r.min_salpha) + "," + g17(r.max_salpha) + "," +
         (r.stable ? "1" : "0");
}

RunResult cmd_run(const RunConfig& c, std::ostream& log) {
  c.validate();
  const GridSpec g = c.grid();
  SchemeConfig sc = c.scheme_config();
  StepState start;
  if (c.resume_from.empty()) {
    start = make_step_state(c.initial_interface(), g);
  } else {
    const Snapshot snap = load_snapshot(c.resume_from);
    if (snap.grid.N != g.N || snap.grid.N_b != g.N_b)
      throw Error(ErrorKind::usage, "resume_from: snapshot grid differs from the configuration");
    start = snap.state;
    if (snap.scheme.scheme == sc.scheme && snap.scheme.rescale == sc.rescale) {
      sc.C_V = snap.scheme.C_V;
      sc.C_U = snap.scheme.C_U;
      sc.rescale_ready = snap.scheme.rescale_ready;
    }
  }
  const double remaining = c.T - start.t;
  if (remaining < -1e-12) throw Error(ErrorKind::usage, "T: end time precedes the snapshot time");
  const long steps = remaining <= 0.0 ? 0 : steps_for(remaining, c.dt);

  RunResult result;
  result.csv_path = path_in(c, c.name + ".csv");
  std::ofstream csv = open_out(result.csv_path);
  csv << kDiagnosticsHeader << "\n";

  WarningTap tap(&log, c.name + ": ");
  ProbeOptions opts;
  opts.observer = [&](const DiagnosticsRecord& r, const StepState& s, const SchemeConfig& live) {
    csv << csv_row(r) << "\n";
    if (c.snapshot_every > 0 && r.stable && s.step == r.step && s.step % c.snapshot_every == 0)
      save_snapshot(path_in(c, c.name + "_step" + std::to_string(s.step) + ".json"), {s, g, c.phys, live});
  };
  log << c.name << ": " << to_string(c.scheme) << " N=" << c.N << " dt=" << c.dt << " steps=" << steps << "\n";
  result.probe = stability_probe(start, g, c.phys, sc, steps, opts);
  csv.close();
  result.warnings = tap.count();
  const ProbeResult& pr = result.probe;

  if (pr.stable) {
    result.final_snapshot = path_in(c, c.name + "_final.json");
    save_snapshot(result.final_snapshot, {pr.final_state, g, c.phys, pr.config});
  }

  const bool steady = is_steady(c.scheme);
  const DiagnosticsRecord last = diagnostics(pr.final_state, g, c.phys, steady);
  const double area0 = enclosed_area(start.curve);
  json summary;
  summary["name"] = c.name;
  summary["scheme"] = to_string(c.scheme);
  summary["config"] = format_config(c);
  summary["deterministic"] = true;
  summary["steps_requested"] = steps;
  summary["steps_run"] = pr.steps_run;
  summary["stable"] = pr.stable;
  summary["reason"] = pr.reason;
  summary["E0"] = pr.E0;
  summary["max_E"] = json_number(pr.max_E);
  summary["energy_non_increasing"] = pr.energy_non_increasing;
  summary["final_area_ratio"] = pr.stable ? json_number(last.area / area0) : std::nan("");
  summary["rescale"] = pr.config.rescale;
  summary["C_V"] = pr.config.C_V;
  summary["C_U"] = pr.config.C_U;
  summary["C_U_source"] = "implicit first-step normal velocity U^1";
  summary["warnings"] = result.warnings;
  result.summary_path = path_in(c, c.name + ".json");
  open_out(result.summary_path) << summary.dump(1) << "\n";

  log << c.name << ": " << (pr.stable ? "stable" : "unstable (" + pr.reason + ")") << " after " << pr.steps_run
      << " steps, E " << g17(pr.E0) << " -> " << g17(last.E) << "\n";
  return result;
}

ConvergenceResult cmd_convergence(const RunConfig& c, const std::vector<double>& dts, std::ostream& log) {
  c.validate();
  WarningTap tap(nullptr, "");
  ConvergenceResult out;
  log << c.name << ": convergence of " << to_string(c.scheme) << " N=" << c.N << " to T=" << c.T << " over "
      << dts.size() << " step sizes\n";
  out.report = run_convergence_study(c.initial_interface(), c.grid(), c.phys, c.scheme_config(), dts, c.T);
  const ConvergenceReport& r = out.report;

  out.csv_path = path_in(c, c.name + "_convergence.csv");
  std::ofstream csv = open_out(out.csv_path);
  csv << "dt,e_X,e_u,rate_X,rate_u\n";
  for (size_t i = 0; i < r.dt.size(); ++i) {
    csv << g17(r.dt[i]) << "," << g17(r.e_X[i]) << "," << g17(r.e_u[i]) << ","
        << (i < r.pair_rate_X.size() ? g17(r.pair_rate_X[i]) : "") << ","
        << (i < r.pair_rate_u.size() ? g17(r.pair_rate_u[i]) : "") << "\n";
  }
  json summary;
  summary["name"] = c.name;
  summary["scheme"] = to_string(c.scheme);
  summary["T"] = c.T;
  summary["dt"] = r.dt;
  summary["e_X"] = r.e_X;
  summary["e_u"] = r.e_u;
  summary["pair_rate_X"] = r.pair_rate_X;
  summary["pair_rate_u"] = r.pair_rate_u;
  summary["rate_X"] = json_number(r.rate_X);
  summary["rate_u"] = json_number(r.rate_u);
  summary["completed"] = r.completed;
  summary["error"] = r.error;
  out.summary_path = path_in(c, c.name + "_convergence.json");
  open_out(out.summary_path) << summary.dump(1) << "\n";

  for (size_t i = 0; i < r.dt.size(); ++i)
    log << "  dt=" << g17(r.dt[i]) << " e_X=" << g17(r.e_X[i]) << " e_u=" << g17(r.e_u[i]) << "\n";
  log << c.name << ": rate_X=" << r.rate_X << " rate_u=" << r.rate_u << (r.completed ? "" : " (incomplete: " + r.error + ")")
      << "\n";
  return out;
}

SweepResult cmd_sweep(const RunConfig& base, const std::vector<Scheme>& schemes, const std::vector<Eigen::Index>& Ns,
                      const std::vector<double>& mus, const std::vector<double>& dts, int threads, std::ostream& log) {
  SweepResult out;
  for (Scheme s : schemes)
    for (Eigen::Index N : Ns)
      for (double mu : mus)
        for (double dt : dts) {
          SweepCell cell;
          cell.scheme = s;
          cell.N = N;
          cell.mu = mu;
          cell.dt = dt;
          out.cells.push_back(cell);
        }
  std::vector<RunConfig> configs;
  for (const SweepCell& cell : out.cells) {
    RunConfig c = base;
    c.scheme = cell.scheme;
    c.N = cell.N;
    c.N_b = 0;
    c.phys.mu = cell.mu;
    c.dt = cell.dt;
    c.T = std::max(1.0, std::ceil(base.T / cell.dt - 1e-9)) * cell.dt;
    c.validate();
    configs.push_back(c);
  }

  std::vector<std::string> errors(out.cells.size());
  std::atomic<size_t> next{0};
  const auto worker = [&] {
    WarningTap tap(nullptr, "");
    for (size_t i = next++; i < out.cells.size(); i = next++) {
      const RunConfig& c = configs[i];
      try {
        const ProbeResult r = stability_probe(c.initial_interface(), c.grid(), c.phys, c.scheme_config(), c.steps());
        out.cells[i].stable = r.stable;
        out.cells[i].steps_run = r.steps_run;
        out.cells[i].reason = r.reason;
      } catch (const Error& e) {
        out.cells[i].stable = false;
        out.cells[i].reason = e.what();
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(threads, static_cast<int>(out.cells.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  out.csv_path = path_in(base, base.name + "_sweep.csv");
  std::ofstream csv = open_out(out.csv_path);
  csv << "scheme,N,mu,dt,stable,steps_run,reason\n";
  for (const SweepCell& c : out.cells) {
    std::string reason = c.reason;
    for (char& ch : reason)
      if (ch == ',' || ch == '\n') ch = ';';
    csv << to_string(c.scheme) << "," << c.N << "," << g17(c.mu) << "," << g17(c.dt) << "," << (c.stable ? 1 : 0) << ","
        << c.steps_run << "," << reason << "\n";
  }
  out.summary_path = path_in(base, base.name + "_sweep_summary.csv");
  std::ofstream summary = open_out(out.summary_path);
  summary << "scheme,N,mu,largest_stable_dt\n";
  for (size_t i = 0; i < out.cells.size(); i += dts.size()) {
    double best = std::nan("");
    for (size_t j = i; j < i + dts.size(); ++j)
      if (out.cells[j].stable && !(out.cells[j].dt <= best)) best = out.cells[j].dt;
    const SweepCell& c = out.cells[i];
    summary << to_string(c.scheme) << "," << c.N << "," << g17(c.mu) << "," << g17(best) << "\n";
    log << to_string(c.scheme) << " N=" << c.N << " mu=" << c.mu << ": largest stable dt " << best << "\n";
  }
  return out;
}

CostResult cmd_cost(const RunConfig& base, const std::vector<Scheme>& schemes, const std::vector<Eigen::Index>& Ns,
                    long steps, std::ostream& log) {
  if (steps < 1) throw Error(ErrorKind::usage, "steps: must be at least 1");
  WarningTap tap(nullptr, "");
  CostResult out;
  for (Scheme s : schemes) {
    std::vector<double> n_values, times;
    for (Eigen::Index N : Ns) {
      RunConfig c = base;
      c.scheme = s;
      c.N = N;
      c.N_b = 0;
      c.validate();
      const GridSpec g = c.grid();
      SchemeConfig sc = c.scheme_config();
      StepState st = advance(make_step_state(c.initial_interface(), g), g, c.phys, sc);
      reset_work_counters();
      std::vector<double> step_seconds;
      for (long n = 0; n < steps; ++n) {
        const auto t0 = std::chrono::steady_clock::now();
        st = advance(st, g, c.phys, sc);
        step_seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
      }
      std::sort(step_seconds.begin(), step_seconds.end());
      const WorkCounters w = work_counters();
      CostRow row;
      row.scheme = s;
      row.N = N;
      row.seconds_per_step = step_seconds.front();  // noise only adds time, so the fastest step is the estimate
      row.fft_per_step = double(w.fft_1d + w.fft_2d) / steps;
      row.fluid_solves_per_step = double(w.fluid_solves) / steps;
      row.dense_solves_per_step = double(w.dense_solves) / steps;
      row.krylov_iterations_per_step = double(w.krylov_iterations) / steps;
      out.rows.push_back(row);
      n_values.push_back(double(N));
      times.push_back(row.seconds_per_step);
      log << to_string(s) << " N=" << N << ": " << row.seconds_per_step << " s/step, " << row.fluid_solves_per_step
          << " fluid solves/step\n";
    }
    out.time_exponent[s] = fit_log_slope(n_values, times);
    log << to_string(s) << ": time exponent " << out.time_exponent[s] << "\n";
  }
  out.csv_path = path_in(base, base.name + "_cost.csv");
  std::ofstream csv = open_out(out.csv_path);
  csv << "scheme,N,seconds_per_step,fft_per_step,fluid_solves_per_step,dense_solves_per_step,krylov_iterations_per_step,"
         "time_exponent\n";
  for (const CostRow& r : out.rows)
    csv << to_string(r.scheme) << "," << r.N << "," << g17(r.seconds_per_step) << "," << g17(r.fft_per_step) << ","
        << g17(r.fluid_solves_per_step) << "," << g17(r.dense_solves_per_step) << ","
        << g17(r.krylov_iterations_per_step) << "," << g17(out.time_exponent[r.scheme]) << "\n";
  return out;
}

ExitCode run_preset(const Preset& p, const std::string& output_dir, std::ostream& log) {
  ExitCode worst = ExitCode::ok;
  const auto note = [&](ExitCode e) {
    if (static_cast<int>(e) > static_cast<int>(worst)) worst = e;
  };
  log << p.name << ": " << p.description << "\n";
  for (RunConfig c : p.runs) {
    c.output_dir = output_dir;
    try {
      if (p.kind == PresetKind::convergence) {
        if (!cmd_convergence(c, p.dts, log).report.completed) note(ExitCode::unstable);
      } else if (!cmd_run(c, log).probe.stable) {
        note(ExitCode::unstable);
      }
    } catch (const Error& e) {
      log << c.name << ": " << e.what() << "\n";
      note(exit_code_for(e));
    }
  }
  return worst;
}

}  // namespace ibssd
