#pragma once

namespace ibssd {

/// Per-thread operation counts, read by the cost-scaling report.
struct WorkCounters {
  long fft_1d = 0;
  long fft_2d = 0;
  long fluid_solves = 0;
  long dense_solves = 0;
  long krylov_iterations = 0;
};

WorkCounters& work_counters();
inline void reset_work_counters() { work_counters() = WorkCounters{}; }

}  // namespace ibssd
