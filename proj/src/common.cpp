#include <iostream>

#include "ibssd/log.hpp"
#include "ibssd/types.hpp"
#include "ibssd/work_counters.hpp"

namespace ibssd {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_grid: return "invalid grid";
    case ErrorKind::domain: return "domain error";
    case ErrorKind::symmetry: return "symmetry error";
    case ErrorKind::invalid_geometry: return "invalid geometry";
    case ErrorKind::degenerate_parameterization: return "degenerate parameterization";
    case ErrorKind::singular_point: return "singular point";
    case ErrorKind::shape_mismatch: return "shape mismatch";
    case ErrorKind::parameter: return "parameter error";
    case ErrorKind::no_steady_solution: return "no steady solution";
    case ErrorKind::solver: return "solver error";
    case ErrorKind::solver_stall: return "solver stall";
    case ErrorKind::blowup: return "blowup";
    case ErrorKind::usage: return "usage error";
    case ErrorKind::io: return "i/o error";
  }
  return "error";
}

WorkCounters& work_counters() {
  thread_local WorkCounters counters;
  return counters;
}

namespace {

void default_handler(const std::string& message) { std::cerr << "warning: " << message << '\n'; }

WarningHandler& handler() {
  thread_local WarningHandler h = default_handler;
  return h;
}

}  // namespace

void warn(const std::string& message) {
  if (handler()) handler()(message);
}

WarningHandler set_warning_handler(WarningHandler h) {
  WarningHandler previous = std::move(handler());
  handler() = std::move(h);
  return previous;
}

}  // namespace ibssd
