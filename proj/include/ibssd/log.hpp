#pragma once

#include <functional>
#include <string>

namespace ibssd {

using WarningHandler = std::function<void(const std::string&)>;

/// Reports a non-fatal condition through the current thread's handler (stderr by default).
void warn(const std::string& message);

/// Installs a handler for this thread and returns the previous one. An empty handler silences warnings.
WarningHandler set_warning_handler(WarningHandler h);

}  // namespace ibssd
