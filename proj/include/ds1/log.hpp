#pragma once

#include <functional>
#include <string>

namespace ds1 {

using WarningHandler = std::function<void(const std::string&)>;

/// Replaces the warning sink (default: "warning: ..." on stderr). Returns the
/// previous handler.
WarningHandler set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

/// Progress messages; silent unless verbosity > 0.
void set_verbosity(int level);
int verbosity();
void info(const std::string& message);

}  // namespace ds1
