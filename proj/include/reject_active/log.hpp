#pragma once

namespace ral {

// REJECT_ACTIVE_LOG={error,info,debug} selects the diagnostics level;
// everything goes to standard error, results never do.
enum class LogLevel { error = 0, info = 1, debug = 2 };

LogLevel log_level();
bool log_enabled(LogLevel level);
void log_msg(LogLevel level, const char* fmt, ...) __attribute__((format(printf, 2, 3)));

}  // namespace ral
