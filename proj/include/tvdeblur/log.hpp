#pragma once

#include <functional>
#include <string_view>

namespace tvdeblur {

enum class LogLevel { Debug, Info, Warning };

using LogSink = std::function<void(LogLevel, std::string_view)>;

/// Replace the process-wide sink. Pass an empty function to silence output.
void set_log_sink(LogSink sink);
void log_message(LogLevel level, std::string_view message);
inline void log_warning(std::string_view message) { log_message(LogLevel::Warning, message); }

} // namespace tvdeblur
