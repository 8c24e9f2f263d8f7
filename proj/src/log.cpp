#include "tvdeblur/log.hpp"

#include <iostream>
#include <mutex>

namespace tvdeblur {
namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

LogSink& sink() {
  static LogSink s = [](LogLevel level, std::string_view msg) {
    if (level == LogLevel::Warning) {
      std::cerr << "tvdeblur: warning: " << msg << '\n';
    }
  };
  return s;
}

} // namespace

void set_log_sink(LogSink s) {
  std::lock_guard lock(sink_mutex());
  sink() = std::move(s);
}

void log_message(LogLevel level, std::string_view message) {
  std::lock_guard lock(sink_mutex());
  if (sink()) {
    sink()(level, message);
  }
}

} // namespace tvdeblur
