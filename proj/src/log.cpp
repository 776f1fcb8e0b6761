#include "dpsn/log.hpp"

#include <iostream>
#include <mutex>

namespace dpsn::log {
namespace {

std::mutex g_mutex;

void stderr_sink(Level level, const std::string& message) {
  std::cerr << (level == Level::kWarn ? "[warn] " : "[info] ") << message << '\n';
}

Sink& current() {
  static Sink sink = stderr_sink;
  return sink;
}

void emit(Level level, const std::string& message) {
  std::lock_guard lock(g_mutex);
  if (current()) current()(level, message);
}

}  // namespace

Sink set_sink(Sink sink) {
  std::lock_guard lock(g_mutex);
  Sink previous = std::move(current());
  current() = sink ? std::move(sink) : Sink(stderr_sink);
  return previous;
}

void info(const std::string& message) { emit(Level::kInfo, message); }
void warn(const std::string& message) { emit(Level::kWarn, message); }

}  // namespace dpsn::log
