#pragma once

#include <functional>
#include <string>

namespace dpsn::log {

enum class Level { kInfo, kWarn };

using Sink = std::function<void(Level, const std::string&)>;

// Replaces the process-wide sink (stderr by default). Returns the previous one.
Sink set_sink(Sink sink);

void info(const std::string& message);
void warn(const std::string& message);

}  // namespace dpsn::log
