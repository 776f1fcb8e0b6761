#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dpsn/log.hpp"
#include "dpsn/structure_io.hpp"

namespace testing {

// Residues on the x axis, `spacing` apart.
inline dpsn::ProteinDomain collinear(const std::string& id, int n, double spacing = 3.8,
                                     const std::string& label = "line") {
  dpsn::ProteinDomain d{id, label, {}};
  for (int i = 0; i < n; ++i) d.residues.push_back({i + 1, 'A', spacing * i, 0.0, 0.0});
  return d;
}

inline std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("dpsn_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

// Captures warnings for the lifetime of the object.
struct WarnCapture {
  std::vector<std::string> lines;
  dpsn::log::Sink previous;
  WarnCapture() {
    previous = dpsn::log::set_sink([this](dpsn::log::Level level, const std::string& msg) {
      if (level == dpsn::log::Level::kWarn) lines.push_back(msg);
    });
  }
  ~WarnCapture() { dpsn::log::set_sink(previous); }
  bool mentions(const std::string& s) const {
    for (const auto& l : lines)
      if (l.find(s) != std::string::npos) return true;
    return false;
  }
};

}  // namespace testing
