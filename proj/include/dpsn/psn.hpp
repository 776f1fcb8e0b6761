#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dpsn/structure_io.hpp"

namespace dpsn {

using Edge = std::pair<int, int>;  // (u, v) with u < v, 0-based

struct StaticPSN {
  int n = 0;
  std::vector<Edge> edges;  // sorted, unique

  bool operator==(const StaticPSN&) const = default;
};

// Nested prefix snapshots: snapshot s (1-based) holds residues 1..min(s*k, n).
struct DynamicPSN {
  int k = 5;
  std::vector<StaticPSN> snapshots;
  std::vector<int> node_counts;

  int snapshot_count() const noexcept { return static_cast<int>(snapshots.size()); }
};

struct Event {
  int u = 0;  // u < v
  int v = 0;
  int t = 1;  // 1-based snapshot index

  bool operator==(const Event&) const = default;
};

// Events in strict (t, u, v) order. PSN-derived streams carry each pair once;
// general streams (tests) may repeat a pair at later times.
struct EventStream {
  std::string id;
  int n = 0;
  int T = 0;
  std::vector<Event> events;
  std::vector<int> node_counts;  // optional per-snapshot node counts

  bool operator==(const EventStream&) const = default;
};

inline constexpr double kDefaultContactThreshold = 6.0;

StaticPSN build_static_psn(const ProteinDomain& domain, double threshold = kDefaultContactThreshold);
DynamicPSN build_dynamic_psn(const ProteinDomain& domain, int k = 5,
                             double threshold = kDefaultContactThreshold);
EventStream derive_event_stream(const DynamicPSN& dpsn, std::string id = {});
bool check_connectivity(const StaticPSN& psn);

// All events with t <= T, as a static graph.
StaticPSN rebuild_final_snapshot(const EventStream& stream);

// Throws Error unless events are sorted by (t, u, v), u < v < n and 1 <= t <= T.
void validate_stream(const EventStream& stream);

// EVENTS v1 <id> <n> <T> <m> / COUNTS c1..cT / m lines "t u v".
std::string write_event_file(const EventStream& stream);
EventStream read_event_file(std::string_view text);

}  // namespace dpsn
