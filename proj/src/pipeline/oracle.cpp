#include <algorithm>
#include <set>
#include <tuple>

#include "dpsn/error.hpp"
#include "dpsn/pipeline.hpp"
#include "dpsn/psn.hpp"
#include "dpsn/rng.hpp"

namespace dpsn {

namespace {

constexpr int kOracleMaxNodes = 5;
constexpr int kOracleMaxEvents = 6;
constexpr int kOracleMaxStreamNodes = 16;
constexpr int kOracleMaxStreamEvents = 25;

bool disagree(const EventStream& s, const DynamicOrbitTable& fast, const DynamicOrbitTable& reference) {
  BruteForceOptions bf;
  bf.max_stream_events = kOracleMaxStreamEvents;
  return count_dynamic_orbits(s, fast).counts != brute_force_count(s, reference, bf).counts;
}

// Drops events (and then unused nodes) while the disagreement persists.
EventStream shrink(EventStream s, const DynamicOrbitTable& fast, const DynamicOrbitTable& reference) {
  for (bool progress = true; progress;) {
    progress = false;
    for (std::size_t i = 0; i < s.events.size(); ++i) {
      EventStream t = s;
      t.events.erase(t.events.begin() + static_cast<std::ptrdiff_t>(i));
      if (disagree(t, fast, reference)) {
        s = std::move(t);
        progress = true;
        break;
      }
    }
  }
  std::set<int> used;
  for (const auto& e : s.events) used.insert({e.u, e.v});
  std::vector<int> relabel(static_cast<std::size_t>(s.n), -1);
  int next = 0;
  for (int v : used) relabel[static_cast<std::size_t>(v)] = next++;
  for (auto& e : s.events) {
    e.u = relabel[static_cast<std::size_t>(e.u)];
    e.v = relabel[static_cast<std::size_t>(e.v)];
  }
  s.n = next;
  int t_max = 0;
  for (const auto& e : s.events) t_max = std::max(t_max, e.t);
  s.T = t_max;
  return s;
}

}  // namespace

EventStream random_stream(std::uint64_t seed, int nodes, int events, int max_t) {
  if (nodes < 2 || events < 0 || max_t < 1) throw PreconditionError("random_stream: bad arguments");
  SplitMix64 rng(seed);
  const long possible = static_cast<long>(nodes) * (nodes - 1) / 2 * max_t;
  const int target = static_cast<int>(std::min<long>(events, possible));
  std::set<std::tuple<int, int, int>> picked;
  while (static_cast<int>(picked.size()) < target) {
    int u = static_cast<int>(rng.below(static_cast<std::uint64_t>(nodes)));
    int v = static_cast<int>(rng.below(static_cast<std::uint64_t>(nodes - 1)));
    if (v >= u) ++v;
    if (u > v) std::swap(u, v);
    const int t = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_t)));
    picked.emplace(t, u, v);
  }
  EventStream s;
  s.id = "random_" + std::to_string(seed);
  s.n = nodes;
  s.T = max_t;
  for (const auto& [t, u, v] : picked) s.events.push_back({u, v, t});
  return s;
}

OracleReport cmd_oracle(const OracleOptions& options) {
  const auto& lim = options.limits;
  if (lim.max_nodes < 2 || lim.max_nodes > kOracleMaxNodes || lim.max_events < 1 ||
      lim.max_events > kOracleMaxEvents)
    throw PreconditionError("oracle limits must satisfy 2 <= max_nodes <= " + std::to_string(kOracleMaxNodes) +
                            " and 1 <= max_events <= " + std::to_string(kOracleMaxEvents));
  if (options.max_stream_nodes < 2 || options.max_stream_nodes > kOracleMaxStreamNodes ||
      options.max_stream_events < 1 || options.max_stream_events > kOracleMaxStreamEvents)
    throw PreconditionError("oracle streams must have 2.." + std::to_string(kOracleMaxStreamNodes) + " nodes and 1.." +
                            std::to_string(kOracleMaxStreamEvents) + " events");

  OracleReport report;
  auto record = [&](bool ok, const std::string& what) {
    report.lines.push_back(std::string(ok ? "PASS " : "FAIL ") + what);
    if (!ok) report.passed = false;
  };

  const DynamicOrbitTable reference = DynamicOrbitTable::enumerate(lim);
  DynamicOrbitTable fast = reference;
  if (options.inject_fault) fast.inject_fault();

  const std::string name = "orbits(" + std::to_string(lim.max_nodes) + "," + std::to_string(lim.max_events) + ")";
  if (lim == GraphletLimits{}) {
    record(reference.total_orbits() == 3727, name + " == 3727 (got " + std::to_string(reference.total_orbits()) + ")");
  } else {
    record(reference.total_orbits() > 0, name + " = " + std::to_string(reference.total_orbits()) + " (" +
                                             std::to_string(reference.classes().size()) + " classes)");
  }

  SplitMix64 rng(options.seed);
  std::vector<EventStream> streams;
  for (int i = 0; i < options.streams; ++i) {
    const int nodes = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(options.max_stream_nodes - 1)));
    const int events = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(options.max_stream_events)));
    const int max_t = 1 + static_cast<int>(rng.below(6));
    streams.push_back(random_stream(rng.next(), nodes, events, max_t));
  }

  std::optional<EventStream> counterexample;
  int agreed = 0;
  for (const auto& s : streams) {
    if (disagree(s, fast, reference)) {
      if (!counterexample) counterexample = s;
    } else {
      ++agreed;
    }
  }
  record(!counterexample, "fast == brute force on " + std::to_string(agreed) + "/" +
                              std::to_string(streams.size()) + " random streams");
  if (counterexample) {
    const EventStream minimal = shrink(*counterexample, fast, reference);
    report.lines.push_back("counterexample (" + std::to_string(minimal.events.size()) + " events):");
    for (const auto& e : minimal.events)
      report.lines.push_back("  t=" + std::to_string(e.t) + " " + std::to_string(e.u) + "-" + std::to_string(e.v));
  }

  int same = 0;
  for (const auto& s : streams)
    if (count_dynamic_orbits(s, fast).counts == count_dynamic_orbits_serial(s, fast).counts) ++same;
  record(same == static_cast<int>(streams.size()),
         "serial == parallel on " + std::to_string(same) + "/" + std::to_string(streams.size()) + " random streams");
  return report;
}

}  // namespace dpsn
