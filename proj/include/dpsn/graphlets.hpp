#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dpsn/count_matrix.hpp"
#include "dpsn/psn.hpp"

namespace dpsn {

// How a dynamic graphlet may grow by one event.
enum class ExtensionRule {
  // The new event shares a node with the immediately preceding event
  // (temporal adjacency). 981 classes / 3,727 orbits at (4, 6).
  kConsecutive,
  // The new event shares a node with any earlier event.
  kPrefix,
};

struct GraphletLimits {
  int max_nodes = 4;
  int max_events = 6;
  ExtensionRule rule = ExtensionRule::kConsecutive;

  bool operator==(const GraphletLimits&) const = default;
};

std::string to_string(ExtensionRule rule);
ExtensionRule parse_extension_rule(const std::string& name);

// A dynamic graphlet: an event sequence on local nodes numbered by first
// appearance, canonical = lexicographically smallest relabeling. `orbits`
// partitions node positions under order-preserving automorphisms; orbit j of
// the class is column first_column + j.
struct DynamicGraphletClass {
  int id = 0;
  int node_count = 0;
  std::vector<Edge> events;
  std::vector<std::vector<int>> orbits;
  int first_column = 0;
};

class DynamicOrbitTable {
 public:
  static constexpr int kMaxNodes = 5;
  static constexpr int kMaxEvents = 8;

  // Exhaustive enumeration; classes sorted by (event count, node count,
  // canonical form). Requires 2 <= max_nodes <= 5, 1 <= max_events <= 8.
  static DynamicOrbitTable enumerate(const GraphletLimits& limits);

  const GraphletLimits& limits() const noexcept { return limits_; }
  int total_orbits() const noexcept { return total_orbits_; }
  const std::vector<DynamicGraphletClass>& classes() const noexcept { return classes_; }

  // Class index for a canonical event sequence, if catalogued.
  std::optional<int> find_class(const std::vector<Edge>& canonical) const;

  // ORBITS v1 <max_nodes> <max_events> <total>, then per class
  // "<class_id> <m> <u-v ...> | <orbit> <orbit> ..." with comma-joined positions.
  std::string serialize() const;

  // Prefix trie over first-appearance-labelled event sequences, used by the
  // fast counter. State 0 is the empty sequence.
  struct TrieState {
    int node_count = 0;
    int klass = -1;
    std::array<int, kMaxNodes> column{};  // orbit column of each local node
  };
  const std::vector<TrieState>& states() const noexcept { return states_; }
  int child(int state, int a, int b) const noexcept {
    return children_[static_cast<std::size_t>(state) * kPairSlots + pair_slot(a, b)];
  }

  // Swaps two orbit columns inside the trie only (the class list is left
  // intact), so the fast counter disagrees with the oracle. Testing aid.
  void inject_fault();

 private:
  static constexpr int kPairSlots = kMaxNodes * kMaxNodes;
  static constexpr int pair_slot(int a, int b) noexcept { return a * kMaxNodes + b; }

  GraphletLimits limits_;
  int total_orbits_ = 0;
  std::vector<DynamicGraphletClass> classes_;
  std::map<std::vector<Edge>, int> class_index_;
  std::vector<TrieState> states_;
  std::vector<int> children_;
};

struct CountOptions {
  // Largest allowed t difference between consecutive graphlet events.
  std::optional<int> max_gap;
  // When set, must equal the table's limits.
  std::optional<GraphletLimits> expect_limits;
};

// Per-node orbit participations over all event subsequences (in stream order)
// that the table's extension rule admits. Work is split over start events
// with OpenMP; the result is independent of the thread count.
Gdvm count_dynamic_orbits(const EventStream& stream, const DynamicOrbitTable& table,
                          const CountOptions& options = {});

// Single-threaded reference of the same kernel.
Gdvm count_dynamic_orbits_serial(const EventStream& stream, const DynamicOrbitTable& table,
                                 const CountOptions& options = {});

struct BruteForceOptions {
  std::optional<int> max_gap;
  std::size_t max_stream_events = 25;
};

// Independent oracle: visits every subset of at most max_events events,
// checks it against the rule and canonicalizes it by trying all node
// permutations. Refuses streams longer than max_stream_events.
Gdvm brute_force_count(const EventStream& stream, const DynamicOrbitTable& table,
                       const BruteForceOptions& options = {});

}  // namespace dpsn
