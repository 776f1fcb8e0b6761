#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dpsn/count_matrix.hpp"
#include "dpsn/psn.hpp"

namespace dpsn {

// Connected graph on node_count nodes in canonical labelling (the
// lexicographically smallest sorted edge list), with automorphism orbits.
struct StaticGraphletClass {
  int id = 0;
  int node_count = 0;
  std::vector<Edge> edges;
  std::vector<std::vector<int>> orbits;
  int first_column = 0;
};

class StaticOrbitTable {
 public:
  static constexpr int kMaxNodes = 5;

  // Connected graphs on 2..max_nodes nodes, sorted by (nodes, edges, form).
  static StaticOrbitTable enumerate(int max_nodes);

  int max_nodes() const noexcept { return max_nodes_; }
  int total_orbits() const noexcept { return total_orbits_; }
  const std::vector<StaticGraphletClass>& classes() const noexcept { return classes_; }

  // Lookup for an induced subgraph on k local nodes given its adjacency
  // bitmask over pairs (bit pair_bit(a, b)). Returns -1 for disconnected masks.
  int class_of(int k, std::uint32_t mask) const { return lookup_[k][mask].klass; }
  int column_of(int k, std::uint32_t mask, int local) const { return lookup_[k][mask].column[local]; }

  static constexpr int pair_bit(int a, int b) noexcept {
    // a < b; pairs ordered (0,1),(0,2),(1,2),(0,3),(1,3),(2,3),...
    return b * (b - 1) / 2 + a;
  }

  std::string serialize() const;

 private:
  struct Entry {
    int klass = -1;
    int column[kMaxNodes] = {};
  };
  int max_nodes_ = 0;
  int total_orbits_ = 0;
  std::vector<StaticGraphletClass> classes_;
  std::vector<std::vector<Entry>> lookup_;  // [k][mask]
};

// Induced-subgraph orbit counts per node (connected subsets enumerated with
// ESU, parallel over root vertices).
Gdvm count_static_orbits(const StaticPSN& psn, const StaticOrbitTable& table, std::string id = {});
Gdvm count_static_orbits_serial(const StaticPSN& psn, const StaticOrbitTable& table, std::string id = {});

}  // namespace dpsn
