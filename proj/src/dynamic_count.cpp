#include <algorithm>
#include <limits>

#include <omp.h>

#include "dpsn/error.hpp"
#include "dpsn/graphlets.hpp"

namespace dpsn {
namespace {

void check_inputs(const EventStream& stream, const DynamicOrbitTable& table, const CountOptions& options) {
  if (options.expect_limits && !(*options.expect_limits == table.limits()))
    throw Error("orbit table limits do not match the requested counting configuration");
  if (options.max_gap && *options.max_gap < 0) throw PreconditionError("max_gap must be >= 0");
  validate_stream(stream);
}

// Depth-first growth of graphlets from one start event, walking the table's
// trie so that classification is a single lookup per step.
class Walker {
 public:
  Walker(const EventStream& stream, const DynamicOrbitTable& table, const CountOptions& options,
         const std::vector<std::vector<int>>& incident, CountMatrix& out)
      : events_(stream.events),
        table_(table),
        incident_(incident),
        out_(out),
        max_events_(table.limits().max_events),
        max_nodes_(table.limits().max_nodes),
        consecutive_(table.limits().rule == ExtensionRule::kConsecutive),
        max_gap_(options.max_gap.value_or(std::numeric_limits<int>::max())) {}

  void run(int start) {
    const Event& e = events_[start];
    nodes_[0] = e.u;
    nodes_[1] = e.v;
    extend(table_.child(0, 0, 1), start, 2, 1);
  }

 private:
  int local_of(int global, int count) const {
    for (int x = 0; x < count; ++x)
      if (nodes_[x] == global) return x;
    return -1;
  }

  void extend(int state, int last, int node_count, int depth) {
    const auto& st = table_.states()[state];
    for (int x = 0; x < node_count; ++x) ++out_(nodes_[x], st.column[x]);
    if (depth == max_events_) return;

    const int t_limit = max_gap_ == std::numeric_limits<int>::max()
                            ? max_gap_
                            : events_[last].t + max_gap_;
    // Candidate sources: endpoints of the last event, or all nodes so far.
    int sources[DynamicOrbitTable::kMaxNodes];
    int source_count = 0;
    if (consecutive_) {
      sources[source_count++] = events_[last].u;
      sources[source_count++] = events_[last].v;
    } else {
      for (int x = 0; x < node_count; ++x) sources[source_count++] = nodes_[x];
    }

    for (int si = 0; si < source_count; ++si) {
      const auto& list = incident_[sources[si]];
      auto it = std::upper_bound(list.begin(), list.end(), last);
      for (; it != list.end(); ++it) {
        const int j = *it;
        const Event& e = events_[j];
        if (e.t > t_limit) break;
        // An event touching an earlier source was already taken from its list.
        bool seen = false;
        for (int sj = 0; sj < si; ++sj)
          if (e.u == sources[sj] || e.v == sources[sj]) seen = true;
        if (seen) continue;

        int a = local_of(e.u, node_count);
        int b = local_of(e.v, node_count);
        int grown = node_count;
        if (a < 0 || b < 0) {
          if (node_count == max_nodes_) continue;
          if (a < 0) {
            a = node_count;
            nodes_[node_count] = e.u;
          } else {
            b = node_count;
            nodes_[node_count] = e.v;
          }
          grown = node_count + 1;
        }
        const int next = a < b ? table_.child(state, a, b) : table_.child(state, b, a);
        if (next < 0) continue;
        extend(next, j, grown, depth + 1);
      }
    }
  }

  const std::vector<Event>& events_;
  const DynamicOrbitTable& table_;
  const std::vector<std::vector<int>>& incident_;
  CountMatrix& out_;
  int max_events_;
  int max_nodes_;
  bool consecutive_;
  int max_gap_;
  int nodes_[DynamicOrbitTable::kMaxNodes] = {};
};

std::vector<std::vector<int>> incidence(const EventStream& stream) {
  std::vector<std::vector<int>> incident(stream.n);
  for (int i = 0; i < static_cast<int>(stream.events.size()); ++i) {
    incident[stream.events[i].u].push_back(i);
    incident[stream.events[i].v].push_back(i);
  }
  return incident;
}

}  // namespace

Gdvm count_dynamic_orbits_serial(const EventStream& stream, const DynamicOrbitTable& table,
                                 const CountOptions& options) {
  check_inputs(stream, table, options);
  Gdvm out{stream.id, CountMatrix(stream.n, table.total_orbits())};
  const auto incident = incidence(stream);
  Walker walker(stream, table, options, incident, out.counts);
  for (int i = 0; i < static_cast<int>(stream.events.size()); ++i) walker.run(i);
  return out;
}

Gdvm count_dynamic_orbits(const EventStream& stream, const DynamicOrbitTable& table,
                          const CountOptions& options) {
  check_inputs(stream, table, options);
  Gdvm out{stream.id, CountMatrix(stream.n, table.total_orbits())};
  const auto incident = incidence(stream);
  const int m = static_cast<int>(stream.events.size());
  if (m == 0) return out;

#pragma omp parallel
  {
    CountMatrix local(stream.n, table.total_orbits());
    Walker walker(stream, table, options, incident, local);
#pragma omp for schedule(dynamic, 4) nowait
    for (int i = 0; i < m; ++i) walker.run(i);
#pragma omp critical(dpsn_count_merge)
    out.counts += local;
  }
  return out;
}

}  // namespace dpsn
