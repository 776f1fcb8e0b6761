#include <algorithm>
#include <numeric>

#include "dpsn/error.hpp"
#include "dpsn/graphlets.hpp"

namespace dpsn {
namespace {

bool shares_node(const Event& a, const Event& b) {
  return a.u == b.u || a.u == b.v || a.v == b.u || a.v == b.v;
}

}  // namespace

Gdvm brute_force_count(const EventStream& stream, const DynamicOrbitTable& table,
                       const BruteForceOptions& options) {
  if (stream.events.size() > options.max_stream_events)
    throw PreconditionError("brute-force oracle refuses streams with more than " +
                            std::to_string(options.max_stream_events) + " events");
  validate_stream(stream);
  const auto limits = table.limits();
  const int m = static_cast<int>(stream.events.size());
  Gdvm out{stream.id, CountMatrix(stream.n, table.total_orbits())};

  std::vector<int> pick;
  std::vector<int> nodes;
  std::vector<Edge> relabelled;
  // Every combination of 1..max_events indices in increasing order.
  auto visit = [&](auto&& self, int from) -> void {
    if (!pick.empty()) {
      // Validity of the whole subsequence, checked from scratch.
      bool ok = true;
      nodes.clear();
      for (std::size_t i = 0; i < pick.size() && ok; ++i) {
        const Event& e = stream.events[pick[i]];
        if (i > 0) {
          const Event& prev = stream.events[pick[i - 1]];
          if (options.max_gap && e.t - prev.t > *options.max_gap) ok = false;
          if (limits.rule == ExtensionRule::kConsecutive) {
            if (!shares_node(prev, e)) ok = false;
          } else {
            const bool touches = std::find(nodes.begin(), nodes.end(), e.u) != nodes.end() ||
                                 std::find(nodes.begin(), nodes.end(), e.v) != nodes.end();
            if (!touches) ok = false;
          }
        }
        for (int x : {e.u, e.v})
          if (std::find(nodes.begin(), nodes.end(), x) == nodes.end()) nodes.push_back(x);
      }
      if (ok && static_cast<int>(nodes.size()) <= limits.max_nodes) {
        const int k = static_cast<int>(nodes.size());
        std::vector<int> perm(k);
        std::iota(perm.begin(), perm.end(), 0);
        std::vector<Edge> best;
        std::vector<int> best_perm;
        do {
          relabelled.clear();
          for (int idx : pick) {
            const Event& e = stream.events[idx];
            const int a = perm[std::find(nodes.begin(), nodes.end(), e.u) - nodes.begin()];
            const int b = perm[std::find(nodes.begin(), nodes.end(), e.v) - nodes.begin()];
            relabelled.emplace_back(std::min(a, b), std::max(a, b));
          }
          if (best_perm.empty() || relabelled < best) {
            best = relabelled;
            best_perm = perm;
          }
        } while (std::next_permutation(perm.begin(), perm.end()));
        const auto klass = table.find_class(best);
        if (!klass) throw Error("oracle found a subsequence missing from the orbit table");
        const auto& c = table.classes()[*klass];
        for (int x = 0; x < k; ++x) {
          const int pos = best_perm[x];
          for (std::size_t o = 0; o < c.orbits.size(); ++o)
            if (std::find(c.orbits[o].begin(), c.orbits[o].end(), pos) != c.orbits[o].end())
              ++out.counts(nodes[x], c.first_column + o);
        }
      }
    }
    if (static_cast<int>(pick.size()) == limits.max_events) return;
    for (int j = from; j < m; ++j) {
      pick.push_back(j);
      self(self, j + 1);
      pick.pop_back();
    }
  };
  visit(visit, 0);
  return out;
}

}  // namespace dpsn
