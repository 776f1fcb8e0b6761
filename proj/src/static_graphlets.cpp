#include "dpsn/static_graphlets.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "dpsn/error.hpp"

namespace dpsn {
namespace {

std::vector<Edge> edges_of(int k, std::uint32_t mask) {
  std::vector<Edge> edges;
  for (int b = 1; b < k; ++b)
    for (int a = 0; a < b; ++a)
      if (mask >> StaticOrbitTable::pair_bit(a, b) & 1u) edges.emplace_back(a, b);
  std::sort(edges.begin(), edges.end());
  return edges;
}

bool connected(int k, const std::vector<Edge>& edges) {
  std::vector<int> comp(k);
  std::iota(comp.begin(), comp.end(), 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [a, b] : edges) {
      const int m = std::min(comp[a], comp[b]);
      if (comp[a] != m || comp[b] != m) {
        comp[a] = comp[b] = m;
        changed = true;
      }
    }
  }
  return std::all_of(comp.begin(), comp.end(), [](int c) { return c == 0; });
}

std::vector<Edge> permuted(const std::vector<Edge>& edges, const std::vector<int>& perm) {
  std::vector<Edge> out;
  out.reserve(edges.size());
  for (const auto& [a, b] : edges) out.emplace_back(std::min(perm[a], perm[b]), std::max(perm[a], perm[b]));
  std::sort(out.begin(), out.end());
  return out;
}

class Esu {
 public:
  Esu(const StaticPSN& g, const StaticOrbitTable& table, CountMatrix& out)
      : table_(table), out_(out), k_max_(table.max_nodes()), adj_(g.n) {
    for (const auto& [u, v] : g.edges) {
      adj_[u].push_back(v);
      adj_[v].push_back(u);
    }
    for (auto& a : adj_) std::sort(a.begin(), a.end());
  }

  void run(int root) {
    sub_.assign(1, root);
    std::vector<int> ext;
    for (int w : adj_[root])
      if (w > root) ext.push_back(w);
    extend(ext, root);
  }

 private:
  bool adjacent(int a, int b) const { return std::binary_search(adj_[a].begin(), adj_[a].end(), b); }

  void record() {
    const int k = static_cast<int>(sub_.size());
    std::uint32_t mask = 0;
    for (int b = 1; b < k; ++b)
      for (int a = 0; a < b; ++a)
        if (adjacent(sub_[a], sub_[b])) mask |= 1u << StaticOrbitTable::pair_bit(a, b);
    for (int x = 0; x < k; ++x) ++out_(sub_[x], table_.column_of(k, mask, x));
  }

  void extend(std::vector<int> ext, int root) {
    if (sub_.size() >= 2) record();
    if (static_cast<int>(sub_.size()) == k_max_) return;
    while (!ext.empty()) {
      const int w = ext.back();
      ext.pop_back();
      // Exclusive neighbourhood of w: not in the subgraph nor adjacent to it.
      std::vector<int> next = ext;
      for (int u : adj_[w]) {
        if (u <= root) continue;
        if (std::find(sub_.begin(), sub_.end(), u) != sub_.end()) continue;
        bool near = false;
        for (int s : sub_)
          if (adjacent(s, u)) {
            near = true;
            break;
          }
        if (near || std::find(next.begin(), next.end(), u) != next.end()) continue;
        next.push_back(u);
      }
      sub_.push_back(w);
      extend(std::move(next), root);
      sub_.pop_back();
    }
  }

  const StaticOrbitTable& table_;
  CountMatrix& out_;
  int k_max_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> sub_;
};

}  // namespace

StaticOrbitTable StaticOrbitTable::enumerate(int max_nodes) {
  if (max_nodes < 2 || max_nodes > kMaxNodes) throw PreconditionError("max_nodes must be in [2, 5]");
  StaticOrbitTable table;
  table.max_nodes_ = max_nodes;

  // Canonical form and best permutation for every connected mask.
  std::vector<std::vector<std::pair<std::vector<Edge>, std::vector<int>>>> canon(max_nodes + 1);
  std::map<std::pair<int, std::vector<Edge>>, int> forms;
  for (int k = 2; k <= max_nodes; ++k) {
    const std::uint32_t masks = 1u << (k * (k - 1) / 2);
    canon[k].resize(masks);
    for (std::uint32_t mask = 0; mask < masks; ++mask) {
      const auto edges = edges_of(k, mask);
      if (!connected(k, edges)) continue;
      std::vector<int> perm(k);
      std::iota(perm.begin(), perm.end(), 0);
      std::vector<Edge> best;
      std::vector<int> best_perm;
      do {
        auto cur = permuted(edges, perm);
        if (best_perm.empty() || cur < best) {
          best = std::move(cur);
          best_perm = perm;
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
      forms.emplace(std::make_pair(k, best), 0);
      canon[k][mask] = {best, best_perm};
    }
  }

  for (const auto& [key, unused] : forms) {
    StaticGraphletClass c;
    c.node_count = key.first;
    c.edges = key.second;
    const int k = c.node_count;
    std::vector<int> orbit_of(k);
    std::iota(orbit_of.begin(), orbit_of.end(), 0);
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      if (permuted(c.edges, perm) != c.edges) continue;
      for (int x = 0; x < k; ++x) {
        const int a = orbit_of[x], b = orbit_of[perm[x]];
        const int keep = std::min(a, b), drop = std::max(a, b);
        for (auto& o : orbit_of)
          if (o == drop) o = keep;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (int x = 0; x < k; ++x) {
      if (orbit_of[x] != x) continue;
      std::vector<int> part;
      for (int y = 0; y < k; ++y)
        if (orbit_of[y] == x) part.push_back(y);
      c.orbits.push_back(std::move(part));
    }
    table.classes_.push_back(std::move(c));
  }
  std::sort(table.classes_.begin(), table.classes_.end(),
            [](const StaticGraphletClass& x, const StaticGraphletClass& y) {
              if (x.node_count != y.node_count) return x.node_count < y.node_count;
              if (x.edges.size() != y.edges.size()) return x.edges.size() < y.edges.size();
              return x.edges < y.edges;
            });
  std::map<std::pair<int, std::vector<Edge>>, int> index;
  int column = 0;
  for (std::size_t i = 0; i < table.classes_.size(); ++i) {
    auto& c = table.classes_[i];
    c.id = static_cast<int>(i);
    c.first_column = column;
    column += static_cast<int>(c.orbits.size());
    index.emplace(std::make_pair(c.node_count, c.edges), c.id);
  }
  table.total_orbits_ = column;

  table.lookup_.resize(max_nodes + 1);
  for (int k = 2; k <= max_nodes; ++k) {
    table.lookup_[k].resize(canon[k].size());
    for (std::size_t mask = 0; mask < canon[k].size(); ++mask) {
      const auto& [form, perm] = canon[k][mask];
      if (perm.empty()) continue;
      auto& entry = table.lookup_[k][mask];
      entry.klass = index.at({k, form});
      const auto& c = table.classes_[entry.klass];
      for (int x = 0; x < k; ++x)
        for (std::size_t o = 0; o < c.orbits.size(); ++o)
          if (std::find(c.orbits[o].begin(), c.orbits[o].end(), perm[x]) != c.orbits[o].end())
            entry.column[x] = c.first_column + static_cast<int>(o);
    }
  }
  return table;
}

std::string StaticOrbitTable::serialize() const {
  std::ostringstream out;
  out << "STATIC_ORBITS v1 " << max_nodes_ << ' ' << total_orbits_ << '\n';
  for (const auto& c : classes_) {
    out << c.id << ' ' << c.node_count;
    for (const auto& [u, v] : c.edges) out << ' ' << u << '-' << v;
    out << " |";
    for (const auto& orbit : c.orbits) {
      out << ' ';
      for (std::size_t i = 0; i < orbit.size(); ++i) out << (i ? "," : "") << orbit[i];
    }
    out << '\n';
  }
  return out.str();
}

Gdvm count_static_orbits_serial(const StaticPSN& psn, const StaticOrbitTable& table, std::string id) {
  Gdvm out{std::move(id), CountMatrix(psn.n, table.total_orbits())};
  Esu esu(psn, table, out.counts);
  for (int v = 0; v < psn.n; ++v) esu.run(v);
  return out;
}

Gdvm count_static_orbits(const StaticPSN& psn, const StaticOrbitTable& table, std::string id) {
  Gdvm out{std::move(id), CountMatrix(psn.n, table.total_orbits())};
#pragma omp parallel
  {
    CountMatrix local(psn.n, table.total_orbits());
    Esu esu(psn, table, local);
#pragma omp for schedule(dynamic, 8) nowait
    for (int v = 0; v < psn.n; ++v) esu.run(v);
#pragma omp critical(dpsn_static_merge)
    out.counts += local;
  }
  return out;
}

}  // namespace dpsn
