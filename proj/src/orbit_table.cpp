#include <algorithm>
#include <numeric>
#include <sstream>

#include "dpsn/error.hpp"
#include "dpsn/graphlets.hpp"

namespace dpsn {
namespace {

Edge relabel(const Edge& e, const std::vector<int>& perm) {
  const int a = perm[e.first], b = perm[e.second];
  return a < b ? Edge{a, b} : Edge{b, a};
}

struct Canonical {
  std::vector<Edge> form;
  std::vector<int> perm;  // local node -> canonical position
};

Canonical canonicalize(const std::vector<Edge>& seq, int nodes) {
  std::vector<int> perm(nodes);
  std::iota(perm.begin(), perm.end(), 0);
  Canonical best;
  std::vector<Edge> cur(seq.size());
  do {
    for (std::size_t i = 0; i < seq.size(); ++i) cur[i] = relabel(seq[i], perm);
    if (best.perm.empty() || cur < best.form) {
      best.form = cur;
      best.perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Orbits of node positions under permutations that fix every event in place.
std::vector<std::vector<int>> orbit_partition(const std::vector<Edge>& form, int nodes) {
  std::vector<int> perm(nodes);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> orbit_of(nodes);
  std::iota(orbit_of.begin(), orbit_of.end(), 0);
  do {
    bool fixes = true;
    for (const auto& e : form)
      if (relabel(e, perm) != e) {
        fixes = false;
        break;
      }
    if (!fixes) continue;
    for (int x = 0; x < nodes; ++x) {
      const int a = orbit_of[x], b = orbit_of[perm[x]];
      const int keep = std::min(a, b), drop = std::max(a, b);
      for (auto& o : orbit_of)
        if (o == drop) o = keep;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  std::vector<std::vector<int>> parts;
  for (int x = 0; x < nodes; ++x) {
    if (orbit_of[x] != x) continue;
    std::vector<int> part;
    for (int y = 0; y < nodes; ++y)
      if (orbit_of[y] == x) part.push_back(y);
    parts.push_back(std::move(part));
  }
  return parts;
}

}  // namespace

std::string to_string(ExtensionRule rule) {
  return rule == ExtensionRule::kConsecutive ? "consecutive" : "prefix";
}

ExtensionRule parse_extension_rule(const std::string& name) {
  if (name == "consecutive") return ExtensionRule::kConsecutive;
  if (name == "prefix") return ExtensionRule::kPrefix;
  throw Error("unknown extension rule: " + name);
}

DynamicOrbitTable DynamicOrbitTable::enumerate(const GraphletLimits& limits) {
  if (limits.max_nodes < 2 || limits.max_nodes > kMaxNodes)
    throw PreconditionError("max_nodes must be in [2, 5]");
  if (limits.max_events < 1 || limits.max_events > kMaxEvents)
    throw PreconditionError("max_events must be in [1, 8]");

  DynamicOrbitTable table;
  table.limits_ = limits;

  std::vector<std::vector<Edge>> sequences{{}};
  table.states_.push_back({});
  table.children_.assign(kPairSlots, -1);

  // Breadth-first growth of the trie: states are appended in discovery order.
  for (std::size_t s = 0; s < sequences.size(); ++s) {
    const auto seq = sequences[s];
    const int nodes = table.states_[s].node_count;
    if (static_cast<int>(seq.size()) == limits.max_events) continue;
    for (int a = 0; a <= nodes; ++a) {
      for (int b = a + 1; b <= nodes + (seq.empty() ? 1 : 0); ++b) {
        int grown = nodes;
        if (seq.empty()) {
          if (a != 0 || b != 1) continue;
          grown = 2;
        } else {
          if (a >= nodes) continue;  // at most one new node, and it must attach
          if (b == nodes) grown = nodes + 1;
          if (grown > limits.max_nodes) continue;
          if (limits.rule == ExtensionRule::kConsecutive) {
            const Edge& last = seq.back();
            if (a != last.first && a != last.second && b != last.first && b != last.second) continue;
          }
        }
        auto next = seq;
        next.emplace_back(a, b);
        const int id = static_cast<int>(table.states_.size());
        table.children_[s * kPairSlots + pair_slot(a, b)] = id;
        TrieState st;
        st.node_count = grown;
        table.states_.push_back(st);
        table.children_.resize(table.children_.size() + kPairSlots, -1);
        sequences.push_back(std::move(next));
      }
    }
  }

  // Canonical forms of every non-empty state.
  std::vector<Canonical> canon(sequences.size());
  std::map<std::vector<Edge>, int> form_nodes;
  for (std::size_t s = 1; s < sequences.size(); ++s) {
    canon[s] = canonicalize(sequences[s], table.states_[s].node_count);
    form_nodes.emplace(canon[s].form, table.states_[s].node_count);
  }

  for (const auto& [form, nodes] : form_nodes) {
    DynamicGraphletClass c;
    c.node_count = nodes;
    c.events = form;
    c.orbits = orbit_partition(form, nodes);
    table.classes_.push_back(std::move(c));
  }
  std::sort(table.classes_.begin(), table.classes_.end(),
            [](const DynamicGraphletClass& x, const DynamicGraphletClass& y) {
              if (x.events.size() != y.events.size()) return x.events.size() < y.events.size();
              if (x.node_count != y.node_count) return x.node_count < y.node_count;
              return x.events < y.events;
            });
  int column = 0;
  for (std::size_t i = 0; i < table.classes_.size(); ++i) {
    auto& c = table.classes_[i];
    c.id = static_cast<int>(i);
    c.first_column = column;
    column += static_cast<int>(c.orbits.size());
    table.class_index_.emplace(c.events, c.id);
  }
  table.total_orbits_ = column;

  for (std::size_t s = 1; s < sequences.size(); ++s) {
    auto& st = table.states_[s];
    const auto& c = table.classes_[table.class_index_.at(canon[s].form)];
    st.klass = c.id;
    for (int x = 0; x < st.node_count; ++x) {
      const int pos = canon[s].perm[x];
      for (std::size_t o = 0; o < c.orbits.size(); ++o)
        if (std::find(c.orbits[o].begin(), c.orbits[o].end(), pos) != c.orbits[o].end())
          st.column[x] = c.first_column + static_cast<int>(o);
    }
  }
  return table;
}

std::optional<int> DynamicOrbitTable::find_class(const std::vector<Edge>& canonical) const {
  auto it = class_index_.find(canonical);
  if (it == class_index_.end()) return std::nullopt;
  return it->second;
}

std::string DynamicOrbitTable::serialize() const {
  std::ostringstream out;
  out << "ORBITS v1 " << limits_.max_nodes << ' ' << limits_.max_events << ' ' << total_orbits_ << '\n';
  for (const auto& c : classes_) {
    out << c.id << ' ' << c.events.size();
    for (const auto& [u, v] : c.events) out << ' ' << u << '-' << v;
    out << " |";
    for (const auto& orbit : c.orbits) {
      out << ' ';
      for (std::size_t i = 0; i < orbit.size(); ++i) out << (i ? "," : "") << orbit[i];
    }
    out << '\n';
  }
  return out.str();
}

void DynamicOrbitTable::inject_fault() {
  for (const auto& c : classes_) {
    if (c.orbits.size() < 2) continue;
    const int a = c.first_column, b = c.first_column + 1;
    for (auto& st : states_) {
      if (st.klass != c.id) continue;
      for (int x = 0; x < st.node_count; ++x) {
        if (st.column[x] == a)
          st.column[x] = b;
        else if (st.column[x] == b)
          st.column[x] = a;
      }
    }
    return;
  }
}

}  // namespace dpsn
