#include "dpsn/psn.hpp"

#include <algorithm>
#include <iterator>
#include <numeric>
#include <tuple>
#include <sstream>

#include "dpsn/error.hpp"

namespace dpsn {
namespace {

double squared_distance(const Residue& a, const Residue& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return dx * dx + dy * dy + dz * dz;
}

// Contacts of the full domain, sorted by (u, v).
std::vector<Edge> contacts(const ProteinDomain& domain, double threshold) {
  if (!(threshold > 0.0)) throw PreconditionError("contact threshold must be positive");
  const double t2 = threshold * threshold;
  std::vector<Edge> edges;
  const int n = static_cast<int>(domain.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (squared_distance(domain.residues[i], domain.residues[j]) <= t2) edges.emplace_back(i, j);
  return edges;
}

int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) x = parent[x] = parent[parent[x]];
  return x;
}

}  // namespace

StaticPSN build_static_psn(const ProteinDomain& domain, double threshold) {
  return StaticPSN{static_cast<int>(domain.size()), contacts(domain, threshold)};
}

DynamicPSN build_dynamic_psn(const ProteinDomain& domain, int k, double threshold) {
  if (k < 1) throw PreconditionError("prefix step k must be >= 1");
  const int n = static_cast<int>(domain.size());
  const auto all = contacts(domain, threshold);
  DynamicPSN d;
  d.k = k;
  const int T = (n + k - 1) / k;
  for (int s = 1; s <= T; ++s) {
    const int nodes = std::min(s * k, n);
    StaticPSN snap{nodes, {}};
    for (const auto& e : all)
      if (e.second < nodes) snap.edges.push_back(e);
    if (!d.snapshots.empty()) {
      const auto& prev = d.snapshots.back().edges;
      if (!std::includes(snap.edges.begin(), snap.edges.end(), prev.begin(), prev.end()))
        throw Error("snapshot nesting violated");
    }
    d.snapshots.push_back(std::move(snap));
    d.node_counts.push_back(nodes);
  }
  return d;
}

EventStream derive_event_stream(const DynamicPSN& dpsn, std::string id) {
  EventStream s;
  s.id = std::move(id);
  s.T = dpsn.snapshot_count();
  s.n = dpsn.snapshots.empty() ? 0 : dpsn.snapshots.back().n;
  s.node_counts = dpsn.node_counts;
  std::vector<Edge> seen;
  for (int t = 1; t <= s.T; ++t) {
    // Snapshot edges are sorted by (u, v) and nested, so set difference keeps order.
    const auto& edges = dpsn.snapshots[t - 1].edges;
    std::vector<Edge> fresh;
    std::set_difference(edges.begin(), edges.end(), seen.begin(), seen.end(), std::back_inserter(fresh));
    for (const auto& [u, v] : fresh) s.events.push_back({u, v, t});
    seen = edges;
  }
  return s;
}

bool check_connectivity(const StaticPSN& psn) {
  if (psn.n <= 1) return true;
  std::vector<int> parent(psn.n);
  std::iota(parent.begin(), parent.end(), 0);
  int components = psn.n;
  for (const auto& [u, v] : psn.edges) {
    const int a = find_root(parent, u), b = find_root(parent, v);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

StaticPSN rebuild_final_snapshot(const EventStream& stream) {
  StaticPSN g{stream.n, {}};
  for (const auto& e : stream.events)
    if (e.t <= stream.T) g.edges.emplace_back(e.u, e.v);
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  return g;
}

void validate_stream(const EventStream& stream) {
  for (std::size_t i = 0; i < stream.events.size(); ++i) {
    const auto& e = stream.events[i];
    if (e.u < 0 || e.u >= e.v || e.v >= stream.n)
      throw Error("event " + std::to_string(i) + ": endpoints must satisfy 0 <= u < v < n");
    if (e.t < 1 || e.t > stream.T) throw Error("event " + std::to_string(i) + ": t outside 1..T");
    if (i > 0) {
      const auto& p = stream.events[i - 1];
      if (std::tie(p.t, p.u, p.v) >= std::tie(e.t, e.u, e.v))
        throw Error("events not strictly sorted by (t, u, v) at index " + std::to_string(i));
    }
  }
}

std::string write_event_file(const EventStream& stream) {
  std::ostringstream out;
  out << "EVENTS v1 " << (stream.id.empty() ? "-" : stream.id) << ' ' << stream.n << ' ' << stream.T
      << ' ' << stream.events.size() << '\n';
  out << "COUNTS";
  for (int c : stream.node_counts) out << ' ' << c;
  out << '\n';
  for (const auto& e : stream.events) out << e.t << ' ' << e.u << ' ' << e.v << '\n';
  return out.str();
}

EventStream read_event_file(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string magic, version;
  EventStream s;
  std::size_t m = 0;
  if (!(in >> magic >> version >> s.id >> s.n >> s.T >> m) || magic != "EVENTS" || version != "v1")
    throw ParseError(1, "bad EVENTS header");
  if (s.id == "-") s.id.clear();
  std::string line;
  std::getline(in, line);
  if (!std::getline(in, line) || !line.starts_with("COUNTS")) throw ParseError(2, "missing COUNTS line");
  {
    std::istringstream counts(line.substr(6));
    int c;
    while (counts >> c) s.node_counts.push_back(c);
  }
  s.events.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    Event e;
    if (!(in >> e.t >> e.u >> e.v)) throw ParseError(3 + i, "truncated event list");
    s.events.push_back(e);
  }
  validate_stream(s);
  return s;
}

}  // namespace dpsn
