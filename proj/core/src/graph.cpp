#include "tgm/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "tgm/error.hpp"

namespace tgm {

std::optional<NodeIndex> TemporalMultigraph::find(NodeId id) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                             [](const NodeRecord& n, NodeId v) { return n.id < v; });
  if (it == nodes_.end() || it->id != id) return std::nullopt;
  return static_cast<NodeIndex>(it - nodes_.begin());
}

NodeIndex TemporalMultigraph::index_of(NodeId id) const {
  if (auto i = find(id)) return *i;
  throw Error(ErrorCode::UnknownNode, "unknown node " + std::to_string(id.value));
}

std::span<const AdjacencyEntry> TemporalMultigraph::incident_between(NodeIndex a, NodeIndex b) const {
  auto all = incident(a);
  auto lo = std::lower_bound(all.begin(), all.end(), b,
                             [](const AdjacencyEntry& e, NodeIndex v) { return e.neighbor < v; });
  auto hi = std::upper_bound(lo, all.end(), b,
                             [](NodeIndex v, const AdjacencyEntry& e) { return v < e.neighbor; });
  return {lo, hi};
}

GraphBuilder::GraphBuilder(ChannelRegistry registry) : registry_(std::move(registry)) {}

void GraphBuilder::add_node(NodeId id, NodeKind kind, std::string label) {
  declared_.push_back(NodeRecord{id, kind, std::move(label)});
}

bool GraphBuilder::has_node(NodeId id) const {
  return std::any_of(declared_.begin(), declared_.end(), [&](const NodeRecord& n) { return n.id == id; });
}

std::uint32_t GraphBuilder::intern_location(std::string_view loc) {
  if (loc.empty()) return kNoLocation;
  auto it = std::lower_bound(location_lookup_.begin(), location_lookup_.end(), loc,
                             [](const auto& entry, std::string_view v) { return entry.first < v; });
  if (it != location_lookup_.end() && it->first == loc) return it->second;
  auto idx = static_cast<std::uint32_t>(locations_.size());
  locations_.emplace_back(loc);
  location_lookup_.insert(it, {std::string(loc), idx});
  return idx;
}

void GraphBuilder::add_edge(NodeId source, NodeId target, ChannelId channel, double time, double weight,
                            std::string_view source_location, std::string_view target_location) {
  if (channel >= registry_.size()) {
    throw Error(ErrorCode::UnknownChannel, "channel id " + std::to_string(channel) + " not in registry");
  }
  if (!std::isfinite(time) || time < 0.0) {
    throw Error(ErrorCode::BadField, "edge time must be finite and non-negative");
  }
  if (!std::isfinite(weight)) {
    throw Error(ErrorCode::BadField, "edge weight must be finite");
  }
  raw_edges_.push_back(RawEdge{source.value, target.value, channel, time, weight,
                               intern_location(source_location), intern_location(target_location)});
}

std::shared_ptr<const TemporalMultigraph> GraphBuilder::build() && {
  auto g = std::make_shared<TemporalMultigraph>();
  g->registry_ = std::move(registry_);

  // Node table: declared nodes (last declaration wins) plus every endpoint.
  std::stable_sort(declared_.begin(), declared_.end(),
                   [](const NodeRecord& a, const NodeRecord& b) { return a.id < b.id; });
  std::vector<NodeRecord> nodes;
  nodes.reserve(declared_.size() + raw_edges_.size());
  for (std::size_t i = 0; i < declared_.size(); ++i) {
    if (i + 1 < declared_.size() && declared_[i + 1].id == declared_[i].id) continue;
    nodes.push_back(std::move(declared_[i]));
  }
  std::vector<std::uint64_t> endpoints;
  endpoints.reserve(raw_edges_.size() * 2);
  for (const auto& e : raw_edges_) {
    endpoints.push_back(e.source);
    endpoints.push_back(e.target);
  }
  std::sort(endpoints.begin(), endpoints.end());
  endpoints.erase(std::unique(endpoints.begin(), endpoints.end()), endpoints.end());
  {
    std::vector<NodeRecord> merged;
    merged.reserve(nodes.size() + endpoints.size());
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < nodes.size() || j < endpoints.size()) {
      if (j == endpoints.size() || (i < nodes.size() && nodes[i].id.value <= endpoints[j])) {
        if (j < endpoints.size() && nodes[i].id.value == endpoints[j]) ++j;
        merged.push_back(std::move(nodes[i++]));
      } else {
        merged.push_back(NodeRecord{NodeId{endpoints[j++]}, NodeKind::Unknown, {}});
      }
    }
    g->nodes_ = std::move(merged);
  }

  const auto index = [&](std::uint64_t id) {
    auto it = std::lower_bound(g->nodes_.begin(), g->nodes_.end(), id,
                               [](const NodeRecord& n, std::uint64_t v) { return n.id.value < v; });
    return static_cast<NodeIndex>(it - g->nodes_.begin());
  };

  g->edges_.reserve(raw_edges_.size());
  for (const auto& e : raw_edges_) {
    g->edges_.push_back(Edge{index(e.source), index(e.target), e.channel, e.time, e.weight,
                             e.source_location, e.target_location});
  }
  raw_edges_.clear();
  raw_edges_.shrink_to_fit();
  g->locations_ = std::move(locations_);

  // CSR adjacency by counting sort on endpoint.
  const std::size_t n = g->nodes_.size();
  g->offsets_.assign(n + 1, 0);
  for (const auto& e : g->edges_) {
    ++g->offsets_[e.source + 1];
    if (e.target != e.source) ++g->offsets_[e.target + 1];
  }
  std::partial_sum(g->offsets_.begin(), g->offsets_.end(), g->offsets_.begin());
  g->adjacency_.resize(g->offsets_[n]);
  {
    std::vector<std::size_t> cursor(g->offsets_.begin(), g->offsets_.end() - 1);
    for (EdgeIndex i = 0; i < g->edges_.size(); ++i) {
      const auto& e = g->edges_[i];
      g->adjacency_[cursor[e.source]++] = AdjacencyEntry{e.target, i};
      if (e.target != e.source) g->adjacency_[cursor[e.target]++] = AdjacencyEntry{e.source, i};
    }
  }
  const auto& edges = g->edges_;
  for (std::size_t v = 0; v < n; ++v) {
    std::sort(g->adjacency_.begin() + static_cast<std::ptrdiff_t>(g->offsets_[v]),
              g->adjacency_.begin() + static_cast<std::ptrdiff_t>(g->offsets_[v + 1]),
              [&](const AdjacencyEntry& a, const AdjacencyEntry& b) {
                return std::tie(a.neighbor, edges[a.edge].time, a.edge) <
                       std::tie(b.neighbor, edges[b.edge].time, b.edge);
              });
  }

  g->time_order_.resize(edges.size());
  std::iota(g->time_order_.begin(), g->time_order_.end(), EdgeIndex{0});
  std::stable_sort(g->time_order_.begin(), g->time_order_.end(),
                   [&](EdgeIndex a, EdgeIndex b) { return edges[a].time < edges[b].time; });

  g->by_channel_.assign(g->registry_.size(), {});
  for (EdgeIndex e : g->time_order_) g->by_channel_[edges[e].channel].push_back(e);

  return g;
}

}  // namespace tgm
