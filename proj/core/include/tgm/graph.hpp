#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tgm/channel_registry.hpp"
#include "tgm/types.hpp"

namespace tgm {

/// Position of a node in the graph's id-sorted node table.
using NodeIndex = std::uint32_t;
/// Position of an edge in the graph's edge sequence (input order).
using EdgeIndex = std::uint32_t;

inline constexpr std::uint32_t kNoLocation = std::numeric_limits<std::uint32_t>::max();

struct NodeRecord {
  NodeId id;
  NodeKind kind = NodeKind::Unknown;
  std::string label;
};

struct Edge {
  NodeIndex source = 0;
  NodeIndex target = 0;
  ChannelId channel = 0;
  double time = 0.0;
  double weight = 0.0;
  std::uint32_t source_location = kNoLocation;
  std::uint32_t target_location = kNoLocation;
};

struct AdjacencyEntry {
  NodeIndex neighbor;
  EdgeIndex edge;
};

// Immutable typed temporal multigraph.
//
// Node indices follow ascending NodeId, so anything ordered by index is also
// ordered by id. Each node's incident list is sorted by (neighbor, time, edge);
// a self-loop appears once in its node's list. Per-channel lists and the global
// time order are sorted by (time, edge).
class TemporalMultigraph {
 public:
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  const ChannelRegistry& channels() const { return registry_; }

  std::span<const NodeRecord> nodes() const { return nodes_; }
  const NodeRecord& node(NodeIndex i) const { return nodes_[i]; }
  NodeId id_of(NodeIndex i) const { return nodes_[i].id; }
  NodeKind kind_of(NodeIndex i) const { return nodes_[i].kind; }

  std::optional<NodeIndex> find(NodeId id) const;
  // Throws UnknownNode.
  NodeIndex index_of(NodeId id) const;

  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(EdgeIndex e) const { return edges_[e]; }

  std::span<const AdjacencyEntry> incident(NodeIndex n) const {
    return {adjacency_.data() + offsets_[n], adjacency_.data() + offsets_[n + 1]};
  }
  // Incident entries of `a` whose neighbor is `b`.
  std::span<const AdjacencyEntry> incident_between(NodeIndex a, NodeIndex b) const;

  std::span<const EdgeIndex> channel_edges(ChannelId c) const {
    if (c >= by_channel_.size()) return {};
    return by_channel_[c];
  }
  std::span<const EdgeIndex> time_order() const { return time_order_; }

  std::string_view location(std::uint32_t loc) const {
    return loc == kNoLocation ? std::string_view{} : std::string_view{locations_[loc]};
  }
  std::span<const std::string> locations() const { return locations_; }

 private:
  friend class GraphBuilder;

  ChannelRegistry registry_;
  std::vector<NodeRecord> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<AdjacencyEntry> adjacency_;
  std::vector<std::vector<EdgeIndex>> by_channel_;
  std::vector<EdgeIndex> time_order_;
  std::vector<std::string> locations_;
};

// Accumulates nodes and edges, then freezes them into a TemporalMultigraph.
class GraphBuilder {
 public:
  explicit GraphBuilder(ChannelRegistry registry);

  const ChannelRegistry& channels() const { return registry_; }

  // Declares a node. A later declaration of the same id replaces the earlier one.
  void add_node(NodeId id, NodeKind kind, std::string label = {});
  bool has_node(NodeId id) const;

  // Endpoints not declared with add_node get kind Unknown.
  void add_edge(NodeId source, NodeId target, ChannelId channel, double time, double weight,
                std::string_view source_location = {}, std::string_view target_location = {});

  std::size_t edge_count() const { return raw_edges_.size(); }

  std::shared_ptr<const TemporalMultigraph> build() &&;

 private:
  struct RawEdge {
    std::uint64_t source;
    std::uint64_t target;
    ChannelId channel;
    double time;
    double weight;
    std::uint32_t source_location;
    std::uint32_t target_location;
  };

  std::uint32_t intern_location(std::string_view loc);

  ChannelRegistry registry_;
  std::vector<NodeRecord> declared_;
  std::vector<RawEdge> raw_edges_;
  std::vector<std::string> locations_;
  std::vector<std::pair<std::string, std::uint32_t>> location_lookup_;  // sorted
};

}  // namespace tgm
