#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tgm/graph.hpp"

namespace tgm {

/// Half-open interval [begin, end) of effective time.
struct TimeRange {
  double begin = 0.0;
  double end = 0.0;

  bool contains(double t) const { return t >= begin && t < end; }
  friend bool operator==(const TimeRange&, const TimeRange&) = default;
};

struct ViewConfig {
  ChannelSet channels;
  std::optional<TimeRange> range;  // unbounded when empty
  double offset = 0.0;             // added to raw edge times

  static ViewConfig all(const ChannelRegistry& registry) { return ViewConfig{registry.all(), {}, 0.0}; }

  friend bool operator==(const ViewConfig&, const ViewConfig&) = default;
};

// A graph seen through a channel/time filter. Cheap to copy; shares the graph.
//
// An edge is visible iff its channel is enabled and raw time + offset falls in
// the range. Everything downstream reads effective times.
class GraphView {
 public:
  // Throws InvalidRange when begin >= end (or non-finite), InvalidConfig when
  // channels name ids outside the graph's registry or offset is not finite.
  GraphView(std::shared_ptr<const TemporalMultigraph> graph, ViewConfig config);

  const TemporalMultigraph& graph() const { return *graph_; }
  const std::shared_ptr<const TemporalMultigraph>& graph_ptr() const { return graph_; }
  const ViewConfig& config() const { return config_; }

  double effective_time(const Edge& e) const { return e.time + config_.offset; }

  bool visible(const Edge& e) const {
    return config_.channels.contains(e.channel) &&
           (!config_.range || config_.range->contains(effective_time(e)));
  }
  bool visible(EdgeIndex e) const { return visible(graph_->edge(e)); }

 private:
  std::shared_ptr<const TemporalMultigraph> graph_;
  ViewConfig config_;
};

GraphView with_view(std::shared_ptr<const TemporalMultigraph> graph, ViewConfig config);
GraphView full_view(std::shared_ptr<const TemporalMultigraph> graph);

struct Neighbor {
  NodeId node;
  ChannelSet channels;
};

// Neighbors joined to `node` by at least one visible edge, either direction,
// ascending by id. Throws UnknownNode.
std::vector<Neighbor> adjacent(const GraphView& view, NodeId node);

struct BundleEdge {
  EdgeIndex edge;
  Direction direction;  // Forward when the edge runs from the bundle's `from` to `to`
  ChannelId channel;
  double time;  // effective
  double weight;
};

/// All visible edges between one node pair, oriented from `from` to `to`.
struct EdgeBundle {
  NodeId from;
  NodeId to;
  std::vector<BundleEdge> edges;

  bool empty() const { return edges.empty(); }
  std::size_t size() const { return edges.size(); }
};

// Throws UnknownNode.
EdgeBundle edge_bundle(const GraphView& view, NodeId a, NodeId b);

struct ViewStats {
  std::size_t node_count = 0;
  std::size_t visible_edges = 0;
  std::map<std::string, std::size_t> per_channel;  // every enabled channel, zeros included
  std::optional<TimeRange> extent;                 // [min, max] effective time; end is inclusive here
};

ViewStats stats(const GraphView& view);

// Index-level access used by the analytics and matching code.
namespace detail {

EdgeBundle bundle_at(const GraphView& view, NodeIndex a, NodeIndex b);
bool has_visible_edge(const GraphView& view, NodeIndex a, NodeIndex b);

// Distinct visible neighbors of `n` (self excluded), ascending.
std::vector<NodeIndex> visible_neighbors(const GraphView& view, NodeIndex n);

template <typename Fn>
void for_each_visible_incident(const GraphView& view, NodeIndex n, Fn&& fn) {
  for (const auto& entry : view.graph().incident(n)) {
    if (view.visible(entry.edge)) fn(entry);
  }
}

}  // namespace detail

}  // namespace tgm
