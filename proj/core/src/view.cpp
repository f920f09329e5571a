#include "tgm/view.hpp"

#include <algorithm>
#include <cmath>

#include "tgm/error.hpp"

namespace tgm {

GraphView::GraphView(std::shared_ptr<const TemporalMultigraph> graph, ViewConfig config)
    : graph_(std::move(graph)), config_(config) {
  if (!graph_) throw Error(ErrorCode::InvalidConfig, "view needs a graph");
  if (config_.range) {
    const auto& r = *config_.range;
    if (std::isnan(r.begin) || std::isnan(r.end) || !(r.begin < r.end)) {
      throw Error(ErrorCode::InvalidRange, "time range needs begin < end");
    }
  }
  if (!std::isfinite(config_.offset)) throw Error(ErrorCode::InvalidConfig, "time offset must be finite");
  if (!config_.channels.subset_of(graph_->channels().all())) {
    throw Error(ErrorCode::InvalidConfig, "enabled channels must come from the graph's registry");
  }
}

GraphView with_view(std::shared_ptr<const TemporalMultigraph> graph, ViewConfig config) {
  return GraphView(std::move(graph), config);
}

GraphView full_view(std::shared_ptr<const TemporalMultigraph> graph) {
  auto cfg = ViewConfig::all(graph->channels());
  return GraphView(std::move(graph), cfg);
}

namespace detail {

EdgeBundle bundle_at(const GraphView& view, NodeIndex a, NodeIndex b) {
  const auto& g = view.graph();
  EdgeBundle bundle{g.id_of(a), g.id_of(b), {}};
  for (const auto& entry : g.incident_between(a, b)) {
    const auto& e = g.edge(entry.edge);
    if (!view.visible(e)) continue;
    bundle.edges.push_back(BundleEdge{entry.edge, e.source == a ? Direction::Forward : Direction::Backward,
                                      e.channel, view.effective_time(e), e.weight});
  }
  return bundle;
}

bool has_visible_edge(const GraphView& view, NodeIndex a, NodeIndex b) {
  const auto run = view.graph().incident_between(a, b);
  return std::any_of(run.begin(), run.end(), [&](const AdjacencyEntry& e) { return view.visible(e.edge); });
}

std::vector<NodeIndex> visible_neighbors(const GraphView& view, NodeIndex n) {
  std::vector<NodeIndex> out;
  for (const auto& entry : view.graph().incident(n)) {
    if (entry.neighbor == n || (!out.empty() && out.back() == entry.neighbor)) continue;
    if (view.visible(entry.edge)) out.push_back(entry.neighbor);
  }
  return out;
}

}  // namespace detail

std::vector<Neighbor> adjacent(const GraphView& view, NodeId node) {
  const auto& g = view.graph();
  const auto n = g.index_of(node);
  std::vector<Neighbor> out;
  NodeIndex current = 0;
  bool open = false;
  for (const auto& entry : g.incident(n)) {
    const auto& e = g.edge(entry.edge);
    if (!view.visible(e)) continue;
    if (!open || entry.neighbor != current) {
      current = entry.neighbor;
      open = true;
      out.push_back(Neighbor{g.id_of(current), {}});
    }
    out.back().channels.insert(e.channel);
  }
  return out;
}

EdgeBundle edge_bundle(const GraphView& view, NodeId a, NodeId b) {
  const auto& g = view.graph();
  return detail::bundle_at(view, g.index_of(a), g.index_of(b));
}

ViewStats stats(const GraphView& view) {
  const auto& g = view.graph();
  ViewStats s;
  s.node_count = g.node_count();
  std::vector<std::size_t> counts(g.channels().size(), 0);
  double lo = 0.0;
  double hi = 0.0;
  for (const auto& e : g.edges()) {
    if (!view.visible(e)) continue;
    const double t = view.effective_time(e);
    if (s.visible_edges == 0) {
      lo = hi = t;
    } else {
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
    ++counts[e.channel];
    ++s.visible_edges;
  }
  view.config().channels.for_each([&](ChannelId c) { s.per_channel[g.channels().code(c)] = counts[c]; });
  if (s.visible_edges > 0) s.extent = TimeRange{lo, hi};
  return s;
}

}  // namespace tgm
