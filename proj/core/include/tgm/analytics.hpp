#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tgm/view.hpp"

namespace tgm {

// Bin k covers [origin + k*bin_width, origin + (k+1)*bin_width).
struct Histogram {
  double origin = 0.0;
  double bin_width = 1.0;
  std::vector<std::uint64_t> counts;

  double bin_start(std::size_t k) const { return origin + static_cast<double>(k) * bin_width; }
};

struct BinSpec {
  double bin_width = 1.0;
  double origin = 0.0;
  // When set, bins cover this span (aligned to origin). Otherwise the bins are
  // trimmed to the first and last non-empty bin.
  std::optional<TimeRange> span;
};

// 1/50 of the view's visible time extent, never below one second.
double default_bin_width(const GraphView& view);

// Throws NonPositiveBinWidth.
Histogram activity_histogram(const GraphView& view, const BinSpec& bins);

struct ScatterPoint {
  NodeId person;
  double time;  // effective
  ChannelId channel;
  EdgeIndex edge;
};

// One point per (visible edge, Person endpoint), sorted by (person, time, edge).
std::vector<ScatterPoint> person_scatter(const GraphView& view);

// Country code -> number of visible edge endpoints located there.
std::map<std::string, std::uint64_t> spatial_distribution(const GraphView& view);

struct StructureGraph {
  std::vector<NodeId> persons;                                  // ascending
  std::map<std::pair<NodeId, NodeId>, std::uint64_t> links;     // key.first < key.second
};

// weight(p, q) = visible direct edges between p and q
//              + distinct non-Person nodes visibly adjacent to both.
StructureGraph structure_projection(const GraphView& view);

// Channel code -> visible incident edges. Only non-zero channels appear.
// Throws UnknownNode, NotAPerson.
std::map<std::string, std::uint64_t> person_channel_counts(const GraphView& view, NodeId person);

struct HeatmapMatrix {
  std::vector<NodeId> persons;
  double origin = 0.0;
  double bin_width = 1.0;
  std::size_t bin_count = 0;
  std::vector<std::vector<std::uint64_t>> cells;  // persons x bins
};

// Rows follow `persons`. Throws NonPositiveBinWidth, UnknownNode, NotAPerson,
// UnknownChannel.
HeatmapMatrix heatmap(const GraphView& view, const std::vector<NodeId>& persons,
                      std::string_view channel, const BinSpec& bins);

// Cross-graph form: each row comes from its own view.
HeatmapMatrix heatmap(const std::vector<std::pair<GraphView, NodeId>>& rows, std::string_view channel,
                      const BinSpec& bins);

}  // namespace tgm
