#include "tgm/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "tgm/error.hpp"

namespace tgm {
namespace {

void check_width(double w) {
  if (!(w > 0.0) || !std::isfinite(w)) {
    throw Error(ErrorCode::NonPositiveBinWidth, "bin width must be positive and finite");
  }
}

std::int64_t bin_of(double t, const BinSpec& bins) {
  return static_cast<std::int64_t>(std::floor((t - bins.origin) / bins.bin_width));
}

// Resolves [first, last] bin indices for the given effective times.
// Returns false when the result has no bins.
bool bin_window(const BinSpec& bins, const std::vector<double>& times, std::int64_t& first, std::int64_t& last) {
  if (bins.span) {
    if (!(bins.span->begin < bins.span->end)) throw Error(ErrorCode::InvalidRange, "bin span needs begin < end");
    first = bin_of(bins.span->begin, bins);
    last = static_cast<std::int64_t>(std::ceil((bins.span->end - bins.origin) / bins.bin_width)) - 1;
    return last >= first;
  }
  if (times.empty()) return false;
  auto [lo, hi] = std::minmax_element(times.begin(), times.end());
  first = bin_of(*lo, bins);
  last = bin_of(*hi, bins);
  return true;
}

bool in_span(const BinSpec& bins, double t) { return !bins.span || bins.span->contains(t); }

NodeIndex require_person(const GraphView& view, NodeId person) {
  const auto& g = view.graph();
  const auto idx = g.index_of(person);
  if (g.kind_of(idx) != NodeKind::Person) {
    throw Error(ErrorCode::NotAPerson, "node " + std::to_string(person.value) + " is not a Person");
  }
  return idx;
}

}  // namespace

double default_bin_width(const GraphView& view) {
  const auto s = stats(view);
  if (!s.extent) return 1.0;
  return std::max(1.0, (s.extent->end - s.extent->begin) / 50.0);
}

Histogram activity_histogram(const GraphView& view, const BinSpec& bins) {
  check_width(bins.bin_width);
  const auto& g = view.graph();
  std::vector<double> times;
  for (const auto& e : g.edges()) {
    if (!view.visible(e)) continue;
    const double t = view.effective_time(e);
    if (in_span(bins, t)) times.push_back(t);
  }
  Histogram h{bins.origin, bins.bin_width, {}};
  std::int64_t first = 0;
  std::int64_t last = 0;
  if (!bin_window(bins, times, first, last)) return h;
  h.origin = bins.origin + static_cast<double>(first) * bins.bin_width;
  h.counts.assign(static_cast<std::size_t>(last - first + 1), 0);
  for (double t : times) {
    const auto k = bin_of(t, bins) - first;
    if (k >= 0 && k < static_cast<std::int64_t>(h.counts.size())) ++h.counts[static_cast<std::size_t>(k)];
  }
  return h;
}

std::vector<ScatterPoint> person_scatter(const GraphView& view) {
  const auto& g = view.graph();
  std::vector<ScatterPoint> points;
  for (EdgeIndex i = 0; i < g.edge_count(); ++i) {
    const auto& e = g.edge(i);
    if (!view.visible(e)) continue;
    const double t = view.effective_time(e);
    if (g.kind_of(e.source) == NodeKind::Person) points.push_back({g.id_of(e.source), t, e.channel, i});
    if (e.target != e.source && g.kind_of(e.target) == NodeKind::Person) {
      points.push_back({g.id_of(e.target), t, e.channel, i});
    }
  }
  std::sort(points.begin(), points.end(), [](const ScatterPoint& a, const ScatterPoint& b) {
    return std::tie(a.person, a.time, a.edge) < std::tie(b.person, b.time, b.edge);
  });
  return points;
}

std::map<std::string, std::uint64_t> spatial_distribution(const GraphView& view) {
  const auto& g = view.graph();
  std::vector<std::uint64_t> counts(g.locations().size(), 0);
  for (const auto& e : g.edges()) {
    if (!view.visible(e)) continue;
    if (e.source_location != kNoLocation) ++counts[e.source_location];
    if (e.target_location != kNoLocation) ++counts[e.target_location];
  }
  std::map<std::string, std::uint64_t> out;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] > 0) out.emplace(g.locations()[i], counts[i]);
  }
  return out;
}

StructureGraph structure_projection(const GraphView& view) {
  const auto& g = view.graph();
  StructureGraph out;
  std::map<std::pair<NodeIndex, NodeIndex>, std::uint64_t> weights;
  for (NodeIndex n = 0; n < g.node_count(); ++n) {
    if (g.kind_of(n) == NodeKind::Person) {
      out.persons.push_back(g.id_of(n));
      continue;
    }
    // Co-participation through a shared non-person node.
    std::vector<NodeIndex> persons;
    for (NodeIndex m : detail::visible_neighbors(view, n)) {
      if (g.kind_of(m) == NodeKind::Person) persons.push_back(m);
    }
    for (std::size_t i = 0; i < persons.size(); ++i) {
      for (std::size_t j = i + 1; j < persons.size(); ++j) ++weights[{persons[i], persons[j]}];
    }
  }
  for (const auto& e : g.edges()) {
    if (e.source == e.target || !view.visible(e)) continue;
    if (g.kind_of(e.source) != NodeKind::Person || g.kind_of(e.target) != NodeKind::Person) continue;
    ++weights[{std::min(e.source, e.target), std::max(e.source, e.target)}];
  }
  for (const auto& [pair, w] : weights) out.links.emplace(std::pair{g.id_of(pair.first), g.id_of(pair.second)}, w);
  return out;
}

std::map<std::string, std::uint64_t> person_channel_counts(const GraphView& view, NodeId person) {
  const auto idx = require_person(view, person);
  const auto& g = view.graph();
  std::vector<std::uint64_t> counts(g.channels().size(), 0);
  detail::for_each_visible_incident(view, idx, [&](const AdjacencyEntry& entry) { ++counts[g.edge(entry.edge).channel]; });
  std::map<std::string, std::uint64_t> out;
  for (ChannelId c = 0; c < counts.size(); ++c) {
    if (counts[c] > 0) out.emplace(g.channels().code(c), counts[c]);
  }
  return out;
}

HeatmapMatrix heatmap(const std::vector<std::pair<GraphView, NodeId>>& rows, std::string_view channel,
                      const BinSpec& bins) {
  check_width(bins.bin_width);
  std::vector<std::vector<double>> per_row;
  std::vector<double> all_times;
  HeatmapMatrix m;
  for (const auto& [view, person] : rows) {
    const auto idx = require_person(view, person);
    const auto& g = view.graph();
    const auto ch = g.channels().require(channel);
    auto& times = per_row.emplace_back();
    detail::for_each_visible_incident(view, idx, [&](const AdjacencyEntry& entry) {
      const auto& e = g.edge(entry.edge);
      if (e.channel != ch) return;
      const double t = view.effective_time(e);
      if (in_span(bins, t)) times.push_back(t);
    });
    all_times.insert(all_times.end(), times.begin(), times.end());
    m.persons.push_back(person);
  }
  m.bin_width = bins.bin_width;
  m.origin = bins.origin;
  if (rows.empty()) return m;
  std::int64_t first = 0;
  std::int64_t last = 0;
  const bool has_bins = bin_window(bins, all_times, first, last);
  if (has_bins) {
    m.origin = bins.origin + static_cast<double>(first) * bins.bin_width;
    m.bin_count = static_cast<std::size_t>(last - first + 1);
  }
  for (const auto& times : per_row) {
    auto& row = m.cells.emplace_back(m.bin_count, 0);
    for (double t : times) {
      const auto k = bin_of(t, bins) - first;
      if (k >= 0 && k < static_cast<std::int64_t>(row.size())) ++row[static_cast<std::size_t>(k)];
    }
  }
  return m;
}

HeatmapMatrix heatmap(const GraphView& view, const std::vector<NodeId>& persons, std::string_view channel,
                      const BinSpec& bins) {
  view.graph().channels().require(channel);
  std::vector<std::pair<GraphView, NodeId>> rows;
  rows.reserve(persons.size());
  for (auto p : persons) rows.emplace_back(view, p);
  return heatmap(rows, channel, bins);
}

}  // namespace tgm
