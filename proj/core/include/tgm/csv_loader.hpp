#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tgm/channel_registry.hpp"
#include "tgm/graph.hpp"

namespace tgm {

inline constexpr std::string_view kEdgesHeader =
    "source,etype,target,time,weight,source_location,target_location";
inline constexpr std::string_view kNodesHeader = "node,kind,label";

struct LoadResult {
  std::shared_ptr<const TemporalMultigraph> graph;
  // Non-fatal findings, e.g. a nodes row with no kind that no edge references.
  std::vector<std::string> warnings;
};

// Parses an edge list (and optional node table) into a graph.
// Errors: MissingHeader, UnknownChannel, BadField; messages carry 1-based line
// numbers (header is line 1) and column numbers.
LoadResult load_graph(std::string_view edges_csv, std::optional<std::string_view> nodes_csv,
                      const ChannelRegistry& registry);

LoadResult load_graph_files(const std::filesystem::path& edges_csv,
                            const std::optional<std::filesystem::path>& nodes_csv,
                            const ChannelRegistry& registry);

// Serializes back to the two CSV formats. Edge rows keep input order.
std::string write_edges_csv(const TemporalMultigraph& graph);
std::string write_nodes_csv(const TemporalMultigraph& graph);

}  // namespace tgm
