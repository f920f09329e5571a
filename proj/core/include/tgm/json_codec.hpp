#pragma once

#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "tgm/analytics.hpp"
#include "tgm/matcher.hpp"
#include "tgm/similarity.hpp"
#include "tgm/view.hpp"

namespace tgm::json {

using nlohmann::json;

json encode(const ViewConfig& cfg, const ChannelRegistry& registry);
// Missing keys keep their defaults: all channels, unbounded, offset 0.
// Throws UnknownChannel, BadRequest.
ViewConfig decode_view(const json& j, const ChannelRegistry& registry);

json encode(const SimilarityConfig& cfg);
// Missing keys keep the current values of `base`. Throws BadRequest, InvalidConfig.
SimilarityConfig decode_similarity(const json& j, SimilarityConfig base = {});

json encode(const ViewStats& s);
json encode(const Histogram& h);
json encode(const std::vector<ScatterPoint>& points, const ChannelRegistry& registry);
json encode(const std::map<std::string, std::uint64_t>& counts);
json encode(const StructureGraph& g);
json encode(const HeatmapMatrix& m);
json encode(const SimilarityScore& s);
json encode(const Decision& d);
Decision decode_decision(const json& j);
json encode(const NodeMap& m);
NodeMap decode_node_map(const json& j);
json encode(const Snippet& s, const GraphView& view);
json encode(const CandidatePair& c, const MatchSession& session);
json encode(const SeedSignature& sig, const ChannelRegistry& registry);
json encode(const SeedAssignment& s);
json encode(const CandidateRanking& r);

}  // namespace tgm::json
