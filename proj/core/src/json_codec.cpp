#include "tgm/json_codec.hpp"

#include "tgm/error.hpp"

namespace tgm::json {
namespace {

[[noreturn]] void bad_request(const std::string& what) { throw Error(ErrorCode::BadRequest, what); }

double number_at(const json& j, const char* key, double fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  if (!j.at(key).is_number()) bad_request(std::string("'") + key + "' must be a number");
  return j.at(key).get<double>();
}

json node_pair(NodeId a, NodeId b) { return json::array({a.value, b.value}); }

}  // namespace

json encode(const ViewConfig& cfg, const ChannelRegistry& registry) {
  json channels = json::array();
  cfg.channels.for_each([&](ChannelId c) { channels.push_back(registry.code(c)); });
  json j{{"channels", std::move(channels)}, {"offset", cfg.offset}};
  j["range"] = cfg.range ? json::array({cfg.range->begin, cfg.range->end}) : json(nullptr);
  return j;
}

ViewConfig decode_view(const json& j, const ChannelRegistry& registry) {
  if (!j.is_object()) bad_request("view config must be an object");
  auto cfg = ViewConfig::all(registry);
  if (j.contains("channels") && !j.at("channels").is_null()) {
    if (!j.at("channels").is_array()) bad_request("'channels' must be an array of channel codes");
    cfg.channels = ChannelSet{};
    for (const auto& c : j.at("channels")) {
      if (!c.is_string()) bad_request("'channels' must be an array of channel codes");
      cfg.channels.insert(registry.require(c.get<std::string>()));
    }
  }
  if (j.contains("range") && !j.at("range").is_null()) {
    const auto& r = j.at("range");
    if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
      bad_request("'range' must be [begin, end] or null");
    }
    cfg.range = TimeRange{r[0].get<double>(), r[1].get<double>()};
  }
  cfg.offset = number_at(j, "offset", 0.0);
  return cfg;
}

json encode(const SimilarityConfig& c) {
  return json{{"w_presence", c.w_presence},
              {"w_count", c.w_count},
              {"w_temporal", c.w_temporal},
              {"bin_width", c.bin_width},
              {"offset_range", c.offset_range},
              {"offset_step", c.offset_step},
              {"accept_threshold", c.accept_threshold},
              {"tie_epsilon", c.tie_epsilon},
              {"ignore_direction", c.ignore_direction},
              {"use_weights", c.use_weights}};
}

SimilarityConfig decode_similarity(const json& j, SimilarityConfig base) {
  if (j.is_null()) return base;
  if (!j.is_object()) bad_request("similarity config must be an object");
  base.w_presence = number_at(j, "w_presence", base.w_presence);
  base.w_count = number_at(j, "w_count", base.w_count);
  base.w_temporal = number_at(j, "w_temporal", base.w_temporal);
  base.bin_width = number_at(j, "bin_width", base.bin_width);
  base.offset_range = number_at(j, "offset_range", base.offset_range);
  // The step follows the bin width unless given explicitly.
  base.offset_step = j.contains("offset_step")   ? number_at(j, "offset_step", base.offset_step)
                     : j.contains("bin_width") ? base.bin_width
                                               : base.offset_step;
  base.accept_threshold = number_at(j, "accept_threshold", base.accept_threshold);
  base.tie_epsilon = number_at(j, "tie_epsilon", base.tie_epsilon);
  for (const char* flag : {"ignore_direction", "use_weights"}) {
    if (j.contains(flag) && !j.at(flag).is_boolean()) bad_request(std::string("'") + flag + "' must be a boolean");
  }
  base.ignore_direction = j.value("ignore_direction", base.ignore_direction);
  base.use_weights = j.value("use_weights", base.use_weights);
  base.validate();
  return base;
}

json encode(const ViewStats& s) {
  json j{{"node_count", s.node_count}, {"visible_edges", s.visible_edges}, {"per_channel", s.per_channel}};
  j["extent"] = s.extent ? json::array({s.extent->begin, s.extent->end}) : json(nullptr);
  return j;
}

json encode(const Histogram& h) {
  return json{{"origin", h.origin}, {"bin_width", h.bin_width}, {"counts", h.counts}};
}

json encode(const std::vector<ScatterPoint>& points, const ChannelRegistry& registry) {
  json out = json::array();
  for (const auto& p : points) {
    out.push_back(json{{"person", p.person.value}, {"time", p.time}, {"channel", registry.code(p.channel)}, {"edge", p.edge}});
  }
  return out;
}

json encode(const std::map<std::string, std::uint64_t>& counts) { return json(counts); }

json encode(const StructureGraph& g) {
  json persons = json::array();
  for (auto p : g.persons) persons.push_back(p.value);
  json links = json::array();
  for (const auto& [pair, w] : g.links) links.push_back(json{{"a", pair.first.value}, {"b", pair.second.value}, {"weight", w}});
  return json{{"persons", std::move(persons)}, {"links", std::move(links)}};
}

json encode(const HeatmapMatrix& m) {
  json persons = json::array();
  for (auto p : m.persons) persons.push_back(p.value);
  return json{{"persons", std::move(persons)},
              {"origin", m.origin},
              {"bin_width", m.bin_width},
              {"bin_count", m.bin_count},
              {"cells", m.cells}};
}

json encode(const SimilarityScore& s) {
  return json{{"total", s.total}, {"presence", s.presence}, {"count", s.count}, {"temporal", s.temporal}};
}

json encode(const Decision& d) {
  return json{{"template", d.template_node.value},
              {"target", d.target_node.value},
              {"verdict", to_string(d.verdict)},
              {"actor", to_string(d.actor)},
              {"at", d.at_ms},
              {"score", d.score}};
}

Decision decode_decision(const json& j) {
  try {
    Decision d;
    d.template_node = NodeId{j.at("template").get<std::uint64_t>()};
    d.target_node = NodeId{j.at("target").get<std::uint64_t>()};
    const auto verdict = j.at("verdict").get<std::string>();
    if (verdict != "accept" && verdict != "reject") bad_request("verdict must be accept or reject");
    d.verdict = verdict == "accept" ? Verdict::Accept : Verdict::Reject;
    const auto actor = j.value("actor", std::string("user"));
    if (actor != "user" && actor != "auto") bad_request("actor must be user or auto");
    d.actor = actor == "user" ? Actor::User : Actor::Auto;
    d.at_ms = j.value("at", std::int64_t{0});
    d.score = j.value("score", 0.0);
    return d;
  } catch (const nlohmann::json::exception& e) {
    bad_request(std::string("malformed decision: ") + e.what());
  }
}

json encode(const NodeMap& m) {
  json out = json::array();
  for (const auto& [t, x] : m) out.push_back(node_pair(t, x));
  return out;
}

NodeMap decode_node_map(const json& j) {
  NodeMap m;
  const auto add = [&](std::uint64_t t, std::uint64_t x) {
    if (!m.emplace(NodeId{t}, NodeId{x}).second) bad_request("node " + std::to_string(t) + " mapped twice");
  };
  try {
    if (j.is_array()) {
      for (const auto& p : j) add(p.at(0).get<std::uint64_t>(), p.at(1).get<std::uint64_t>());
    } else if (j.is_object()) {
      for (const auto& [k, v] : j.items()) add(std::stoull(k), v.get<std::uint64_t>());
    } else {
      bad_request("mapping must be [[template, target], ...] or {\"template\": target}");
    }
  } catch (const nlohmann::json::exception& e) {
    bad_request(std::string("malformed mapping: ") + e.what());
  } catch (const std::logic_error&) {
    bad_request("malformed mapping key");
  }
  return m;
}

json encode(const Snippet& s, const GraphView& view) {
  const auto& g = view.graph();
  json nodes = json::array();
  for (auto n : s.nodes) {
    nodes.push_back(json{{"id", n.value}, {"kind", to_string(g.kind_of(g.index_of(n)))}});
  }
  json edges = json::array();
  for (auto ei : s.edges) {
    const auto& e = g.edge(ei);
    edges.push_back(json{{"edge", ei},
                         {"source", g.id_of(e.source).value},
                         {"target", g.id_of(e.target).value},
                         {"channel", g.channels().code(e.channel)},
                         {"time", view.effective_time(e)}});
  }
  return json{{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

json encode(const CandidatePair& c, const MatchSession& session) {
  json anchors = json::array();
  for (auto a : c.anchors) anchors.push_back(a.value);
  return json{{"frontier", c.frontier.value},
              {"candidate", c.candidate.value},
              {"anchors", std::move(anchors)},
              {"score", encode(c.score)},
              {"template_evidence", encode(c.template_evidence, session.template_view())},
              {"target_evidence", encode(c.target_evidence, session.target_view())}};
}

json encode(const SeedSignature& sig, const ChannelRegistry& registry) {
  json nodes = json::array();
  for (std::size_t i = 0; i < sig.nodes.size(); ++i) {
    nodes.push_back(json{{"id", sig.nodes[i].value}, {"kind", to_string(sig.kinds[i])}});
  }
  json required = json::array();
  for (const auto& r : sig.required) {
    json entries = json::array();
    for (const auto& e : r.profile.entries) {
      entries.push_back(json{{"channel", registry.code(e.channel)},
                             {"direction", to_string(e.direction)},
                             {"count", e.count},
                             {"weight_sum", e.weight_sum}});
    }
    required.push_back(json{{"pair", json::array({sig.nodes[r.first].value, sig.nodes[r.second].value})},
                            {"entries", std::move(entries)},
                            {"times", r.profile.times}});
  }
  return json{{"nodes", std::move(nodes)},
              {"rarest_channel", registry.code(sig.rarest_channel)},
              {"required", std::move(required)}};
}

json encode(const SeedAssignment& s) {
  json targets = json::array();
  for (auto t : s.targets) targets.push_back(t.value);
  return json{{"targets", std::move(targets)}, {"score", s.score}};
}

json encode(const CandidateRanking& r) {
  return json{{"index", r.index},
              {"score", r.score},
              {"mapping_score", r.mapping_score},
              {"coverage", r.coverage},
              {"status", to_string(r.status)},
              {"mapping", encode(r.mapping)}};
}

}  // namespace tgm::json
