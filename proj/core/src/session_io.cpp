#include "tgm/session_io.hpp"

#include <memory>

#include "tgm/error.hpp"
#include "tgm/json_codec.hpp"

namespace tgm {

namespace {
constexpr const char* kFormat = "tgm-session/1";
}

nlohmann::json export_session(const MatchSession& session, const SessionRefs& refs) {
  const auto& registry = session.template_view().graph().channels();
  nlohmann::json log = nlohmann::json::array();
  for (const auto& d : session.log()) log.push_back(json::encode(d));
  return nlohmann::json{{"format", kFormat},
                        {"id", refs.id},
                        {"template", refs.template_graph},
                        {"target", refs.target_graph},
                        {"template_view", json::encode(session.template_view().config(), registry)},
                        {"target_view", json::encode(session.target_view().config(), registry)},
                        {"config", json::encode(session.config())},
                        {"seed", json::encode(session.seed())},
                        {"log", std::move(log)}};
}

SessionRefs read_session_refs(const nlohmann::json& doc) {
  if (!doc.is_object() || doc.value("format", std::string{}) != kFormat) {
    throw Error(ErrorCode::BadRequest, std::string("session document must declare format ") + kFormat);
  }
  try {
    return SessionRefs{doc.at("id").get<std::string>(), doc.at("template").get<std::string>(),
                       doc.at("target").get<std::string>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadRequest, std::string("malformed session document: ") + e.what());
  }
}

MatchSession import_session(const nlohmann::json& doc, std::shared_ptr<const TemporalMultigraph> tmpl,
                            std::shared_ptr<const TemporalMultigraph> target) {
  read_session_refs(doc);
  if (!doc.contains("log") || !doc.at("log").is_array() || !doc.contains("seed")) {
    throw Error(ErrorCode::BadRequest, "session document needs 'seed' and 'log'");
  }
  const auto& registry = tmpl->channels();
  GraphView tv(tmpl, json::decode_view(doc.value("template_view", nlohmann::json::object()), registry));
  GraphView xv(target, json::decode_view(doc.value("target_view", nlohmann::json::object()), target->channels()));
  const auto cfg = json::decode_similarity(doc.value("config", nlohmann::json::object()));
  const auto seed = json::decode_node_map(doc.at("seed"));

  std::vector<Decision> log;
  for (const auto& entry : doc.at("log")) log.push_back(json::decode_decision(entry));
  if (log.size() < seed.size()) throw Error(ErrorCode::BadRequest, "log is shorter than the seed");

  // Seed entries are stamped with their recorded time.
  auto seed_time = std::make_shared<std::optional<std::int64_t>>(log.empty() ? std::nullopt
                                                                             : std::optional{log.front().at_ms});
  MatchSession session(std::move(tv), std::move(xv), seed, cfg, [seed_time]() {
    return seed_time->has_value() ? **seed_time : wall_clock_ms();
  });
  seed_time->reset();

  for (std::size_t i = 0; i < seed.size(); ++i) {
    if (!(log[i] == session.log()[i])) {
      throw Error(ErrorCode::BadRequest, "log does not start with the seed decisions");
    }
  }
  for (std::size_t i = seed.size(); i < log.size(); ++i) {
    const auto& d = log[i];
    session.decide(d.template_node, d.target_node, d.verdict, d.actor, d.at_ms, d.score);
  }
  return session;
}

nlohmann::json session_summary(const MatchSession& session) {
  nlohmann::json matched = nlohmann::json::array();
  for (auto n : session.matched()) matched.push_back(n.value);
  nlohmann::json unmatched = nlohmann::json::array();
  for (auto n : session.unmatched()) unmatched.push_back(n.value);
  nlohmann::json rejected = nlohmann::json::array();
  for (const auto& [t, x] : session.rejected()) rejected.push_back(nlohmann::json::array({t.value, x.value}));
  nlohmann::json log = nlohmann::json::array();
  for (const auto& d : session.log()) log.push_back(json::encode(d));
  return nlohmann::json{{"matched", std::move(matched)},
                        {"unmatched", std::move(unmatched)},
                        {"mapping", json::encode(session.mapping())},
                        {"rejected", std::move(rejected)},
                        {"log", std::move(log)}};
}

}  // namespace tgm
