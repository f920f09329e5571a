#pragma once

#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "tgm/matcher.hpp"

namespace tgm {

// Graph ids a session refers to inside a workspace.
struct SessionRefs {
  std::string id;
  std::string template_graph;
  std::string target_graph;
};

// Seed, config, both view configs and the decision log. Replaying the log on
// import rebuilds the session state.
nlohmann::json export_session(const MatchSession& session, const SessionRefs& refs);

SessionRefs read_session_refs(const nlohmann::json& doc);

// Throws BadRequest on malformed documents, or whatever decide() throws when
// the log does not replay against the supplied graphs.
MatchSession import_session(const nlohmann::json& doc, std::shared_ptr<const TemporalMultigraph> tmpl,
                            std::shared_ptr<const TemporalMultigraph> target);

// Canonical description of (S, T, M, rejected, log). Two sessions with equal
// state produce byte-identical dumps.
nlohmann::json session_summary(const MatchSession& session);

}  // namespace tgm
