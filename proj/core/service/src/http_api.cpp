#include "tgm/service/http_api.hpp"

#include <httplib.h>

#include "tgm/analytics.hpp"
#include "tgm/error.hpp"
#include "tgm/json_codec.hpp"

namespace tgm::service {

using nlohmann::json;
namespace codec = tgm::json;

int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound:
    case ErrorCode::UnknownNode:
      return 404;
    case ErrorCode::Conflict:
    case ErrorCode::AlreadyMatched:
    case ErrorCode::TargetTaken:
    case ErrorCode::PairRejected:
      return 409;
    case ErrorCode::PayloadTooLarge:
      return 413;
    case ErrorCode::Io:
      return 500;
    default:
      return 400;
  }
}

namespace {

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  send_json(res, json{{"error", {{"code", code}, {"message", message}}}}, status);
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadRequest, std::string("body is not JSON: ") + e.what());
  }
}

std::optional<double> query_number(const httplib::Request& req, const char* key) {
  if (!req.has_param(key)) return std::nullopt;
  const auto text = req.get_param_value(key);
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::BadRequest, std::string("query parameter '") + key + "' must be a number");
  }
}

BinSpec bins_from(const GraphView& view, std::optional<double> width, std::optional<double> origin,
                  std::optional<double> from, std::optional<double> to) {
  BinSpec bins{width.value_or(default_bin_width(view)), origin.value_or(0.0), std::nullopt};
  if (from || to) {
    if (!from || !to) throw Error(ErrorCode::BadRequest, "'from' and 'to' go together");
    bins.span = TimeRange{*from, *to};
  }
  return bins;
}

BinSpec bins_from_query(const httplib::Request& req, const GraphView& view) {
  return bins_from(view, query_number(req, "bin_width"), query_number(req, "origin"), query_number(req, "from"),
                   query_number(req, "to"));
}

std::optional<double> body_number(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  if (!j.at(key).is_number()) throw Error(ErrorCode::BadRequest, std::string("'") + key + "' must be a number");
  return j.at(key).get<double>();
}

BinSpec bins_from_width(double width, const json& body) {
  BinSpec bins{width, body_number(body, "origin").value_or(0.0), std::nullopt};
  const auto from = body_number(body, "from");
  const auto to = body_number(body, "to");
  if (from && to) bins.span = TimeRange{*from, *to};
  return bins;
}

std::string body_string(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw Error(ErrorCode::BadRequest, std::string("'") + key + "' must be a string");
  }
  return j.at(key).get<std::string>();
}

std::uint64_t parse_node(const std::string& text) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::BadRequest, "node id must be a non-negative integer: '" + text + "'");
  }
}

json graph_json(const GraphEntry& e, const ChannelRegistry& registry) {
  return json{{"id", e.id},
              {"stats", codec::encode(stats(e.as_view()))},
              {"view", codec::encode(e.view, registry)},
              {"warnings", e.warnings}};
}

json session_json(const MatchSession& s, const SessionRefs& refs) {
  return json{{"id", refs.id},
              {"template", refs.template_graph},
              {"target", refs.target_graph},
              {"matched_count", s.matched_count()},
              {"unmatched_count", s.unmatched_count()},
              {"complete", s.unmatched_count() == 0},
              {"config", codec::encode(s.config())},
              {"state", session_summary(s)}};
}

using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

// Maps engine errors onto the JSON error body.
Handler guarded(Handler inner) {
  return [inner = std::move(inner)](const httplib::Request& req, httplib::Response& res) {
    try {
      inner(req, res);
    } catch (const Error& e) {
      send_error(res, http_status_for(e.code()), to_string(e.code()), e.what());
    } catch (const json::exception& e) {
      send_error(res, 400, "BadRequest", e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "Internal", e.what());
    }
  };
}

}  // namespace

ApiServer::ApiServer(Workspace& workspace) : workspace_(workspace), server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

bool ApiServer::listen_after_bind() { return server_->listen_after_bind(); }

void ApiServer::stop() {
  if (server_) server_->stop();
}

void ApiServer::install_routes() {
  auto& srv = *server_;
  auto& ws = workspace_;
  const auto& registry = ws.config().registry;

  srv.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (res.body.empty()) {
      send_error(res, res.status, res.status == 404 ? "NotFound" : "HttpError",
                 "no route for " + req.method + " " + req.path);
    }
  });

  srv.Get("/api/graphs", guarded([&](const httplib::Request&, httplib::Response& res) {
            json out = json::array();
            for (const auto& e : ws.graphs()) out.push_back(graph_json(e, registry));
            send_json(res, out);
          }));

  srv.Post("/api/graphs", guarded([&](const httplib::Request& req, httplib::Response& res) {
             const auto body = parse_body(req);
             std::optional<std::string> nodes;
             if (body.contains("nodes_csv") && !body.at("nodes_csv").is_null()) nodes = body_string(body, "nodes_csv");
             const auto entry = ws.put_graph(body_string(body, "id"), body_string(body, "edges_csv"), std::move(nodes));
             send_json(res, graph_json(entry, registry), 201);
           }));

  srv.Get(R"(/api/graphs/([^/]+))", guarded([&](const httplib::Request& req, httplib::Response& res) {
            send_json(res, graph_json(ws.graph(req.matches[1]), registry));
          }));

  srv.Delete(R"(/api/graphs/([^/]+))", guarded([&](const httplib::Request& req, httplib::Response& res) {
               ws.remove_graph(req.matches[1]);
               send_json(res, json{{"removed", req.matches[1]}});
             }));

  srv.Put(R"(/api/graphs/([^/]+)/view)", guarded([&](const httplib::Request& req, httplib::Response& res) {
            const auto cfg = codec::decode_view(parse_body(req), registry);
            send_json(res, graph_json(ws.set_view(req.matches[1], cfg), registry));
          }));

  srv.Get(R"(/api/graphs/([^/]+)/stats)", guarded([&](const httplib::Request& req, httplib::Response& res) {
            send_json(res, codec::encode(stats(ws.view(req.matches[1]))));
          }));

  srv.Get(R"(/api/graphs/([^/]+)/histogram)", guarded([&](const httplib::Request& req, httplib::Response& res) {
            const auto view = ws.view(req.matches[1]);
            send_json(res, codec::encode(activity_histogram(view, bins_from_query(req, view))));
          }));

  srv.Get(R"(/api/graphs/([^/]+)/scatter)", guarded([&](const httplib::Request& req, httplib::Response& res) {
            const auto view = ws.view(req.matches[1]);
            send_json(res, codec::encode(person_scatter(view), view.graph().channels()));
          }));

  srv.Get(R"(/api/graphs/([^/]+)/spatial)", guarded([&](const httplib::Request& req, httplib::Response& res) {
            send_json(res, codec::encode(spatial_distribution(ws.view(req.matches[1]))));
          }));

  srv.Get(R"(/api/graphs/([^/]+)/structure)", guarded([&](const httplib::Request& req, httplib::Response& res) {
            send_json(res, codec::encode(structure_projection(ws.view(req.matches[1]))));
          }));

  srv.Get(R"(/api/graphs/([^/]+)/persons/([^/]+)/channels)",
          guarded([&](const httplib::Request& req, httplib::Response& res) {
            const auto view = ws.view(req.matches[1]);
            send_json(res, codec::encode(person_channel_counts(view, NodeId{parse_node(req.matches[2])})));
          }));

  srv.Post("/api/heatmap", guarded([&](const httplib::Request& req, httplib::Response& res) {
             const auto body = parse_body(req);
             if (!body.contains("rows") || !body.at("rows").is_array()) {
               throw Error(ErrorCode::BadRequest, "'rows' must be a list of {graph, person}");
             }
             std::vector<std::pair<GraphView, NodeId>> rows;
             for (const auto& r : body.at("rows")) {
               rows.emplace_back(ws.view(body_string(r, "graph")), NodeId{r.at("person").get<std::uint64_t>()});
             }
             const auto channel = body_string(body, "channel");
             registry.require(channel);
             const auto width = body_number(body, "bin_width");
             if (!width && rows.empty()) throw Error(ErrorCode::BadRequest, "'bin_width' is required with no rows");
             const auto bins = rows.empty() ? bins_from_width(*width, body)
                                            : bins_from(rows.front().first, width, body_number(body, "origin"),
                                                        body_number(body, "from"), body_number(body, "to"));
             send_json(res, codec::encode(heatmap(rows, channel, bins)));
           }));

  srv.Post("/api/sessions", guarded([&](const httplib::Request& req, httplib::Response& res) {
             const auto body = parse_body(req);
             std::optional<NodeMap> seed;
             if (body.contains("seed") && !body.at("seed").is_null()) {
               seed = codec::decode_node_map(body.at("seed"));
             } else if (!body.value("auto_seed", false)) {
               throw Error(ErrorCode::BadRequest, "give a 'seed' mapping or set 'auto_seed': true");
             }
             std::optional<SimilarityConfig> cfg;
             if (body.contains("config")) cfg = codec::decode_similarity(body.at("config"), ws.config().similarity);
             const auto id = ws.create_session(body_string(body, "template"), body_string(body, "target"), seed, cfg);
             send_json(res, ws.read_session(id, session_json), 201);
           }));

  srv.Get("/api/sessions", guarded([&](const httplib::Request&, httplib::Response& res) {
            send_json(res, json(ws.session_ids()));
          }));

  srv.Get(R"(/api/sessions/([^/]+))", guarded([&](const httplib::Request& req, httplib::Response& res) {
            send_json(res, ws.read_session(req.matches[1], session_json));
          }));

  srv.Get(R"(/api/sessions/([^/]+)/export)", guarded([&](const httplib::Request& req, httplib::Response& res) {
            send_json(res, ws.export_session(req.matches[1]));
          }));

  srv.Get(R"(/api/sessions/([^/]+)/candidates)", guarded([&](const httplib::Request& req, httplib::Response& res) {
            const auto k = query_number(req, "k").value_or(10.0);
            if (!(k >= 1.0)) throw Error(ErrorCode::BadRequest, "'k' must be a positive integer");
            send_json(res, ws.read_session(req.matches[1], [&](const MatchSession& s, const SessionRefs&) {
              json out = json::array();
              for (const auto& c : s.propose(static_cast<std::size_t>(k))) out.push_back(codec::encode(c, s));
              return out;
            }));
          }));

  srv.Post(R"(/api/sessions/([^/]+)/decisions)", guarded([&](const httplib::Request& req, httplib::Response& res) {
             auto body = parse_body(req);
             if (!body.contains("actor")) body["actor"] = "user";
             const auto d = codec::decode_decision(body);
             send_json(res, ws.write_session(req.matches[1], [&](MatchSession& s, const SessionRefs& refs) {
               s.decide(d.template_node, d.target_node, d.verdict, d.actor);
               auto out = session_json(s, refs);
               out["decision"] = codec::encode(s.log().back());
               return out;
             }));
           }));

  srv.Post(R"(/api/sessions/([^/]+)/run-auto)", guarded([&](const httplib::Request& req, httplib::Response& res) {
             const auto body = parse_body(req);
             const auto max_iter = body_number(body, "max_iterations");
             if (max_iter && !(*max_iter >= 1.0)) throw Error(ErrorCode::BadRequest, "'max_iterations' must be >= 1");
             send_json(res, ws.write_session(req.matches[1], [&](MatchSession& s, const SessionRefs& refs) {
               const auto cap = max_iter ? static_cast<std::size_t>(*max_iter)
                                         : s.unmatched_count() * (s.target_view().graph().node_count() + 1) + 1;
               const auto status = s.run_auto(cap);
               auto out = session_json(s, refs);
               out["status"] = to_string(status);
               out["mapping_score"] =
                   s.matched_count() >= 2 ? mapping_score(s.template_view(), s.target_view(), s.mapping(), s.config()) : 0.0;
               return out;
             }));
           }));

  srv.Post("/api/compare", guarded([&](const httplib::Request& req, httplib::Response& res) {
             const auto body = parse_body(req);
             const auto tmpl_id = body_string(body, "template");
             if (!body.contains("candidates") || !body.at("candidates").is_array() || body.at("candidates").empty()) {
               throw Error(ErrorCode::BadRequest, "'candidates' must be a non-empty list of graph ids");
             }
             std::vector<std::string> ids;
             std::vector<GraphView> views;
             for (const auto& c : body.at("candidates")) {
               ids.push_back(c.get<std::string>());
               views.push_back(ws.view(ids.back()));
             }
             auto cfg = ws.config().similarity;
             if (body.contains("config")) cfg = codec::decode_similarity(body.at("config"), cfg);
             json out = json::array();
             for (const auto& r : rank_candidates(ws.view(tmpl_id), views, cfg)) {
               auto j = codec::encode(r);
               j["graph"] = ids[r.index];
               out.push_back(std::move(j));
             }
             send_json(res, out);
           }));
}

}  // namespace tgm::service
