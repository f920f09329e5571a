#include "tgm/tools/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "tgm/error.hpp"
#include "tgm/json_codec.hpp"
#include "tgm/service/http_api.hpp"
#include "tgm/service/workspace.hpp"

namespace tgm::cli {

namespace {

using nlohmann::json;
namespace codec = tgm::json;
using service::Workspace;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::pair<NodeId, NodeId> parse_pair(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("expected TEMPLATE:TARGET, got '" + text + "'");
  try {
    std::size_t a = 0;
    std::size_t b = 0;
    const auto t = std::stoull(text.substr(0, colon), &a);
    const auto x = std::stoull(text.substr(colon + 1), &b);
    if (a != colon || b != text.size() - colon - 1) throw std::invalid_argument(text);
    return {NodeId{t}, NodeId{x}};
  } catch (const std::logic_error&) {
    throw UsageError("expected TEMPLATE:TARGET node ids, got '" + text + "'");
  }
}

NodeMap parse_seed(const std::vector<std::string>& items) {
  NodeMap seed;
  for (const auto& item : items) {
    const auto [t, x] = parse_pair(item);
    if (!seed.emplace(t, x).second) throw UsageError("template node " + std::to_string(t.value) + " seeded twice");
  }
  return seed;
}

std::string read_file(const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) throw Error(ErrorCode::Io, "cannot read '" + path + "'");
  return service::read_text_file(path);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << v;
  return os.str();
}

void print_stats(std::ostream& out, const std::string& id, const ViewStats& s) {
  out << id << ": " << s.node_count << " nodes, " << s.visible_edges << " visible edges\n";
  for (const auto& [code, n] : s.per_channel) out << "  " << code << ": " << n << "\n";
  if (s.extent) out << "  time extent: [" << s.extent->begin << ", " << s.extent->end << "]\n";
}

void print_mapping(std::ostream& out, const NodeMap& m) {
  for (const auto& [t, x] : m) out << "  " << t.value << " -> " << x.value << "\n";
}

json session_brief(const MatchSession& s, const SessionRefs& refs) {
  return json{{"id", refs.id},
              {"template", refs.template_graph},
              {"target", refs.target_graph},
              {"matched_count", s.matched_count()},
              {"unmatched_count", s.unmatched_count()},
              {"mapping", codec::encode(s.mapping())}};
}

struct Options {
  std::string workspace;
  bool as_json = false;

  std::string id;
  std::string edges;
  std::string nodes;

  std::string tmpl;
  std::string target;
  std::size_t limit = 5;

  std::vector<std::string> seed;
  std::string session;
  std::vector<std::string> accept;
  std::vector<std::string> reject;
  bool automatic = false;
  std::optional<double> threshold;
  std::optional<std::size_t> max_iter;
  std::size_t k = 5;

  std::vector<std::string> candidates;
  std::string out_file;

  std::string host = "127.0.0.1";
  int port = 8080;
};

int cmd_load(Workspace& ws, const Options& o, std::ostream& out) {
  std::optional<std::string> nodes;
  if (!o.nodes.empty()) nodes = read_file(o.nodes);
  const auto entry = ws.put_graph(o.id, read_file(o.edges), std::move(nodes));
  if (o.as_json) {
    out << json{{"id", entry.id},
                {"nodes", entry.graph->node_count()},
                {"edges", entry.graph->edge_count()},
                {"warnings", entry.warnings}}
               .dump()
        << "\n";
  } else {
    out << "loaded " << entry.id << ": " << entry.graph->node_count() << " nodes, " << entry.graph->edge_count()
        << " edges\n";
    for (const auto& w : entry.warnings) out << "warning: " << w << "\n";
  }
  return 0;
}

int cmd_list(Workspace& ws, const Options& o, std::ostream& out) {
  json list = json::array();
  for (const auto& e : ws.graphs()) {
    if (o.as_json) {
      list.push_back({{"id", e.id}, {"nodes", e.graph->node_count()}, {"edges", e.graph->edge_count()}});
    } else {
      out << e.id << "\t" << e.graph->node_count() << " nodes\t" << e.graph->edge_count() << " edges\n";
    }
  }
  json sessions = json::array();
  for (const auto& id : ws.session_ids()) {
    if (o.as_json) {
      sessions.push_back(ws.read_session(id, session_brief));
    } else {
      ws.read_session(id, [&](const MatchSession& s, const SessionRefs& r) {
        out << "session " << r.id << "\t" << r.template_graph << " -> " << r.target_graph << "\t" << s.matched_count()
            << "/" << s.template_view().graph().node_count() << " matched\n";
      });
    }
  }
  if (o.as_json) out << json{{"graphs", list}, {"sessions", sessions}}.dump() << "\n";
  return 0;
}

int cmd_stats(Workspace& ws, const Options& o, std::ostream& out) {
  const auto s = stats(ws.view(o.id));
  if (o.as_json) {
    out << codec::encode(s).dump() << "\n";
  } else {
    print_stats(out, o.id, s);
  }
  return 0;
}

int cmd_seeds(Workspace& ws, const Options& o, std::ostream& out) {
  const auto tmpl = ws.view(o.tmpl);
  const auto sig = derive_seed_signature(tmpl);
  const auto seeds = find_seeds(ws.view(o.target), sig, ws.config().similarity, o.limit);
  if (o.as_json) {
    json list = json::array();
    for (const auto& s : seeds) {
      auto j = codec::encode(s);
      j["mapping"] = codec::encode(s.mapping(sig));
      list.push_back(std::move(j));
    }
    out << json{{"signature", codec::encode(sig, tmpl.graph().channels())}, {"seeds", list}}.dump() << "\n";
    return 0;
  }
  out << "signature on channel " << tmpl.graph().channels().code(sig.rarest_channel) << ":";
  for (const auto& n : sig.nodes) out << " " << n.value;
  out << "\n";
  if (seeds.empty()) out << "no seeds found\n";
  for (const auto& s : seeds) {
    out << fmt(s.score) << "\n";
    print_mapping(out, s.mapping(sig));
  }
  return 0;
}

int cmd_match(Workspace& ws, const Options& o, std::ostream& out) {
  std::string id = o.session;
  if (id.empty()) {
    if (o.tmpl.empty() || o.target.empty()) throw UsageError("match needs --session or both --template and --target");
    std::optional<NodeMap> seed;
    if (!o.seed.empty()) seed = parse_seed(o.seed);
    auto cfg = ws.config().similarity;
    if (o.threshold) cfg.accept_threshold = *o.threshold;
    id = ws.create_session(o.tmpl, o.target, seed, cfg);
  } else if (o.threshold || !o.seed.empty()) {
    throw UsageError("--threshold and --seed only apply when creating a session");
  }

  std::vector<std::pair<std::pair<NodeId, NodeId>, Verdict>> decisions;
  for (const auto& a : o.accept) decisions.push_back({parse_pair(a), Verdict::Accept});
  for (const auto& r : o.reject) decisions.push_back({parse_pair(r), Verdict::Reject});

  std::optional<RunStatus> status;
  ws.write_session(id, [&](MatchSession& s, const SessionRefs&) {
    for (const auto& [p, v] : decisions) s.decide(p.first, p.second, v, Actor::User);
    if (o.automatic) {
      const auto cap = o.max_iter.value_or(s.unmatched_count() * (s.target_view().graph().node_count() + 1) + 1);
      status = s.run_auto(cap);
    }
  });

  return ws.read_session(id, [&](const MatchSession& s, const SessionRefs& refs) {
    const auto proposals = s.propose(o.k);
    if (o.as_json) {
      auto j = session_brief(s, refs);
      if (status) j["status"] = to_string(*status);
      json c = json::array();
      for (const auto& p : proposals) c.push_back(codec::encode(p, s));
      j["candidates"] = std::move(c);
      out << j.dump() << "\n";
      return 0;
    }
    out << "session " << refs.id << ": " << s.matched_count() << " matched, " << s.unmatched_count()
        << " unmatched";
    if (status) out << " (" << to_string(*status) << ")";
    out << "\n";
    print_mapping(out, s.mapping());
    if (!proposals.empty()) out << "candidates:\n";
    for (const auto& p : proposals) {
      out << "  " << p.frontier.value << ":" << p.candidate.value << "\t" << fmt(p.score.total) << "\n";
    }
    return 0;
  });
}

int cmd_compare(Workspace& ws, const Options& o, std::ostream& out) {
  std::vector<GraphView> views;
  for (const auto& c : o.candidates) views.push_back(ws.view(c));
  const auto ranking = rank_candidates(ws.view(o.tmpl), views, ws.config().similarity);
  if (o.as_json) {
    json list = json::array();
    for (const auto& r : ranking) {
      auto j = codec::encode(r);
      j["graph"] = o.candidates[r.index];
      list.push_back(std::move(j));
    }
    out << list.dump() << "\n";
    return 0;
  }
  std::size_t rank = 1;
  for (const auto& r : ranking) {
    out << rank++ << ". " << o.candidates[r.index] << "\t" << fmt(r.score) << "\tcoverage " << fmt(r.coverage) << "\t"
        << to_string(r.status) << "\n";
  }
  return 0;
}

int cmd_export(Workspace& ws, const Options& o, std::ostream& out) {
  const auto doc = ws.export_session(o.id).dump(2);
  if (o.out_file.empty()) {
    out << doc << "\n";
  } else {
    service::write_file_atomic(o.out_file, doc + "\n");
  }
  return 0;
}

int cmd_serve(Workspace& ws, const Options& o, std::ostream& out) {
  service::ApiServer server(ws);
  const int port = server.bind(o.host, o.port);
  if (port < 0) throw Error(ErrorCode::Io, "cannot bind " + o.host + ":" + std::to_string(o.port));
  out << "listening on http://" << o.host << ":" << port << "/api\n" << std::flush;
  return server.listen_after_bind() ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Temporal graph matching workspace", "tgm"};
  app.require_subcommand(1);
  app.add_option("--workspace,-w", o.workspace, "workspace root (default: $TGM_WORKSPACE or ./workspace)");

  auto* load = app.add_subcommand("load", "add or replace a graph from CSV files");
  load->add_option("--id", o.id, "graph id")->required();
  load->add_option("edges", o.edges, "edges CSV")->required();
  load->add_option("--nodes", o.nodes, "nodes CSV");

  auto* remove = app.add_subcommand("remove", "remove a graph");
  remove->add_option("id", o.id)->required();

  auto* list = app.add_subcommand("list", "list graphs and sessions");

  auto* stats_cmd = app.add_subcommand("stats", "view statistics of a graph");
  stats_cmd->add_option("id", o.id)->required();

  auto* seeds = app.add_subcommand("seeds", "find seed assignments of a template in a target");
  seeds->add_option("--template", o.tmpl)->required();
  seeds->add_option("--target", o.target)->required();
  seeds->add_option("--limit", o.limit)->check(CLI::PositiveNumber);

  auto* match = app.add_subcommand("match", "create or advance a match session");
  match->add_option("--template", o.tmpl);
  match->add_option("--target", o.target);
  match->add_option("--session", o.session, "continue an existing session");
  match->add_option("--seed", o.seed, "TEMPLATE:TARGET pairs; default is the best automatic seed")->delimiter(',');
  match->add_option("--accept", o.accept, "TEMPLATE:TARGET pairs to accept")->delimiter(',');
  match->add_option("--reject", o.reject, "TEMPLATE:TARGET pairs to reject")->delimiter(',');
  match->add_flag("--auto", o.automatic, "accept best candidates while they clear the threshold");
  match->add_option("--threshold", o.threshold, "auto-accept threshold for a new session")->check(CLI::Range(0.0, 1.0));
  match->add_option("--max-iter", o.max_iter)->check(CLI::PositiveNumber);
  match->add_option("--k", o.k, "candidates to show")->check(CLI::NonNegativeNumber);

  auto* compare = app.add_subcommand("compare", "rank candidate graphs against a template");
  compare->add_option("--template", o.tmpl)->required();
  compare->add_option("--candidates", o.candidates)->required()->delimiter(',');

  auto* exp = app.add_subcommand("export-session", "write a session document");
  exp->add_option("id", o.id)->required();
  exp->add_option("--out,-o", o.out_file);

  auto* serve = app.add_subcommand("serve", "run the HTTP API");
  serve->add_option("--port", o.port)->check(CLI::Range(0, 65535));
  serve->add_option("--host", o.host);

  for (auto* sub : {load, list, stats_cmd, seeds, match, compare}) {
    sub->add_flag("--json", o.as_json, "machine-readable output");
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  if (o.workspace.empty()) {
    const char* env = std::getenv("TGM_WORKSPACE");
    o.workspace = env && *env ? env : "workspace";
  }

  try {
    Workspace ws(o.workspace);
    if (*load) return cmd_load(ws, o, out);
    if (*remove) {
      ws.remove_graph(o.id);
      out << "removed " << o.id << "\n";
      return 0;
    }
    if (*list) return cmd_list(ws, o, out);
    if (*stats_cmd) return cmd_stats(ws, o, out);
    if (*seeds) return cmd_seeds(ws, o, out);
    if (*match) return cmd_match(ws, o, out);
    if (*compare) return cmd_compare(ws, o, out);
    if (*exp) return cmd_export(ws, o, out);
    if (*serve) return cmd_serve(ws, o, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace tgm::cli
