#include "tgm/service/workspace.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "tgm/csv_loader.hpp"
#include "tgm/error.hpp"
#include "tgm/json_codec.hpp"

namespace tgm::service {

namespace fs = std::filesystem;

nlohmann::json encode(const WorkspaceConfig& cfg) {
  return nlohmann::json{{"channels", cfg.registry.codes()},
                        {"similarity", json::encode(cfg.similarity)},
                        {"upload_cap", cfg.upload_cap}};
}

WorkspaceConfig decode_workspace_config(const nlohmann::json& j) {
  WorkspaceConfig cfg;
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config.json must hold an object");
  try {
    if (j.contains("channels")) cfg.registry = ChannelRegistry(j.at("channels").get<std::vector<std::string>>());
    if (j.contains("upload_cap")) cfg.upload_cap = j.at("upload_cap").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("bad config.json: ") + e.what());
  }
  cfg.similarity = json::decode_similarity(j.value("similarity", nlohmann::json::object()));
  return cfg;
}

void write_file_atomic(const fs::path& path, std::string_view contents) {
  fs::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorCode::Io, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot rename " + tmp.string() + ": " + ec.message());
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

bool valid_graph_id(std::string_view id) {
  return !id.empty() && id.size() <= 128 && std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-' ||
           c == '.';
  }) && id != "." && id != "..";
}

Workspace::Workspace(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_ / "graphs");
  fs::create_directories(root_ / "sessions");
  const auto cfg_path = root_ / "config.json";
  if (fs::exists(cfg_path)) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_text_file(cfg_path));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::InvalidConfig, std::string("config.json is not JSON: ") + e.what());
    }
    config_ = decode_workspace_config(j);
  } else {
    write_file_atomic(cfg_path, encode(config_).dump(2) + "\n");
  }
  load_all();
}

void Workspace::load_all() {
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root_ / "graphs")) {
    if (entry.is_directory() && valid_graph_id(entry.path().filename().string())) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& dir : dirs) {
    if (!fs::exists(dir / "edges.csv")) continue;
    std::optional<fs::path> nodes;
    if (fs::exists(dir / "nodes.csv")) nodes = dir / "nodes.csv";
    auto loaded = load_graph_files(dir / "edges.csv", nodes, config_.registry);
    GraphEntry entry{dir.filename().string(), loaded.graph, ViewConfig::all(config_.registry), loaded.warnings};
    if (fs::exists(dir / "view.json")) {
      entry.view = json::decode_view(nlohmann::json::parse(read_text_file(dir / "view.json")), config_.registry);
    }
    GraphView check(entry.graph, entry.view);
    graphs_.emplace(entry.id, std::move(entry));
  }

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(root_ / "sessions")) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    const auto doc = nlohmann::json::parse(read_text_file(file));
    auto refs = read_session_refs(doc);
    auto slot = std::make_shared<Slot>();
    slot->session = std::make_unique<MatchSession>(
        tgm::import_session(doc, graphs_.at(refs.template_graph).graph, graphs_.at(refs.target_graph).graph));
    if (refs.id.size() > 1 && refs.id[0] == 's') {
      try {
        next_session_ = std::max<std::uint64_t>(next_session_, std::stoull(refs.id.substr(1)) + 1);
      } catch (const std::logic_error&) {
      }
    }
    slot->refs = std::move(refs);
    sessions_.emplace(slot->refs.id, std::move(slot));
  }
}

GraphEntry Workspace::put_graph(const std::string& id, std::string edges_csv, std::optional<std::string> nodes_csv) {
  if (!valid_graph_id(id)) throw Error(ErrorCode::BadRequest, "graph id must match [A-Za-z0-9_.-]+: '" + id + "'");
  const auto bytes = edges_csv.size() + (nodes_csv ? nodes_csv->size() : 0);
  if (bytes > config_.upload_cap) {
    throw Error(ErrorCode::PayloadTooLarge, "upload of " + std::to_string(bytes) + " bytes exceeds the cap of " +
                                                std::to_string(config_.upload_cap));
  }
  auto loaded = load_graph(edges_csv, nodes_csv ? std::optional<std::string_view>{*nodes_csv} : std::nullopt,
                           config_.registry);

  std::unique_lock lock(mutex_);
  const auto dir = graph_dir(id);
  auto existing = graphs_.find(id);
  const bool in_use = std::any_of(sessions_.begin(), sessions_.end(), [&](const auto& s) {
    return s.second->refs.template_graph == id || s.second->refs.target_graph == id;
  });
  if (in_use) {
    const bool same = read_text_file(dir / "edges.csv") == edges_csv &&
                      (fs::exists(dir / "nodes.csv") ? nodes_csv && read_text_file(dir / "nodes.csv") == *nodes_csv
                                                     : !nodes_csv);
    if (!same) throw Error(ErrorCode::Conflict, "graph '" + id + "' is used by a session and cannot change");
    return existing->second;
  }

  GraphEntry entry{id, loaded.graph, ViewConfig::all(config_.registry), std::move(loaded.warnings)};
  if (existing != graphs_.end()) entry.view = existing->second.view;
  write_file_atomic(dir / "edges.csv", edges_csv);
  if (nodes_csv) {
    write_file_atomic(dir / "nodes.csv", *nodes_csv);
  } else {
    fs::remove(dir / "nodes.csv");
  }
  write_file_atomic(dir / "view.json", json::encode(entry.view, config_.registry).dump(2) + "\n");
  graphs_[id] = entry;
  return entry;
}

void Workspace::remove_graph(const std::string& id) {
  std::unique_lock lock(mutex_);
  if (!graphs_.contains(id)) throw Error(ErrorCode::NotFound, "no graph '" + id + "'");
  for (const auto& [sid, slot] : sessions_) {
    if (slot->refs.template_graph == id || slot->refs.target_graph == id) {
      throw Error(ErrorCode::Conflict, "graph '" + id + "' is used by session " + sid);
    }
  }
  graphs_.erase(id);
  fs::remove_all(graph_dir(id));
}

std::vector<GraphEntry> Workspace::graphs() const {
  std::shared_lock lock(mutex_);
  std::vector<GraphEntry> out;
  for (const auto& [id, entry] : graphs_) out.push_back(entry);
  return out;
}

GraphEntry Workspace::graph(const std::string& id) const {
  std::shared_lock lock(mutex_);
  auto it = graphs_.find(id);
  if (it == graphs_.end()) throw Error(ErrorCode::NotFound, "no graph '" + id + "'");
  return it->second;
}

GraphEntry Workspace::set_view(const std::string& id, const ViewConfig& view) {
  std::unique_lock lock(mutex_);
  auto it = graphs_.find(id);
  if (it == graphs_.end()) throw Error(ErrorCode::NotFound, "no graph '" + id + "'");
  GraphView check(it->second.graph, view);
  write_file_atomic(graph_dir(id) / "view.json", json::encode(view, config_.registry).dump(2) + "\n");
  it->second.view = view;
  return it->second;
}

std::string Workspace::create_session(const std::string& template_id, const std::string& target_id,
                                      std::optional<NodeMap> seed, std::optional<SimilarityConfig> cfg) {
  const auto tmpl = view(template_id);
  const auto target = view(target_id);
  const auto sim = cfg.value_or(config_.similarity);
  if (!seed) {
    const auto sig = derive_seed_signature(tmpl);
    const auto seeds = find_seeds(target, sig, sim, 1);
    if (seeds.empty()) throw Error(ErrorCode::NotFound, "no seed for '" + template_id + "' in '" + target_id + "'");
    seed = seeds.front().mapping(sig);
  }
  auto slot = std::make_shared<Slot>();
  slot->session = std::make_unique<MatchSession>(tmpl, target, *seed, sim);

  std::unique_lock lock(mutex_);
  if (!graphs_.contains(template_id) || !graphs_.contains(target_id)) {
    throw Error(ErrorCode::NotFound, "graph removed while creating the session");
  }
  slot->refs = SessionRefs{"s" + std::to_string(next_session_++), template_id, target_id};
  persist_session(*slot);
  const auto id = slot->refs.id;
  sessions_.emplace(id, std::move(slot));
  return id;
}

std::vector<std::string> Workspace::session_ids() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, slot] : sessions_) out.push_back(id);
  return out;
}

std::string Workspace::import_session(const nlohmann::json& doc) {
  auto refs = read_session_refs(doc);
  if (!valid_graph_id(refs.id)) throw Error(ErrorCode::BadRequest, "bad session id '" + refs.id + "'");
  auto slot = std::make_shared<Slot>();
  slot->session = std::make_unique<MatchSession>(
      tgm::import_session(doc, graph(refs.template_graph).graph, graph(refs.target_graph).graph));
  slot->refs = refs;
  std::unique_lock lock(mutex_);
  persist_session(*slot);
  sessions_[refs.id] = std::move(slot);
  return refs.id;
}

std::shared_ptr<Workspace::Slot> Workspace::session_slot(const std::string& id) const {
  std::shared_lock lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::NotFound, "no session '" + id + "'");
  return it->second;
}

nlohmann::json Workspace::export_session(const std::string& id) const {
  return read_session(id, [](const MatchSession& s, const SessionRefs& refs) { return tgm::export_session(s, refs); });
}

void Workspace::persist_session(const Slot& slot) const {
  write_file_atomic(root_ / "sessions" / (slot.refs.id + ".json"),
                    tgm::export_session(*slot.session, slot.refs).dump(2) + "\n");
}

}  // namespace tgm::service
