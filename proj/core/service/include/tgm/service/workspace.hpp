#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tgm/matcher.hpp"
#include "tgm/session_io.hpp"
#include "tgm/view.hpp"

namespace tgm::service {

struct WorkspaceConfig {
  ChannelRegistry registry = ChannelRegistry::defaults();
  SimilarityConfig similarity;
  std::uint64_t upload_cap = std::uint64_t{2} << 30;  // bytes per upload
};

nlohmann::json encode(const WorkspaceConfig& cfg);
WorkspaceConfig decode_workspace_config(const nlohmann::json& j);

struct GraphEntry {
  std::string id;
  std::shared_ptr<const TemporalMultigraph> graph;
  ViewConfig view;
  std::vector<std::string> warnings;

  GraphView as_view() const { return GraphView(graph, view); }
};

// Directory-backed store of graphs, their view configs, and match sessions.
//
// Layout under root:
//   config.json
//   graphs/<id>/edges.csv, nodes.csv, view.json
//   sessions/<id>.json
//
// Opening a root reloads every graph and replays every session log. Graph and
// session maps are guarded by one reader/writer lock; each session has its own
// mutex so writes to one session never block another.
class Workspace {
 public:
  explicit Workspace(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  const WorkspaceConfig& config() const { return config_; }

  // Adds or replaces a graph. Replacing a graph that sessions refer to is only
  // allowed with identical bytes. Throws BadRequest (bad id), PayloadTooLarge,
  // Conflict, and any loader error.
  GraphEntry put_graph(const std::string& id, std::string edges_csv, std::optional<std::string> nodes_csv);
  // Throws NotFound, Conflict (sessions still use it).
  void remove_graph(const std::string& id);
  std::vector<GraphEntry> graphs() const;
  // Throws NotFound.
  GraphEntry graph(const std::string& id) const;
  GraphView view(const std::string& id) const { return graph(id).as_view(); }
  GraphEntry set_view(const std::string& id, const ViewConfig& view);

  // Sessions snapshot the two graphs' current views. With no seed, the best
  // find_seeds result is used. Throws NotFound, NoVisibleEdges, plus
  // MatchSession's errors.
  std::string create_session(const std::string& template_id, const std::string& target_id,
                             std::optional<NodeMap> seed, std::optional<SimilarityConfig> cfg = std::nullopt);
  std::vector<std::string> session_ids() const;
  // Loads an exported document under its own id (replacing any session with
  // that id) and persists it.
  std::string import_session(const nlohmann::json& doc);

  // Runs fn(const MatchSession&, const SessionRefs&) under the session lock.
  template <typename Fn>
  auto read_session(const std::string& id, Fn&& fn) const {
    auto slot = session_slot(id);
    std::lock_guard lock(slot->mutex);
    return fn(std::as_const(*slot->session), std::as_const(slot->refs));
  }

  // Runs fn(MatchSession&, const SessionRefs&) under the session lock and
  // persists the session when its log grew, including when fn throws.
  template <typename Fn>
  auto write_session(const std::string& id, Fn&& fn) {
    auto slot = session_slot(id);
    std::lock_guard lock(slot->mutex);
    const auto before = slot->session->log().size();
    try {
      if constexpr (std::is_void_v<decltype(fn(*slot->session, std::as_const(slot->refs)))>) {
        fn(*slot->session, std::as_const(slot->refs));
        if (slot->session->log().size() != before) persist_session(*slot);
      } else {
        auto result = fn(*slot->session, std::as_const(slot->refs));
        if (slot->session->log().size() != before) persist_session(*slot);
        return result;
      }
    } catch (...) {
      if (slot->session->log().size() != before) persist_session(*slot);
      throw;
    }
  }

  nlohmann::json export_session(const std::string& id) const;

 private:
  struct Slot {
    mutable std::mutex mutex;
    SessionRefs refs;
    std::unique_ptr<MatchSession> session;
  };

  std::shared_ptr<Slot> session_slot(const std::string& id) const;
  void persist_session(const Slot& slot) const;
  void load_all();
  std::filesystem::path graph_dir(const std::string& id) const { return root_ / "graphs" / id; }

  std::filesystem::path root_;
  WorkspaceConfig config_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, GraphEntry> graphs_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
  std::uint64_t next_session_ = 1;
};

// Writes via a temporary file and rename so readers never see partial files.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_text_file(const std::filesystem::path& path);

bool valid_graph_id(std::string_view id);

}  // namespace tgm::service
