#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "tgm/similarity.hpp"
#include "tgm/view.hpp"

namespace tgm {

// A small rare motif of the template used to locate starting points in a target.
struct SeedSignature {
  struct RequiredBundle {
    std::size_t first;   // positions into `nodes`
    std::size_t second;
    BundleProfile profile;  // oriented nodes[first] -> nodes[second]
  };

  std::vector<NodeId> nodes;     // [endpoint_lo, endpoint_hi, shared non-persons...]
  std::vector<NodeKind> kinds;
  std::vector<RequiredBundle> required;
  ChannelId rarest_channel = 0;
  ChannelSet channels;  // every channel present in a required bundle
};

// Picks the rarest visible channel (ties: smallest code), the smallest node-id
// pair joined by it, and up to two shared non-Person neighbours of that pair.
// Throws NoVisibleEdges.
SeedSignature derive_seed_signature(const GraphView& tmpl);

struct SeedAssignment {
  std::vector<NodeId> targets;  // parallel to SeedSignature::nodes
  double score = 0.0;

  NodeMap mapping(const SeedSignature& sig) const;
};

// Ranked by mean required-bundle similarity; ties by ascending target tuple.
std::vector<SeedAssignment> find_seeds(const GraphView& target, const SeedSignature& sig,
                                       const SimilarityConfig& cfg, std::size_t limit);

enum class Verdict : std::uint8_t { Accept, Reject };
enum class Actor : std::uint8_t { User, Auto };
enum class RunStatus : std::uint8_t { Complete, Exhausted, IterationCap };

std::string_view to_string(Verdict v);
std::string_view to_string(Actor a);
std::string_view to_string(RunStatus s);

struct Decision {
  NodeId template_node;
  NodeId target_node;
  Verdict verdict = Verdict::Accept;
  Actor actor = Actor::User;
  std::int64_t at_ms = 0;  // wall clock, milliseconds since the Unix epoch
  double score = 0.0;

  friend bool operator==(const Decision&, const Decision&) = default;
};

/// Nodes plus the visible edges among them.
struct Snippet {
  std::vector<NodeId> nodes;
  std::vector<EdgeIndex> edges;
};

struct CandidatePair {
  NodeId frontier;
  std::vector<NodeId> anchors;
  NodeId candidate;
  SimilarityScore score;
  Snippet template_evidence;  // S + frontier in the template
  Snippet target_evidence;    // M(S) + candidate in the target
};

using Clock = std::function<std::int64_t()>;
std::int64_t wall_clock_ms();

// State of one seed-and-expand matching run between a template view and a
// target view.
//
// matched + unmatched partition the template's nodes, the mapping is injective
// and kind-preserving with domain = matched, and rejected pairs are never part
// of the mapping. All mutation goes through decide(); the log replays exactly.
// Not thread-safe: callers serialize writers.
class MatchSession {
 public:
  // Throws UnknownNode, KindMismatch, NotInjective, EmptyMapping (empty seed),
  // IncompatibleRegistry, InvalidConfig.
  MatchSession(GraphView tmpl, GraphView target, const NodeMap& seed, SimilarityConfig cfg,
               Clock clock = wall_clock_ms);

  const GraphView& template_view() const { return tmpl_; }
  const GraphView& target_view() const { return target_; }
  const SimilarityConfig& config() const { return cfg_; }
  const NodeMap& seed() const { return seed_; }

  std::vector<NodeId> matched() const;
  std::vector<NodeId> unmatched() const;
  std::size_t matched_count() const { return matched_count_; }
  std::size_t unmatched_count() const { return tmpl_.graph().node_count() - matched_count_; }
  NodeMap mapping() const;
  std::set<std::pair<NodeId, NodeId>> rejected() const;
  const std::vector<Decision>& log() const { return log_; }

  // Top k candidate pairs: descending total, ties within tie_epsilon by
  // template id then target id.
  std::vector<CandidatePair> propose(std::size_t k) const;

  // Similarity of (frontier, candidate) averaged over the frontier's anchors.
  // Zero scores when the frontier has no matched neighbour.
  SimilarityScore score_pair(NodeId frontier, NodeId candidate) const;

  // Throws UnknownPair, AlreadyMatched, TargetTaken, KindMismatch, PairRejected
  // (auto accept of a rejected pair).
  void decide(NodeId template_node, NodeId target_node, Verdict verdict, Actor actor,
              std::optional<std::int64_t> at_ms = std::nullopt,
              std::optional<double> score = std::nullopt);

  RunStatus run_auto(std::size_t max_iterations);

 private:
  struct PairHash {
    std::size_t operator()(std::pair<NodeIndex, NodeIndex> p) const noexcept {
      return std::hash<std::uint64_t>{}((std::uint64_t{p.first} << 32) | p.second);
    }
  };

  struct Scored {
    NodeIndex frontier;
    NodeIndex candidate;
    SimilarityScore score;
  };

  std::vector<Scored> score_all() const;
  SimilarityScore score_indices(NodeIndex frontier, NodeIndex candidate,
                                const std::vector<NodeIndex>& anchors) const;
  std::vector<NodeIndex> anchors_of(NodeIndex frontier) const;
  Snippet snippet(const GraphView& view, std::vector<NodeIndex> nodes) const;

  GraphView tmpl_;
  GraphView target_;
  SimilarityConfig cfg_;
  Clock clock_;
  NodeMap seed_;

  std::vector<std::int64_t> map_;  // template index -> target index or -1
  std::size_t matched_count_ = 0;
  std::unordered_set<NodeIndex> image_;
  std::unordered_set<std::pair<NodeIndex, NodeIndex>, PairHash> rejected_;
  std::vector<Decision> log_;
};

MatchSession init_session(GraphView tmpl, GraphView target, const NodeMap& seed, SimilarityConfig cfg);

enum class CandidateStatus : std::uint8_t { Complete, Exhausted, IterationCap, NoSeed };
std::string_view to_string(CandidateStatus s);

struct CandidateRanking {
  std::size_t index = 0;
  double score = 0.0;          // mapping_score * coverage
  double mapping_score = 0.0;
  double coverage = 0.0;       // matched / template nodes
  NodeMap mapping;
  CandidateStatus status = CandidateStatus::NoSeed;
};

// Runs signature -> best seed -> auto session on every candidate.
// Descending score, ties by candidate index.
std::vector<CandidateRanking> rank_candidates(const GraphView& tmpl, const std::vector<GraphView>& candidates,
                                              const SimilarityConfig& cfg);

}  // namespace tgm
