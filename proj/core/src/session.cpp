#include <algorithm>
#include <chrono>
#include <string>

#include "ranking.hpp"
#include "tgm/error.hpp"
#include "tgm/matcher.hpp"

namespace tgm {

std::string_view to_string(Verdict v) { return v == Verdict::Accept ? "accept" : "reject"; }
std::string_view to_string(Actor a) { return a == Actor::User ? "user" : "auto"; }

std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Complete: return "complete";
    case RunStatus::Exhausted: return "exhausted";
    case RunStatus::IterationCap: return "iteration_cap";
  }
  return "unknown";
}

std::int64_t wall_clock_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

MatchSession::MatchSession(GraphView tmpl, GraphView target, const NodeMap& seed, SimilarityConfig cfg, Clock clock)
    : tmpl_(std::move(tmpl)), target_(std::move(target)), cfg_(cfg), clock_(std::move(clock)), seed_(seed) {
  cfg_.validate();
  if (!clock_) clock_ = wall_clock_ms;
  if (tmpl_.graph().channels() != target_.graph().channels()) {
    throw Error(ErrorCode::IncompatibleRegistry, "template and target use different channel registries");
  }
  if (seed_.empty()) throw Error(ErrorCode::EmptyMapping, "seed mapping is empty");

  const auto& tg = tmpl_.graph();
  const auto& xg = target_.graph();
  map_.assign(tg.node_count(), -1);
  for (const auto& [t, x] : seed_) {
    const auto ti = tg.index_of(t);
    const auto xi = xg.index_of(x);
    if (tg.kind_of(ti) != xg.kind_of(xi)) {
      throw Error(ErrorCode::KindMismatch, "seed maps node " + std::to_string(t.value) + " (" +
                                               std::string(to_string(tg.kind_of(ti))) + ") to node " +
                                               std::to_string(x.value) + " (" +
                                               std::string(to_string(xg.kind_of(xi))) + ")");
    }
    if (!image_.insert(xi).second) {
      throw Error(ErrorCode::NotInjective, "seed maps two template nodes to " + std::to_string(x.value));
    }
    map_[ti] = xi;
  }
  matched_count_ = seed_.size();
  const auto now = clock_();
  for (const auto& [t, x] : seed_) log_.push_back(Decision{t, x, Verdict::Accept, Actor::User, now, 1.0});
}

std::vector<NodeId> MatchSession::matched() const {
  std::vector<NodeId> out;
  for (NodeIndex i = 0; i < map_.size(); ++i) {
    if (map_[i] >= 0) out.push_back(tmpl_.graph().id_of(i));
  }
  return out;
}

std::vector<NodeId> MatchSession::unmatched() const {
  std::vector<NodeId> out;
  for (NodeIndex i = 0; i < map_.size(); ++i) {
    if (map_[i] < 0) out.push_back(tmpl_.graph().id_of(i));
  }
  return out;
}

NodeMap MatchSession::mapping() const {
  NodeMap out;
  for (NodeIndex i = 0; i < map_.size(); ++i) {
    if (map_[i] >= 0) out.emplace(tmpl_.graph().id_of(i), target_.graph().id_of(static_cast<NodeIndex>(map_[i])));
  }
  return out;
}

std::set<std::pair<NodeId, NodeId>> MatchSession::rejected() const {
  std::set<std::pair<NodeId, NodeId>> out;
  for (const auto& [t, x] : rejected_) out.emplace(tmpl_.graph().id_of(t), target_.graph().id_of(x));
  return out;
}

std::vector<NodeIndex> MatchSession::anchors_of(NodeIndex frontier) const {
  auto neighbors = detail::visible_neighbors(tmpl_, frontier);
  std::erase_if(neighbors, [&](NodeIndex n) { return map_[n] < 0; });
  return neighbors;
}

SimilarityScore MatchSession::score_indices(NodeIndex frontier, NodeIndex candidate,
                                            const std::vector<NodeIndex>& anchors) const {
  SimilarityScore mean;
  if (anchors.empty()) return mean;
  for (NodeIndex a : anchors) {
    const auto tb = detail::bundle_at(tmpl_, a, frontier);
    const auto xb = detail::bundle_at(target_, static_cast<NodeIndex>(map_[a]), candidate);
    const auto s = bundle_similarity(tb, xb, cfg_);
    mean.total += s.total;
    mean.presence += s.presence;
    mean.count += s.count;
    mean.temporal += s.temporal;
  }
  const auto n = static_cast<double>(anchors.size());
  mean.total /= n;
  mean.presence /= n;
  mean.count /= n;
  mean.temporal /= n;
  return mean;
}

SimilarityScore MatchSession::score_pair(NodeId frontier, NodeId candidate) const {
  const auto f = tmpl_.graph().index_of(frontier);
  const auto c = target_.graph().index_of(candidate);
  return score_indices(f, c, anchors_of(f));
}

std::vector<MatchSession::Scored> MatchSession::score_all() const {
  const auto& tg = tmpl_.graph();
  const auto& xg = target_.graph();
  std::vector<Scored> out;
  for (NodeIndex f = 0; f < map_.size(); ++f) {
    if (map_[f] >= 0) continue;
    const auto anchors = anchors_of(f);
    if (anchors.empty()) continue;

    std::vector<BundleProfile> template_profiles;
    template_profiles.reserve(anchors.size());
    for (NodeIndex a : anchors) template_profiles.push_back(profile_of(detail::bundle_at(tmpl_, a, f)));

    std::vector<NodeIndex> candidates;
    for (NodeIndex a : anchors) {
      const auto n = detail::visible_neighbors(target_, static_cast<NodeIndex>(map_[a]));
      candidates.insert(candidates.end(), n.begin(), n.end());
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    for (NodeIndex c : candidates) {
      if (xg.kind_of(c) != tg.kind_of(f) || image_.contains(c) || rejected_.contains({f, c})) continue;
      SimilarityScore mean;
      for (std::size_t i = 0; i < anchors.size(); ++i) {
        const auto xb = detail::bundle_at(target_, static_cast<NodeIndex>(map_[anchors[i]]), c);
        const auto s = profile_similarity(template_profiles[i], profile_of(xb), cfg_);
        mean.total += s.total;
        mean.presence += s.presence;
        mean.count += s.count;
        mean.temporal += s.temporal;
      }
      const auto n = static_cast<double>(anchors.size());
      out.push_back({f, c, {mean.total / n, mean.presence / n, mean.count / n, mean.temporal / n}});
    }
  }
  // Node indices follow id order, so index comparison is id comparison.
  detail::rank_with_ties(
      out, [](const Scored& s) { return s.score.total; },
      [](const Scored& a, const Scored& b) { return std::pair{a.frontier, a.candidate} < std::pair{b.frontier, b.candidate}; },
      cfg_.tie_epsilon);
  return out;
}

Snippet MatchSession::snippet(const GraphView& view, std::vector<NodeIndex> nodes) const {
  const auto& g = view.graph();
  std::sort(nodes.begin(), nodes.end());
  Snippet s;
  for (NodeIndex n : nodes) {
    s.nodes.push_back(g.id_of(n));
    for (const auto& entry : g.incident(n)) {
      if (entry.neighbor < n || !std::binary_search(nodes.begin(), nodes.end(), entry.neighbor)) continue;
      if (view.visible(entry.edge)) s.edges.push_back(entry.edge);
    }
  }
  std::sort(s.edges.begin(), s.edges.end());
  return s;
}

std::vector<CandidatePair> MatchSession::propose(std::size_t k) const {
  auto scored = score_all();
  if (scored.size() > k) scored.resize(k);
  std::vector<NodeIndex> matched_t;
  std::vector<NodeIndex> matched_x;
  for (NodeIndex i = 0; i < map_.size(); ++i) {
    if (map_[i] < 0) continue;
    matched_t.push_back(i);
    matched_x.push_back(static_cast<NodeIndex>(map_[i]));
  }
  std::vector<CandidatePair> out;
  out.reserve(scored.size());
  for (const auto& s : scored) {
    CandidatePair p;
    p.frontier = tmpl_.graph().id_of(s.frontier);
    p.candidate = target_.graph().id_of(s.candidate);
    p.score = s.score;
    for (NodeIndex a : anchors_of(s.frontier)) p.anchors.push_back(tmpl_.graph().id_of(a));
    auto tn = matched_t;
    tn.push_back(s.frontier);
    auto xn = matched_x;
    xn.push_back(s.candidate);
    p.template_evidence = snippet(tmpl_, std::move(tn));
    p.target_evidence = snippet(target_, std::move(xn));
    out.push_back(std::move(p));
  }
  return out;
}

void MatchSession::decide(NodeId template_node, NodeId target_node, Verdict verdict, Actor actor,
                          std::optional<std::int64_t> at_ms, std::optional<double> score) {
  const auto ti = tmpl_.graph().find(template_node);
  const auto xi = target_.graph().find(target_node);
  if (!ti || !xi) {
    throw Error(ErrorCode::UnknownPair, "pair (" + std::to_string(template_node.value) + ", " +
                                            std::to_string(target_node.value) + ") names an unknown node");
  }
  const std::string pair_text =
      "(" + std::to_string(template_node.value) + ", " + std::to_string(target_node.value) + ")";
  if (!score) score = score_indices(*ti, *xi, anchors_of(*ti)).total;

  if (verdict == Verdict::Accept) {
    if (map_[*ti] >= 0) throw Error(ErrorCode::AlreadyMatched, "template node already matched in " + pair_text);
    if (image_.contains(*xi)) throw Error(ErrorCode::TargetTaken, "target node already mapped in " + pair_text);
    if (tmpl_.graph().kind_of(*ti) != target_.graph().kind_of(*xi)) {
      throw Error(ErrorCode::KindMismatch, "kinds differ in " + pair_text);
    }
    if (rejected_.contains({*ti, *xi})) {
      if (actor == Actor::Auto) throw Error(ErrorCode::PairRejected, "pair was rejected earlier: " + pair_text);
      rejected_.erase({*ti, *xi});
    }
    map_[*ti] = *xi;
    image_.insert(*xi);
    ++matched_count_;
  } else {
    if (map_[*ti] == static_cast<std::int64_t>(*xi)) {
      throw Error(ErrorCode::AlreadyMatched, "cannot reject the accepted pair " + pair_text);
    }
    rejected_.insert({*ti, *xi});
  }
  log_.push_back(Decision{template_node, target_node, verdict, actor, at_ms ? *at_ms : clock_(), *score});
}

RunStatus MatchSession::run_auto(std::size_t max_iterations) {
  for (std::size_t i = 0; i < max_iterations; ++i) {
    if (unmatched_count() == 0) return RunStatus::Complete;
    const auto scored = score_all();
    if (scored.empty()) return RunStatus::Exhausted;
    const auto& top = scored.front();
    const auto verdict = top.score.total >= cfg_.accept_threshold ? Verdict::Accept : Verdict::Reject;
    decide(tmpl_.graph().id_of(top.frontier), target_.graph().id_of(top.candidate), verdict, Actor::Auto,
           std::nullopt, top.score.total);
  }
  return unmatched_count() == 0 ? RunStatus::Complete : RunStatus::IterationCap;
}

MatchSession init_session(GraphView tmpl, GraphView target, const NodeMap& seed, SimilarityConfig cfg) {
  return MatchSession(std::move(tmpl), std::move(target), seed, cfg);
}

std::string_view to_string(CandidateStatus s) {
  switch (s) {
    case CandidateStatus::Complete: return "complete";
    case CandidateStatus::Exhausted: return "exhausted";
    case CandidateStatus::IterationCap: return "iteration_cap";
    case CandidateStatus::NoSeed: return "no_seed";
  }
  return "unknown";
}

std::vector<CandidateRanking> rank_candidates(const GraphView& tmpl, const std::vector<GraphView>& candidates,
                                              const SimilarityConfig& cfg) {
  cfg.validate();
  std::vector<CandidateRanking> out(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) out[i].index = i;

  std::optional<SeedSignature> sig;
  try {
    sig = derive_seed_signature(tmpl);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoVisibleEdges) throw;
  }
  const auto template_nodes = static_cast<double>(tmpl.graph().node_count());

  for (std::size_t i = 0; sig && i < candidates.size(); ++i) {
    const auto& cand = candidates[i];
    if (cand.graph().channels() != tmpl.graph().channels()) continue;
    const auto seeds = find_seeds(cand, *sig, cfg, 1);
    if (seeds.empty()) continue;
    MatchSession session(tmpl, cand, seeds.front().mapping(*sig), cfg);
    const auto cap = session.unmatched_count() * (cand.graph().node_count() + 1) + 1;
    const auto status = session.run_auto(cap);
    auto& r = out[i];
    r.status = status == RunStatus::Complete    ? CandidateStatus::Complete
               : status == RunStatus::Exhausted ? CandidateStatus::Exhausted
                                                : CandidateStatus::IterationCap;
    r.mapping = session.mapping();
    r.mapping_score = mapping_score(tmpl, cand, r.mapping, cfg);
    r.coverage = static_cast<double>(session.matched_count()) / template_nodes;
    r.score = r.mapping_score * r.coverage;
  }
  detail::rank_with_ties(
      out, [](const CandidateRanking& r) { return r.score; },
      [](const CandidateRanking& a, const CandidateRanking& b) { return a.index < b.index; }, cfg.tie_epsilon);
  return out;
}

}  // namespace tgm
