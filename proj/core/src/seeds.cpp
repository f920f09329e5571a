#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>

#include "ranking.hpp"
#include "tgm/error.hpp"
#include "tgm/matcher.hpp"

namespace tgm {
namespace {

// Distinct neighbours of `n` reached through visible edges on `channels`.
std::vector<NodeIndex> channel_neighbors(const GraphView& view, NodeIndex n, ChannelSet channels) {
  const auto& g = view.graph();
  std::vector<NodeIndex> out;
  for (const auto& entry : g.incident(n)) {
    if (entry.neighbor == n || (!out.empty() && out.back() == entry.neighbor)) continue;
    const auto& e = g.edge(entry.edge);
    if (channels.contains(e.channel) && view.visible(e)) out.push_back(entry.neighbor);
  }
  return out;
}

}  // namespace

SeedSignature derive_seed_signature(const GraphView& tmpl) {
  const auto& g = tmpl.graph();
  const auto& registry = g.channels();
  std::vector<std::size_t> counts(registry.size(), 0);
  for (const auto& e : g.edges()) {
    if (e.source != e.target && tmpl.visible(e)) ++counts[e.channel];
  }
  std::optional<ChannelId> rarest;
  for (ChannelId c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) continue;
    if (!rarest || counts[c] < counts[*rarest] ||
        (counts[c] == counts[*rarest] && registry.code(c) < registry.code(*rarest))) {
      rarest = c;
    }
  }
  if (!rarest) throw Error(ErrorCode::NoVisibleEdges, "template view has no visible edges between distinct nodes");

  std::pair<NodeIndex, NodeIndex> anchor{~NodeIndex{0}, ~NodeIndex{0}};
  for (EdgeIndex e : g.channel_edges(*rarest)) {
    const auto& edge = g.edge(e);
    if (edge.source == edge.target || !tmpl.visible(edge)) continue;
    anchor = std::min(anchor, std::pair{std::min(edge.source, edge.target), std::max(edge.source, edge.target)});
  }

  std::vector<NodeIndex> members{anchor.first, anchor.second};
  const auto na = detail::visible_neighbors(tmpl, anchor.first);
  const auto nb = detail::visible_neighbors(tmpl, anchor.second);
  std::vector<NodeIndex> shared;
  std::set_intersection(na.begin(), na.end(), nb.begin(), nb.end(), std::back_inserter(shared));
  for (NodeIndex x : shared) {
    if (members.size() == 4) break;
    if (x != anchor.first && x != anchor.second && g.kind_of(x) != NodeKind::Person) members.push_back(x);
  }

  SeedSignature sig;
  sig.rarest_channel = *rarest;
  for (NodeIndex m : members) {
    sig.nodes.push_back(g.id_of(m));
    sig.kinds.push_back(g.kind_of(m));
  }
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      auto bundle = detail::bundle_at(tmpl, members[i], members[j]);
      if (bundle.empty()) continue;
      for (const auto& e : bundle.edges) sig.channels.insert(e.channel);
      sig.required.push_back({i, j, profile_of(bundle)});
    }
  }
  return sig;
}

NodeMap SeedAssignment::mapping(const SeedSignature& sig) const {
  NodeMap m;
  for (std::size_t i = 0; i < sig.nodes.size() && i < targets.size(); ++i) m.emplace(sig.nodes[i], targets[i]);
  return m;
}

std::vector<SeedAssignment> find_seeds(const GraphView& target, const SeedSignature& sig, const SimilarityConfig& cfg,
                                       std::size_t limit) {
  std::vector<SeedAssignment> out;
  if (limit == 0 || sig.nodes.size() < 2 || sig.required.empty()) return out;
  const auto& g = target.graph();
  const std::size_t n = sig.nodes.size();
  const ChannelSet channels(sig.channels.bits() & target.config().channels.bits());

  // Enumeration walks signature-channel edges only; a tuple qualifies once
  // every required pair has a non-empty visible bundle.
  std::set<std::vector<NodeIndex>> seen;
  std::vector<NodeIndex> tuple(n);
  std::vector<bool> assigned(n, false);

  const auto score_tuple = [&]() {
    if (!seen.insert(tuple).second) return;
    double sum = 0.0;
    for (const auto& req : sig.required) {
      const auto bundle = detail::bundle_at(target, tuple[req.first], tuple[req.second]);
      if (bundle.empty()) return;
      sum += profile_similarity(req.profile, profile_of(bundle), cfg).total;
    }
    SeedAssignment s;
    s.score = sum / static_cast<double>(sig.required.size());
    for (auto t : tuple) s.targets.push_back(g.id_of(t));
    out.push_back(std::move(s));
  };

  // Remaining positions draw from signature-channel neighbours of assigned ones.
  const auto extend = [&](auto&& self) -> void {
    std::size_t k = 0;
    while (k < n && assigned[k]) ++k;
    if (k == n) {
      score_tuple();
      return;
    }
    std::vector<NodeIndex> pool;
    for (std::size_t a = 0; a < n; ++a) {
      if (!assigned[a]) continue;
      const auto nb = channel_neighbors(target, tuple[a], channels);
      pool.insert(pool.end(), nb.begin(), nb.end());
    }
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    assigned[k] = true;
    for (NodeIndex x : pool) {
      if (g.kind_of(x) != sig.kinds[k]) continue;
      bool taken = false;
      for (std::size_t a = 0; a < n; ++a) taken = taken || (assigned[a] && a != k && tuple[a] == x);
      if (taken) continue;
      tuple[k] = x;
      self(self);
    }
    assigned[k] = false;
  };

  for (const auto& req : sig.required) {
    const auto i = req.first;
    const auto j = req.second;
    channels.for_each([&](ChannelId c) {
      for (EdgeIndex ei : g.channel_edges(c)) {
        const auto& e = g.edge(ei);
        if (e.source == e.target || !target.visible(e)) continue;
        for (auto [u, v] : {std::pair{e.source, e.target}, std::pair{e.target, e.source}}) {
          if (g.kind_of(u) != sig.kinds[i] || g.kind_of(v) != sig.kinds[j]) continue;
          tuple[i] = u;
          tuple[j] = v;
          assigned[i] = assigned[j] = true;
          extend(extend);
          assigned[i] = assigned[j] = false;
        }
      }
    });
  }

  detail::rank_with_ties(
      out, [](const SeedAssignment& s) { return s.score; },
      [](const SeedAssignment& a, const SeedAssignment& b) { return a.targets < b.targets; }, cfg.tie_epsilon);
  if (out.size() > limit) out.resize(limit);
  return out;
}

}  // namespace tgm
