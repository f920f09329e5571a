#include "tgm/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <set>

namespace tgm::synth {
namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
std::size_t pick(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

std::string real_text(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// Bundle sizes skew small: min..max with weights falling linearly to 1.
std::size_t bundle_size(Rng& rng, std::size_t min_size, std::size_t max_size) {
  std::vector<double> w;
  for (std::size_t s = min_size; s <= max_size; ++s) w.push_back(static_cast<double>(max_size + 1 - s));
  return std::discrete_distribution<std::size_t>(w.begin(), w.end())(rng) + min_size;
}

struct BundleMaker {
  Rng& rng;
  SynthGraph& g;
  double span;
  double burst;
  double mixed_rate;
  double reply_rate;

  bool person(std::uint64_t id) const { return g.nodes.at(id) == NodeKind::Person; }

  // Edges between a and b clustered around one random moment.
  void add(std::uint64_t a, std::uint64_t b, std::size_t size, const std::string& forced_channel = {}) {
    if (!person(a)) std::swap(a, b);
    const double start = uniform(rng, 0.0, std::max(1.0, span - burst));
    std::string primary = forced_channel;
    std::string secondary;
    if (primary.empty()) {
      if (person(b)) {
        primary = chance(rng, 0.55) ? "email" : "phone";
        secondary = primary == "email" ? "phone" : "email";
      } else {
        primary = g.nodes.at(b) == NodeKind::Item ? "buy" : "email";
      }
    }
    const bool mixed = !secondary.empty() && chance(rng, mixed_rate);
    for (std::size_t i = 0; i < size; ++i) {
      SynthEdge e;
      e.channel = (mixed && chance(rng, 0.4)) ? secondary : primary;
      const bool flip = person(b) && chance(rng, reply_rate);
      e.source = flip ? b : a;
      e.target = flip ? a : b;
      e.time = std::round(start + uniform(rng, 0.0, burst));
      e.weight = e.channel == "buy" || e.channel == "procurement" ? std::round(uniform(rng, 1.0, 100.0)) : 1.0;
      g.edges.push_back(std::move(e));
    }
  }
};

std::vector<NodeKind> kind_mix(Rng& rng, std::size_t n, std::size_t items, std::size_t documents) {
  std::vector<NodeKind> kinds(n, NodeKind::Person);
  std::fill_n(kinds.begin(), std::min(items, n), NodeKind::Item);
  std::fill_n(kinds.begin() + static_cast<std::ptrdiff_t>(std::min(items, n)),
              std::min(documents, n - std::min(items, n)), NodeKind::Document);
  std::shuffle(kinds.begin(), kinds.end(), rng);
  return kinds;
}

}  // namespace

std::shared_ptr<const TemporalMultigraph> SynthGraph::build(const ChannelRegistry& registry) const {
  GraphBuilder b(registry);
  for (const auto& [id, kind] : nodes) b.add_node(NodeId{id}, kind);
  for (const auto& e : edges) b.add_edge(NodeId{e.source}, NodeId{e.target}, registry.require(e.channel), e.time, e.weight);
  return std::move(b).build();
}

std::string SynthGraph::edges_csv() const {
  std::string out = "source,etype,target,time,weight,source_location,target_location\n";
  for (const auto& e : edges) {
    out += std::to_string(e.source) + ',' + e.channel + ',' + std::to_string(e.target) + ',' + real_text(e.time) + ',' +
           real_text(e.weight) + ",,\n";
  }
  return out;
}

std::string SynthGraph::nodes_csv() const {
  std::string out = "node,kind,label\n";
  for (const auto& [id, kind] : nodes) out += std::to_string(id) + ',' + std::string(to_string(kind)) + ",\n";
  return out;
}

SynthGraph make_template(std::mt19937_64& rng, const TemplateSpec& spec) {
  SynthGraph g;
  const auto kinds = kind_mix(rng, spec.nodes, std::max<std::size_t>(spec.items, 1), spec.documents);
  std::vector<std::uint64_t> persons;
  std::vector<std::uint64_t> items;
  for (std::size_t i = 0; i < spec.nodes; ++i) {
    g.nodes[i + 1] = kinds[i];
    if (kinds[i] == NodeKind::Person) persons.push_back(i + 1);
    if (kinds[i] == NodeKind::Item) items.push_back(i + 1);
  }
  BundleMaker make{rng, g, spec.time_span, spec.burst_width, spec.mixed_rate, spec.reply_rate};

  // Procurement triangle: two persons plus one item bought by both.
  std::shuffle(persons.begin(), persons.end(), rng);
  const auto p0 = persons[0];
  const auto p1 = persons[1];
  const auto item = items[pick(rng, items.size())];
  make.add(p0, p1, spec.seed_bundle, "procurement");
  make.add(p0, item, spec.seed_bundle, "buy");
  make.add(p1, item, spec.seed_bundle, "buy");

  // Random spanning tree over the rest, never joining two non-persons.
  std::vector<std::uint64_t> connected{p0, p1, item};
  std::vector<std::uint64_t> rest;
  for (const auto& [id, kind] : g.nodes) {
    if (id != p0 && id != p1 && id != item) rest.push_back(id);
  }
  std::shuffle(rest.begin(), rest.end(), rng);
  std::set<std::pair<std::uint64_t, std::uint64_t>> pairs{{std::min(p0, p1), std::max(p0, p1)},
                                                          {std::min(p0, item), std::max(p0, item)},
                                                          {std::min(p1, item), std::max(p1, item)}};
  for (std::size_t k = 0; k < rest.size(); ++k) {
    const auto v = rest[k];
    std::uint64_t u = 0;
    do {
      u = connected[pick(rng, connected.size())];
    } while (!make.person(u) && !make.person(v));
    const std::size_t reserved = g.edges.size() + (rest.size() - k - 1);
    const std::size_t budget = spec.edges > reserved ? spec.edges - reserved : 1;
    make.add(u, v, std::min(bundle_size(rng, spec.min_bundle, spec.max_bundle), budget));
    pairs.insert({std::min(u, v), std::max(u, v)});
    connected.push_back(v);
  }

  // Extra bundles on fresh pairs until the edge budget is spent.
  std::vector<std::uint64_t> ids;
  for (const auto& [id, kind] : g.nodes) ids.push_back(id);
  std::size_t attempts = 0;
  while (g.edges.size() < spec.edges && attempts++ < 100000) {
    auto a = ids[pick(rng, ids.size())];
    auto b = ids[pick(rng, ids.size())];
    if (a == b || (!make.person(a) && !make.person(b))) continue;
    if (!pairs.insert({std::min(a, b), std::max(a, b)}).second) continue;
    make.add(a, b, std::min(bundle_size(rng, spec.min_bundle, spec.max_bundle), spec.edges - g.edges.size()));
  }
  return g;
}

SynthGraph make_background(std::mt19937_64& rng, std::size_t nodes, std::size_t edges, double time_span) {
  SynthGraph g;
  const auto kinds = kind_mix(rng, nodes, nodes * 2 / 15, nodes / 10);
  std::vector<std::uint64_t> persons;
  for (std::size_t i = 0; i < nodes; ++i) {
    g.nodes[i + 1] = kinds[i];
    if (kinds[i] == NodeKind::Person) persons.push_back(i + 1);
  }
  BundleMaker make{rng, g, time_span, 2 * kDay, 0.3, 0.5};
  while (g.edges.size() < edges) {
    const auto a = persons[pick(rng, persons.size())];
    const auto b = static_cast<std::uint64_t>(pick(rng, nodes) + 1);
    if (a == b) continue;
    const auto size = std::min(bundle_size(rng, 1, 5), edges - g.edges.size());
    if (make.person(b) && chance(rng, 0.03)) {
      make.add(a, b, size, "procurement");
    } else {
      make.add(a, b, size);
    }
  }
  return g;
}

namespace {

Planted merge_with_permutation(std::mt19937_64& rng, const SynthGraph* background, const SynthGraph& tmpl) {
  const std::size_t bg_nodes = background ? background->nodes.size() : 0;
  std::vector<std::uint64_t> perm(bg_nodes + tmpl.nodes.size());
  std::iota(perm.begin(), perm.end(), std::uint64_t{1});
  std::shuffle(perm.begin(), perm.end(), rng);

  Planted out;
  std::map<std::uint64_t, std::uint64_t> bg_ids;
  std::size_t k = 0;
  if (background) {
    for (const auto& [id, kind] : background->nodes) {
      bg_ids[id] = perm[k];
      out.graph.nodes[perm[k++]] = kind;
    }
    for (auto e : background->edges) {
      e.source = bg_ids.at(e.source);
      e.target = bg_ids.at(e.target);
      out.graph.edges.push_back(std::move(e));
    }
  }
  for (const auto& [id, kind] : tmpl.nodes) {
    out.truth[id] = perm[k];
    out.graph.nodes[perm[k++]] = kind;
  }
  for (auto e : tmpl.edges) {
    e.source = out.truth.at(e.source);
    e.target = out.truth.at(e.target);
    out.graph.edges.push_back(std::move(e));
  }
  return out;
}

}  // namespace

Planted plant(std::mt19937_64& rng, const SynthGraph& tmpl, const SynthGraph& background) {
  return merge_with_permutation(rng, &background, tmpl);
}

Planted relabel(std::mt19937_64& rng, const SynthGraph& g) { return merge_with_permutation(rng, nullptr, g); }

namespace {

std::vector<std::size_t> in_scope_edges(const SynthGraph& g, const std::vector<std::uint64_t>& scope) {
  std::set<std::uint64_t> s(scope.begin(), scope.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    if (scope.empty() || (s.contains(g.edges[i].source) && s.contains(g.edges[i].target))) out.push_back(i);
  }
  return out;
}

}  // namespace

void delete_edges(std::mt19937_64& rng, SynthGraph& g, double fraction, const std::vector<std::uint64_t>& scope) {
  auto candidates = in_scope_edges(g, scope);
  std::shuffle(candidates.begin(), candidates.end(), rng);
  const auto n = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(candidates.size())));
  std::vector<bool> drop(g.edges.size(), false);
  for (std::size_t i = 0; i < n && i < candidates.size(); ++i) drop[candidates[i]] = true;
  std::vector<SynthEdge> kept;
  kept.reserve(g.edges.size() - n);
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    if (!drop[i]) kept.push_back(std::move(g.edges[i]));
  }
  g.edges = std::move(kept);
}

void jitter_times(std::mt19937_64& rng, SynthGraph& g, double amplitude, const std::vector<std::uint64_t>& scope) {
  const auto a = static_cast<std::int64_t>(std::llround(amplitude));
  std::uniform_int_distribution<std::int64_t> dist(-a, a);
  for (auto i : in_scope_edges(g, scope)) {
    g.edges[i].time = std::max(0.0, g.edges[i].time + static_cast<double>(dist(rng)));
  }
}

void shuffle_channels(std::mt19937_64& rng, SynthGraph& g) {
  std::vector<std::string> channels;
  channels.reserve(g.edges.size());
  for (const auto& e : g.edges) channels.push_back(e.channel);
  std::shuffle(channels.begin(), channels.end(), rng);
  for (std::size_t i = 0; i < g.edges.size(); ++i) g.edges[i].channel = std::move(channels[i]);
}

SynthGraph make_uniform(std::mt19937_64& rng, std::size_t nodes, std::size_t edges,
                        const std::vector<std::string>& channels, double time_span) {
  SynthGraph g;
  for (std::size_t i = 0; i < nodes; ++i) g.nodes[i + 1] = chance(rng, 0.8) ? NodeKind::Person : NodeKind::Item;
  g.edges.reserve(edges);
  while (g.edges.size() < edges) {
    const auto a = static_cast<std::uint64_t>(pick(rng, nodes) + 1);
    const auto b = static_cast<std::uint64_t>(pick(rng, nodes) + 1);
    if (a == b) continue;
    SynthEdge e;
    e.source = a;
    e.target = b;
    e.channel = channels[pick(rng, channels.size())];
    e.time = std::round(uniform(rng, 0.0, time_span));
    g.edges.push_back(std::move(e));
  }
  return g;
}

}  // namespace tgm::synth
