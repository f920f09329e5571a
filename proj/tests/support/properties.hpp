#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "reference.hpp"
#include "random_graphs.hpp"
#include "tgm/analytics.hpp"
#include "tgm/csv_loader.hpp"
#include "tgm/error.hpp"
#include "tgm/matcher.hpp"
#include "tgm/session_io.hpp"
#include "tgm/similarity.hpp"
#include "tgm/view.hpp"

namespace tgm::testing {

// A property takes a case seed and returns a description of the first
// violation it finds, or nothing.
using Failure = std::optional<std::string>;
using Property = std::function<Failure(std::uint64_t)>;

struct NamedProperty {
  std::string name;
  Property check;
};

// Runs `cases` seeds starting at `first_seed`; stops at the first failure.
inline Failure run_property(const Property& p, std::size_t cases, std::uint64_t first_seed = 1) {
  for (std::size_t i = 0; i < cases; ++i) {
    if (auto f = p(first_seed + i)) return "seed " + std::to_string(first_seed + i) + ": " + *f;
  }
  return std::nullopt;
}

namespace prop_detail {

inline std::string str(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline std::size_t raw_visible_count(const RandomGraph& r, const ViewConfig& cfg) {
  const auto& reg = r.graph->channels();
  return static_cast<std::size_t>(
      std::count_if(r.edges.begin(), r.edges.end(), [&](const RawEdge& e) { return raw_visible(e, cfg, reg); }));
}

inline std::map<std::uint64_t, NodeKind> kinds_of(const RandomGraph& r) {
  std::map<std::uint64_t, NodeKind> k;
  for (const auto& [id, kind] : r.nodes) k[id] = kind;
  return k;
}

inline bool is_person(const std::map<std::uint64_t, NodeKind>& kinds, std::uint64_t id) {
  const auto it = kinds.find(id);
  return it != kinds.end() && it->second == NodeKind::Person;
}

}  // namespace prop_detail

// Stats and adjacency agree with the visibility predicate evaluated directly on
// the raw rows; reloading the serialized graph reproduces it.
inline Failure filter_soundness(std::uint64_t seed) {
  using namespace prop_detail;
  std::mt19937_64 rng(seed);
  const auto r = random_graph(rng);
  const auto& reg = r.graph->channels();
  const auto cfg = random_view_config(rng, reg);
  const GraphView view(r.graph, cfg);

  const auto s = stats(view);
  const auto expected = raw_visible_count(r, cfg);
  if (s.visible_edges != expected) {
    return "visible_edges " + std::to_string(s.visible_edges) + " != direct count " + std::to_string(expected);
  }
  std::size_t sum = 0;
  for (const auto& [code, n] : s.per_channel) {
    sum += n;
    const auto direct = std::count_if(r.edges.begin(), r.edges.end(),
                                      [&](const RawEdge& e) { return e.channel == code && raw_visible(e, cfg, reg); });
    if (static_cast<std::size_t>(direct) != n) return "per-channel count mismatch for " + code;
  }
  if (sum != expected) return "per-channel counts do not sum to visible edges";
  if (s.per_channel.size() != cfg.channels.size()) return "per_channel lacks an enabled channel";

  for (const auto& [a, ka] : r.nodes) {
    const auto adj = adjacent(view, NodeId{a});
    std::map<std::uint64_t, ChannelSet> got;
    for (const auto& n : adj) got[n.node.value] = n.channels;
    for (const auto& [b, kb] : r.nodes) {
      if (a == b) continue;
      const auto bundle = edge_bundle(view, NodeId{a}, NodeId{b});
      ChannelSet direct_channels;
      std::size_t direct = 0;
      for (const auto& e : r.edges) {
        if (!raw_visible(e, cfg, reg)) continue;
        if ((e.source == a && e.target == b) || (e.source == b && e.target == a)) {
          ++direct;
          direct_channels.insert(reg.require(e.channel));
        }
      }
      if (bundle.size() != direct) return "bundle size mismatch for pair " + std::to_string(a) + "," + std::to_string(b);
      const bool listed = got.contains(b);
      if (listed != !bundle.empty()) return "adjacent/edge_bundle disagree for " + std::to_string(a) + "," + std::to_string(b);
      if (listed && got[b] != direct_channels) return "adjacent channel set mismatch";
    }
  }

  const auto reloaded = load_graph(write_edges_csv(*r.graph), write_nodes_csv(*r.graph), reg).graph;
  if (reloaded->node_count() != r.graph->node_count() || reloaded->edge_count() != r.graph->edge_count()) {
    return "reload changed graph size";
  }
  for (EdgeIndex e = 0; e < r.graph->edge_count(); ++e) {
    const auto& x = r.graph->edge(e);
    const auto& y = reloaded->edge(e);
    if (x.source != y.source || x.target != y.target || x.channel != y.channel || x.time != y.time ||
        x.weight != y.weight) {
      return "reload changed edge " + std::to_string(e);
    }
  }
  for (NodeIndex n = 0; n < r.graph->node_count(); ++n) {
    if (r.graph->id_of(n) != reloaded->id_of(n) || r.graph->kind_of(n) != reloaded->kind_of(n)) {
      return "reload changed node table";
    }
  }
  const auto s2 = stats(GraphView(reloaded, cfg));
  if (s2.visible_edges != s.visible_edges || s2.per_channel != s.per_channel || s2.extent != s.extent) {
    return "reload changed stats";
  }
  return std::nullopt;
}

// Enabling more channels never hides an edge, a neighbour or a projection link.
inline Failure channel_toggle_monotonicity(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto r = random_graph(rng);
  const auto& reg = r.graph->channels();
  auto big = random_view_config(rng, reg);
  auto small = big;
  small.channels = ChannelSet{};
  big.channels.for_each([&](ChannelId c) {
    if (std::bernoulli_distribution(0.5)(rng)) small.channels.insert(c);
  });
  const GraphView vs(r.graph, small);
  const GraphView vb(r.graph, big);

  for (EdgeIndex e = 0; e < r.graph->edge_count(); ++e) {
    if (vs.visible(e) && !vb.visible(e)) return "edge " + std::to_string(e) + " visible only under the subset";
  }
  const auto ss = stats(vs);
  const auto sb = stats(vb);
  if (ss.visible_edges > sb.visible_edges) return "visible edge count decreased when enabling channels";
  for (const auto& [code, n] : ss.per_channel) {
    if (sb.per_channel.at(code) != n) return "per-channel count changed for a channel enabled in both";
  }
  std::set<EdgeIndex> scatter_big;
  for (const auto& p : person_scatter(vb)) scatter_big.insert(p.edge);
  for (const auto& p : person_scatter(vs)) {
    if (!scatter_big.contains(p.edge)) return "scatter point vanished when enabling channels";
  }
  for (const auto& [id, kind] : r.nodes) {
    const auto a = adjacent(vs, NodeId{id});
    const auto b = adjacent(vb, NodeId{id});
    for (const auto& n : a) {
      const auto it = std::find_if(b.begin(), b.end(), [&](const Neighbor& m) { return m.node == n.node; });
      if (it == b.end()) return "neighbour vanished when enabling channels";
      if (!n.channels.subset_of(it->channels)) return "neighbour channel set shrank";
    }
  }
  const auto ps = structure_projection(vs);
  const auto pb = structure_projection(vb);
  for (const auto& [pair, w] : ps.links) {
    if (pair.first >= pair.second) return "projection key not ordered";
    const auto it = pb.links.find(pair);
    if (it == pb.links.end()) return "projection link vanished when enabling channels";
    if (it->second < w) return "projection weight decreased when enabling channels";
  }
  return std::nullopt;
}

// A view offset δ over raw times matches offset 0 over times pre-shifted by δ.
inline Failure offset_equivariance(std::uint64_t seed) {
  using namespace prop_detail;
  std::mt19937_64 rng(seed);
  auto r = random_graph(rng);
  // Raw times must stay non-negative after pre-shifting by a negative delta.
  for (auto& e : r.edges) e.time += 500.0;
  r.graph = build_raw(r.nodes, r.edges, ChannelRegistry::defaults());
  const auto& reg = r.graph->channels();
  auto cfg = random_view_config(rng, reg);
  const double delta = std::floor(uniform_real(rng, -500.0, 500.0));
  cfg.offset = delta;

  auto shifted_edges = r.edges;
  for (auto& e : shifted_edges) e.time += delta;
  const auto shifted = build_raw(r.nodes, shifted_edges, reg);
  auto cfg0 = cfg;
  cfg0.offset = 0.0;

  const GraphView a(r.graph, cfg);
  const GraphView b(shifted, cfg0);

  for (EdgeIndex e = 0; e < r.graph->edge_count(); ++e) {
    if (a.visible(e) != b.visible(e)) return "visibility differs for edge " + std::to_string(e);
    if (a.effective_time(r.graph->edge(e)) != b.effective_time(shifted->edge(e))) return "effective time differs";
  }
  const auto sa = stats(a);
  const auto sb = stats(b);
  if (sa.visible_edges != sb.visible_edges || sa.per_channel != sb.per_channel || sa.extent != sb.extent) {
    return "stats differ";
  }
  const BinSpec bins{std::floor(uniform_real(rng, 1.0, 200.0)), std::floor(uniform_real(rng, -100.0, 100.0)), {}};
  const auto ha = activity_histogram(a, bins);
  const auto hb = activity_histogram(b, bins);
  if (ha.origin != hb.origin || ha.counts != hb.counts) return "histograms differ";

  const auto pa = person_scatter(a);
  const auto pb = person_scatter(b);
  if (pa.size() != pb.size()) return "scatter sizes differ";
  for (std::size_t i = 0; i < pa.size(); ++i) {
    if (pa[i].person != pb[i].person || pa[i].time != pb[i].time || pa[i].edge != pb[i].edge) {
      return "scatter points differ";
    }
  }
  if (spatial_distribution(a) != spatial_distribution(b)) return "spatial distributions differ";
  if (structure_projection(a).links != structure_projection(b).links) return "projections differ";
  for (const auto& [x, kx] : r.nodes) {
    for (const auto& [y, ky] : r.nodes) {
      const auto ba = edge_bundle(a, NodeId{x}, NodeId{y});
      const auto bb = edge_bundle(b, NodeId{x}, NodeId{y});
      if (ba.size() != bb.size()) return "bundle sizes differ";
      for (std::size_t i = 0; i < ba.size(); ++i) {
        if (ba.edges[i].time != bb.edges[i].time || ba.edges[i].edge != bb.edges[i].edge) return "bundle edges differ";
      }
    }
  }
  return std::nullopt;
}

// Histogram, scatter, spatial and heatmap totals match direct counts.
inline Failure analytics_conservation(std::uint64_t seed) {
  using namespace prop_detail;
  std::mt19937_64 rng(seed);
  const auto r = random_graph(rng);
  const auto& reg = r.graph->channels();
  const auto cfg = random_view_config(rng, reg);
  const GraphView view(r.graph, cfg);
  const auto kinds = kinds_of(r);
  const auto visible = raw_visible_count(r, cfg);

  const double width = std::bernoulli_distribution(0.3)(rng) ? default_bin_width(view)
                                                             : std::floor(uniform_real(rng, 1.0, 300.0));
  const double origin = std::floor(uniform_real(rng, -400.0, 400.0));
  const auto h = activity_histogram(view, BinSpec{width, origin, {}});
  std::uint64_t total = 0;
  for (auto c : h.counts) total += c;
  if (total != visible) return "histogram sum " + std::to_string(total) + " != visible " + std::to_string(visible);
  for (const auto& e : r.edges) {
    if (!raw_visible(e, cfg, reg)) continue;
    const double t = e.time + cfg.offset;
    if (t < h.origin || t >= h.bin_start(h.counts.size())) return "visible edge outside histogram bins";
  }
  if (!h.counts.empty() && (h.counts.front() == 0 || h.counts.back() == 0)) return "trimmed histogram has empty ends";

  std::size_t person_endpoints = 0;
  std::size_t both = 0;
  std::size_t one = 0;
  for (const auto& e : r.edges) {
    if (!raw_visible(e, cfg, reg)) continue;
    if (e.source == e.target) {
      person_endpoints += is_person(kinds, e.source) ? 1 : 0;
    } else {
      person_endpoints += (is_person(kinds, e.source) ? 1 : 0) + (is_person(kinds, e.target) ? 1 : 0);
    }
    const int located = (e.source_location.empty() ? 0 : 1) + (e.target_location.empty() ? 0 : 1);
    both += located == 2;
    one += located == 1;
  }
  const auto scatter = person_scatter(view);
  if (scatter.size() != person_endpoints) return "scatter has " + std::to_string(scatter.size()) + " points, expected " + std::to_string(person_endpoints);
  for (const auto& p : scatter) {
    if (!is_person(kinds, p.person.value)) return "scatter point on a non-person";
    if (!view.visible(p.edge)) return "scatter point on a hidden edge";
    const auto& e = r.graph->edge(p.edge);
    if (r.graph->id_of(e.source) != p.person && r.graph->id_of(e.target) != p.person) return "scatter point not incident";
  }
  std::uint64_t spatial = 0;
  for (const auto& [code, n] : spatial_distribution(view)) spatial += n;
  if (spatial != 2 * both + one) return "spatial total " + std::to_string(spatial) + " != " + std::to_string(2 * both + one);

  const auto proj = structure_projection(view);
  for (const auto& p : proj.persons) {
    if (!is_person(kinds, p.value)) return "projection lists a non-person";
  }
  for (const auto& [pair, w] : proj.links) {
    if (w == 0) return "projection keeps a zero-weight link";
  }

  std::vector<NodeId> persons;
  for (const auto& [id, kind] : r.nodes) {
    if (kind == NodeKind::Person) persons.push_back(NodeId{id});
  }
  std::optional<TimeRange> span;
  if (const auto s = stats(view); s.extent) {
    span = TimeRange{s.extent->begin - 1.0, s.extent->end + 1.0};
  }
  for (ChannelId c = 0; c < reg.size(); ++c) {
    const auto hm = heatmap(view, persons, reg.code(c), BinSpec{width, origin, span});
    if (hm.cells.size() != persons.size()) return "heatmap row count mismatch";
    for (std::size_t i = 0; i < persons.size(); ++i) {
      std::uint64_t row = 0;
      for (auto v : hm.cells[i]) row += v;
      const auto counts = person_channel_counts(view, persons[i]);
      const auto it = counts.find(reg.code(c));
      const std::uint64_t bar = it == counts.end() ? 0 : it->second;
      if (row != bar) return "heatmap row sum differs from bar count for " + reg.code(c);
    }
  }
  return std::nullopt;
}

struct RandomBundlePair {
  EdgeBundle a;
  EdgeBundle b;
  SimilarityConfig cfg;
};

inline SimilarityConfig random_similarity_config(std::mt19937_64& rng) {
  SimilarityConfig cfg;
  const double x = uniform_real(rng, 0.0, 1.0);
  const double y = uniform_real(rng, 0.0, 1.0 - x);
  cfg.w_presence = x;
  cfg.w_count = y;
  cfg.w_temporal = 1.0 - x - y;
  static constexpr double widths[] = {1.0, 10.0, 50.0, 100.0, 333.0};
  cfg.bin_width = widths[uniform_index(rng, 0, 4)];
  static constexpr double steps[] = {7.0, 25.0, 50.0, 100.0};
  cfg.offset_step = steps[uniform_index(rng, 0, 3)];
  cfg.offset_range = cfg.offset_step * static_cast<double>(uniform_index(rng, 0, 4));
  cfg.ignore_direction = std::bernoulli_distribution(0.3)(rng);
  cfg.use_weights = std::bernoulli_distribution(0.3)(rng);
  return cfg;
}

// Two bundles cut from small dense random graphs, so parallel edges, both
// directions and shared keys are common.
inline RandomBundlePair random_bundle_pair(std::mt19937_64& rng) {
  RandomGraphSpec spec;
  spec.min_nodes = 2;
  spec.max_nodes = 3;
  spec.max_edges = 14;
  spec.allow_self_loops = false;
  spec.time_span = 600.0;
  const auto g1 = random_graph(rng, spec);
  const auto g2 = random_graph(rng, spec);
  const auto pick = [&](const RandomGraph& g) {
    ChannelSet few;
    for (ChannelId c = 0; c < 3; ++c) few.insert(static_cast<ChannelId>(uniform_index(rng, 0, g.graph->channels().size() - 1)));
    ViewConfig cfg{std::bernoulli_distribution(0.5)(rng) ? g.graph->channels().all() : few, {}, 0.0};
    const auto& a = g.nodes[0];
    const auto& b = g.nodes[uniform_index(rng, 1, g.nodes.size() - 1)];
    return std::bernoulli_distribution(0.5)(rng) ? edge_bundle(GraphView(g.graph, cfg), NodeId{a.first}, NodeId{b.first})
                                                 : edge_bundle(GraphView(g.graph, cfg), NodeId{b.first}, NodeId{a.first});
  };
  RandomBundlePair p{pick(g1), pick(g2), random_similarity_config(rng)};
  return p;
}

inline Failure check_score_shape(const SimilarityScore& s, const SimilarityConfig& cfg, const std::string& what) {
  using namespace prop_detail;
  for (double v : {s.total, s.presence, s.count, s.temporal}) {
    if (!(v >= 0.0 && v <= 1.0)) return what + ": component outside [0,1]: " + str(v);
  }
  const double combo = cfg.w_presence * s.presence + cfg.w_count * s.count + cfg.w_temporal * s.temporal;
  if (!close(combo, s.total, 1e-12)) return what + ": total is not the weighted sum";
  return std::nullopt;
}

inline EdgeBundle shift_bundle(EdgeBundle b, double delta) {
  for (auto& e : b.edges) e.time += delta;
  return b;
}

// Range, symmetry, identity, shift invariance, count discrimination, weight
// degeneracy, and agreement with the straight-line reference.
inline Failure similarity_laws(std::uint64_t seed) {
  using namespace prop_detail;
  std::mt19937_64 rng(seed);
  const auto p = random_bundle_pair(rng);
  const auto& cfg = p.cfg;

  const auto ab = bundle_similarity(p.a, p.b, cfg);
  const auto ba = bundle_similarity(p.b, p.a, cfg);
  if (auto f = check_score_shape(ab, cfg, "ab")) return f;
  if (auto f = check_score_shape(ba, cfg, "ba")) return f;
  if (!close(ab.total, ba.total, 1e-12) || !close(ab.temporal, ba.temporal, 1e-12) ||
      ab.presence != ba.presence || !close(ab.count, ba.count, 1e-12)) {
    return "asymmetric: " + str(ab.total) + " vs " + str(ba.total);
  }
  for (const auto* b : {&p.a, &p.b}) {
    // Components are exact; the total inherits the 1e-12 slack of the weight sum.
    const auto self = bundle_similarity(*b, *b, cfg);
    if (!close(self.total, 1.0, 1e-12) || self.presence != 1.0 || self.count != 1.0 || self.temporal != 1.0) {
      return "identity violated: " + str(self.total);
    }
  }
  const auto ref = ref_similarity(ref_edges(p.a), ref_edges(p.b), cfg);
  if (!close(ref.total, ab.total, 1e-9) || !close(ref.presence, ab.presence, 1e-12) ||
      !close(ref.count, ab.count, 1e-12) || !close(ref.temporal, ab.temporal, 1e-9)) {
    return "reference disagrees: " + str(ref.total) + " vs " + str(ab.total);
  }

  const double c = std::floor(uniform_real(rng, -10000.0, 10000.0));
  const auto moved = bundle_similarity(shift_bundle(p.a, c), shift_bundle(p.b, c), cfg);
  if (!close(moved.temporal, ab.temporal, 1e-12)) return "temporal changed under a common translation";

  if (!cfg.use_weights) {
    const auto pa = profile_of(p.a);
    const auto pb = profile_of(p.b);
    std::map<std::pair<ChannelId, bool>, std::size_t> ka;
    std::map<std::pair<ChannelId, bool>, std::size_t> kb;
    for (const auto& e : pa.entries) ka[{e.channel, cfg.ignore_direction || e.direction == Direction::Forward}] += e.count;
    for (const auto& e : pb.entries) kb[{e.channel, cfg.ignore_direction || e.direction == Direction::Forward}] += e.count;
    if ((ab.count == 1.0) != (ka == kb)) return "count component does not discriminate count vectors";
  }

  auto flat = cfg;
  flat.w_temporal = 0.0;
  flat.w_count = 1.0 - flat.w_presence;
  auto pa = profile_of(p.a);
  auto pb = profile_of(p.b);
  const auto before = profile_similarity(pa, pb, flat);
  for (auto& t : pa.times) t = std::floor(uniform_real(rng, 0.0, 1e6));
  for (auto& t : pb.times) t = std::floor(uniform_real(rng, 0.0, 1e6));
  std::sort(pa.times.begin(), pa.times.end());
  std::sort(pb.times.begin(), pb.times.end());
  if (profile_similarity(pa, pb, flat).total != before.total) return "score depends on timestamps with w_temporal = 0";
  return std::nullopt;
}

// A template with a perturbed copy inside a noisy target, plus a seed that is
// mostly correct.
struct SessionInstance {
  RandomGraph tmpl;
  RandomGraph target;
  GraphView tmpl_view;
  GraphView target_view;
  NodeMap seed;
  SimilarityConfig cfg;
};

inline constexpr std::uint64_t kCopyOffset = 1000;

inline std::optional<SessionInstance> random_session_instance(std::mt19937_64& rng, std::size_t max_template = 7) {
  RandomGraphSpec ts;
  ts.min_nodes = 2;
  ts.max_nodes = max_template;
  ts.max_edges = 18;
  auto tmpl = random_graph(rng, ts);

  RandomGraphSpec bs;
  bs.min_nodes = 1;
  bs.max_nodes = 8;
  bs.max_edges = 20;
  auto background = random_graph(rng, bs);

  RandomGraph target;
  target.nodes = background.nodes;
  target.edges = background.edges;
  for (const auto& [id, kind] : tmpl.nodes) target.nodes.emplace_back(id + kCopyOffset, kind);
  for (auto e : tmpl.edges) {
    if (std::bernoulli_distribution(0.15)(rng)) continue;
    e.source += kCopyOffset;
    e.target += kCopyOffset;
    if (std::bernoulli_distribution(0.2)(rng)) e.time = std::max(0.0, e.time + std::floor(uniform_real(rng, -50.0, 50.0)));
    target.edges.push_back(e);
  }
  // A few bridges between the copy and the background.
  for (int i = 0; i < 3 && !background.nodes.empty(); ++i) {
    const auto& x = background.nodes[uniform_index(rng, 0, background.nodes.size() - 1)];
    const auto& y = tmpl.nodes[uniform_index(rng, 0, tmpl.nodes.size() - 1)];
    target.edges.push_back(RawEdge{x.first, y.first + kCopyOffset, "email", std::floor(uniform_real(rng, 0, 1000)), 1.0, "", ""});
  }
  const auto& reg = ChannelRegistry::defaults();
  target.graph = build_raw(target.nodes, target.edges, reg);

  SimilarityConfig cfg = random_similarity_config(rng);
  cfg.accept_threshold = uniform_real(rng, 0.0, 1.0);

  ViewConfig tv = ViewConfig::all(reg);
  ViewConfig xv = ViewConfig::all(reg);
  if (std::bernoulli_distribution(0.3)(rng)) {
    tv = random_view_config(rng, reg);
    xv = tv;
  }
  NodeMap seed;
  const auto want = uniform_index(rng, 1, std::min<std::size_t>(3, tmpl.nodes.size()));
  std::set<std::uint64_t> used;
  for (std::size_t i = 0; i < want; ++i) {
    const auto& [t, kind] = tmpl.nodes[uniform_index(rng, 0, tmpl.nodes.size() - 1)];
    if (seed.contains(NodeId{t})) continue;
    std::uint64_t x = t + kCopyOffset;
    if (std::bernoulli_distribution(0.2)(rng)) {
      for (const auto& [b, bk] : background.nodes) {
        if (bk == kind && !used.contains(b)) {
          x = b;
          break;
        }
      }
    }
    if (used.contains(x)) continue;
    used.insert(x);
    seed.emplace(NodeId{t}, NodeId{x});
  }
  if (seed.empty()) return std::nullopt;
  GraphView tview(tmpl.graph, tv);
  GraphView xview(target.graph, xv);
  return SessionInstance{std::move(tmpl), std::move(target), std::move(tview), std::move(xview), std::move(seed), cfg};
}

// Checks every structural session invariant directly against the views.
inline Failure check_session_state(const MatchSession& s, std::size_t k_probe = 6) {
  const auto& tg = s.template_view().graph();
  const auto& xg = s.target_view().graph();
  const auto matched = s.matched();
  const auto unmatched = s.unmatched();
  std::set<NodeId> all(matched.begin(), matched.end());
  for (auto n : unmatched) {
    if (!all.insert(n).second) return "a node is in both S and T";
  }
  if (all.size() != tg.node_count()) return "S and T do not cover the template";
  const auto m = s.mapping();
  if (m.size() != matched.size()) return "domain(M) differs from S";
  std::set<NodeId> image;
  for (const auto& [t, x] : m) {
    if (!std::binary_search(matched.begin(), matched.end(), t)) return "mapped node not in S";
    if (!image.insert(x).second) return "M is not injective";
    if (tg.kind_of(tg.index_of(t)) != xg.kind_of(xg.index_of(x))) return "M does not preserve kinds";
  }
  const auto rejected = s.rejected();
  for (const auto& [t, x] : rejected) {
    const auto it = m.find(t);
    if (it != m.end() && it->second == x) return "a rejected pair is in M";
  }

  const auto props = s.propose(k_probe);
  for (std::size_t i = 0; i < props.size(); ++i) {
    const auto& p = props[i];
    if (m.contains(p.frontier)) return "proposal frontier already matched";
    if (image.contains(p.candidate)) return "proposal candidate already in image(M)";
    if (rejected.contains({p.frontier, p.candidate})) return "proposal re-emits a rejected pair";
    if (tg.kind_of(tg.index_of(p.frontier)) != xg.kind_of(xg.index_of(p.candidate))) return "proposal kinds differ";
    if (p.anchors.empty()) return "proposal without anchors";
    bool reachable = false;
    for (auto a : p.anchors) {
      if (!m.contains(a)) return "proposal anchor is unmatched";
      if (edge_bundle(s.template_view(), a, p.frontier).empty()) return "proposal anchor not adjacent to frontier";
      reachable = reachable || !edge_bundle(s.target_view(), m.at(a), p.candidate).empty();
    }
    if (!reachable) return "proposal candidate not adjacent to any anchor image";
    if (std::abs(s.score_pair(p.frontier, p.candidate).total - p.score.total) > 1e-12) return "proposal score differs from score_pair";
    if (i > 0 && props[i - 1].score.total + s.config().tie_epsilon < p.score.total) return "proposals out of order";
  }
  return std::nullopt;
}

inline std::string summary_text(const MatchSession& s) { return session_summary(s).dump(); }

// Random user/auto operations keep every invariant; failed operations leave
// the state untouched; the log replays to the same state, directly and
// through export/import.
inline Failure session_invariants(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto inst = random_session_instance(rng);
  if (!inst) return std::nullopt;
  std::int64_t tick = 1'700'000'000'000;
  MatchSession s(inst->tmpl_view, inst->target_view, inst->seed, inst->cfg, [&tick] { return tick++; });
  if (auto f = check_session_state(s)) return "after init: " + *f;

  std::vector<std::uint64_t> tids;
  for (const auto& [id, k] : inst->tmpl.nodes) tids.push_back(id);
  std::vector<std::uint64_t> xids;
  for (const auto& [id, k] : inst->target.nodes) xids.push_back(id);

  const auto ops = uniform_index(rng, 1, 12);
  for (std::size_t op = 0; op < ops; ++op) {
    const auto before = summary_text(s);
    const auto log_before = s.log().size();
    const auto matched_before = s.matched_count();
    const auto kind = uniform_index(rng, 0, 9);
    try {
      if (kind < 3) {
        const auto props = s.propose(3);
        if (props.empty()) continue;
        const auto& p = props[uniform_index(rng, 0, props.size() - 1)];
        const auto verdict = std::bernoulli_distribution(0.6)(rng) ? Verdict::Accept : Verdict::Reject;
        s.decide(p.frontier, p.candidate, verdict, Actor::User);
      } else if (kind < 8) {
        NodeId t{tids[uniform_index(rng, 0, tids.size() - 1)]};
        NodeId x{xids[uniform_index(rng, 0, xids.size() - 1)]};
        if (std::bernoulli_distribution(0.05)(rng)) x = NodeId{999'999};
        const auto verdict = std::bernoulli_distribution(0.5)(rng) ? Verdict::Accept : Verdict::Reject;
        const auto actor = std::bernoulli_distribution(0.3)(rng) ? Actor::Auto : Actor::User;
        s.decide(t, x, verdict, actor);
      } else {
        s.run_auto(uniform_index(rng, 1, 4));
      }
    } catch (const Error&) {
      if (summary_text(s) != before) return "a failed decision changed the session";
      continue;
    }
    if (s.log().size() < log_before) return "log shrank";
    if (kind < 8 && s.log().size() != log_before + 1) return "decide did not append exactly one entry";
    if (s.matched_count() < matched_before) return "|S| decreased";
    if (auto f = check_session_state(s)) return "after op " + std::to_string(op) + ": " + *f;
  }

  MatchSession replay(inst->tmpl_view, inst->target_view, inst->seed, inst->cfg,
                      [&] { return s.log().front().at_ms; });
  for (std::size_t i = inst->seed.size(); i < s.log().size(); ++i) {
    const auto& d = s.log()[i];
    replay.decide(d.template_node, d.target_node, d.verdict, d.actor, d.at_ms, d.score);
  }
  if (summary_text(replay) != summary_text(s)) return "log replay diverged";

  const auto doc = export_session(s, SessionRefs{"s", "t", "x"});
  const auto imported = import_session(nlohmann::json::parse(doc.dump()), inst->tmpl.graph, inst->target.graph);
  if (summary_text(imported) != summary_text(s)) return "export/import diverged";
  return std::nullopt;
}

// run_auto stops before the |T0| + |possible pairs| bound and never logs more
// than one decision per iteration.
inline Failure run_auto_termination(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto inst = random_session_instance(rng);
  if (!inst) return std::nullopt;
  MatchSession s(inst->tmpl_view, inst->target_view, inst->seed, inst->cfg);
  const auto t0 = s.unmatched_count();
  const auto bound = t0 + t0 * inst->target.graph->node_count() + 1;
  const auto log0 = s.log().size();
  const auto status = s.run_auto(bound);
  if (status == RunStatus::IterationCap) return "run_auto hit the termination bound " + std::to_string(bound);
  if (s.log().size() - log0 > bound) return "run_auto logged more decisions than iterations";
  if (status == RunStatus::Complete && s.unmatched_count() != 0) return "complete with unmatched nodes";
  if (status == RunStatus::Exhausted && !s.propose(1).empty()) return "exhausted while proposals remain";
  for (std::size_t i = log0; i < s.log().size(); ++i) {
    const auto& d = s.log()[i];
    if (d.actor != Actor::Auto) return "run_auto logged a user decision";
    if ((d.verdict == Verdict::Accept) != (d.score >= inst->cfg.accept_threshold)) return "auto verdict ignores the threshold";
  }
  if (auto f = check_session_state(s)) return *f;
  return std::nullopt;
}

inline std::vector<NamedProperty> invariant_suites() {
  return {
      {"filter soundness", filter_soundness},
      {"channel-toggle monotonicity", channel_toggle_monotonicity},
      {"offset equivariance", offset_equivariance},
      {"histogram/scatter/spatial conservation", analytics_conservation},
      {"similarity range/symmetry/identity", similarity_laws},
      {"session partition/injectivity/replay", session_invariants},
      {"run_auto termination", run_auto_termination},
  };
}

}  // namespace tgm::testing
