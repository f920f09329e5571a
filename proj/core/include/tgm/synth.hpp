#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "tgm/graph.hpp"

namespace tgm::synth {

// Ground-truth generators for recovery experiments, tests and benchmarks.

struct SynthEdge {
  std::uint64_t source = 0;
  std::uint64_t target = 0;
  std::string channel;
  double time = 0.0;
  double weight = 1.0;
};

struct SynthGraph {
  std::map<std::uint64_t, NodeKind> nodes;
  std::vector<SynthEdge> edges;

  std::shared_ptr<const TemporalMultigraph> build(const ChannelRegistry& registry) const;
  std::string edges_csv() const;
  std::string nodes_csv() const;
};

inline constexpr double kDay = 86400.0;

struct TemplateSpec {
  std::size_t nodes = 30;
  std::size_t edges = 120;
  std::size_t items = 4;
  std::size_t documents = 3;
  double time_span = 365 * kDay;
  double burst_width = 2 * kDay;  // edges of one pair cluster within this window
  std::size_t seed_bundle = 8;    // edges per bundle in the procurement triangle
  double mixed_rate = 0.1;  // person-person bundles that mix email and phone
  double reply_rate = 0.2;  // person-person edges running against the bundle's initiator
  std::size_t min_bundle = 2;
  std::size_t max_bundle = 5;
};

// Connected graph on ids 1..nodes with the channels email, phone, buy and
// procurement. Exactly two persons share procurement edges, and one item is
// joined to both of them by buy edges.
SynthGraph make_template(std::mt19937_64& rng, const TemplateSpec& spec = {});

// Random multigraph with the template's channel mix and kind proportions,
// not necessarily connected.
SynthGraph make_background(std::mt19937_64& rng, std::size_t nodes, std::size_t edges,
                           double time_span = 365 * kDay);

struct Planted {
  SynthGraph graph;
  std::map<std::uint64_t, std::uint64_t> truth;  // template id -> target id
};

// Disjoint union of `background` and a copy of `tmpl`. Every node of the union
// gets a fresh id from a random permutation of 1..N, so the copy's ids are
// scattered through the id space.
Planted plant(std::mt19937_64& rng, const SynthGraph& tmpl, const SynthGraph& background);

// Copy of `g` under a random id permutation of 1..N (no background).
Planted relabel(std::mt19937_64& rng, const SynthGraph& g);

// Removes round(fraction * edges) edges chosen uniformly, restricted to edges
// whose endpoints both satisfy `in_scope` (all edges when empty).
void delete_edges(std::mt19937_64& rng, SynthGraph& g, double fraction,
                  const std::vector<std::uint64_t>& scope = {});

// Adds an integer jitter uniform in [-amplitude, amplitude] to every in-scope
// edge time, clamped at 0.
void jitter_times(std::mt19937_64& rng, SynthGraph& g, double amplitude,
                  const std::vector<std::uint64_t>& scope = {});

// Randomly permutes channel labels across the edges.
void shuffle_channels(std::mt19937_64& rng, SynthGraph& g);

// Uniform random multigraph: `nodes` ids, `edges` edges, kinds mostly Person.
SynthGraph make_uniform(std::mt19937_64& rng, std::size_t nodes, std::size_t edges,
                        const std::vector<std::string>& channels, double time_span);

}  // namespace tgm::synth
