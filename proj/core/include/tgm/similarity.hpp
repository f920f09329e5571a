#pragma once

#include <map>
#include <span>
#include <vector>

#include "tgm/view.hpp"

namespace tgm {

struct ProfileEntry {
  ChannelId channel;
  Direction direction;
  std::size_t count;
  double weight_sum;
};

/// Summary of an edge bundle: per (channel, direction) counts and weights, plus
/// its effective times in ascending order.
struct BundleProfile {
  std::vector<ProfileEntry> entries;  // sorted by (channel, direction), counts > 0
  std::vector<double> times;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
};

BundleProfile profile_of(const EdgeBundle& bundle);

struct SimilarityConfig {
  double w_presence = 0.3;
  double w_count = 0.3;
  double w_temporal = 0.4;
  double bin_width = 86400.0;
  double offset_range = 0.0;
  double offset_step = 86400.0;
  double accept_threshold = 0.6;
  double tie_epsilon = 1e-9;
  // Folds forward/backward keys together before comparing.
  bool ignore_direction = false;
  // Averages the count component with min/max of per-key weight sums.
  bool use_weights = false;

  // Throws InvalidConfig.
  void validate() const;

  friend bool operator==(const SimilarityConfig&, const SimilarityConfig&) = default;
};

struct SimilarityScore {
  double total = 0.0;
  double presence = 0.0;
  double count = 0.0;
  double temporal = 0.0;
};

SimilarityScore profile_similarity(const BundleProfile& a, const BundleProfile& b, const SimilarityConfig& cfg);
SimilarityScore bundle_similarity(const EdgeBundle& a, const EdgeBundle& b, const SimilarityConfig& cfg);

struct OffsetMatch {
  double offset = 0.0;
  double cosine = 0.0;
};

// Cosine of the binned histograms of `a` and `b + shift`. Bins are centred on
// the grid origin + k*bin_width where origin is the smallest time across both
// (shifted) sets. Returns 1 when both are empty and 0 when exactly one is.
double binned_cosine(std::span<const double> a, std::span<const double> b, double bin_width, double shift);

// Searches shifts k*offset_step with |k*offset_step| <= offset_range. Ties go
// to the smallest |shift|, then the smallest shift.
OffsetMatch best_offset(std::span<const double> a, std::span<const double> b, const SimilarityConfig& cfg);

using NodeMap = std::map<NodeId, NodeId>;

// Mean similarity over unordered template pairs inside the mapping's domain
// whose template bundle is non-empty; 0 when no such pair exists.
// Throws EmptyMapping (fewer than 2 nodes), NotInjective, KindMismatch,
// UnknownNode, IncompatibleRegistry.
double mapping_score(const GraphView& tmpl, const GraphView& target, const NodeMap& mapping,
                     const SimilarityConfig& cfg);

}  // namespace tgm
