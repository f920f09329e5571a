#include "tgm/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <tuple>
#include <unordered_set>

#include "tgm/error.hpp"

namespace tgm {
namespace {

struct KeyStat {
  std::uint32_t key;
  double count;
  double weight;
};

std::vector<KeyStat> keyed(const BundleProfile& p, bool ignore_direction) {
  std::vector<KeyStat> out;
  out.reserve(p.entries.size());
  for (const auto& e : p.entries) {
    const std::uint32_t key = ignore_direction ? std::uint32_t{e.channel} * 2
                                               : std::uint32_t{e.channel} * 2 + (e.direction == Direction::Backward);
    if (!out.empty() && out.back().key == key) {
      out.back().count += static_cast<double>(e.count);
      out.back().weight += e.weight_sum;
    } else {
      out.push_back({key, static_cast<double>(e.count), e.weight_sum});
    }
  }
  return out;
}

struct Overlap {
  std::size_t shared = 0;
  std::size_t total = 0;
  double min_count = 0.0;
  double max_count = 0.0;
  double min_weight = 0.0;
  double max_weight = 0.0;
};

Overlap overlap(const std::vector<KeyStat>& a, const std::vector<KeyStat>& b) {
  Overlap o;
  std::size_t i = 0;
  std::size_t j = 0;
  const auto only = [&](const KeyStat& k) {
    ++o.total;
    o.max_count += k.count;
    o.max_weight += std::abs(k.weight);
  };
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].key < b[j].key)) {
      only(a[i++]);
    } else if (i == a.size() || b[j].key < a[i].key) {
      only(b[j++]);
    } else {
      ++o.shared;
      ++o.total;
      o.min_count += std::min(a[i].count, b[j].count);
      o.max_count += std::max(a[i].count, b[j].count);
      o.min_weight += std::min(std::abs(a[i].weight), std::abs(b[j].weight));
      o.max_weight += std::max(std::abs(a[i].weight), std::abs(b[j].weight));
      ++i;
      ++j;
    }
  }
  return o;
}

// Run-length encoded bin counts, ascending by bin.
std::vector<std::pair<std::int64_t, double>> binned(std::span<const double> times, double shift, double origin,
                                                   double width) {
  std::vector<std::int64_t> bins;
  bins.reserve(times.size());
  for (double t : times) bins.push_back(static_cast<std::int64_t>(std::floor(((t + shift) - origin) / width + 0.5)));
  std::sort(bins.begin(), bins.end());
  std::vector<std::pair<std::int64_t, double>> out;
  for (auto b : bins) {
    if (!out.empty() && out.back().first == b) {
      out.back().second += 1.0;
    } else {
      out.emplace_back(b, 1.0);
    }
  }
  return out;
}

}  // namespace

BundleProfile profile_of(const EdgeBundle& bundle) {
  BundleProfile p;
  p.times.reserve(bundle.size());
  for (const auto& e : bundle.edges) {
    p.times.push_back(e.time);
    auto it = std::find_if(p.entries.begin(), p.entries.end(), [&](const ProfileEntry& x) {
      return x.channel == e.channel && x.direction == e.direction;
    });
    if (it == p.entries.end()) {
      p.entries.push_back(ProfileEntry{e.channel, e.direction, 1, e.weight});
    } else {
      ++it->count;
      it->weight_sum += e.weight;
    }
  }
  std::sort(p.entries.begin(), p.entries.end(), [](const ProfileEntry& a, const ProfileEntry& b) {
    return std::tie(a.channel, a.direction) < std::tie(b.channel, b.direction);
  });
  std::sort(p.times.begin(), p.times.end());
  return p;
}

void SimilarityConfig::validate() const {
  const auto bad = [](const char* what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (!(w_presence >= 0.0) || !(w_count >= 0.0) || !(w_temporal >= 0.0)) bad("similarity weights must be non-negative");
  if (std::abs(w_presence + w_count + w_temporal - 1.0) > 1e-12) bad("similarity weights must sum to 1");
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) bad("bin_width must be positive");
  if (!(offset_range >= 0.0) || !std::isfinite(offset_range)) bad("offset_range must be non-negative");
  if (!(offset_step > 0.0) || !std::isfinite(offset_step)) bad("offset_step must be positive");
  if (!(accept_threshold >= 0.0 && accept_threshold <= 1.0)) bad("accept_threshold must lie in [0, 1]");
  if (!(tie_epsilon >= 0.0)) bad("tie_epsilon must be non-negative");
}

double binned_cosine(std::span<const double> a, std::span<const double> b, double bin_width, double shift) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  const double origin = std::min(*std::min_element(a.begin(), a.end()), *std::min_element(b.begin(), b.end()) + shift);
  const auto ha = binned(a, 0.0, origin, bin_width);
  const auto hb = binned(b, shift, origin, bin_width);
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (const auto& [bin, c] : ha) na += c * c;
  for (const auto& [bin, c] : hb) nb += c * c;
  for (std::size_t i = 0, j = 0; i < ha.size() && j < hb.size();) {
    if (ha[i].first < hb[j].first) {
      ++i;
    } else if (hb[j].first < ha[i].first) {
      ++j;
    } else {
      dot += ha[i++].second * hb[j++].second;
    }
  }
  return std::clamp(dot / std::sqrt(na * nb), 0.0, 1.0);
}

OffsetMatch best_offset(std::span<const double> a, std::span<const double> b, const SimilarityConfig& cfg) {
  if (!(cfg.offset_step > 0.0)) throw Error(ErrorCode::InvalidConfig, "offset_step must be positive");
  if (a.empty() || b.empty()) return {0.0, (a.empty() && b.empty()) ? 1.0 : 0.0};
  const auto steps = static_cast<std::int64_t>(std::floor(cfg.offset_range / cfg.offset_step + 1e-9));
  OffsetMatch best{0.0, binned_cosine(a, b, cfg.bin_width, 0.0)};
  // Visit 0, -1, +1, -2, +2, ... so that the first maximum wins the tie rule.
  for (std::int64_t k = 1; k <= steps && best.cosine < 1.0; ++k) {
    for (double sign : {-1.0, 1.0}) {
      const double delta = sign * static_cast<double>(k) * cfg.offset_step;
      const double c = binned_cosine(a, b, cfg.bin_width, delta);
      if (c > best.cosine + 1e-12) best = {delta, c};
    }
  }
  return best;
}

SimilarityScore profile_similarity(const BundleProfile& a, const BundleProfile& b, const SimilarityConfig& cfg) {
  const auto ka = keyed(a, cfg.ignore_direction);
  const auto kb = keyed(b, cfg.ignore_direction);
  const auto o = overlap(ka, kb);

  SimilarityScore s;
  s.presence = o.total == 0 ? 1.0 : static_cast<double>(o.shared) / static_cast<double>(o.total);
  s.count = o.max_count == 0.0 ? 1.0 : o.min_count / o.max_count;
  if (cfg.use_weights) {
    const double w = o.max_weight == 0.0 ? 1.0 : o.min_weight / o.max_weight;
    s.count = 0.5 * (s.count + w);
  }
  s.temporal = best_offset(a.times, b.times, cfg).cosine;
  s.total = std::clamp(cfg.w_presence * s.presence + cfg.w_count * s.count + cfg.w_temporal * s.temporal, 0.0, 1.0);
  return s;
}

SimilarityScore bundle_similarity(const EdgeBundle& a, const EdgeBundle& b, const SimilarityConfig& cfg) {
  return profile_similarity(profile_of(a), profile_of(b), cfg);
}

double mapping_score(const GraphView& tmpl, const GraphView& target, const NodeMap& mapping,
                     const SimilarityConfig& cfg) {
  if (mapping.size() < 2) throw Error(ErrorCode::EmptyMapping, "mapping needs at least two template nodes");
  if (tmpl.graph().channels() != target.graph().channels()) {
    throw Error(ErrorCode::IncompatibleRegistry, "template and target use different channel registries");
  }
  const auto& tg = tmpl.graph();
  const auto& gg = target.graph();
  std::vector<std::int64_t> image(tg.node_count(), -1);
  std::unordered_set<NodeIndex> used;
  for (const auto& [t, x] : mapping) {
    const auto ti = tg.index_of(t);
    const auto xi = gg.index_of(x);
    if (!used.insert(xi).second) {
      throw Error(ErrorCode::NotInjective, "target node " + std::to_string(x.value) + " is mapped twice");
    }
    if (tg.kind_of(ti) != gg.kind_of(xi)) {
      throw Error(ErrorCode::KindMismatch, "node " + std::to_string(t.value) + " and " + std::to_string(x.value) +
                                               " have different kinds");
    }
    image[ti] = xi;
  }
  double sum = 0.0;
  std::size_t pairs = 0;
  for (const auto& [t, x] : mapping) {
    const auto a = tg.index_of(t);
    for (NodeIndex b : detail::visible_neighbors(tmpl, a)) {
      if (b <= a || image[b] < 0) continue;
      const auto tb = detail::bundle_at(tmpl, a, b);
      const auto xb = detail::bundle_at(target, static_cast<NodeIndex>(image[a]), static_cast<NodeIndex>(image[b]));
      sum += bundle_similarity(tb, xb, cfg).total;
      ++pairs;
    }
  }
  return pairs == 0 ? 0.0 : sum / static_cast<double>(pairs);
}

}  // namespace tgm
