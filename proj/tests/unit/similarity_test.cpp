#include <gtest/gtest.h>

#include "fixture.hpp"
#include "properties.hpp"
#include "reference.hpp"
#include "tgm/error.hpp"
#include "tgm/similarity.hpp"

namespace tgm {
namespace {

using testing::fixture_graph;
using testing::thinned_fixture_graph;

SimilarityConfig hundred_bins() {
  SimilarityConfig cfg;
  cfg.bin_width = 100.0;
  cfg.offset_step = 100.0;
  return cfg;
}

EdgeBundle bundle_of(std::vector<std::tuple<ChannelId, Direction, double>> edges) {
  EdgeBundle b{NodeId{1}, NodeId{2}, {}};
  EdgeIndex i = 0;
  for (const auto& [c, d, t] : edges) b.edges.push_back(BundleEdge{i++, d, c, t, 1.0});
  return b;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::Io;
}

TEST(Profile, FixtureBundles) {
  const auto view = full_view(fixture_graph());
  const auto email = ChannelRegistry::defaults().require("email");
  const auto p = profile_of(edge_bundle(view, NodeId{1}, NodeId{2}));
  ASSERT_EQ(p.entries.size(), 1u);
  EXPECT_EQ(p.entries[0].channel, email);
  EXPECT_EQ(p.entries[0].direction, Direction::Forward);
  EXPECT_EQ(p.entries[0].count, 2u);
  EXPECT_EQ(p.entries[0].weight_sum, 2.0);
  EXPECT_EQ(p.times, (std::vector<double>{100, 200}));

  const auto back = profile_of(edge_bundle(view, NodeId{2}, NodeId{1}));
  ASSERT_EQ(back.entries.size(), 1u);
  EXPECT_EQ(back.entries[0].direction, Direction::Backward);
  EXPECT_EQ(back.entries[0].count, 2u);

  const auto empty = profile_of(edge_bundle(view, NodeId{1}, NodeId{3}));
  EXPECT_TRUE(empty.entries.empty());
  EXPECT_TRUE(empty.times.empty());
}

TEST(BundleSimilarity, IdenticalBundlesScoreOne) {
  const auto view = full_view(fixture_graph());
  const auto b = edge_bundle(view, NodeId{1}, NodeId{2});
  const auto s = bundle_similarity(b, b, SimilarityConfig{});
  EXPECT_EQ(s.total, 1.0);
  EXPECT_EQ(s.presence, 1.0);
  EXPECT_EQ(s.count, 1.0);
  EXPECT_EQ(s.temporal, 1.0);
}

TEST(BundleSimilarity, ThinnedBundleHandValue) {
  const auto a = edge_bundle(full_view(fixture_graph()), NodeId{1}, NodeId{2});
  const auto b = edge_bundle(full_view(thinned_fixture_graph()), NodeId{1}, NodeId{2});
  const auto s = bundle_similarity(a, b, hundred_bins());
  EXPECT_EQ(s.presence, 1.0);
  EXPECT_EQ(s.count, 0.5);
  EXPECT_NEAR(s.temporal, 0.70711, 1e-5);
  EXPECT_NEAR(s.total, 0.73284, 1e-5);
}

TEST(BundleSimilarity, DisjointKeysWithMatchingTimes) {
  const auto& reg = ChannelRegistry::defaults();
  const auto phone = bundle_of({{reg.require("phone"), Direction::Forward, 500.0}});
  const auto email = bundle_of({{reg.require("email"), Direction::Forward, 500.0}});
  const auto s = bundle_similarity(phone, email, SimilarityConfig{});
  EXPECT_EQ(s.presence, 0.0);
  EXPECT_EQ(s.count, 0.0);
  EXPECT_EQ(s.temporal, 1.0);
  EXPECT_NEAR(s.total, 0.4, 1e-15);
}

TEST(BundleSimilarity, EmptyConventions) {
  const EdgeBundle empty{NodeId{1}, NodeId{2}, {}};
  const auto one = bundle_of({{0, Direction::Forward, 1.0}});
  const auto both = bundle_similarity(empty, empty, SimilarityConfig{});
  EXPECT_EQ(both.total, 1.0);
  const auto half = bundle_similarity(empty, one, SimilarityConfig{});
  EXPECT_EQ(half.presence, 0.0);
  EXPECT_EQ(half.count, 0.0);
  EXPECT_EQ(half.temporal, 0.0);
  EXPECT_EQ(half.total, 0.0);
}

TEST(BundleSimilarity, DirectionFolding) {
  const auto fwd = bundle_of({{5, Direction::Forward, 10.0}});
  const auto bwd = bundle_of({{5, Direction::Backward, 10.0}});
  SimilarityConfig cfg;
  EXPECT_EQ(bundle_similarity(fwd, bwd, cfg).presence, 0.0);
  cfg.ignore_direction = true;
  EXPECT_EQ(bundle_similarity(fwd, bwd, cfg).total, 1.0);
}

TEST(BundleSimilarity, WeightsOnlyMatterWhenEnabled) {
  auto a = bundle_of({{5, Direction::Forward, 10.0}});
  auto b = a;
  b.edges[0].weight = 3.0;
  SimilarityConfig cfg;
  EXPECT_EQ(bundle_similarity(a, b, cfg).count, 1.0);
  cfg.use_weights = true;
  EXPECT_NEAR(bundle_similarity(a, b, cfg).count, 0.5 * (1.0 + 1.0 / 3.0), 1e-15);
}

TEST(BestOffset, Examples) {
  SimilarityConfig cfg;
  cfg.bin_width = 100.0;
  cfg.offset_range = 200.0;
  cfg.offset_step = 50.0;
  const std::vector<double> a{100, 200};
  const std::vector<double> b{150, 250};
  const auto m = best_offset(a, b, cfg);
  EXPECT_EQ(m.offset, -50.0);
  EXPECT_DOUBLE_EQ(m.cosine, 1.0);

  const auto same = best_offset(a, a, cfg);
  EXPECT_EQ(same.offset, 0.0);
  EXPECT_DOUBLE_EQ(same.cosine, 1.0);

  const auto none = best_offset(a, {}, cfg);
  EXPECT_EQ(none.offset, 0.0);
  EXPECT_EQ(none.cosine, 0.0);

  cfg.offset_step = 0.0;
  EXPECT_EQ(code_of([&] { best_offset(a, b, cfg); }), ErrorCode::InvalidConfig);
}

TEST(BestOffset, TiesPreferSmallMagnitudeThenNegative) {
  SimilarityConfig cfg;
  cfg.bin_width = 10.0;
  cfg.offset_range = 100.0;
  cfg.offset_step = 100.0;
  // No grid shift brings the points together, so the zero shift is kept.
  const std::vector<double> a{0};
  const std::vector<double> b{1000};
  EXPECT_EQ(best_offset(a, b, cfg).offset, 0.0);
  // Two peaks 200 apart matched equally well by -100 and +100.
  const std::vector<double> c{0, 200};
  const std::vector<double> d{100};
  const auto m = best_offset(c, d, cfg);
  EXPECT_EQ(m.offset, -100.0);
}

TEST(BinnedCosine, CentredBins) {
  // Bins are centred on origin + k*w, so 149 and 100 share a bin but 150 does not.
  const std::vector<double> a{100};
  EXPECT_EQ(binned_cosine(a, std::vector<double>{149}, 100.0, 0.0), 1.0);
  EXPECT_EQ(binned_cosine(a, std::vector<double>{150}, 100.0, 0.0), 0.0);
}

TEST(Config, Validation) {
  SimilarityConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.w_presence = 0.5;
  EXPECT_EQ(code_of([&] { cfg.validate(); }), ErrorCode::InvalidConfig);
  cfg = {};
  cfg.bin_width = 0.0;
  EXPECT_EQ(code_of([&] { cfg.validate(); }), ErrorCode::InvalidConfig);
  cfg = {};
  cfg.accept_threshold = 1.5;
  EXPECT_EQ(code_of([&] { cfg.validate(); }), ErrorCode::InvalidConfig);
  cfg = {};
  cfg.offset_range = -1.0;
  EXPECT_EQ(code_of([&] { cfg.validate(); }), ErrorCode::InvalidConfig);
}

TEST(MappingScore, ExamplesAndErrors) {
  const auto fixture = full_view(fixture_graph());
  const auto thin = full_view(thinned_fixture_graph());
  const auto cfg = hundred_bins();
  const NodeMap identity{{NodeId{1}, NodeId{1}}, {NodeId{2}, NodeId{2}}, {NodeId{3}, NodeId{3}}, {NodeId{4}, NodeId{4}}};
  EXPECT_EQ(mapping_score(fixture, fixture, identity, cfg), 1.0);

  const NodeMap sub{{NodeId{1}, NodeId{1}}, {NodeId{2}, NodeId{2}}, {NodeId{4}, NodeId{4}}};
  EXPECT_NEAR(mapping_score(fixture, thin, sub, cfg), 0.86642, 1e-4);

  EXPECT_EQ(code_of([&] { mapping_score(fixture, thin, NodeMap{{NodeId{1}, NodeId{1}}}, cfg); }), ErrorCode::EmptyMapping);
  EXPECT_EQ(code_of([&] { mapping_score(fixture, thin, NodeMap{{NodeId{1}, NodeId{1}}, {NodeId{2}, NodeId{1}}}, cfg); }),
            ErrorCode::NotInjective);
  EXPECT_EQ(code_of([&] { mapping_score(fixture, thin, NodeMap{{NodeId{1}, NodeId{4}}, {NodeId{4}, NodeId{1}}}, cfg); }),
            ErrorCode::KindMismatch);
  // Pairs 1-3 have no template bundle, so nothing is scorable.
  EXPECT_EQ(mapping_score(fixture, thin, NodeMap{{NodeId{1}, NodeId{1}}, {NodeId{3}, NodeId{3}}}, cfg), 0.0);
}

TEST(MappingScore, ExactCopyUnderRelabelScoresOne) {
  const std::string edges = std::string(kEdgesHeader) +
                            "\n11,email,12,100,1,,\n11,email,12,200,1,,\n12,phone,13,150,1,,\n11,sell,14,300,2,A,B\n"
                            "13,buy,14,400,5,B,A\n";
  const auto copy = load_graph(edges, std::string("node,kind,label\n11,Person,\n12,Person,\n13,Person,\n14,Item,\n"),
                               ChannelRegistry::defaults()).graph;
  NodeMap m;
  for (std::uint64_t i = 1; i <= 4; ++i) m.emplace(NodeId{i}, NodeId{i + 10});
  EXPECT_EQ(mapping_score(full_view(fixture_graph()), full_view(copy), m, SimilarityConfig{}), 1.0);
}

TEST(Properties, SimilarityLaws) {
  const auto f = testing::run_property(testing::similarity_laws, 1000);
  EXPECT_FALSE(f) << *f;
}

TEST(Properties, ReferenceAgreementOnMappingScores) {
  // mapping_score equals the reference mean over scorable pairs for random maps.
  std::mt19937_64 rng(8);
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    testing::RandomGraphSpec spec;
    spec.min_nodes = 2;
    spec.max_nodes = 6;
    const auto a = testing::random_graph(rng, spec);
    const auto b = testing::random_graph(rng, spec);
    const auto cfg = testing::random_similarity_config(rng);
    NodeMap m;
    std::set<std::uint64_t> used;
    for (const auto& [t, kind] : a.nodes) {
      for (const auto& [x, xk] : b.nodes) {
        if (xk == kind && !used.contains(x) && std::bernoulli_distribution(0.5)(rng)) {
          m.emplace(NodeId{t}, NodeId{x});
          used.insert(x);
          break;
        }
      }
    }
    if (m.size() < 2) continue;
    const auto ta = full_view(a.graph);
    const auto tb = full_view(b.graph);
    double sum = 0.0;
    int n = 0;
    for (auto i1 = m.begin(); i1 != m.end(); ++i1) {
      for (auto i2 = std::next(i1); i2 != m.end(); ++i2) {
        const auto tbundle = edge_bundle(ta, i1->first, i2->first);
        if (tbundle.empty()) continue;
        sum += testing::ref_similarity(testing::ref_edges(tbundle), testing::ref_edges(edge_bundle(tb, i1->second, i2->second)), cfg).total;
        ++n;
      }
    }
    ASSERT_NEAR(mapping_score(ta, tb, m, cfg), n == 0 ? 0.0 : sum / n, 1e-9);
    ++checked;
  }
  EXPECT_GT(checked, 300);
}

}  // namespace
}  // namespace tgm
