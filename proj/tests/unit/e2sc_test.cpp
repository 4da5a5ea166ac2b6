#include <gtest/gtest.h>

#include <cmath>

#include "prunekit/e2sc.hpp"
#include "prunekit/neighbors.hpp"
#include "synthetic.hpp"

using namespace prunekit;

namespace {

// Score grows with training size: any reduction is a constant loss.
class SizeProxy final : public ProxyLearner {
 public:
  std::string name() const override { return "size"; }
  double score(const CorpusMatrix&, std::span<const InstanceId> training,
               std::span<const InstanceId>, std::span<const ClassId>) const override {
    return static_cast<double>(training.size()) / 1000.0;
  }
};

class FlatProxy final : public ProxyLearner {
 public:
  std::string name() const override { return "flat"; }
  double score(const CorpusMatrix&, std::span<const InstanceId>, std::span<const InstanceId>,
               std::span<const ClassId>) const override {
    return 0.5;
  }
};

// C prototypes, each duplicated `copies` times, plus unique boundary rows
// that mix two prototypes' features.
CorpusMatrix duplicated_prototypes(std::size_t C, std::size_t copies, std::size_t boundary,
                                   std::uint64_t seed) {
  CorpusMatrix m;
  m.n_classes = C;
  m.n_features = 4 * C + boundary;
  auto proto = [&](ClassId c) {
    SparseVector v;
    for (FeatureId f = 0; f < 4; ++f) {
      v.indices.push_back(static_cast<FeatureId>(4 * c + f));
      v.values.push_back(0.5);
    }
    return v;
  };
  for (std::size_t r = 0; r < copies; ++r) {
    for (ClassId c = 0; c < C; ++c) {
      m.rows.push_back(proto(c));
      m.labels.push_back(c);
    }
  }
  Rng rng(seed);
  for (std::size_t b = 0; b < boundary; ++b) {
    const auto c = static_cast<ClassId>(b % C);
    const auto other = static_cast<ClassId>((c + 1) % C);
    SparseVector v;
    const double own = 0.6 + 0.3 * rng.uniform01();
    v.indices = {static_cast<FeatureId>(4 * c), static_cast<FeatureId>(4 * other),
                 static_cast<FeatureId>(4 * C + b)};
    v.values = {own, 1.0 - own, 0.3};
    if (v.indices[1] < v.indices[0]) {
      std::swap(v.indices[0], v.indices[1]);
      std::swap(v.values[0], v.values[1]);
    }
    const double norm = v.norm();
    for (double& x : v.values) x /= norm;
    m.rows.push_back(v);
    m.labels.push_back(c);
  }
  m.validate();
  return m;
}

}  // namespace

TEST(Alpha, EqualConfidenceIsUniform) {
  std::vector<PosteriorRecord> recs;
  for (InstanceId i = 0; i < 4; ++i) recs.push_back(make_record(i, {0.7, 0.3}, 0));
  const auto a = compute_alpha(recs, 4);
  for (double w : a.weights) EXPECT_NEAR(w, 0.25, 1e-12);
}

TEST(Alpha, MisclassifiedGetZeroAndCandidatesSumToOne) {
  std::vector<PosteriorRecord> recs{make_record(0, {0.9, 0.1}, 0), make_record(1, {0.8, 0.2}, 1),
                                    make_record(2, {0.3, 0.7}, 1)};
  const auto a = compute_alpha(recs, 3);
  EXPECT_EQ(a.weights[1], 0.0);
  EXPECT_FALSE(a.candidate[1]);
  EXPECT_NEAR(a.weights[0], 0.9 / 1.6, 1e-12);
  EXPECT_NEAR(a.weights[0] + a.weights[2], 1.0, 1e-12);
  EXPECT_EQ(a.positive(), 2u);
}

TEST(Alpha, NothingRemovable) {
  std::vector<PosteriorRecord> recs{make_record(0, {0.2, 0.8}, 0)};
  EXPECT_THROW(compute_alpha(recs, 1), Error);
}

TEST(Alpha, DuplicatesOutweighBoundaryPoint) {
  // Rows 0 and 1 are identical; row 2 sits between the classes.
  auto unit = [](double a, double b) {
    const double n = std::hypot(a, b);
    return SparseVector{{0, 1}, {a / n, b / n}};
  };
  CorpusMatrix m;
  m.n_features = 2;
  m.n_classes = 2;
  m.rows = {unit(1, 0.1), unit(1, 0.1), unit(1, 0.7), unit(0.6, 1), unit(0.1, 1), unit(0.1, 1)};
  m.labels = {0, 0, 0, 1, 1, 1};
  KnnModel k1(m, 1);
  const auto dup = compute_alpha(loo_predictions(k1), m.size());
  KnnModel k2(m, 2);
  const auto recs = loo_predictions(k2);
  EXPECT_DOUBLE_EQ(recs[0].posterior[0], 1.0);
  EXPECT_LT(recs[2].posterior[0], 1.0);
  const auto a = compute_alpha(recs, m.size());
  EXPECT_GT(a.weights[0], a.weights[2]);
  EXPECT_GT(dup.weights[0], 0.0);
}

TEST(WeightedSampling, Exhaustion) {
  const std::vector<double> w{0.2, 0.0, 0.5, 0.3, 0.0};
  EXPECT_EQ(weighted_sample_without_replacement(w, 3, 1), (std::vector<InstanceId>{0, 2, 3}));
  EXPECT_TRUE(weighted_sample_without_replacement(w, 0, 1).empty());
  EXPECT_THROW(weighted_sample_without_replacement(w, 4, 1), Error);
}

TEST(WeightedSampling, HeavyWeightDominates) {
  std::vector<double> w(20, 1e-6);
  w[7] = 1e6;
  int hits = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const auto pick = weighted_sample_without_replacement(w, 1, s);
    ASSERT_EQ(pick.size(), 1u);
    hits += pick[0] == 7;
  }
  EXPECT_GE(hits, 990);
}

TEST(WeightedSampling, InclusionIsMonotoneInWeight) {
  const std::vector<double> w{0.05, 0.1, 0.15, 0.2, 0.25, 0.25};
  const int trials = 10000;
  std::vector<int> counts(w.size(), 0);
  for (int s = 0; s < trials; ++s) {
    for (InstanceId id : weighted_sample_without_replacement(w, 2, static_cast<std::uint64_t>(s))) {
      ++counts[id];
    }
  }
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    if (w[i] >= w[i + 1]) continue;
    const double pi = counts[i] / double(trials), pj = counts[i + 1] / double(trials);
    const double se = std::sqrt((pi * (1 - pi) + pj * (1 - pj)) / trials);
    EXPECT_LE(pi, pj + 2 * se) << i;
  }
}

TEST(WeightedSampling, DeterministicAndDistinct) {
  Rng rng(5);
  std::vector<double> w(200);
  for (double& x : w) x = rng.uniform01();
  const auto a = weighted_sample_without_replacement(w, 50, 42);
  EXPECT_EQ(a, weighted_sample_without_replacement(w, 50, 42));
  EXPECT_EQ(a.size(), 50u);
  EXPECT_TRUE(std::adjacent_find(a.begin(), a.end()) == a.end());
}

TEST(EstimateBeta, EarlyStopAtFirstRate) {
  const auto m = duplicated_prototypes(2, 20, 10, 1);
  RemovalWeights w;
  w.weights.assign(m.size(), 1.0 / m.size());
  w.candidate.assign(m.size(), true);
  BetaScanConfig cfg;
  cfg.step = 0.1;
  cfg.max = 0.1;
  const auto est = estimate_beta(m, all_ids(m.size()), w, SizeProxy(), cfg);
  EXPECT_EQ(est.beta, 0.0);
  ASSERT_EQ(est.trace.size(), 1u);
  EXPECT_EQ(est.trace[0].verdict, "worse");
}

TEST(EstimateBeta, TraceAscendingWithAtMostOneWorse) {
  const auto m = duplicated_prototypes(3, 20, 12, 2);
  RemovalWeights w;
  w.weights.assign(m.size(), 1.0 / m.size());
  w.candidate.assign(m.size(), true);
  BetaScanConfig cfg;
  const auto flat = estimate_beta(m, all_ids(m.size()), w, FlatProxy(), cfg);
  EXPECT_NEAR(flat.beta, 0.95, 1e-12);
  const auto est = estimate_beta(m, all_ids(m.size()), w, KnnProxy(3), cfg);
  for (std::size_t i = 0; i < est.trace.size(); ++i) {
    if (i) EXPECT_GT(est.trace[i].rate, est.trace[i - 1].rate);
    if (est.trace[i].verdict == "worse") EXPECT_EQ(i + 1, est.trace.size());
  }
}

TEST(EstimateBeta, MissingValidationClassIsAnError) {
  CorpusMatrix m = duplicated_prototypes(2, 10, 0, 1);
  m.rows.push_back(m.rows[0]);
  m.labels.push_back(2);
  m.n_classes = 3;
  RemovalWeights w;
  w.weights.assign(m.size(), 1.0 / m.size());
  w.candidate.assign(m.size(), true);
  EXPECT_THROW(estimate_beta(m, all_ids(m.size()), w, KnnProxy(3), BetaScanConfig{}), Error);
}

TEST(E2SC, DuplicatedPrototypesGiveLargeBeta) {
  const auto m = duplicated_prototypes(4, 50, 40, 3);
  E2SCConfig cfg;
  cfg.scan.seed = 7;
  const auto r = e2sc_select(m, cfg);
  ASSERT_TRUE(r.plan);
  EXPECT_GE(r.plan->beta, 0.5);
}

TEST(E2SC, MaxZeroIsIdentity) {
  const auto m = duplicated_prototypes(2, 10, 6, 1);
  E2SCConfig cfg;
  cfg.scan.max = 0.0;
  const auto r = e2sc_select(m, cfg);
  EXPECT_TRUE(r.removed.empty());
  EXPECT_EQ(r.plan->beta, 0.0);
}

TEST(E2SC, ReductionIsFloorOfBetaN) {
  fixture::SyntheticSpec spec;
  spec.n_docs = 300;
  spec.duplicate_share = 0.3;
  const auto m = fixture::vectorize(fixture::make_corpus(spec));
  E2SCConfig cfg;
  cfg.scan.seed = 3;
  const auto r = e2sc_select(m, cfg);
  const auto expected = static_cast<std::size_t>(std::floor(r.plan->beta * m.size() + 1e-9));
  EXPECT_EQ(r.removed.size(), expected);
  EXPECT_EQ(r.plan->planned_removals, expected);
  const auto again = e2sc_select(m, cfg);
  EXPECT_EQ(again.retained, r.retained);
  EXPECT_EQ(again.plan->weights, r.plan->weights);
}

TEST(E2SC, HardInstancesAreNeverRemoved) {
  fixture::SyntheticSpec spec;
  spec.n_docs = 200;
  spec.topic_share = 0.15;
  const auto m = fixture::vectorize(fixture::make_corpus(spec));
  E2SCConfig cfg;
  KnnModel model(m, cfg.k);
  std::vector<InstanceId> hard;
  for (const auto& r : loo_predictions(model)) {
    if (!r.correct || r.zero_evidence) hard.push_back(r.id);
  }
  ASSERT_FALSE(hard.empty());
  std::size_t removals = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    cfg.scan.seed = seed;
    const auto r = e2sc_select(m, cfg);
    removals += r.removed.size();
    for (InstanceId id : hard) {
      EXPECT_FALSE(std::binary_search(r.removed.begin(), r.removed.end(), id));
    }
  }
  EXPECT_GT(removals, 0u);
}
