#include <gtest/gtest.h>

#include <numeric>

#include "oracles.hpp"
#include "prunekit/neighbors.hpp"
#include "synthetic.hpp"

using namespace prunekit;

namespace {

SparseVector unit(std::vector<FeatureId> idx, std::vector<double> val) {
  SparseVector v{std::move(idx), std::move(val)};
  const double n = v.norm();
  for (double& x : v.values) x /= n;
  return v;
}

CorpusMatrix tiny() {
  CorpusMatrix m;
  m.n_features = 6;
  m.n_classes = 2;
  m.rows = {unit({0, 1}, {1, 1}), unit({0, 1}, {1, 2}), unit({2, 3}, {1, 1}),
            unit({2, 3}, {2, 1}), unit({4}, {1})};
  m.labels = {0, 0, 1, 1, 1};
  return m;
}

}  // namespace

TEST(KnnSearch, IdenticalQueryComesFirst) {
  const auto m = tiny();
  KnnModel model(m, 3);
  const auto res = knn_search(model, m.rows[2]);
  EXPECT_EQ(res.ids[0], 2u);
  EXPECT_NEAR(res.similarities[0], 1.0, 1e-12);
}

TEST(KnnSearch, OrthogonalQueryHasZeroSimilarities) {
  const auto m = tiny();
  KnnModel model(m, 3);
  const auto res = knn_search(model, unit({5}, {1}));
  ASSERT_EQ(res.similarities.size(), 3u);
  for (double s : res.similarities) EXPECT_EQ(s, 0.0);
  EXPECT_EQ(res.ids, (std::vector<InstanceId>{0, 1, 2}));
}

TEST(KnnSearch, TooFewCandidates) {
  const auto m = tiny();
  KnnModel model(m, 5);
  EXPECT_THROW(knn_search(model, m.rows[0], InstanceId{0}), Error);
}

TEST(KnnSearch, SelfExclusion) {
  const auto m = tiny();
  KnnModel model(m, 4);
  const auto res = knn_search(model, m.rows[1], InstanceId{1});
  EXPECT_EQ(std::count(res.ids.begin(), res.ids.end(), 1u), 0);
  EXPECT_EQ(res.ids.size(), 4u);
}

TEST(KnnSearch, MatchesDenseOracleOnRandomMatrices) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto m = fixture::random_matrix(50, 40, 3, 0.1, seed);
    const auto dense = fixture::densify(m);
    KnnModel model(m, 5);
    for (InstanceId q = 0; q < m.size(); ++q) {
      const auto got = knn_search(model, m.rows[q], q);
      const auto want = fixture::dense_knn(dense, dense[q], 5, q);
      ASSERT_EQ(got.ids, want.ids) << "seed " << seed << " query " << q;
      for (std::size_t j = 0; j < got.ids.size(); ++j) {
        EXPECT_NEAR(got.similarities[j], want.similarities[j], 1e-12);
      }
    }
  }
}

TEST(KnnSearch, RestrictedMembers) {
  const auto m = fixture::random_matrix(60, 30, 2, 0.15, 7);
  const auto dense = fixture::densify(m);
  std::vector<InstanceId> members;
  for (InstanceId i = 0; i < m.size(); i += 2) members.push_back(i);
  KnnModel model(m, members, 4);
  fixture::Dense sub;
  for (InstanceId id : members) sub.push_back(dense[id]);
  for (InstanceId q = 1; q < m.size(); q += 2) {
    const auto got = knn_search(model, m.rows[q]);
    const auto want = fixture::dense_knn(sub, dense[q], 4, std::nullopt);
    ASSERT_EQ(got.ids.size(), want.ids.size());
    for (std::size_t j = 0; j < got.ids.size(); ++j) {
      EXPECT_EQ(got.ids[j], members[want.ids[j]]);
    }
  }
}

TEST(KnnSearch, PermutationPreservesNeighborSets) {
  const auto m = fixture::random_matrix(40, 200, 2, 0.05, 11);
  std::vector<InstanceId> perm(m.size());
  std::iota(perm.begin(), perm.end(), 0u);
  Rng rng(3);
  rng.shuffle(perm);
  const auto p = m.subset(perm);  // row i of p is row perm[i] of m
  KnnModel a(m, 3), b(p, 3);
  for (InstanceId i = 0; i < p.size(); ++i) {
    const auto ra = knn_search(a, m.rows[perm[i]], perm[i]);
    const auto rb = knn_search(b, p.rows[i], i);
    ASSERT_EQ(ra.similarities.size(), rb.similarities.size());
    for (std::size_t j = 0; j < ra.similarities.size(); ++j) {
      EXPECT_NEAR(ra.similarities[j], rb.similarities[j], 1e-12);
    }
    // Without a tie at the cut-off the neighbor set is unique.
    const double last = ra.similarities.back();
    const auto beyond = knn_search(a, m.rows[perm[i]], 4, perm[i]).similarities.back();
    if (beyond == last) continue;
    std::vector<InstanceId> mapped;
    for (InstanceId id : rb.ids) mapped.push_back(perm[id]);
    std::sort(mapped.begin(), mapped.end());
    auto ids = ra.ids;
    std::sort(ids.begin(), ids.end());
    EXPECT_EQ(ids, mapped);
  }
}

TEST(KnnPosterior, WeightedVoteExample) {
  NeighborList n{{0, 1, 2}, {0.5, 0.3, 0.2}};
  const std::vector<ClassId> labels{0, 0, 1};
  const auto p = posterior_from_neighbors(n, labels, 2);
  EXPECT_NEAR(p.posterior[0], 0.8, 1e-12);
  EXPECT_NEAR(p.posterior[1], 0.2, 1e-12);
  EXPECT_FALSE(p.zero_evidence);
}

TEST(KnnPosterior, SingleNeighborIsOneHot) {
  const auto m = tiny();
  KnnModel model(m, 1);
  const auto p = knn_posterior(model, m.rows[3], InstanceId{3});
  EXPECT_EQ(p.posterior, (std::vector<double>{0.0, 1.0}));
}

TEST(KnnPosterior, ZeroEvidenceIsUniform) {
  NeighborList n{{0, 1, 2}, {0.0, 0.0, 0.0}};
  const std::vector<ClassId> labels{0, 1, 2, 3};
  const auto p = posterior_from_neighbors(n, labels, 4);
  EXPECT_TRUE(p.zero_evidence);
  for (double x : p.posterior) EXPECT_DOUBLE_EQ(x, 0.25);
}

TEST(KnnPosterior, IsAProbabilityVector) {
  const auto m = fixture::random_matrix(80, 60, 4, 0.08, 5);
  KnnModel model(m, 7);
  for (InstanceId q = 0; q < m.size(); ++q) {
    const auto p = knn_posterior(model, m.rows[q], q).posterior;
    double s = 0.0;
    for (double x : p) {
      EXPECT_GE(x, 0.0);
      s += x;
    }
    EXPECT_NEAR(s, 1.0, 1e-9);
  }
}

TEST(LooPredictions, DuplicatePairIsConfident) {
  CorpusMatrix m;
  m.n_features = 4;
  m.n_classes = 2;
  m.rows = {unit({0}, {1}), unit({0}, {1}), unit({2}, {1}), unit({1, 3}, {1, 1})};
  m.labels = {0, 0, 1, 1};
  KnnModel model(m, 1);
  const auto recs = loo_predictions(model);
  ASSERT_EQ(recs.size(), 4u);
  for (int i = 0; i < 2; ++i) {
    EXPECT_TRUE(recs[i].correct);
    EXPECT_DOUBLE_EQ(recs[i].posterior[0], 1.0);
  }
}

TEST(LooPredictions, IsolatedAmongEnemiesIsWrong) {
  CorpusMatrix m;
  m.n_features = 3;
  m.n_classes = 2;
  m.rows = {unit({0, 1}, {1, 1}), unit({0}, {1}), unit({0, 1}, {2, 1}), unit({2}, {1})};
  m.labels = {0, 1, 1, 0};
  KnnModel model(m, 2);
  const auto recs = loo_predictions(model);
  EXPECT_FALSE(recs[0].correct);
}

TEST(LooPredictions, MatchesBruteForce) {
  const auto m = fixture::random_matrix(30, 25, 3, 0.2, 21);
  const auto dense = fixture::densify(m);
  KnnModel model(m, 4);
  const auto recs = loo_predictions(model);
  ASSERT_EQ(recs.size(), 30u);
  for (InstanceId i = 0; i < 30; ++i) {
    const auto nb = fixture::dense_knn(dense, dense[i], 4, i);
    std::vector<double> p(3, 0.0);
    double total = 0.0;
    for (std::size_t j = 0; j < nb.ids.size(); ++j) {
      p[m.labels[nb.ids[j]]] += nb.similarities[j];
      total += nb.similarities[j];
    }
    if (total > 0) {
      for (double& x : p) x /= total;
    } else {
      p.assign(3, 1.0 / 3.0);
    }
    EXPECT_EQ(recs[i].id, i);
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(recs[i].posterior[c], p[c], 1e-12);
    const auto pred = static_cast<ClassId>(std::max_element(p.begin(), p.end()) - p.begin());
    EXPECT_EQ(recs[i].predicted, pred);
    EXPECT_EQ(recs[i].correct, pred == m.labels[i]);
    EXPECT_EQ(recs[i].zero_evidence, total == 0.0);
  }
}
