#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "prunekit/weak.hpp"
#include "synthetic.hpp"

using namespace prunekit;

namespace {

CorpusMatrix two_clusters() {
  CorpusMatrix m;
  m.n_features = 2;
  m.n_classes = 2;
  m.rows = {SparseVector{{0}, {1.0}}, SparseVector{{1}, {1.0}}};
  m.labels = {0, 1};
  return m;
}

LinearModel random_model(std::size_t C, std::size_t V, std::uint64_t seed) {
  Rng rng(seed);
  LinearModel m;
  m.n_classes = C;
  m.n_features = V;
  m.weights.resize(C * V);
  m.bias.resize(C);
  for (double& w : m.weights) w = rng.uniform01() * 2 - 1;
  for (double& b : m.bias) b = rng.uniform01() * 2 - 1;
  return m;
}

}  // namespace

TEST(TrainLogreg, SeparableSingletons) {
  const auto m = two_clusters();
  const auto model = train_logreg(m, LogRegParams{});
  EXPECT_EQ(predict(model, m.rows), (std::vector<ClassId>{0, 1}));
}

TEST(TrainLogreg, SingleClassIsAnError) {
  auto m = two_clusters();
  m.labels = {0, 0};
  EXPECT_THROW(train_logreg(m, LogRegParams{}), Error);
}

TEST(TrainLogreg, DuplicatingDataWithDoubledPenaltyKeepsTheMinimizer) {
  const auto m = fixture::random_matrix(60, 30, 3, 0.15, 4);
  std::vector<InstanceId> twice;
  for (int r = 0; r < 2; ++r) {
    for (InstanceId i = 0; i < m.size(); ++i) twice.push_back(i);
  }
  LogRegParams p;
  p.tol = 1e-12;
  p.max_iters = 2000;
  const auto once = train_logreg(m, p);
  LogRegParams p2 = p;
  p2.l2_strength = 2 * p.l2_strength;
  const auto dup = train_logreg(m, twice, p2);
  EXPECT_NEAR(dup.objective, 2 * once.objective, 1e-6 * once.objective);
  for (std::size_t j = 0; j < once.weights.size(); ++j) {
    EXPECT_NEAR(dup.weights[j], once.weights[j], 1e-4);
  }
  EXPECT_EQ(predict(dup, m.rows), predict(once, m.rows));
}

TEST(TrainLogreg, MatchesGradientDescentReference) {
  fixture::SyntheticSpec spec;
  spec.n_docs = 100;
  spec.n_classes = 2;
  spec.doc_length = 20;
  spec.background_words = 150;
  const auto m = fixture::vectorize(fixture::make_corpus(spec));
  const auto model = train_logreg(m, LogRegParams{});
  const double reference =
      fixture::gd_logreg_objective(fixture::densify(m), m.labels, 2, 1.0, 1e-4, 200000);
  EXPECT_NEAR(model.objective, reference, 1e-3);
  EXPECT_NEAR(logreg_objective(m, all_ids(m.size()), model, 1.0), model.objective, 1e-9);
}

TEST(TrainLogreg, GradientMatchesFiniteDifferences) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto m = fixture::random_matrix(25, 8, 3, 0.4, seed);
    const auto ids = all_ids(m.size());
    auto model = random_model(3, 8, seed + 10);
    std::vector<double> grad;
    logreg_objective(m, ids, model, 0.7, &grad);
    ASSERT_EQ(grad.size(), model.weights.size() + model.bias.size());
    const double h = 1e-5;
    for (std::size_t j = 0; j < grad.size(); ++j) {
      double& x = j < model.weights.size() ? model.weights[j]
                                           : model.bias[j - model.weights.size()];
      const double keep = x;
      x = keep + h;
      const double up = logreg_objective(m, ids, model, 0.7);
      x = keep - h;
      const double down = logreg_objective(m, ids, model, 0.7);
      x = keep;
      const double fd = (up - down) / (2 * h);
      EXPECT_LE(std::abs(fd - grad[j]), 1e-4 * std::max(1.0, std::abs(fd)))
          << "seed " << seed << " coordinate " << j;
    }
  }
}

TEST(TrainLogreg, Deterministic) {
  const auto m = fixture::random_matrix(80, 40, 3, 0.1, 8);
  const auto a = train_logreg(m, LogRegParams{});
  const auto b = train_logreg(m, LogRegParams{});
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.bias, b.bias);
}

TEST(PredictPosterior, ZeroModelIsUniform) {
  LinearModel model;
  model.n_classes = 4;
  model.n_features = 3;
  model.weights.assign(12, 0.0);
  model.bias.assign(4, 0.0);
  for (double p : predict_posterior(model, SparseVector{{0, 2}, {0.6, 0.8}})) {
    EXPECT_DOUBLE_EQ(p, 0.25);
  }
}

TEST(PredictPosterior, DominantBias) {
  LinearModel model;
  model.n_classes = 3;
  model.n_features = 2;
  model.weights.assign(6, 0.0);
  model.bias = {50.0, 0.0, 0.0};
  const auto p = predict_posterior(model, SparseVector{{1}, {1.0}});
  EXPECT_GT(p[0], 1 - 1e-12);
}

TEST(PredictPosterior, MatchesDenseSoftmax) {
  const auto m = fixture::random_matrix(10, 12, 3, 0.3, 2);
  const auto model = random_model(3, 12, 99);
  const auto dense = fixture::densify(m);
  for (std::size_t i = 0; i < m.size(); ++i) {
    std::vector<double> s(model.bias);
    for (std::size_t f = 0; f < 12; ++f) {
      for (std::size_t c = 0; c < 3; ++c) s[c] += dense[i][f] * model.weight(f, c);
    }
    double z = 0;
    for (double v : s) z += std::exp(v);
    const auto p = predict_posterior(model, m.rows[i]);
    double total = 0;
    for (std::size_t c = 0; c < 3; ++c) {
      EXPECT_NEAR(p[c], std::exp(s[c]) / z, 1e-12);
      EXPECT_GT(p[c], 0.0);
      total += p[c];
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}

TEST(CrossPredict, EveryInstanceOnceAndOutOfFold) {
  fixture::SyntheticSpec spec;
  spec.n_docs = 10;
  spec.n_classes = 2;
  spec.doc_length = 30;
  spec.background_words = 40;
  const auto m = fixture::vectorize(fixture::make_corpus(spec));
  const auto recs = cross_predict(m, 5, 3, LogRegParams{});
  ASSERT_EQ(recs.size(), 10u);
  std::vector<int> seen(10, 0);
  for (const auto& r : recs) ++seen[r.id];
  for (int s : seen) EXPECT_EQ(s, 1);

}

TEST(CrossPredict, OutOfFoldModelsNeverSeeTheInstance) {
  // A lone instance of class 2 among two other classes can only be
  // predicted correctly if it was in the training set.
  CorpusMatrix m;
  m.n_features = 3;
  m.n_classes = 2;
  for (int i = 0; i < 10; ++i) {
    m.rows.push_back(SparseVector{{static_cast<FeatureId>(i % 2)}, {1.0}});
    m.labels.push_back(static_cast<ClassId>(i % 2));
  }
  // Instance 0 carries a unique feature and the "wrong" label.
  m.rows[0] = SparseVector{{2}, {1.0}};
  m.labels[0] = 1;
  m.labels[1] = 0;
  m.rows[1] = SparseVector{{0}, {1.0}};
  const auto recs = cross_predict(m, 5, 1, LogRegParams{});
  for (const auto& r : recs) {
    if (r.id == 0) EXPECT_LT(r.posterior[1], 0.9);
  }
}

TEST(CrossPredict, SeparableDataAllCorrectAndDeterministic) {
  fixture::SyntheticSpec spec;
  spec.n_docs = 60;
  spec.n_classes = 3;
  spec.topic_share = 0.8;
  const auto m = fixture::vectorize(fixture::make_corpus(spec));
  const auto a = cross_predict(m, 5, 9, LogRegParams{});
  for (const auto& r : a) EXPECT_TRUE(r.correct) << r.id;
  const auto b = cross_predict(m, 5, 9, LogRegParams{});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].id, b[i].id);
    EXPECT_EQ(a[i].posterior, b[i].posterior);
  }
}

TEST(Entropy, Examples) {
  EXPECT_NEAR(entropy(std::vector<double>{0.25, 0.25, 0.25, 0.25}), std::log(4.0), 1e-12);
  EXPECT_EQ(entropy(std::vector<double>{0, 1, 0}), 0.0);
  EXPECT_NEAR(entropy(std::vector<double>{0.5, 0.5, 0, 0}), std::log(2.0), 1e-12);
  EXPECT_THROW(entropy(std::vector<double>{0.5, 0.6}), Error);
  EXPECT_THROW(entropy(std::vector<double>{1.2, -0.2}), Error);
}

TEST(Entropy, MaximalAtUniform) {
  Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> p(4);
    double s = 0;
    for (double& x : p) s += (x = rng.uniform01());
    for (double& x : p) x /= s;
    EXPECT_LT(entropy(p), std::log(4.0));
    EXPECT_GT(entropy(p), 0.0);
  }
}

TEST(Argmax, TiesGoToLowerClass) {
  EXPECT_EQ(argmax(std::vector<double>{0.4, 0.4, 0.2}), 0u);
  EXPECT_EQ(argmax(std::vector<double>{0.1, 0.45, 0.45}), 1u);
}

TEST(Calibration, PerfectAndAntiCalibrated) {
  std::vector<PosteriorRecord> good, bad;
  for (InstanceId i = 0; i < 5; ++i) {
    good.push_back(make_record(i, {1.0, 0.0}, 0));
    bad.push_back(make_record(i, {1.0, 0.0}, 1));
  }
  EXPECT_DOUBLE_EQ(calibration_report(good).ece, 0.0);
  EXPECT_DOUBLE_EQ(calibration_report(bad).ece, 1.0);
}

TEST(Calibration, HandComputedBins) {
  // Bin [0.6,0.7): 2 records, conf 0.65, one correct -> |0.5-0.65|
  // Bin [0.9,1.0]: 2 records, conf 0.95, both correct -> |1-0.95|
  std::vector<PosteriorRecord> r{make_record(0, {0.65, 0.35}, 0), make_record(1, {0.65, 0.35}, 1),
                                 make_record(2, {0.05, 0.95}, 1), make_record(3, {0.95, 0.05}, 0)};
  const auto rep = calibration_report(r, 10);
  const double expected = 0.5 * 0.15 + 0.5 * 0.05;
  EXPECT_NEAR(rep.ece, expected, 1e-12);
  std::size_t total = 0;
  for (const auto& b : rep.bins) total += b.count;
  EXPECT_EQ(total, 4u);
  EXPECT_EQ(rep.bins.size(), 10u);
  EXPECT_EQ(rep.bins[6].count, 2u);
  EXPECT_EQ(rep.bins[9].count, 2u);
}
