#include "prunekit/e2sc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "prunekit/eval.hpp"
#include "prunekit/neighbors.hpp"

namespace prunekit {

namespace {

// Stream salts; each stage draws from its own derived seed.
constexpr std::uint64_t kSaltSplit = 0x51;
constexpr std::uint64_t kSaltScanSample = 0x52;
constexpr std::uint64_t kSaltFinalSample = 0x53;

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(10);
  out << v;
  return out.str();
}

}  // namespace

std::size_t RemovalWeights::candidates() const {
  return static_cast<std::size_t>(std::count(candidate.begin(), candidate.end(), true));
}

std::size_t RemovalWeights::positive() const {
  return static_cast<std::size_t>(
      std::count_if(weights.begin(), weights.end(), [](double w) { return w > 0.0; }));
}

AlphaScores compute_alpha(std::span<const PosteriorRecord> records, std::size_t n_rows) {
  AlphaScores alpha;
  alpha.weights.assign(n_rows, 0.0);
  alpha.candidate.assign(n_rows, false);
  double total = 0.0;
  for (const auto& r : records) {
    if (r.id >= n_rows) throw Error("compute_alpha: record id out of range");
    if (!r.correct || r.zero_evidence) continue;
    const double w = r.posterior.at(r.predicted);
    if (!(w > 0.0) || !std::isfinite(w)) continue;
    alpha.weights[r.id] = w;
    alpha.candidate[r.id] = true;
    total += w;
  }
  if (!(total > 0.0)) throw Error("no removable instances");
  for (double& w : alpha.weights) w /= total;
  return alpha;
}

std::vector<InstanceId> weighted_sample_without_replacement(std::span<const double> weights,
                                                            std::size_t m, std::uint64_t seed) {
  std::vector<std::pair<double, InstanceId>> keyed;
  Rng rng(seed);
  for (InstanceId i = 0; i < weights.size(); ++i) {
    const double u = rng.uniform01();
    if (weights[i] > 0.0) keyed.emplace_back(std::log(u) / weights[i], i);
  }
  if (m > keyed.size()) throw Error("sample size exceeds the number of positive weights");
  auto larger = [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  };
  std::partial_sort(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(m), keyed.end(),
                    larger);
  std::vector<InstanceId> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) out.push_back(keyed[i].second);
  std::sort(out.begin(), out.end());
  return out;
}

double KnnProxy::score(const CorpusMatrix& matrix, std::span<const InstanceId> training,
                       std::span<const InstanceId> validation,
                       std::span<const ClassId> universe) const {
  KnnModel model(matrix, std::vector<InstanceId>(training.begin(), training.end()),
                 std::min(k_, training.size()));
  std::vector<ClassId> truth, predicted;
  truth.reserve(validation.size());
  predicted.reserve(validation.size());
  std::vector<SparseVector> queries;
  queries.reserve(validation.size());
  for (InstanceId id : validation) {
    queries.push_back(matrix.rows[id]);
    truth.push_back(matrix.labels[id]);
  }
  predicted = knn_predict(model, queries);
  return macro_f1(truth, predicted, universe);
}

double LogRegProxy::score(const CorpusMatrix& matrix, std::span<const InstanceId> training,
                          std::span<const InstanceId> validation,
                          std::span<const ClassId> universe) const {
  const LinearModel model = train_logreg(matrix, training, params_);
  std::vector<ClassId> truth, predicted;
  for (InstanceId id : validation) {
    truth.push_back(matrix.labels[id]);
    predicted.push_back(argmax(predict_posterior(model, matrix.rows[id])));
  }
  return macro_f1(truth, predicted, universe);
}

void BetaScanConfig::validate() const {
  if (!(step > 0.0 && step < 1.0)) throw Error("beta step must lie in (0, 1)");
  if (!(max >= 0.0 && max < 1.0)) throw Error("beta max must lie in [0, 1)");
  if (repetitions < 2) throw Error("beta scan needs at least two repetitions");
  if (!(level > 0.0 && level < 1.0)) throw Error("significance level must lie in (0, 1)");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw Error("validation fraction must lie in (0, 1)");
  }
}

void stratified_holdout(const CorpusMatrix& matrix, std::span<const InstanceId> ids,
                        double fraction, std::uint64_t seed, std::vector<InstanceId>& training,
                        std::vector<InstanceId>& validation) {
  std::vector<std::vector<InstanceId>> by_class(matrix.n_classes);
  for (InstanceId id : ids) by_class[matrix.labels[id]].push_back(id);
  training.clear();
  validation.clear();
  for (ClassId c = 0; c < matrix.n_classes; ++c) {
    auto& members = by_class[c];
    if (members.empty()) continue;
    if (members.size() < 2) {
      throw Error("degenerate validation split: class " + std::to_string(c) +
                  " has a single instance");
    }
    Rng rng(derive_seed(seed, c));
    rng.shuffle(members);
    auto n_val = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(members.size())));
    n_val = std::clamp<std::size_t>(n_val, 1, members.size() - 1);
    validation.insert(validation.end(), members.begin(),
                      members.begin() + static_cast<std::ptrdiff_t>(n_val));
    training.insert(training.end(), members.begin() + static_cast<std::ptrdiff_t>(n_val),
                    members.end());
  }
  std::sort(training.begin(), training.end());
  std::sort(validation.begin(), validation.end());
}

BetaEstimate estimate_beta(const CorpusMatrix& matrix, std::span<const InstanceId> ids,
                           const RemovalWeights& distribution, const ProxyLearner& proxy,
                           const BetaScanConfig& config, RateBase base) {
  config.validate();
  if (distribution.weights.size() != matrix.size()) {
    throw Error("estimate_beta: weight vector does not match the matrix");
  }
  const std::size_t r = config.repetitions;
  std::vector<std::vector<InstanceId>> training(r), validation(r);
  for (std::size_t j = 0; j < r; ++j) {
    stratified_holdout(matrix, ids, config.validation_fraction,
                       derive_seed(config.seed, kSaltSplit + 0x100 * j), training[j],
                       validation[j]);
  }
  std::vector<ClassId> labels_in_play;
  for (InstanceId id : ids) labels_in_play.push_back(matrix.labels[id]);
  const auto universe = present_classes(labels_in_play);

  std::vector<double> baseline(r);
  parallel_for(r, [&](std::size_t j) {
    baseline[j] = proxy.score(matrix, training[j], validation[j], universe);
  });
  const double baseline_mean = std::accumulate(baseline.begin(), baseline.end(), 0.0) / r;

  BetaEstimate estimate;
  for (std::size_t step_no = 1;; ++step_no) {
    const double rate = std::round(static_cast<double>(step_no) * config.step * 1e9) / 1e9;
    if (rate > config.max + 1e-12) break;

    // Removal counts per repetition; infeasible when a split lacks enough
    // positive-weight instances.
    std::vector<std::size_t> removals(r);
    bool feasible = true;
    for (std::size_t j = 0; j < r; ++j) {
      std::size_t base_count = 0, positive = 0;
      for (InstanceId id : training[j]) {
        if (distribution.weights[id] > 0.0) ++positive;
        if (base == RateBase::training || distribution.candidate[id]) ++base_count;
      }
      removals[j] = floor_fraction(rate, base_count);
      if (removals[j] > positive) feasible = false;
    }
    BetaTrial trial;
    trial.rate = rate;
    trial.baseline_mean = baseline_mean;
    if (!feasible) {
      trial.verdict = "infeasible";
      trial.mean_effectiveness = std::numeric_limits<double>::quiet_NaN();
      estimate.trace.push_back(trial);
      break;
    }

    std::vector<double> reduced(r);
    parallel_for(r, [&](std::size_t j) {
      std::vector<double> weights(matrix.size(), 0.0);
      for (InstanceId id : training[j]) weights[id] = distribution.weights[id];
      const auto removed = weighted_sample_without_replacement(
          weights, removals[j], derive_seed(config.seed, kSaltScanSample + 0x100 * step_no + j));
      auto kept = complement(training[j], removed);
      ensure_class_coverage(matrix, training[j], kept);
      reduced[j] = proxy.score(matrix, kept, validation[j], universe);
    });

    const auto test = paired_ttest(reduced, baseline, config.level);
    trial.mean_effectiveness = std::accumulate(reduced.begin(), reduced.end(), 0.0) / r;
    trial.p_value = test.p;
    if (test.verdict == Verdict::loss) {
      trial.verdict = "worse";
      estimate.trace.push_back(trial);
      break;
    }
    trial.verdict = "not-worse";
    estimate.trace.push_back(trial);
    estimate.beta = rate;
  }
  return estimate;
}

void E2SCConfig::validate() const {
  if (k < 1) throw Error("e2sc: k must be at least 1");
  scan.validate();
}

ParamMap to_params(const E2SCConfig& config) {
  return {{"k", std::to_string(config.k)},
          {"step", format_double(config.scan.step)},
          {"max", format_double(config.scan.max)},
          {"repetitions", std::to_string(config.scan.repetitions)},
          {"level", format_double(config.scan.level)},
          {"validation_fraction", format_double(config.scan.validation_fraction)}};
}

SelectionResult e2sc_select(const CorpusMatrix& matrix, const E2SCConfig& config) {
  config.validate();
  Stopwatch clock;
  const std::size_t n = matrix.size();
  const auto ids = all_ids(n);

  KnnModel model(matrix, config.k);
  const auto records = loo_predictions(model);

  SelectionPlan plan;
  std::vector<InstanceId> removed;
  std::vector<std::string> notes;
  AlphaScores alpha;
  bool removable = true;
  try {
    alpha = compute_alpha(records, n);
  } catch (const Error&) {
    removable = false;
    notes.emplace_back("no removable instances; identity selection");
  }

  if (removable) {
    plan.weights = alpha.weights;
    if (config.scan.max > 0.0) {
      const auto estimate = estimate_beta(matrix, ids, alpha, KnnProxy(config.k), config.scan);
      plan.beta = estimate.beta;
      plan.trace = estimate.trace;
    }
    std::size_t m = floor_fraction(plan.beta, n);
    if (m > alpha.positive()) {
      notes.emplace_back("removal count clamped to the number of removable instances");
      m = alpha.positive();
    }
    plan.planned_removals = m;
    removed = weighted_sample_without_replacement(alpha.weights, m,
                                                  derive_seed(config.scan.seed, kSaltFinalSample));
  } else {
    plan.weights.assign(n, 0.0);
  }

  auto retained = complement(ids, removed);
  for (InstanceId id : ensure_class_coverage(matrix, ids, retained)) {
    notes.push_back("re-added instance " + std::to_string(id) + " to keep its class");
  }
  auto result = make_selection("e2sc", to_params(config), n, std::move(retained));
  result.notes = std::move(notes);
  result.plan = std::move(plan);
  result.time_seconds = clock.seconds();
  return result;
}

}  // namespace prunekit
