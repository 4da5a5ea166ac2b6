#include "prunekit/benchmark.hpp"

#include <algorithm>
#include <numeric>

#include "prunekit/neighbors.hpp"
#include "prunekit/registry.hpp"

namespace prunekit {

namespace {

constexpr std::uint64_t kSaltSelection = 0x81;
constexpr std::uint64_t kSaltNoise = 0x91;

const ParamMap& params_for(const std::map<std::string, ParamMap>& all, const std::string& method) {
  static const ParamMap empty;
  const auto it = all.find(method);
  return it == all.end() ? empty : it->second;
}

struct Fitted {
  double seconds = 0.0;
  std::vector<ClassId> predictions;
};

Fitted fit_and_predict(const CorpusMatrix& train, std::span<const InstanceId> ids,
                       const CorpusMatrix& test, const BenchmarkConfig& config) {
  Fitted out;
  if (config.end_model == EndModel::logreg) {
    Stopwatch clock;
    const auto model = train_logreg(train, ids, config.logreg);
    out.seconds = clock.seconds();
    out.predictions.reserve(test.size());
    for (const auto& row : test.rows) out.predictions.push_back(argmax(predict_posterior(model, row)));
  } else {
    Stopwatch clock;
    KnnModel model(train, std::vector<InstanceId>(ids.begin(), ids.end()),
                   std::min(config.knn_k, ids.size()));
    out.seconds = clock.seconds();
    out.predictions = knn_predict(model, test.rows);
  }
  return out;
}

}  // namespace

EndModel parse_end_model(std::string_view name) {
  if (name == "knn") return EndModel::knn;
  if (name == "logreg") return EndModel::logreg;
  throw UsageError("end model must be knn or logreg, got '" + std::string(name) + "'");
}

const char* to_string(EndModel m) { return m == EndModel::knn ? "knn" : "logreg"; }

EvalReport run_benchmark(const LabeledCorpus& corpus, std::span<const std::string> methods,
                         const FoldPlan& plan, const BenchmarkConfig& config) {
  if (methods.empty()) throw UsageError("benchmark needs at least one method");
  for (const auto& m : methods) find_method(m);
  if (plan.assignment.size() != corpus.texts.size()) {
    throw Error("fold plan does not match the corpus size");
  }

  EvalReport report;
  report.n_documents = corpus.texts.size();
  report.folds = plan.k;
  report.end_model = config.end_model;
  report.level = config.level;
  report.bonferroni_m = methods.size();
  report.methods.resize(methods.size());
  for (std::size_t m = 0; m < methods.size(); ++m) report.methods[m].method = methods[m];

  bool clean = true;
  for (std::size_t fold = 0; fold < plan.k; ++fold) {
    const auto train_docs = plan.train_ids(fold);
    const auto test_docs = plan.test_ids(fold);
    {
      std::vector<InstanceId> overlap;
      std::set_intersection(train_docs.begin(), train_docs.end(), test_docs.begin(),
                            test_docs.end(), std::back_inserter(overlap));
      if (!overlap.empty()) clean = false;
    }
    const auto train_corpus = corpus.subset(train_docs);
    const auto test_corpus = corpus.subset(test_docs);
    const auto vocab = build_vocabulary(train_corpus,
                                         config.stopwords ? *config.stopwords : default_stopwords(),
                                         config.min_df);
    if (vocab.n_docs != train_docs.size()) clean = false;
    if (config.hooks.on_vocabulary_fit) config.hooks.on_vocabulary_fit(fold, train_docs, vocab);
    auto train = vectorize_tfidf(train_corpus, vocab);
    auto test = vectorize_tfidf(test_corpus, vocab);
    train.n_classes = test.n_classes = corpus.class_names.size();

    const auto universe = present_classes(train.labels);
    const auto all = all_ids(train.size());
    const auto baseline = fit_and_predict(train, all, test, config);
    const double f1_without = macro_f1(test.labels, baseline.predictions, universe);

    for (std::size_t m = 0; m < methods.size(); ++m) {
      const auto& name = methods[m];
      if (config.hooks.on_selection) config.hooks.on_selection(fold, name, train_docs);
      const auto selection =
          run_method(train, name, params_for(config.method_params, name),
                     derive_seed(config.seed, kSaltSelection + 0x100 * fold));
      check_selection(train, selection);
      FoldOutcome out;
      out.fold = fold;
      out.train_size = train.size();
      out.retained = selection.retained.size();
      out.selection_seconds = selection.time_seconds;
      out.f1_without = f1_without;
      out.t_without_seconds = baseline.seconds;
      if (selection.retained.size() == train.size()) {
        out.f1_with = f1_without;
        out.t_with_seconds = selection.time_seconds + baseline.seconds;
      } else {
        const auto with = fit_and_predict(train, selection.retained, test, config);
        out.f1_with = macro_f1(test.labels, with.predictions, universe);
        out.t_with_seconds = selection.time_seconds + with.seconds;
      }
      auto& row = report.methods[m];
      if (row.params.empty()) row.params = selection.params;
      row.folds.push_back(out);
    }
  }
  report.leakage_audit_passed = clean;

  std::vector<double> p_values;
  for (auto& row : report.methods) {
    std::vector<std::pair<std::size_t, std::size_t>> sizes;
    std::vector<double> with, without;
    for (const auto& f : row.folds) {
      sizes.emplace_back(f.train_size, f.retained);
      with.push_back(f.f1_with);
      without.push_back(f.f1_without);
      row.t_with_seconds += f.t_with_seconds;
      row.t_without_seconds += f.t_without_seconds;
    }
    row.reduction_mean = reduction_mean(sizes);
    row.speedup = row.t_with_seconds > 0.0 && row.t_without_seconds > 0.0
                      ? speedup(row.t_without_seconds, row.t_with_seconds)
                      : 1.0;
    row.ttest = paired_ttest(with, without, config.level);
    p_values.push_back(row.ttest.p);
  }
  const auto reject = bonferroni(p_values, config.level);
  for (std::size_t m = 0; m < report.methods.size(); ++m) {
    auto& row = report.methods[m];
    row.bonferroni_reject = reject[m];
    row.verdict = !reject[m]                       ? Verdict::tie
                  : row.ttest.mean_difference > 0 ? Verdict::win
                                                   : Verdict::loss;
  }
  return report;
}

NoiseSimReport run_noise_sim(const LabeledCorpus& corpus, std::span<const std::string> methods,
                             const NoiseSimConfig& config) {
  const auto vocab = build_vocabulary(
      corpus, config.stopwords ? *config.stopwords : default_stopwords(), config.min_df);
  auto matrix = vectorize_tfidf(corpus, vocab);
  matrix.n_classes = corpus.class_names.size();
  return run_noise_sim(matrix, methods, config);
}

NoiseSimReport run_noise_sim(const CorpusMatrix& matrix, std::span<const std::string> methods,
                             const NoiseSimConfig& config) {
  if (methods.empty()) throw UsageError("noise-sim needs at least one method");
  for (const auto& m : methods) find_method(m);
  for (double rate : config.rates) {
    if (!(rate > 0.0 && rate < 1.0)) throw UsageError("noise rates must lie in (0, 1)");
  }
  NoiseSimReport report;
  report.n_documents = matrix.size();
  report.reference_method = config.reference_method;
  const std::size_t n = matrix.size();
  for (std::size_t r = 0; r < config.rates.size(); ++r) {
    NoiseSimRun run;
    run.rate = config.rates[r];
    const auto noise = inject_label_noise(matrix.labels, matrix.n_classes, run.rate,
                                          derive_seed(config.seed, kSaltNoise + 0x100 * r));
    run.injected = noise.injected;
    const auto noisy = matrix.relabeled(noise.labels);
    std::vector<SelectionResult> results;
    for (const auto& name : methods) {
      results.push_back(run_method(noisy, name, params_for(config.method_params, name),
                                   derive_seed(config.seed, kSaltSelection + 0x100 * r)));
      if (name == config.reference_method) run.reference_removals = results.back().removed.size();
    }
    for (std::size_t m = 0; m < methods.size(); ++m) {
      const auto& res = results[m];
      NoiseSimRow row;
      row.method = methods[m];
      row.removal = noise_removal_report(run.injected, res.removed, n);
      row.reduction = res.reduction();
      row.matched_recall =
          matched_noise_recall(run.injected, res.removed, n, run.reference_removals);
      if (res.breakdown) row.removed_as_noise = res.breakdown->removed_as_noise.size();
      row.time_seconds = res.time_seconds;
      run.rows.push_back(row);
    }
    report.runs.push_back(std::move(run));
  }
  return report;
}

}  // namespace prunekit
