#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "prunekit/corpus.hpp"
#include "prunekit/eval.hpp"
#include "prunekit/selection.hpp"
#include "prunekit/weak.hpp"

namespace prunekit {

enum class EndModel { knn, logreg };

EndModel parse_end_model(std::string_view name);
const char* to_string(EndModel m);

/// Observers for the leakage audit. Ids are corpus document ids.
struct AuditHooks {
  std::function<void(std::size_t fold, std::span<const InstanceId> fit_docs, const Vocabulary&)>
      on_vocabulary_fit;
  std::function<void(std::size_t fold, const std::string& method,
                     std::span<const InstanceId> selection_docs)>
      on_selection;
};

struct BenchmarkConfig {
  EndModel end_model = EndModel::logreg;
  std::size_t knn_k = 10;
  LogRegParams logreg;
  std::size_t min_df = 2;
  const StopwordSet* stopwords = nullptr;  // default list when null
  double level = 0.05;
  std::uint64_t seed = 0;
  std::map<std::string, ParamMap> method_params;
  AuditHooks hooks;
};

struct FoldOutcome {
  std::size_t fold = 0;
  std::size_t train_size = 0;
  std::size_t retained = 0;
  double f1_without = 0.0;
  double f1_with = 0.0;
  double selection_seconds = 0.0;
  double t_without_seconds = 0.0;  // end-model construction on the full training fold
  double t_with_seconds = 0.0;     // selection + construction on the selected subset
};

struct MethodReport {
  std::string method;
  ParamMap params;
  std::vector<FoldOutcome> folds;
  double reduction_mean = 0.0;
  double t_without_seconds = 0.0;
  double t_with_seconds = 0.0;
  double speedup = 0.0;
  TTestResult ttest;            // with vs without, unadjusted
  bool bonferroni_reject = false;
  Verdict verdict = Verdict::tie;  // Bonferroni-adjusted
};

struct EvalReport {
  std::size_t n_documents = 0;
  std::size_t folds = 0;
  EndModel end_model = EndModel::logreg;
  double level = 0.05;
  std::size_t bonferroni_m = 0;
  bool leakage_audit_passed = false;
  std::vector<MethodReport> methods;
};

/// Stratified k-fold protocol. Per fold, the vocabulary and TF-IDF weights
/// are fitted on the training documents only; every method selects from
/// the training fold; the end model is trained with and without the
/// selection and scored by MacroF1 on the test fold (label universe = the
/// training fold's classes). When a selection keeps everything the
/// full-data model is reused, so T_w = selection time + T_wo.
EvalReport run_benchmark(const LabeledCorpus& corpus, std::span<const std::string> methods,
                         const FoldPlan& plan, const BenchmarkConfig& config);

struct NoiseSimRow {
  std::string method;
  NoiseRemoval removal;
  double reduction = 0.0;
  double matched_recall = 0.0;  // recall resized to the reference removal count
  std::size_t removed_as_noise = 0;
  double time_seconds = 0.0;
};

struct NoiseSimRun {
  double rate = 0.0;
  std::vector<InstanceId> injected;
  std::size_t reference_removals = 0;
  std::vector<NoiseSimRow> rows;
};

struct NoiseSimConfig {
  std::vector<double> rates{0.05, 0.10, 0.20};
  std::string reference_method = "bio-is";
  std::size_t min_df = 2;
  const StopwordSet* stopwords = nullptr;
  std::uint64_t seed = 0;
  std::map<std::string, ParamMap> method_params;
};

struct NoiseSimReport {
  std::size_t n_documents = 0;
  std::string reference_method;
  std::vector<NoiseSimRun> runs;
};

/// Vectorizes the whole corpus, injects label noise at each rate and runs
/// every method on the noisy matrix.
NoiseSimReport run_noise_sim(const LabeledCorpus& corpus, std::span<const std::string> methods,
                             const NoiseSimConfig& config);

/// Same on an already vectorized matrix (labels are the clean ones).
NoiseSimReport run_noise_sim(const CorpusMatrix& matrix, std::span<const std::string> methods,
                             const NoiseSimConfig& config);

}  // namespace prunekit
