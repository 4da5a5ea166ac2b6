#include "prunekit/bio_is.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace prunekit {

namespace {

constexpr std::uint64_t kSaltNoiseCv = 0x61;
constexpr std::uint64_t kSaltNoiseScan = 0x62;
constexpr std::uint64_t kSaltNoiseSample = 0x63;
constexpr std::uint64_t kSaltRedundancyCv = 0x71;
constexpr std::uint64_t kSaltRedundancyScan = 0x72;
constexpr std::uint64_t kSaltRedundancySample = 0x73;

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(10);
  out << v;
  return out.str();
}

}  // namespace

NoiseScores compute_noise_scores(std::span<const PosteriorRecord> records, std::size_t n_rows,
                                 std::size_t n_classes) {
  if (n_classes < 2) throw Error("noise scores need at least two classes");
  const double h_max = std::log(static_cast<double>(n_classes));
  NoiseScores scores;
  scores.weights.assign(n_rows, 0.0);
  scores.candidate.assign(n_rows, false);
  double total = 0.0;
  for (const auto& r : records) {
    if (r.id >= n_rows) throw Error("compute_noise_scores: record id out of range");
    if (r.correct) continue;
    scores.candidate[r.id] = true;
    const double w = std::clamp((h_max - r.entropy) / h_max, 0.0, 1.0);
    scores.weights[r.id] = w;
    total += w;
  }
  if (total > 0.0) {
    for (double& w : scores.weights) w /= total;
  }
  return scores;
}

void BiOConfig::validate() const {
  if (cv_folds < 2) throw Error("bio-is: cv_folds must be at least 2");
  noise_scan.validate();
  redundancy_scan.validate();
}

ParamMap to_params(const BiOConfig& config) {
  return {{"l2", format_double(config.weak.l2_strength)},
          {"max_iters", std::to_string(config.weak.max_iters)},
          {"tol", format_double(config.weak.tol)},
          {"cv_folds", std::to_string(config.cv_folds)},
          {"noise_step", format_double(config.noise_scan.step)},
          {"noise_max", format_double(config.noise_scan.max)},
          {"redundancy_step", format_double(config.redundancy_scan.step)},
          {"redundancy_max", format_double(config.redundancy_scan.max)},
          {"repetitions", std::to_string(config.redundancy_scan.repetitions)},
          {"level", format_double(config.redundancy_scan.level)},
          {"validation_fraction", format_double(config.redundancy_scan.validation_fraction)},
          {"order", config.order == ArmOrder::noise_first ? "noise-first" : "redundancy-first"}};
}

ArmOutcome noise_arm(const CorpusMatrix& matrix, std::span<const InstanceId> ids,
                     const BiOConfig& config) {
  ArmOutcome out;
  const auto records =
      cross_predict(matrix, ids, config.cv_folds, derive_seed(config.seed, kSaltNoiseCv), config.weak);
  const auto scores = compute_noise_scores(records, matrix.size(), matrix.n_classes);
  out.plan.weights = scores.weights;
  if (scores.positive() == 0) {
    out.notes.emplace_back("noise arm: no confidently misclassified instances");
    return out;
  }
  if (config.noise_scan.max > 0.0) {
    auto scan = config.noise_scan;
    scan.seed = derive_seed(config.seed, kSaltNoiseScan);
    const auto estimate =
        estimate_beta(matrix, ids, scores, LogRegProxy(config.weak), scan, RateBase::candidates);
    out.plan.beta = estimate.beta;
    out.plan.trace = estimate.trace;
  }
  std::size_t m = floor_fraction(out.plan.beta, scores.candidates());
  if (m > scores.positive()) {
    out.notes.emplace_back("noise arm: removal count clamped to positive-weight candidates");
    m = scores.positive();
  }
  out.plan.planned_removals = m;
  out.removed = weighted_sample_without_replacement(scores.weights, m,
                                                    derive_seed(config.seed, kSaltNoiseSample));
  return out;
}

ArmOutcome redundancy_arm(const CorpusMatrix& matrix, std::span<const InstanceId> ids,
                          const BiOConfig& config) {
  ArmOutcome out;
  const auto records = cross_predict(matrix, ids, config.cv_folds,
                                     derive_seed(config.seed, kSaltRedundancyCv), config.weak);
  AlphaScores alpha;
  try {
    alpha = compute_alpha(records, matrix.size());
  } catch (const Error&) {
    out.plan.weights.assign(matrix.size(), 0.0);
    out.notes.emplace_back("redundancy arm: no removable instances");
    return out;
  }
  out.plan.weights = alpha.weights;
  if (config.redundancy_scan.max > 0.0) {
    auto scan = config.redundancy_scan;
    scan.seed = derive_seed(config.seed, kSaltRedundancyScan);
    const auto estimate =
        estimate_beta(matrix, ids, alpha, LogRegProxy(config.weak), scan, RateBase::training);
    out.plan.beta = estimate.beta;
    out.plan.trace = estimate.trace;
  }
  std::size_t m = floor_fraction(out.plan.beta, ids.size());
  if (m > alpha.positive()) {
    out.notes.emplace_back("redundancy arm: removal count clamped to removable instances");
    m = alpha.positive();
  }
  out.plan.planned_removals = m;
  out.removed = weighted_sample_without_replacement(alpha.weights, m,
                                                    derive_seed(config.seed, kSaltRedundancySample));
  return out;
}

SelectionResult bio_is_select(const CorpusMatrix& matrix, const BiOConfig& config) {
  config.validate();
  Stopwatch clock;
  const std::size_t n = matrix.size();
  const auto ids = all_ids(n);

  ArmOutcome noise, redundancy;
  if (config.order == ArmOrder::noise_first) {
    noise = noise_arm(matrix, ids, config);
    const auto denoised = complement(ids, noise.removed);
    redundancy = redundancy_arm(matrix, denoised, config);
  } else {
    redundancy = redundancy_arm(matrix, ids, config);
    const auto reduced = complement(ids, redundancy.removed);
    noise = noise_arm(matrix, reduced, config);
  }

  std::vector<InstanceId> removed;
  std::set_union(noise.removed.begin(), noise.removed.end(), redundancy.removed.begin(),
                 redundancy.removed.end(), std::back_inserter(removed));
  auto retained = complement(ids, removed);
  const auto readded = ensure_class_coverage(matrix, ids, retained);

  auto result = make_selection("bio-is", to_params(config), n, std::move(retained));
  result.notes = noise.notes;
  result.notes.insert(result.notes.end(), redundancy.notes.begin(), redundancy.notes.end());

  BiOSelectionBreakdown breakdown;
  breakdown.removed_as_noise = complement(noise.removed, readded);
  breakdown.removed_as_redundant = complement(redundancy.removed, readded);
  for (InstanceId id : readded) {
    result.notes.push_back("re-added instance " + std::to_string(id) + " to keep its class");
  }
  breakdown.beta_noise = noise.plan.beta;
  breakdown.beta_redundancy = redundancy.plan.beta;
  breakdown.noise_plan = std::move(noise.plan);
  breakdown.redundancy_plan = std::move(redundancy.plan);
  result.breakdown = std::move(breakdown);
  result.time_seconds = clock.seconds();
  return result;
}

SelectionResult noise_arm_only(const CorpusMatrix& matrix, const BiOConfig& config) {
  config.validate();
  Stopwatch clock;
  const std::size_t n = matrix.size();
  const auto ids = all_ids(n);
  auto noise = noise_arm(matrix, ids, config);
  auto retained = complement(ids, noise.removed);
  const auto readded = ensure_class_coverage(matrix, ids, retained);
  auto result = make_selection("noise-arm", to_params(config), n, std::move(retained));
  result.notes = std::move(noise.notes);
  BiOSelectionBreakdown breakdown;
  breakdown.removed_as_noise = complement(noise.removed, readded);
  breakdown.beta_noise = noise.plan.beta;
  breakdown.noise_plan = std::move(noise.plan);
  result.breakdown = std::move(breakdown);
  result.time_seconds = clock.seconds();
  return result;
}

}  // namespace prunekit
