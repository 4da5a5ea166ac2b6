#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "prunekit/e2sc.hpp"
#include "prunekit/selection.hpp"
#include "prunekit/weak.hpp"

namespace prunekit {

using NoiseScores = RemovalWeights;

/// Misclassified records are the candidates. Their weight is the normalized
/// entropy complement (ln C - H) / ln C, so a confidently wrong prediction
/// (H = 0) weighs 1 and a uniform one (H = ln C) weighs 0. Correct records
/// weigh 0. Positive weights are then normalized; an empty candidate set is
/// allowed and yields all-zero weights.
NoiseScores compute_noise_scores(std::span<const PosteriorRecord> records, std::size_t n_rows,
                                 std::size_t n_classes);

enum class ArmOrder { noise_first, redundancy_first };

struct BiOConfig {
  LogRegParams weak;
  std::size_t cv_folds = 5;
  BetaScanConfig noise_scan{0.1, 0.9, 5, 0.05, 0.1, 0};
  BetaScanConfig redundancy_scan{0.05, 0.95, 5, 0.05, 0.1, 0};
  std::uint64_t seed = 0;
  ArmOrder order = ArmOrder::noise_first;

  void validate() const;
};

ParamMap to_params(const BiOConfig& config);

struct ArmOutcome {
  std::vector<InstanceId> removed;  // ascending matrix row ids
  SelectionPlan plan;
  std::vector<std::string> notes;
};

/// Out-of-fold LR posteriors over `ids`, noise weights, beta scan with an
/// LR proxy where a rate is a fraction of the misclassified candidates;
/// removes floor(beta * |candidates|) entropy-weighted candidates.
ArmOutcome noise_arm(const CorpusMatrix& matrix, std::span<const InstanceId> ids,
                     const BiOConfig& config);

/// Out-of-fold LR posteriors over `ids`, alpha from correct-prediction
/// confidence, beta scan with an LR proxy; removes floor(beta * |ids|)
/// alpha-weighted instances.
ArmOutcome redundancy_arm(const CorpusMatrix& matrix, std::span<const InstanceId> ids,
                          const BiOConfig& config);

/// Both arms in sequence (by default noise first, then redundancy on the
/// denoised set), with the breakdown attached to the result.
SelectionResult bio_is_select(const CorpusMatrix& matrix, const BiOConfig& config);

/// Noise arm alone over the whole matrix.
SelectionResult noise_arm_only(const CorpusMatrix& matrix, const BiOConfig& config);

}  // namespace prunekit
