#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "prunekit/posterior.hpp"
#include "prunekit/selection.hpp"
#include "prunekit/sparse.hpp"
#include "prunekit/weak.hpp"

namespace prunekit {

/// Per-instance removal weights, indexed by matrix row id. Positive weights
/// are normalized to sum to one. `candidate` marks the instances a removal
/// rate is measured against (for alpha, exactly the positive weights).
struct RemovalWeights {
  std::vector<double> weights;
  std::vector<bool> candidate;

  std::size_t candidates() const;
  std::size_t positive() const;
};

using AlphaScores = RemovalWeights;

/// weight(i) = posterior_i(true label) when the weak model classified i
/// correctly (and had evidence), 0 otherwise; then normalized. Rows without
/// a record get 0. Throws Error("no removable instances") if nothing is
/// correctly classified.
AlphaScores compute_alpha(std::span<const PosteriorRecord> records, std::size_t n_rows);

/// Keyed-order weighted sampling without replacement: every index draws
/// u_i ~ U(0,1) from the seeded stream (zero-weight indices included, so a
/// given index always sees the same draw) and the m largest keys
/// log(u_i) / w_i among positive weights are taken. Returns ascending ids.
std::vector<InstanceId> weighted_sample_without_replacement(std::span<const double> weights,
                                                            std::size_t m, std::uint64_t seed);

/// A cheap model whose validation MacroF1 stands in for the end model.
class ProxyLearner {
 public:
  virtual ~ProxyLearner() = default;
  virtual std::string name() const = 0;
  virtual double score(const CorpusMatrix& matrix, std::span<const InstanceId> training,
                       std::span<const InstanceId> validation,
                       std::span<const ClassId> universe) const = 0;
};

class KnnProxy final : public ProxyLearner {
 public:
  explicit KnnProxy(std::size_t k) : k_(k) {}
  std::string name() const override { return "knn"; }
  double score(const CorpusMatrix& matrix, std::span<const InstanceId> training,
               std::span<const InstanceId> validation,
               std::span<const ClassId> universe) const override;

 private:
  std::size_t k_;
};

class LogRegProxy final : public ProxyLearner {
 public:
  explicit LogRegProxy(LogRegParams params) : params_(params) {}
  std::string name() const override { return "logreg"; }
  double score(const CorpusMatrix& matrix, std::span<const InstanceId> training,
               std::span<const InstanceId> validation,
               std::span<const ClassId> universe) const override;

 private:
  LogRegParams params_;
};

struct BetaScanConfig {
  double step = 0.05;
  double max = 0.95;
  std::size_t repetitions = 5;
  double level = 0.05;
  double validation_fraction = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

/// What a candidate rate is a fraction of.
enum class RateBase {
  training,    // the training part of each split
  candidates,  // the candidate instances inside the training part
};

/// Stratified split of `ids` with round(fraction * n_c) (at least one)
/// validation members per class. Throws when a class cannot place a member
/// on both sides.
void stratified_holdout(const CorpusMatrix& matrix, std::span<const InstanceId> ids,
                        double fraction, std::uint64_t seed, std::vector<InstanceId>& training,
                        std::vector<InstanceId>& validation);

/// Ascending scan over rates step, 2 step, ... <= max. Each repetition j
/// uses its own stratified split; the baseline is the proxy fitted to the
/// whole training part. At every rate the proxy is refitted on r weighted
/// reductions and compared to the baseline with a paired t-test; the scan
/// stops at the first rate that is significantly worse (or infeasible,
/// i.e. asks for more removals than there are positive weights).
/// beta is the last rate that passed, 0 if none did.
BetaEstimate estimate_beta(const CorpusMatrix& matrix, std::span<const InstanceId> ids,
                           const RemovalWeights& distribution, const ProxyLearner& proxy,
                           const BetaScanConfig& config, RateBase base = RateBase::training);

struct E2SCConfig {
  std::size_t k = 10;
  BetaScanConfig scan;

  void validate() const;
};

ParamMap to_params(const E2SCConfig& config);

/// Leave-one-out k-NN confidence -> alpha -> beta scan with a k-NN proxy ->
/// removes floor(beta * n) alpha-weighted instances. If nothing is
/// removable the selection is the identity with beta = 0.
SelectionResult e2sc_select(const CorpusMatrix& matrix, const E2SCConfig& config);

}  // namespace prunekit
