#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "prunekit/posterior.hpp"
#include "prunekit/sparse.hpp"

namespace prunekit {

struct LogRegParams {
  double l2_strength = 1.0;
  std::size_t max_iters = 300;
  double tol = 1e-6;  // relative objective decrease that counts as converged
};

/// Multinomial softmax model. Weights are stored feature-major:
/// weights[f * n_classes + c].
struct LinearModel {
  std::size_t n_classes = 0;
  std::size_t n_features = 0;
  std::vector<double> weights;
  std::vector<double> bias;
  std::size_t iterations = 0;
  double objective = 0.0;
  bool converged = false;

  double weight(FeatureId f, ClassId c) const { return weights[f * n_classes + c]; }
};

/// Minimizes the L2-regularized cross-entropy
///
///   J(W, b) = sum_i [ logsumexp(W x_i + b) - (W x_i + b)_{y_i} ] + (l2/2) ||W||^2
///
/// over the rows `ids` with deterministic L-BFGS (l2 = 1 is the usual C = 1
/// setting). The bias is not regularized. Duplicating every instance while
/// doubling l2 doubles J and leaves the minimizer unchanged. Throws when
/// fewer than two classes are present or n < number of present classes.
LinearModel train_logreg(const CorpusMatrix& matrix, std::span<const InstanceId> ids,
                         const LogRegParams& params);
LinearModel train_logreg(const CorpusMatrix& matrix, const LogRegParams& params);

/// Objective and gradient at the model's parameters (exposed for checks).
double logreg_objective(const CorpusMatrix& matrix, std::span<const InstanceId> ids,
                        const LinearModel& model, double l2_strength,
                        std::vector<double>* gradient = nullptr);

std::vector<double> predict_posterior(const LinearModel& model, const SparseVector& row);
std::vector<std::vector<double>> predict_posterior(const LinearModel& model,
                                                   std::span<const SparseVector> rows);
std::vector<ClassId> predict(const LinearModel& model, std::span<const SparseVector> rows);

/// Out-of-fold posteriors over the rows `ids`: each instance is scored by a
/// model trained on the other stratified folds. Records come back in the
/// order of `ids` and carry the matrix row id.
std::vector<PosteriorRecord> cross_predict(const CorpusMatrix& matrix,
                                           std::span<const InstanceId> ids, std::size_t folds,
                                           std::uint64_t seed, const LogRegParams& params);
std::vector<PosteriorRecord> cross_predict(const CorpusMatrix& matrix, std::size_t folds,
                                           std::uint64_t seed, const LogRegParams& params);

struct CalibrationBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
  double mean_confidence = 0.0;
  double accuracy = 0.0;
};

struct CalibrationReport {
  std::vector<CalibrationBin> bins;
  double ece = 0.0;
};

/// Equal-width bins on the max-posterior confidence;
/// ECE = sum_b (n_b / n) |acc_b - conf_b|.
CalibrationReport calibration_report(std::span<const PosteriorRecord> records,
                                     std::size_t bins = 10);

}  // namespace prunekit
