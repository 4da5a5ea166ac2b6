#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "prunekit/common.hpp"

namespace prunekit {

/// Unweighted mean of per-class F1 over `universe`. A universe class that
/// never occurs in y_true nor y_pred contributes F1 = 0.
double macro_f1(std::span<const ClassId> y_true, std::span<const ClassId> y_pred,
                std::span<const ClassId> universe);

/// Sorted distinct labels.
std::vector<ClassId> present_classes(std::span<const ClassId> labels);

/// Mean over folds of (|T_i| - |S_i|) / |T_i|. Input pairs are (|T_i|, |S_i|).
double reduction_mean(std::span<const std::pair<std::size_t, std::size_t>> folds);

/// t_without / t_with; both must be positive.
double speedup(double t_without, double t_with);

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

/// CDF of Student's t with `df` degrees of freedom.
double student_t_cdf(double t, double df);

enum class Verdict { win, tie, loss };

const char* to_string(Verdict v);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  double mean_difference = 0.0;
  Verdict verdict = Verdict::tie;
};

/// Two-sided paired t-test on a - b. All-zero differences give t = 0,
/// p = 1, tie. Constant non-zero differences (zero variance) are treated
/// as decisive: t = +/-inf, p = 0, win/loss by sign.
TTestResult paired_ttest(std::span<const double> a, std::span<const double> b,
                         double level = 0.05);

/// reject[i] iff p[i] < level / m.
std::vector<bool> bonferroni(std::span<const double> p_values, double level = 0.05);

struct NoiseInjection {
  std::vector<ClassId> labels;        // noisy labels
  std::vector<InstanceId> injected;   // flipped ids, ascending
};

/// Flips floor(rate * n) instances chosen uniformly without replacement,
/// each to a uniformly chosen different class.
NoiseInjection inject_label_noise(std::span<const ClassId> labels, std::size_t n_classes,
                                  double rate, std::uint64_t seed);

struct NoiseRemoval {
  std::size_t injected = 0;
  std::size_t removed = 0;
  std::size_t removed_noise = 0;
  std::size_t removed_clean = 0;
  double recall = 0.0;               // |mask ∩ removed| / |mask|
  double clean_removal_rate = 0.0;   // |removed \ mask| / (n - |mask|)
};

NoiseRemoval noise_removal_report(std::span<const InstanceId> injected,
                                  std::span<const InstanceId> removed, std::size_t n);

/// Expected noise recall after uniformly resizing `removed` to `target`
/// removals: random subsampling when it is larger, padding with random
/// further removals from the retained instances when it is smaller.
double matched_noise_recall(std::span<const InstanceId> injected,
                            std::span<const InstanceId> removed, std::size_t n,
                            std::size_t target);

}  // namespace prunekit
