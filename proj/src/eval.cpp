#include "prunekit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

namespace prunekit {

double macro_f1(std::span<const ClassId> y_true, std::span<const ClassId> y_pred,
                std::span<const ClassId> universe) {
  if (y_true.size() != y_pred.size()) throw Error("macro_f1: length mismatch");
  if (universe.empty()) throw Error("macro_f1: empty label universe");
  ClassId top = *std::max_element(universe.begin(), universe.end());
  for (ClassId y : y_true) top = std::max(top, y);
  for (ClassId y : y_pred) top = std::max(top, y);

  std::vector<std::size_t> tp(top + 1, 0), fp(top + 1, 0), fn(top + 1, 0);
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] == y_pred[i]) {
      ++tp[y_true[i]];
    } else {
      ++fn[y_true[i]];
      ++fp[y_pred[i]];
    }
  }
  double sum = 0.0;
  for (ClassId c : universe) {
    const std::size_t denom = 2 * tp[c] + fp[c] + fn[c];
    if (denom) sum += 2.0 * static_cast<double>(tp[c]) / static_cast<double>(denom);
  }
  return sum / static_cast<double>(universe.size());
}

std::vector<ClassId> present_classes(std::span<const ClassId> labels) {
  std::vector<ClassId> out(labels.begin(), labels.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double reduction_mean(std::span<const std::pair<std::size_t, std::size_t>> folds) {
  if (folds.empty()) throw Error("reduction_mean: no folds");
  double sum = 0.0;
  for (auto [t, s] : folds) {
    if (t == 0) throw Error("reduction_mean: empty training set");
    if (s > t) throw Error("reduction_mean: selection larger than training set");
    sum += static_cast<double>(t - s) / static_cast<double>(t);
  }
  return sum / static_cast<double>(folds.size());
}

double speedup(double t_without, double t_with) {
  if (!(t_without > 0.0) || !(t_with > 0.0)) throw Error("speedup: times must be positive");
  return t_without / t_with;
}

namespace {

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) return h;
  }
  throw Error("incomplete beta: continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error("incomplete beta: shape parameters must be positive");
  if (x < 0.0 || x > 1.0) throw Error("incomplete beta: x outside [0, 1]");
  if (x == 0.0 || x == 1.0) return x;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  // The fraction converges fast for x < (a+1)/(a+b+2); use symmetry otherwise.
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
  if (!(df > 0.0)) throw Error("student_t_cdf: df must be positive");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
  return t > 0 ? 1.0 - tail : tail;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::win:
      return "win";
    case Verdict::tie:
      return "tie";
    case Verdict::loss:
      return "loss";
  }
  return "tie";
}

TTestResult paired_ttest(std::span<const double> a, std::span<const double> b, double level) {
  if (a.size() != b.size()) throw Error("paired_ttest: sample size mismatch");
  if (a.size() < 2) throw Error("paired_ttest: need at least two pairs");
  const auto n = static_cast<double>(a.size());
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];

  TTestResult r;
  r.mean_difference = std::accumulate(d.begin(), d.end(), 0.0) / n;
  if (std::all_of(d.begin(), d.end(), [](double x) { return x == 0.0; })) {
    r.mean_difference = 0.0;
    return r;
  }
  double ss = 0.0;
  for (double x : d) ss += (x - r.mean_difference) * (x - r.mean_difference);
  const double sd = std::sqrt(ss / (n - 1.0));
  // Differences that agree to rounding are treated as constant.
  if (sd <= 1e-12 * std::max(1.0, std::abs(r.mean_difference))) {
    r.t = r.mean_difference > 0 ? std::numeric_limits<double>::infinity()
                                 : -std::numeric_limits<double>::infinity();
    r.p = 0.0;
    r.verdict = r.mean_difference > 0 ? Verdict::win : Verdict::loss;
    return r;
  }
  r.t = r.mean_difference / (sd / std::sqrt(n));
  const double df = n - 1.0;
  r.p = incomplete_beta(0.5 * df, 0.5, df / (df + r.t * r.t));
  if (r.p < level) r.verdict = r.mean_difference > 0 ? Verdict::win : Verdict::loss;
  return r;
}

std::vector<bool> bonferroni(std::span<const double> p_values, double level) {
  if (p_values.empty()) throw Error("bonferroni: no p-values");
  const double threshold = level / static_cast<double>(p_values.size());
  std::vector<bool> reject(p_values.size());
  for (std::size_t i = 0; i < p_values.size(); ++i) reject[i] = p_values[i] < threshold;
  return reject;
}

NoiseInjection inject_label_noise(std::span<const ClassId> labels, std::size_t n_classes,
                                  double rate, std::uint64_t seed) {
  if (!(rate > 0.0 && rate < 1.0)) throw Error("noise rate must lie in (0, 1)");
  if (n_classes < 2) throw Error("noise injection needs at least two classes");
  NoiseInjection out;
  out.labels.assign(labels.begin(), labels.end());
  const std::size_t flips = floor_fraction(rate, labels.size());

  Rng rng(seed);
  std::vector<InstanceId> order(labels.size());
  std::iota(order.begin(), order.end(), InstanceId{0});
  // Partial Fisher-Yates: the first `flips` positions are a uniform sample.
  for (std::size_t i = 0; i < flips; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(order.size() - i));
    std::swap(order[i], order[j]);
  }
  out.injected.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(flips));
  std::sort(out.injected.begin(), out.injected.end());
  for (InstanceId id : out.injected) {
    const ClassId original = out.labels[id];
    if (original >= n_classes) throw Error("noise injection: label outside class universe");
    auto shift = static_cast<ClassId>(rng.below(n_classes - 1));
    out.labels[id] = shift >= original ? shift + 1 : shift;
  }
  return out;
}

NoiseRemoval noise_removal_report(std::span<const InstanceId> injected,
                                  std::span<const InstanceId> removed, std::size_t n) {
  std::unordered_set<InstanceId> mask(injected.begin(), injected.end());
  for (InstanceId id : injected) {
    if (id >= n) throw Error("noise report: injected id out of range");
  }
  NoiseRemoval r;
  r.injected = mask.size();
  r.removed = removed.size();
  for (InstanceId id : removed) {
    if (mask.contains(id)) {
      ++r.removed_noise;
    } else {
      ++r.removed_clean;
    }
  }
  if (r.injected) r.recall = static_cast<double>(r.removed_noise) / static_cast<double>(r.injected);
  if (n > r.injected) {
    r.clean_removal_rate = static_cast<double>(r.removed_clean) / static_cast<double>(n - r.injected);
  }
  return r;
}

double matched_noise_recall(std::span<const InstanceId> injected,
                            std::span<const InstanceId> removed, std::size_t n,
                            std::size_t target) {
  const auto r = noise_removal_report(injected, removed, n);
  if (!r.injected) return 0.0;
  const auto hits = static_cast<double>(r.removed_noise);
  const auto m = static_cast<double>(r.injected);
  if (r.removed >= target) {
    if (!r.removed) return 0.0;
    return hits * static_cast<double>(target) / static_cast<double>(r.removed) / m;
  }
  const auto pool = static_cast<double>(n - r.removed);
  const auto extra = static_cast<double>(target - r.removed);
  return (hits + extra * (m - hits) / pool) / m;
}

}  // namespace prunekit
