#include "prunekit/weak.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "prunekit/corpus.hpp"

namespace prunekit {

namespace {

// Parameter vector layout: [W (n_features * n_classes, feature-major) | b (n_classes)].
struct Problem {
  const CorpusMatrix& matrix;
  std::span<const InstanceId> ids;
  std::size_t n_classes;
  std::size_t n_features;
  double l2;

  std::size_t n_weights() const { return n_features * n_classes; }
  std::size_t dim() const { return n_weights() + n_classes; }

  double evaluate(const std::vector<double>& x, std::vector<double>& grad) const {
    const std::size_t C = n_classes;
    grad.assign(dim(), 0.0);
    const double* W = x.data();
    const double* b = x.data() + n_weights();
    double* gW = grad.data();
    double* gb = grad.data() + n_weights();

    std::vector<double> s(C);
    double loss = 0.0;
    const double inv_n = 1.0 / static_cast<double>(ids.size());
    for (InstanceId id : ids) {
      const auto& row = matrix.rows[id];
      std::copy(b, b + C, s.begin());
      for (std::size_t j = 0; j < row.nnz(); ++j) {
        const double* w = W + static_cast<std::size_t>(row.indices[j]) * C;
        const double v = row.values[j];
        for (std::size_t c = 0; c < C; ++c) s[c] += v * w[c];
      }
      const double top = *std::max_element(s.begin(), s.end());
      double z = 0.0;
      for (std::size_t c = 0; c < C; ++c) {
        s[c] = std::exp(s[c] - top);
        z += s[c];
      }
      const ClassId y = matrix.labels[id];
      loss += std::log(z) - std::log(s[y]);
      for (std::size_t c = 0; c < C; ++c) s[c] = s[c] / z * inv_n;
      s[y] -= inv_n;
      for (std::size_t c = 0; c < C; ++c) gb[c] += s[c];
      for (std::size_t j = 0; j < row.nnz(); ++j) {
        double* g = gW + static_cast<std::size_t>(row.indices[j]) * C;
        const double v = row.values[j];
        for (std::size_t c = 0; c < C; ++c) g[c] += v * s[c];
      }
    }
    double reg = 0.0;
    for (std::size_t i = 0; i < n_weights(); ++i) {
      reg += W[i] * W[i];
      gW[i] += l2 * W[i];
    }
    return loss * inv_n + 0.5 * l2 * reg;
  }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct Correction {
  std::vector<double> s, y;
  double rho;
};

// Limited-memory BFGS with Armijo backtracking. Fully deterministic.
void minimize(const Problem& problem, std::vector<double>& x, const LogRegParams& params,
              LinearModel& out) {
  constexpr std::size_t kMemory = 10;
  std::vector<double> grad, next_grad, next_x(x.size()), dir(x.size());
  double f = problem.evaluate(x, grad);
  std::deque<Correction> history;
  std::vector<double> alpha(kMemory);

  out.converged = false;
  std::size_t iter = 0;
  while (iter < params.max_iters) {
    ++iter;
    // Two-loop recursion: dir = -H grad.
    dir = grad;
    for (std::size_t i = history.size(); i-- > 0;) {
      alpha[i] = history[i].rho * dot(history[i].s, dir);
      for (std::size_t j = 0; j < dir.size(); ++j) dir[j] -= alpha[i] * history[i].y[j];
    }
    double gamma = 1.0;
    if (!history.empty()) {
      const auto& last = history.back();
      gamma = dot(last.s, last.y) / dot(last.y, last.y);
    }
    for (double& d : dir) d *= gamma;
    for (std::size_t i = 0; i < history.size(); ++i) {
      const double beta = history[i].rho * dot(history[i].y, dir);
      for (std::size_t j = 0; j < dir.size(); ++j) dir[j] += (alpha[i] - beta) * history[i].s[j];
    }
    for (double& d : dir) d = -d;

    double slope = dot(grad, dir);
    if (!(slope < 0.0)) {
      history.clear();
      for (std::size_t j = 0; j < dir.size(); ++j) dir[j] = -grad[j];
      slope = dot(grad, dir);
    }
    if (slope == 0.0) {
      out.converged = true;
      break;
    }

    double step = 1.0;
    if (history.empty()) step = std::min(1.0, 1.0 / std::sqrt(-slope));
    double next_f = 0.0;
    bool accepted = false;
    for (int attempt = 0; attempt < 50; ++attempt) {
      for (std::size_t j = 0; j < x.size(); ++j) next_x[j] = x[j] + step * dir[j];
      next_f = problem.evaluate(next_x, next_grad);
      if (std::isfinite(next_f) && next_f <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No further decrease is representable; treat as converged.
      out.converged = true;
      break;
    }

    Correction corr;
    corr.s.resize(x.size());
    corr.y.resize(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
      corr.s[j] = next_x[j] - x[j];
      corr.y[j] = next_grad[j] - grad[j];
    }
    const double sy = dot(corr.s, corr.y);
    if (sy > 1e-12) {
      corr.rho = 1.0 / sy;
      history.push_back(std::move(corr));
      if (history.size() > kMemory) history.pop_front();
    }

    const double decrease = (f - next_f) / std::max({std::abs(f), std::abs(next_f), 1.0});
    x.swap(next_x);
    grad.swap(next_grad);
    f = next_f;
    if (decrease < params.tol) {
      out.converged = true;
      break;
    }
  }
  out.iterations = iter;
  out.objective = f;
}

}  // namespace

LinearModel train_logreg(const CorpusMatrix& matrix, std::span<const InstanceId> ids,
                         const LogRegParams& params) {
  if (matrix.n_classes < 2) throw Error("logistic regression needs at least two classes");
  std::vector<std::size_t> counts(matrix.n_classes, 0);
  for (InstanceId id : ids) ++counts.at(matrix.labels.at(id));
  const auto present = static_cast<std::size_t>(
      std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }));
  if (present < 2) throw Error("logistic regression needs at least two classes present");
  if (ids.size() < present) throw Error("logistic regression needs n >= number of classes");
  if (!(params.l2_strength > 0.0)) throw Error("l2_strength must be positive");

  // Optimized as (1/n) J: same minimizer, better-scaled line searches.
  const double n = static_cast<double>(ids.size());
  Problem problem{matrix, ids, matrix.n_classes, matrix.n_features, params.l2_strength / n};
  std::vector<double> x(problem.dim(), 0.0);

  LinearModel model;
  model.n_classes = matrix.n_classes;
  model.n_features = matrix.n_features;
  minimize(problem, x, params, model);
  model.objective *= n;
  model.weights.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(problem.n_weights()));
  model.bias.assign(x.begin() + static_cast<std::ptrdiff_t>(problem.n_weights()), x.end());
  for (double w : x) {
    if (!std::isfinite(w)) throw Error("logistic regression diverged");
  }
  return model;
}

LinearModel train_logreg(const CorpusMatrix& matrix, const LogRegParams& params) {
  const auto ids = all_ids(matrix.size());
  return train_logreg(matrix, ids, params);
}

double logreg_objective(const CorpusMatrix& matrix, std::span<const InstanceId> ids,
                        const LinearModel& model, double l2_strength,
                        std::vector<double>* gradient) {
  const double n = static_cast<double>(ids.size());
  Problem problem{matrix, ids, model.n_classes, model.n_features, l2_strength / n};
  std::vector<double> x(model.weights);
  x.insert(x.end(), model.bias.begin(), model.bias.end());
  std::vector<double> grad;
  const double f = problem.evaluate(x, grad);
  if (gradient) {
    for (double& g : grad) g *= n;
    *gradient = std::move(grad);
  }
  return f * n;
}

std::vector<double> predict_posterior(const LinearModel& model, const SparseVector& row) {
  const std::size_t C = model.n_classes;
  std::vector<double> s(model.bias);
  for (std::size_t j = 0; j < row.nnz(); ++j) {
    if (row.indices[j] >= model.n_features) continue;
    const double* w = model.weights.data() + static_cast<std::size_t>(row.indices[j]) * C;
    for (std::size_t c = 0; c < C; ++c) s[c] += row.values[j] * w[c];
  }
  const double top = *std::max_element(s.begin(), s.end());
  double z = 0.0;
  for (double& v : s) {
    v = std::exp(v - top);
    z += v;
  }
  for (double& v : s) v /= z;
  return s;
}

std::vector<std::vector<double>> predict_posterior(const LinearModel& model,
                                                   std::span<const SparseVector> rows) {
  std::vector<std::vector<double>> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = predict_posterior(model, rows[i]);
  return out;
}

std::vector<ClassId> predict(const LinearModel& model, std::span<const SparseVector> rows) {
  std::vector<ClassId> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = argmax(predict_posterior(model, rows[i]));
  return out;
}

std::vector<PosteriorRecord> cross_predict(const CorpusMatrix& matrix,
                                           std::span<const InstanceId> ids, std::size_t folds,
                                           std::uint64_t seed, const LogRegParams& params) {
  std::vector<ClassId> labels;
  labels.reserve(ids.size());
  for (InstanceId id : ids) labels.push_back(matrix.labels.at(id));
  const FoldPlan plan = stratified_kfold(labels, folds, seed);

  std::vector<PosteriorRecord> records(ids.size());
  parallel_for(folds, [&](std::size_t fold) {
    std::vector<InstanceId> train;
    std::vector<std::size_t> held_out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (plan.assignment[i] == fold) {
        held_out.push_back(i);
      } else {
        train.push_back(ids[i]);
      }
    }
    const LinearModel model = train_logreg(matrix, train, params);
    for (std::size_t i : held_out) {
      records[i] = make_record(ids[i], predict_posterior(model, matrix.rows[ids[i]]),
                               matrix.labels[ids[i]]);
    }
  });
  return records;
}

std::vector<PosteriorRecord> cross_predict(const CorpusMatrix& matrix, std::size_t folds,
                                           std::uint64_t seed, const LogRegParams& params) {
  const auto ids = all_ids(matrix.size());
  return cross_predict(matrix, ids, folds, seed, params);
}

CalibrationReport calibration_report(std::span<const PosteriorRecord> records, std::size_t bins) {
  if (records.empty()) throw Error("calibration_report needs at least one record");
  if (bins < 1) throw Error("calibration_report needs at least one bin");
  CalibrationReport report;
  report.bins.resize(bins);
  std::vector<double> conf_sum(bins, 0.0), correct(bins, 0.0);
  for (std::size_t b = 0; b < bins; ++b) {
    report.bins[b].lower = static_cast<double>(b) / static_cast<double>(bins);
    report.bins[b].upper = static_cast<double>(b + 1) / static_cast<double>(bins);
  }
  for (const auto& r : records) {
    const double conf = *std::max_element(r.posterior.begin(), r.posterior.end());
    auto b = static_cast<std::size_t>(conf * static_cast<double>(bins));
    b = std::min(b, bins - 1);
    ++report.bins[b].count;
    conf_sum[b] += conf;
    correct[b] += r.correct ? 1.0 : 0.0;
  }
  const auto n = static_cast<double>(records.size());
  for (std::size_t b = 0; b < bins; ++b) {
    auto& bin = report.bins[b];
    if (!bin.count) continue;
    const auto cnt = static_cast<double>(bin.count);
    bin.mean_confidence = conf_sum[b] / cnt;
    bin.accuracy = correct[b] / cnt;
    report.ece += cnt / n * std::abs(bin.accuracy - bin.mean_confidence);
  }
  return report;
}

}  // namespace prunekit
