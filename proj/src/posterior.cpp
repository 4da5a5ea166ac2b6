#include "prunekit/posterior.hpp"

#include <cmath>

namespace prunekit {

ClassId argmax(std::span<const double> values) {
  if (values.empty()) throw Error("argmax of empty vector");
  ClassId best = 0;
  for (ClassId c = 1; c < values.size(); ++c) {
    if (values[c] > values[best]) best = c;
  }
  return best;
}

double entropy(std::span<const double> posterior) {
  double sum = 0.0;
  for (double p : posterior) {
    if (p < 0.0 || !std::isfinite(p)) throw Error("entropy: not a probability vector");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6) throw Error("entropy: probabilities do not sum to 1");
  double h = 0.0;
  for (double p : posterior) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h > 0.0 ? h : 0.0;
}

PosteriorRecord make_record(InstanceId id, std::vector<double> posterior, ClassId true_label) {
  PosteriorRecord r;
  r.id = id;
  r.predicted = argmax(posterior);
  r.correct = r.predicted == true_label;
  r.entropy = entropy(posterior);
  r.posterior = std::move(posterior);
  return r;
}

}  // namespace prunekit
