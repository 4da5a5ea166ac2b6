#pragma once

#include <span>
#include <vector>

#include "prunekit/common.hpp"

namespace prunekit {

/// One instance's class posterior as seen by a weak model.
struct PosteriorRecord {
  InstanceId id = 0;
  std::vector<double> posterior;
  ClassId predicted = 0;
  bool correct = false;
  double entropy = 0.0;  // nats
  /// Set by k-NN when no neighbor had positive similarity; the posterior
  /// is then uniform and carries no information about the instance.
  bool zero_evidence = false;
};

/// Index of the largest entry; ties go to the lower class id.
ClassId argmax(std::span<const double> values);

/// Shannon entropy in nats, with 0 ln 0 = 0. Throws Error when the input
/// is not a probability vector (|sum - 1| > 1e-6 or a negative entry).
double entropy(std::span<const double> posterior);

PosteriorRecord make_record(InstanceId id, std::vector<double> posterior, ClassId true_label);

}  // namespace prunekit
