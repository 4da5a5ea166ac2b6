#include "prunekit/sparse.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace prunekit {

double SparseVector::norm() const {
  double sum = 0.0;
  for (double v : values) sum += v * v;
  return std::sqrt(sum);
}

double SparseVector::dot(const SparseVector& other) const {
  double sum = 0.0;
  std::size_t i = 0, j = 0;
  while (i < indices.size() && j < other.indices.size()) {
    if (indices[i] < other.indices[j]) {
      ++i;
    } else if (indices[i] > other.indices[j]) {
      ++j;
    } else {
      sum += values[i] * other.values[j];
      ++i;
      ++j;
    }
  }
  return sum;
}

void SparseVector::validate(std::size_t n_features) const {
  if (indices.size() != values.size()) throw Error("sparse row: index/value length mismatch");
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= n_features) throw Error("sparse row: feature id out of range");
    if (i && indices[i] <= indices[i - 1]) throw Error("sparse row: indices not strictly ascending");
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) throw Error("sparse row: non-positive weight");
  }
}

void CorpusMatrix::validate() const {
  if (rows.size() != labels.size()) throw Error("matrix: row/label count mismatch");
  for (const auto& row : rows) row.validate(n_features);
  for (ClassId y : labels) {
    if (y >= n_classes) throw Error("matrix: label " + std::to_string(y) + " outside class universe");
  }
}

CorpusMatrix CorpusMatrix::relabeled(std::vector<ClassId> new_labels) const {
  if (new_labels.size() != rows.size()) throw Error("relabel: label count mismatch");
  CorpusMatrix out{rows, std::move(new_labels), n_features, n_classes};
  return out;
}

CorpusMatrix CorpusMatrix::subset(std::span<const InstanceId> ids) const {
  CorpusMatrix out;
  out.n_features = n_features;
  out.n_classes = n_classes;
  out.rows.reserve(ids.size());
  out.labels.reserve(ids.size());
  for (InstanceId id : ids) {
    out.rows.push_back(rows.at(id));
    out.labels.push_back(labels.at(id));
  }
  return out;
}

std::vector<std::vector<InstanceId>> CorpusMatrix::class_members() const {
  std::vector<std::vector<InstanceId>> members(n_classes);
  for (InstanceId i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);
  return members;
}

std::vector<InstanceId> all_ids(std::size_t n) {
  std::vector<InstanceId> ids(n);
  std::iota(ids.begin(), ids.end(), InstanceId{0});
  return ids;
}

}  // namespace prunekit
