#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "prunekit/common.hpp"

namespace prunekit {

/// Sparse row: strictly ascending feature ids with non-zero weights.
struct SparseVector {
  std::vector<FeatureId> indices;
  std::vector<double> values;

  std::size_t nnz() const { return indices.size(); }
  bool empty() const { return indices.empty(); }
  double norm() const;
  /// Ascending-index merge. Products are summed in feature order, which is
  /// the same order a dense loop or the inverted index uses.
  double dot(const SparseVector& other) const;
  /// Throws if indices are not strictly ascending or a value is zero/negative.
  void validate(std::size_t n_features) const;
};

/// Rows of an L2-normalized document-term matrix with their class labels.
/// `n_classes` is the label universe size; labels are in [0, n_classes).
struct CorpusMatrix {
  std::vector<SparseVector> rows;
  std::vector<ClassId> labels;
  std::size_t n_features = 0;
  std::size_t n_classes = 0;

  std::size_t size() const { return rows.size(); }

  /// Checks the structural invariants; throws Error on violation.
  void validate() const;

  /// Same rows, different labels (used for noise injection).
  CorpusMatrix relabeled(std::vector<ClassId> new_labels) const;

  /// Rows `ids` in the given order; the result is re-indexed from 0.
  CorpusMatrix subset(std::span<const InstanceId> ids) const;

  /// Member ids of every class, ascending.
  std::vector<std::vector<InstanceId>> class_members() const;
};

std::vector<InstanceId> all_ids(std::size_t n);

}  // namespace prunekit
