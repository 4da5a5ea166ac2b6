#pragma once

#include <optional>
#include <span>
#include <vector>

#include "prunekit/posterior.hpp"
#include "prunekit/sparse.hpp"

namespace prunekit {

struct NeighborList {
  std::vector<InstanceId> ids;       // matrix row ids
  std::vector<double> similarities;  // cosine, non-increasing
};

/// Exact k-NN over a set of matrix rows, backed by an inverted index.
/// Rows are L2-normalized, so dot product equals cosine similarity.
/// The model references the matrix; the matrix must outlive it.
class KnnModel {
 public:
  KnnModel(const CorpusMatrix& matrix, std::size_t k);
  /// Restricts the searchable set to `members` (matrix row ids).
  KnnModel(const CorpusMatrix& matrix, std::vector<InstanceId> members, std::size_t k);

  const CorpusMatrix& matrix() const { return *matrix_; }
  std::size_t k() const { return k_; }
  std::span<const InstanceId> members() const { return members_; }
  std::size_t size() const { return members_.size(); }

  /// Similarity of `query` to every member, indexed by member position.
  void similarities(const SparseVector& query, std::vector<double>& out) const;

 private:
  void build_index();

  const CorpusMatrix* matrix_;
  std::vector<InstanceId> members_;
  std::size_t k_;
  std::vector<std::size_t> offsets_;  // per feature, into postings
  std::vector<std::uint32_t> posting_members_;
  std::vector<double> posting_values_;
};

/// Exact top-k by similarity, ties to the lower row id. Throws when fewer
/// than k candidates remain after exclusion.
NeighborList knn_search(const KnnModel& model, const SparseVector& query,
                        std::optional<InstanceId> exclude = std::nullopt);

/// Same, with an explicit neighbor count.
NeighborList knn_search(const KnnModel& model, const SparseVector& query, std::size_t k,
                        std::optional<InstanceId> exclude);

struct KnnPosterior {
  std::vector<double> posterior;  // length n_classes
  bool zero_evidence = false;     // no neighbor had positive similarity
};

/// Similarity-weighted vote over the k neighbors. Uniform when the total
/// neighbor similarity is zero.
KnnPosterior knn_posterior(const KnnModel& model, const SparseVector& query,
                           std::optional<InstanceId> exclude = std::nullopt);

KnnPosterior posterior_from_neighbors(const NeighborList& neighbors,
                                      std::span<const ClassId> labels, std::size_t n_classes);

/// Leave-one-out posterior for every member, in member order.
std::vector<PosteriorRecord> loo_predictions(const KnnModel& model);

/// argmax of knn_posterior for each query row.
std::vector<ClassId> knn_predict(const KnnModel& model, std::span<const SparseVector> queries);

}  // namespace prunekit
