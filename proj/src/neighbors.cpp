#include "prunekit/neighbors.hpp"

#include <algorithm>
#include <numeric>

namespace prunekit {

KnnModel::KnnModel(const CorpusMatrix& matrix, std::size_t k)
    : KnnModel(matrix, all_ids(matrix.size()), k) {}

KnnModel::KnnModel(const CorpusMatrix& matrix, std::vector<InstanceId> members, std::size_t k)
    : matrix_(&matrix), members_(std::move(members)), k_(k) {
  if (k_ < 1) throw Error("k must be at least 1");
  for (InstanceId id : members_) {
    if (id >= matrix.size()) throw Error("knn: member id out of range");
  }
  build_index();
}

void KnnModel::build_index() {
  const auto& m = *matrix_;
  offsets_.assign(m.n_features + 1, 0);
  for (InstanceId id : members_) {
    for (FeatureId f : m.rows[id].indices) ++offsets_[f + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  posting_members_.resize(offsets_.back());
  posting_values_.resize(offsets_.back());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (std::uint32_t pos = 0; pos < members_.size(); ++pos) {
    const auto& row = m.rows[members_[pos]];
    for (std::size_t j = 0; j < row.nnz(); ++j) {
      const std::size_t slot = cursor[row.indices[j]]++;
      posting_members_[slot] = pos;
      posting_values_[slot] = row.values[j];
    }
  }
}

void KnnModel::similarities(const SparseVector& query, std::vector<double>& out) const {
  out.assign(members_.size(), 0.0);
  // Features are visited in ascending order so every accumulated sum has the
  // same rounding as SparseVector::dot.
  for (std::size_t j = 0; j < query.nnz(); ++j) {
    const FeatureId f = query.indices[j];
    if (f >= matrix_->n_features) continue;
    const double q = query.values[j];
    for (std::size_t p = offsets_[f]; p < offsets_[f + 1]; ++p) {
      out[posting_members_[p]] += q * posting_values_[p];
    }
  }
}

NeighborList knn_search(const KnnModel& model, const SparseVector& query,
                        std::optional<InstanceId> exclude) {
  return knn_search(model, query, model.k(), exclude);
}

NeighborList knn_search(const KnnModel& model, const SparseVector& query, std::size_t k,
                        std::optional<InstanceId> exclude) {
  std::vector<double> sims;
  model.similarities(query, sims);
  const auto members = model.members();

  std::vector<std::uint32_t> candidates;
  candidates.reserve(members.size());
  for (std::uint32_t pos = 0; pos < members.size(); ++pos) {
    if (!exclude || members[pos] != *exclude) candidates.push_back(pos);
  }
  if (k > candidates.size()) throw Error("knn: k exceeds the number of available candidates");

  auto closer = [&](std::uint32_t a, std::uint32_t b) {
    if (sims[a] != sims[b]) return sims[a] > sims[b];
    return members[a] < members[b];
  };
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k),
                    candidates.end(), closer);

  NeighborList out;
  out.ids.reserve(k);
  out.similarities.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    out.ids.push_back(members[candidates[i]]);
    out.similarities.push_back(sims[candidates[i]]);
  }
  return out;
}

KnnPosterior posterior_from_neighbors(const NeighborList& neighbors,
                                      std::span<const ClassId> labels, std::size_t n_classes) {
  KnnPosterior out;
  out.posterior.assign(n_classes, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < neighbors.ids.size(); ++i) {
    const double s = std::max(0.0, neighbors.similarities[i]);
    out.posterior[labels[neighbors.ids[i]]] += s;
    total += s;
  }
  if (total > 0.0) {
    for (double& p : out.posterior) p /= total;
  } else {
    out.zero_evidence = true;
    std::fill(out.posterior.begin(), out.posterior.end(), 1.0 / static_cast<double>(n_classes));
  }
  return out;
}

KnnPosterior knn_posterior(const KnnModel& model, const SparseVector& query,
                           std::optional<InstanceId> exclude) {
  const auto neighbors = knn_search(model, query, exclude);
  return posterior_from_neighbors(neighbors, model.matrix().labels, model.matrix().n_classes);
}

std::vector<PosteriorRecord> loo_predictions(const KnnModel& model) {
  const auto& m = model.matrix();
  if (model.size() < model.k() + 1) throw Error("loo_predictions: need at least k+1 instances");
  const auto members = model.members();
  std::vector<PosteriorRecord> records(members.size());
  parallel_for(members.size(), [&](std::size_t pos) {
    const InstanceId id = members[pos];
    auto post = knn_posterior(model, m.rows[id], id);
    records[pos] = make_record(id, std::move(post.posterior), m.labels[id]);
    records[pos].zero_evidence = post.zero_evidence;
  });
  return records;
}

std::vector<ClassId> knn_predict(const KnnModel& model, std::span<const SparseVector> queries) {
  std::vector<ClassId> predicted(queries.size());
  const std::size_t k = std::min(model.k(), model.size());
  parallel_for(queries.size(), [&](std::size_t i) {
    const auto neighbors = knn_search(model, queries[i], k, std::nullopt);
    const auto post = posterior_from_neighbors(neighbors, model.matrix().labels,
                                               model.matrix().n_classes);
    predicted[i] = argmax(post.posterior);
  });
  return predicted;
}

}  // namespace prunekit
