#include "prunekit/selection.hpp"

#include <algorithm>

#include "prunekit/neighbors.hpp"

namespace prunekit {

double SelectionResult::reduction() const {
  const std::size_t n = retained.size() + removed.size();
  return n ? static_cast<double>(removed.size()) / static_cast<double>(n) : 0.0;
}

SelectionResult make_selection(std::string method, ParamMap params, std::size_t n,
                               std::vector<InstanceId> retained) {
  SelectionResult r;
  r.method = std::move(method);
  r.params = std::move(params);
  std::sort(retained.begin(), retained.end());
  retained.erase(std::unique(retained.begin(), retained.end()), retained.end());
  r.removed = complement(all_ids(n), retained);
  r.retained = std::move(retained);
  return r;
}

std::vector<InstanceId> complement(std::span<const InstanceId> scope,
                                   std::span<const InstanceId> removed) {
  std::vector<InstanceId> out;
  out.reserve(scope.size());
  std::set_difference(scope.begin(), scope.end(), removed.begin(), removed.end(),
                      std::back_inserter(out));
  return out;
}

std::vector<InstanceId> ensure_class_coverage(const CorpusMatrix& matrix,
                                              std::span<const InstanceId> scope,
                                              std::vector<InstanceId>& retained) {
  std::vector<bool> covered(matrix.n_classes, false);
  for (InstanceId id : retained) covered[matrix.labels[id]] = true;
  std::vector<std::vector<InstanceId>> missing(matrix.n_classes);
  bool any = false;
  for (InstanceId id : scope) {
    const ClassId y = matrix.labels[id];
    if (!covered[y]) {
      missing[y].push_back(id);
      any = true;
    }
  }
  std::vector<InstanceId> added;
  if (!any) return added;

  for (ClassId c = 0; c < matrix.n_classes; ++c) {
    const auto& members = missing[c];
    if (members.empty()) continue;
    KnnModel model(matrix, members, 1);
    std::vector<double> sims;
    InstanceId best = members.front();
    double best_score = -1.0;
    for (InstanceId id : members) {
      model.similarities(matrix.rows[id], sims);
      double score = 0.0;
      for (std::size_t p = 0; p < members.size(); ++p) {
        if (members[p] != id) score += sims[p];
      }
      if (score > best_score) {
        best_score = score;
        best = id;
      }
    }
    added.push_back(best);
  }
  retained.insert(retained.end(), added.begin(), added.end());
  std::sort(retained.begin(), retained.end());
  return added;
}

void check_selection(const CorpusMatrix& matrix, const SelectionResult& result) {
  const std::size_t n = matrix.size();
  if (result.retained.size() + result.removed.size() != n) {
    throw Error("selection does not cover every instance");
  }
  std::vector<int> seen(n, 0);
  for (InstanceId id : result.retained) ++seen.at(id);
  for (InstanceId id : result.removed) ++seen.at(id);
  if (std::any_of(seen.begin(), seen.end(), [](int c) { return c != 1; })) {
    throw Error("retained and removed do not partition the instances");
  }
  if (result.retained.empty()) throw Error("selection retained nothing");
  std::vector<bool> present(matrix.n_classes, false), kept(matrix.n_classes, false);
  for (ClassId y : matrix.labels) present[y] = true;
  for (InstanceId id : result.retained) kept[matrix.labels[id]] = true;
  for (ClassId c = 0; c < matrix.n_classes; ++c) {
    if (present[c] && !kept[c]) throw Error("selection emptied class " + std::to_string(c));
  }
}

}  // namespace prunekit
