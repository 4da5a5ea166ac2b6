#include "prunekit/classic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "prunekit/neighbors.hpp"

namespace prunekit {

namespace {

constexpr auto kNone = std::numeric_limits<InstanceId>::max();

// k nearest neighbors of every row, self excluded, k capped at n - 1.
std::vector<NeighborList> all_neighbors(const CorpusMatrix& matrix, std::size_t k) {
  const std::size_t n = matrix.size();
  std::vector<NeighborList> out(n);
  if (n < 2) return out;
  const std::size_t kk = std::min(k, n - 1);
  KnnModel model(matrix, kk);
  parallel_for(n, [&](std::size_t i) {
    out[i] = knn_search(model, matrix.rows[i], kk, static_cast<InstanceId>(i));
  });
  return out;
}

// Plurality label among positive-similarity entries of the first `k` ids in
// `ids` (skipping `skip`). Ties go to the label of the nearest tied
// neighbor. Returns kNone when nobody votes.
ClassId vote(const CorpusMatrix& matrix, const std::vector<InstanceId>& ids,
             const std::vector<double>& sims, std::size_t k, InstanceId skip,
             std::vector<std::size_t>& counts) {
  std::fill(counts.begin(), counts.end(), 0);
  std::size_t used = 0;
  std::size_t best_count = 0;
  for (std::size_t p = 0; p < ids.size() && used < k; ++p) {
    if (ids[p] == skip) continue;
    ++used;
    if (!(sims[p] > 0.0)) continue;
    best_count = std::max(best_count, ++counts[matrix.labels[ids[p]]]);
  }
  if (best_count == 0) return kNone;
  used = 0;
  for (std::size_t p = 0; p < ids.size() && used < k; ++p) {
    if (ids[p] == skip) continue;
    ++used;
    if (sims[p] > 0.0 && counts[matrix.labels[ids[p]]] == best_count) return matrix.labels[ids[p]];
  }
  return kNone;
}

SelectionResult finish(const CorpusMatrix& matrix, std::string method, ParamMap params,
                       std::vector<InstanceId> retained, const Stopwatch& clock) {
  const auto ids = all_ids(matrix.size());
  std::sort(retained.begin(), retained.end());
  const auto readded = ensure_class_coverage(matrix, ids, retained);
  auto result = make_selection(std::move(method), std::move(params), matrix.size(),
                               std::move(retained));
  for (InstanceId id : readded) {
    result.notes.push_back("re-added instance " + std::to_string(id) + " to keep its class");
  }
  result.time_seconds = clock.seconds();
  return result;
}

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(10);
  out << v;
  return out.str();
}

}  // namespace

std::vector<LocalSet> local_sets(const CorpusMatrix& matrix) {
  const std::size_t n = matrix.size();
  std::vector<LocalSet> out(n);
  if (n == 0) return out;
  KnnModel model(matrix, 1);
  parallel_for(n, [&](std::size_t i) {
    std::vector<double> sims;
    model.similarities(matrix.rows[i], sims);
    const ClassId y = matrix.labels[i];
    double enemy_sim = 0.0;
    InstanceId enemy = kNone;
    for (InstanceId j = 0; j < n; ++j) {
      if (matrix.labels[j] != y && sims[j] > enemy_sim) {
        enemy_sim = sims[j];
        enemy = j;
      }
    }
    auto& ls = out[i];
    if (enemy != kNone) {
      ls.nearest_enemy = enemy;
      ls.enemy_distance = 1.0 - enemy_sim;
    }
    for (InstanceId j = 0; j < n; ++j) {
      if (j != i && matrix.labels[j] == y && sims[j] > enemy_sim) ls.members.push_back(j);
    }
  });
  return out;
}

std::vector<bool> enn_keep_mask(const CorpusMatrix& matrix, std::size_t k) {
  if (k < 1) throw Error("enn: k must be at least 1");
  const std::size_t n = matrix.size();
  const auto neighbors = all_neighbors(matrix, k);
  std::vector<bool> keep(n, true);
  std::vector<std::size_t> counts(matrix.n_classes);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(counts.begin(), counts.end(), 0);
    const auto& nl = neighbors[i];
    for (std::size_t p = 0; p < nl.ids.size(); ++p) {
      if (nl.similarities[p] > 0.0) ++counts[matrix.labels[nl.ids[p]]];
    }
    const std::size_t own = counts[matrix.labels[i]];
    keep[i] = own == *std::max_element(counts.begin(), counts.end());
  }
  return keep;
}

SelectionResult enn_select(const CorpusMatrix& matrix, std::size_t k) {
  Stopwatch clock;
  const auto keep = enn_keep_mask(matrix, k);
  std::vector<InstanceId> retained;
  for (InstanceId i = 0; i < keep.size(); ++i) {
    if (keep[i]) retained.push_back(i);
  }
  return finish(matrix, "enn", {{"k", std::to_string(k)}}, std::move(retained), clock);
}

SelectionResult cnn_select(const CorpusMatrix& matrix, std::uint64_t seed) {
  Stopwatch clock;
  const std::size_t n = matrix.size();
  Rng rng(seed);
  std::vector<bool> in_s(n, false);
  std::vector<double> best_sim(n, 0.0);
  std::vector<InstanceId> best_id(n, kNone);
  KnnModel model(matrix, 1);
  std::vector<double> sims;

  auto add = [&](InstanceId s) {
    in_s[s] = true;
    model.similarities(matrix.rows[s], sims);
    for (InstanceId t = 0; t < n; ++t) {
      if (!(sims[t] > 0.0)) continue;
      if (sims[t] > best_sim[t] || (sims[t] == best_sim[t] && s < best_id[t])) {
        best_sim[t] = sims[t];
        best_id[t] = s;
      }
    }
  };

  for (const auto& members : matrix.class_members()) {
    if (!members.empty()) add(members[rng.below(members.size())]);
  }
  auto order = all_ids(n);
  rng.shuffle(order);
  for (bool changed = true; changed;) {
    changed = false;
    for (InstanceId t : order) {
      if (in_s[t]) continue;
      if (best_id[t] == kNone || matrix.labels[best_id[t]] != matrix.labels[t]) {
        add(t);
        changed = true;
      }
    }
  }
  std::vector<InstanceId> retained;
  for (InstanceId i = 0; i < n; ++i) {
    if (in_s[i]) retained.push_back(i);
  }
  return finish(matrix, "cnn", {{"seed", std::to_string(seed)}}, std::move(retained), clock);
}

SelectionResult drop3_select(const CorpusMatrix& matrix, std::size_t k) {
  if (k < 1) throw Error("drop3: k must be at least 1");
  Stopwatch clock;
  const std::size_t n = matrix.size();
  const auto keep = enn_keep_mask(matrix, k);
  std::vector<InstanceId> universe;
  for (InstanceId i = 0; i < n; ++i) {
    if (keep[i]) universe.push_back(i);
  }
  const std::size_t u = universe.size();
  if (u < 2) {
    return finish(matrix, "drop3", {{"k", std::to_string(k)}}, universe, clock);
  }
  // Positions below are indices into `universe`.
  KnnModel model(matrix, universe, 1);
  const std::size_t list_len = std::min(k + 1, u - 1);
  std::vector<std::vector<InstanceId>> nn(u);
  std::vector<std::vector<double>> nn_sim(u);
  std::vector<double> enemy_distance(u, 1.0);
  parallel_for(u, [&](std::size_t a) {
    std::vector<double> sims;
    model.similarities(matrix.rows[universe[a]], sims);
    const ClassId y = matrix.labels[universe[a]];
    double enemy = 0.0;
    for (std::size_t b = 0; b < u; ++b) {
      if (b != a && matrix.labels[universe[b]] != y) enemy = std::max(enemy, sims[b]);
    }
    enemy_distance[a] = 1.0 - enemy;
    std::vector<InstanceId> order;
    order.reserve(u - 1);
    for (InstanceId b = 0; b < u; ++b) {
      if (b != a) order.push_back(b);
    }
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(list_len),
                      order.end(), [&](InstanceId x, InstanceId y2) {
                        if (sims[x] != sims[y2]) return sims[x] > sims[y2];
                        return x < y2;
                      });
    order.resize(list_len);
    for (InstanceId b : order) nn_sim[a].push_back(sims[b]);
    nn[a] = std::move(order);
  });

  std::vector<std::vector<InstanceId>> associates(u);
  for (InstanceId a = 0; a < u; ++a) {
    for (InstanceId b : nn[a]) associates[b].push_back(a);
  }

  // Labels addressed by universe position for the vote helper.
  CorpusMatrix pos_labels;
  pos_labels.labels.resize(u);
  for (std::size_t a = 0; a < u; ++a) pos_labels.labels[a] = matrix.labels[universe[a]];
  pos_labels.n_classes = matrix.n_classes;
  std::vector<std::size_t> counts(matrix.n_classes);

  std::vector<InstanceId> visit(u);
  std::iota(visit.begin(), visit.end(), 0);
  std::stable_sort(visit.begin(), visit.end(), [&](InstanceId a, InstanceId b) {
    return enemy_distance[a] > enemy_distance[b];
  });

  std::vector<bool> in_s(u, true);
  std::vector<double> sims;
  for (InstanceId p : visit) {
    std::size_t with = 0, without = 0;
    for (InstanceId a : associates[p]) {
      const ClassId y = pos_labels.labels[a];
      if (vote(pos_labels, nn[a], nn_sim[a], k, kNone, counts) == y) ++with;
      if (vote(pos_labels, nn[a], nn_sim[a], k, p, counts) == y) ++without;
    }
    if (without < with) continue;
    in_s[p] = false;
    const auto assoc = associates[p];
    associates[p].clear();
    for (InstanceId a : assoc) {
      auto it = std::find(nn[a].begin(), nn[a].end(), p);
      if (it == nn[a].end()) continue;
      const auto at = static_cast<std::size_t>(it - nn[a].begin());
      nn[a].erase(it);
      nn_sim[a].erase(nn_sim[a].begin() + static_cast<std::ptrdiff_t>(at));
      // Replacement neighbor: the closest member of S not yet in the list.
      model.similarities(matrix.rows[universe[a]], sims);
      InstanceId best = kNone;
      for (InstanceId b = 0; b < u; ++b) {
        if (b == a || !in_s[b]) continue;
        if (std::find(nn[a].begin(), nn[a].end(), b) != nn[a].end()) continue;
        if (best == kNone || sims[b] > sims[best]) best = b;
      }
      if (best == kNone) continue;
      auto pos = nn[a].begin();
      auto spos = nn_sim[a].begin();
      while (pos != nn[a].end() && (*spos > sims[best] || (*spos == sims[best] && *pos < best))) {
        ++pos;
        ++spos;
      }
      nn[a].insert(pos, best);
      nn_sim[a].insert(spos, sims[best]);
      associates[best].push_back(a);
    }
  }

  std::vector<InstanceId> retained;
  for (std::size_t a = 0; a < u; ++a) {
    if (in_s[a]) retained.push_back(universe[a]);
  }
  return finish(matrix, "drop3", {{"k", std::to_string(k)}}, std::move(retained), clock);
}

SelectionResult lssm_select(const CorpusMatrix& matrix) {
  Stopwatch clock;
  const std::size_t n = matrix.size();
  const auto sets = local_sets(matrix);
  std::vector<std::size_t> usefulness(n, 0), harmfulness(n, 0);
  for (const auto& ls : sets) {
    for (InstanceId m : ls.members) ++usefulness[m];
    if (ls.nearest_enemy) ++harmfulness[*ls.nearest_enemy];
  }
  std::vector<InstanceId> retained;
  for (InstanceId i = 0; i < n; ++i) {
    if (usefulness[i] >= harmfulness[i]) retained.push_back(i);
  }
  return finish(matrix, "lssm", {}, std::move(retained), clock);
}

SelectionResult lsbo_select(const CorpusMatrix& matrix) {
  Stopwatch clock;
  const std::size_t n = matrix.size();
  const auto sets = local_sets(matrix);
  auto order = all_ids(n);
  std::stable_sort(order.begin(), order.end(), [&](InstanceId a, InstanceId b) {
    return sets[a].members.size() < sets[b].members.size();
  });
  std::vector<bool> in_s(n, false);
  for (InstanceId e : order) {
    const auto& members = sets[e].members;
    const bool covered =
        std::any_of(members.begin(), members.end(), [&](InstanceId m) { return in_s[m]; });
    if (!covered) in_s[e] = true;
  }
  std::vector<InstanceId> retained;
  for (InstanceId i = 0; i < n; ++i) {
    if (in_s[i]) retained.push_back(i);
  }
  return finish(matrix, "lsbo", {}, std::move(retained), clock);
}

SelectionResult egdis_select(const CorpusMatrix& matrix, std::size_t k) {
  if (k < 1) throw Error("egdis: k must be at least 1");
  Stopwatch clock;
  const std::size_t n = matrix.size();
  const auto neighbors = all_neighbors(matrix, k);
  const std::size_t threshold = (k + 1) / 2;
  std::vector<double> density(n, 0.0);
  std::vector<std::size_t> irrelevance(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& nl = neighbors[i];
    for (std::size_t p = 0; p < nl.ids.size(); ++p) {
      density[i] += nl.similarities[p];
      if (nl.similarities[p] > 0.0 && matrix.labels[nl.ids[p]] != matrix.labels[i]) {
        ++irrelevance[i];
      }
    }
  }
  std::vector<InstanceId> retained;
  for (InstanceId i = 0; i < n; ++i) {
    if (irrelevance[i] >= threshold) {
      retained.push_back(i);
      continue;
    }
    if (irrelevance[i] != 0) continue;
    const auto& nl = neighbors[i];
    bool peak = true;
    for (std::size_t p = 0; p < nl.ids.size() && peak; ++p) {
      if (!(nl.similarities[p] > 0.0)) continue;
      const InstanceId j = nl.ids[p];
      if (density[j] > density[i] || (density[j] == density[i] && j < i)) peak = false;
    }
    if (peak) retained.push_back(i);
  }
  return finish(matrix, "egdis", {{"k", std::to_string(k)}}, std::move(retained), clock);
}

Interval wilson_interval(std::size_t successes, std::size_t trials, double confidence) {
  if (trials == 0) return {};
  const double z =
      boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + confidence / 2.0);
  const double nt = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / nt;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nt;
  const double centre = (p + z2 / (2.0 * nt)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nt + z2 / (4.0 * nt * nt)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

SelectionResult ib3_select(const CorpusMatrix& matrix, double confidence_accept,
                           double confidence_drop, std::uint64_t seed) {
  if (!(confidence_accept > 0.0 && confidence_accept < 1.0) ||
      !(confidence_drop > 0.0 && confidence_drop < 1.0)) {
    throw Error("ib3: confidence levels must lie in (0, 1)");
  }
  Stopwatch clock;
  const std::size_t n = matrix.size();
  Rng rng(seed);
  auto order = all_ids(n);
  rng.shuffle(order);

  KnnModel model(matrix, 1);
  std::vector<InstanceId> s;  // insertion order
  std::vector<std::size_t> attempts(n, 0), successes(n, 0);
  std::vector<std::size_t> class_seen(matrix.n_classes, 0);
  std::size_t processed = 0;
  std::vector<double> sims;

  auto class_interval = [&](ClassId c, double confidence) {
    return wilson_interval(class_seen[c], processed, confidence);
  };
  auto acceptable = [&](InstanceId x) {
    return wilson_interval(successes[x], attempts[x], confidence_accept).lower >
           class_interval(matrix.labels[x], confidence_accept).upper;
  };
  auto poor = [&](InstanceId x) {
    return wilson_interval(successes[x], attempts[x], confidence_drop).upper <
           class_interval(matrix.labels[x], confidence_drop).lower;
  };

  for (InstanceId t : order) {
    ++processed;
    ++class_seen[matrix.labels[t]];
    if (s.empty()) {
      s.push_back(t);
      continue;
    }
    model.similarities(matrix.rows[t], sims);
    InstanceId a_max = kNone;
    for (InstanceId x : s) {
      if (!acceptable(x)) continue;
      if (a_max == kNone || sims[x] > sims[a_max] || (sims[x] == sims[a_max] && x < a_max)) {
        a_max = x;
      }
    }
    if (a_max == kNone) a_max = s[rng.below(s.size())];
    const bool misclassified = matrix.labels[a_max] != matrix.labels[t];
    const double radius = sims[a_max];
    std::vector<InstanceId> next;
    next.reserve(s.size() + 1);
    for (InstanceId x : s) {
      if (sims[x] >= radius) {
        ++attempts[x];
        if (matrix.labels[x] == matrix.labels[t]) ++successes[x];
        if (poor(x)) continue;
      }
      next.push_back(x);
    }
    if (misclassified) next.push_back(t);
    s = std::move(next);
  }
  std::vector<InstanceId> retained;
  for (InstanceId x : s) {
    if (!poor(x)) retained.push_back(x);
  }
  return finish(matrix, "ib3",
                {{"accept", format_double(confidence_accept)},
                 {"drop", format_double(confidence_drop)},
                 {"seed", std::to_string(seed)}},
                std::move(retained), clock);
}

SelectionResult identity_select(const CorpusMatrix& matrix) {
  Stopwatch clock;
  auto result = make_selection("identity", {}, matrix.size(), all_ids(matrix.size()));
  result.time_seconds = clock.seconds();
  return result;
}

}  // namespace prunekit
