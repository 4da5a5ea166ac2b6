#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "prunekit/selection.hpp"
#include "prunekit/sparse.hpp"

// Classical instance-selection baselines over cosine distance (1 - cosine)
// on L2-normalized TF-IDF rows.
//
// Conventions shared by every method here:
//  * ties in distance go to the lower instance id;
//  * two instances with zero similarity are unrelated: a zero-similarity
//    neighbor casts no vote, and an instance with no positive-similarity
//    enemy has no nearest enemy (all-zero rows therefore have no neighbors);
//  * a class never ends up empty: ensure_class_coverage re-adds one
//    representative when a method would drop a whole class.

namespace prunekit {

/// Per-instance local set: same-class instances strictly closer than the
/// nearest enemy (the instance itself excluded).
struct LocalSet {
  std::vector<InstanceId> members;
  std::optional<InstanceId> nearest_enemy;
  double enemy_distance = 1.0;  // 1 when there is no nearest enemy
};

std::vector<LocalSet> local_sets(const CorpusMatrix& matrix);

/// Wilson (1972). Removes an instance when another label has more votes
/// than its own among its k nearest neighbors. Ties keep the instance, as
/// does having no neighbor with positive similarity.
SelectionResult enn_select(const CorpusMatrix& matrix, std::size_t k = 3);

/// Keep-mask of the ENN rule; used by Drop3 as its noise filter.
std::vector<bool> enn_keep_mask(const CorpusMatrix& matrix, std::size_t k);

/// Hart (1968). S starts with one random member per class; passes over T in
/// a seeded order add every instance that 1-NN over the current S gets wrong
/// (or cannot classify) until a pass adds nothing.
SelectionResult cnn_select(const CorpusMatrix& matrix, std::uint64_t seed);

/// Wilson & Martinez (2000), DROP3: ENN filter, then instances are visited by
/// descending distance to their nearest enemy and removed when at least as
/// many associates are classified correctly without them as with them.
/// Every instance keeps its k+1 nearest neighbors in S; associates include
/// instances already removed (the DROP2 rule).
SelectionResult drop3_select(const CorpusMatrix& matrix, std::size_t k = 3);

/// Leyva et al. (2015). Keeps e iff usefulness u(e) (number of local sets
/// containing e) is at least harmfulness h(e) (number of instances whose
/// nearest enemy is e).
SelectionResult lssm_select(const CorpusMatrix& matrix);

/// Leyva et al. (2015). Visits instances by ascending local-set size and
/// keeps e iff none of its local-set members is already kept.
SelectionResult lsbo_select(const CorpusMatrix& matrix);

/// Keeps boundary instances (at least ceil(k/2) of the k neighbors carry
/// another label) and local density peaks among instances whose neighbors
/// all agree (density = summed similarity to the k neighbors).
SelectionResult egdis_select(const CorpusMatrix& matrix, std::size_t k = 10);

/// Aha et al. (1991), IB3. Single pass in seeded order with acceptance and
/// dropping decided by Wilson score intervals on each instance's
/// classification accuracy versus its class frequency.
SelectionResult ib3_select(const CorpusMatrix& matrix, double confidence_accept = 0.90,
                           double confidence_drop = 0.70, std::uint64_t seed = 0);

struct Interval {
  double lower = 0.0;
  double upper = 1.0;
};

/// Wilson score interval for `successes` out of `trials` at two-sided
/// confidence `confidence`; [0, 1] when trials is zero.
Interval wilson_interval(std::size_t successes, std::size_t trials, double confidence);

SelectionResult identity_select(const CorpusMatrix& matrix);

}  // namespace prunekit
