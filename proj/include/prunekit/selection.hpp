#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prunekit/sparse.hpp"

namespace prunekit {

/// Effective parameters of a selection run, rendered as strings.
using ParamMap = std::map<std::string, std::string>;

/// One tested reduction rate of a beta scan.
struct BetaTrial {
  double rate = 0.0;
  double mean_effectiveness = 0.0;  // mean MacroF1 of the reduced sets
  double baseline_mean = 0.0;       // mean MacroF1 without reduction
  double p_value = 1.0;
  std::string verdict;              // "not-worse" | "worse" | "infeasible"
};

struct BetaEstimate {
  double beta = 0.0;
  std::vector<BetaTrial> trace;
};

/// Removal-weight distribution plus the reduction rate applied to it.
struct SelectionPlan {
  std::vector<double> weights;  // indexed by row id; zero means never removed
  double beta = 0.0;
  std::vector<BetaTrial> trace;
  std::size_t planned_removals = 0;
};

struct BiOSelectionBreakdown {
  std::vector<InstanceId> removed_as_noise;
  std::vector<InstanceId> removed_as_redundant;
  double beta_noise = 0.0;
  double beta_redundancy = 0.0;
  SelectionPlan noise_plan;
  SelectionPlan redundancy_plan;
};

struct SelectionResult {
  std::string method;
  ParamMap params;
  std::vector<InstanceId> retained;  // ascending
  std::vector<InstanceId> removed;   // ascending
  double time_seconds = 0.0;
  std::vector<std::string> notes;
  std::optional<SelectionPlan> plan;
  std::optional<BiOSelectionBreakdown> breakdown;

  double reduction() const;
};

/// Builds a result over rows 0..n-1 from the retained set (any order).
SelectionResult make_selection(std::string method, ParamMap params, std::size_t n,
                               std::vector<InstanceId> retained);

/// Re-adds one representative for every class that has members in `scope`
/// but none in `retained`. The representative is the member with the
/// largest summed similarity to its class mates in scope (ties to the
/// lower id). `retained` stays sorted. Returns the re-added ids.
std::vector<InstanceId> ensure_class_coverage(const CorpusMatrix& matrix,
                                              std::span<const InstanceId> scope,
                                              std::vector<InstanceId>& retained);

/// Sorted set difference scope \ removed (both sorted).
std::vector<InstanceId> complement(std::span<const InstanceId> scope,
                                   std::span<const InstanceId> removed);

/// Throws unless retained/removed partition 0..n-1 and every class present
/// in the matrix keeps at least one instance.
void check_selection(const CorpusMatrix& matrix, const SelectionResult& result);

}  // namespace prunekit
