#include "prunekit/report_json.hpp"

#include <fstream>

#include "prunekit/common.hpp"

namespace prunekit {

namespace {

Json trace_json(const std::vector<BetaTrial>& trace) {
  Json out = Json::array();
  for (const auto& t : trace) {
    out.push_back({{"rate", t.rate},
                   {"mean_effectiveness", t.mean_effectiveness},
                   {"baseline_mean", t.baseline_mean},
                   {"p_value", t.p_value},
                   {"verdict", t.verdict}});
  }
  return out;
}

bool is_timing_key(const std::string& key) {
  constexpr std::string_view suffix = "_seconds";
  return key == "speedup" ||
         (key.size() >= suffix.size() && key.compare(key.size() - suffix.size(), suffix.size(),
                                                     suffix) == 0);
}

}  // namespace

const char* version() { return PRUNEKIT_VERSION; }

Json to_json(const SelectionPlan& plan) {
  return {{"beta", plan.beta},
          {"planned_removals", plan.planned_removals},
          {"trace", trace_json(plan.trace)},
          {"weights", plan.weights}};
}

Json to_json(const SelectionResult& result) {
  Json out{{"method", result.method},
           {"params", result.params},
           {"n", result.retained.size() + result.removed.size()},
           {"reduction", result.reduction()},
           {"retained", result.retained},
           {"removed", result.removed},
           {"notes", result.notes},
           {"time_seconds", result.time_seconds}};
  if (result.plan) out["plan"] = to_json(*result.plan);
  if (result.breakdown) {
    const auto& b = *result.breakdown;
    out["breakdown"] = {{"removed_as_noise", b.removed_as_noise},
                        {"removed_as_redundant", b.removed_as_redundant},
                        {"beta_noise", b.beta_noise},
                        {"beta_redundancy", b.beta_redundancy},
                        {"noise_plan", to_json(b.noise_plan)},
                        {"redundancy_plan", to_json(b.redundancy_plan)}};
  }
  return out;
}

Json to_json(const EvalReport& report) {
  Json methods = Json::array();
  for (const auto& m : report.methods) {
    Json folds = Json::array();
    for (const auto& f : m.folds) {
      folds.push_back({{"fold", f.fold},
                       {"train_size", f.train_size},
                       {"retained", f.retained},
                       {"macro_f1_without", f.f1_without},
                       {"macro_f1_with", f.f1_with},
                       {"selection_seconds", f.selection_seconds},
                       {"t_without_seconds", f.t_without_seconds},
                       {"t_with_seconds", f.t_with_seconds}});
    }
    methods.push_back({{"method", m.method},
                       {"params", m.params},
                       {"reduction_mean", m.reduction_mean},
                       {"t_without_seconds", m.t_without_seconds},
                       {"t_with_seconds", m.t_with_seconds},
                       {"speedup", m.speedup},
                       {"t", m.ttest.t},
                       {"p_value", m.ttest.p},
                       {"mean_difference", m.ttest.mean_difference},
                       {"unadjusted_verdict", to_string(m.ttest.verdict)},
                       {"bonferroni_reject", m.bonferroni_reject},
                       {"verdict", to_string(m.verdict)},
                       {"folds", folds}});
  }
  return {{"n_documents", report.n_documents},
          {"folds", report.folds},
          {"end_model", to_string(report.end_model)},
          {"level", report.level},
          {"bonferroni_m", report.bonferroni_m},
          {"leakage_audit_passed", report.leakage_audit_passed},
          {"methods", methods}};
}

Json to_json(const NoiseSimReport& report) {
  Json runs = Json::array();
  for (const auto& run : report.runs) {
    Json rows = Json::array();
    for (const auto& r : run.rows) {
      rows.push_back({{"method", r.method},
                      {"removed", r.removal.removed},
                      {"removed_noise", r.removal.removed_noise},
                      {"removed_clean", r.removal.removed_clean},
                      {"recall", r.removal.recall},
                      {"clean_removal_rate", r.removal.clean_removal_rate},
                      {"reduction", r.reduction},
                      {"matched_recall", r.matched_recall},
                      {"removed_as_noise", r.removed_as_noise},
                      {"time_seconds", r.time_seconds}});
    }
    runs.push_back({{"rate", run.rate},
                    {"injected_count", run.injected.size()},
                    {"injected", run.injected},
                    {"reference_removals", run.reference_removals},
                    {"rows", rows}});
  }
  return {{"n_documents", report.n_documents},
          {"reference_method", report.reference_method},
          {"runs", runs}};
}

Json to_json(const CorpusStats& stats) {
  return {{"size", stats.size},
          {"dimensionality", stats.dimensionality},
          {"classes", stats.n_classes},
          {"density", stats.density},
          {"imbalance_ratio", stats.imbalance_ratio},
          {"skewness", stats.skewness},
          {"empty_rows", stats.empty_rows}};
}

Json provenance(const std::string& command, std::uint64_t seed, const Json& config) {
  return {{"tool", "prunekit"},
          {"version", version()},
          {"command", command},
          {"seed", seed},
          {"workers", workers()},
          {"config", config}};
}

void write_eval_csv(const EvalReport& report, std::ostream& out) {
  out << "method,fold,train_size,retained,macro_f1_without,macro_f1_with,selection_seconds,"
         "t_without_seconds,t_with_seconds\n";
  out.precision(17);
  for (const auto& m : report.methods) {
    for (const auto& f : m.folds) {
      out << m.method << ',' << f.fold << ',' << f.train_size << ',' << f.retained << ','
          << f.f1_without << ',' << f.f1_with << ',' << f.selection_seconds << ','
          << f.t_without_seconds << ',' << f.t_with_seconds << '\n';
    }
  }
}

void write_json_file(const std::filesystem::path& path, const Json& value) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << value.dump(2) << '\n';
  if (!out) throw Error("failed writing " + path.string());
}

Json strip_timing(const Json& value) {
  if (value.is_object()) {
    Json out = Json::object();
    for (const auto& [key, v] : value.items()) {
      if (!is_timing_key(key)) out[key] = strip_timing(v);
    }
    return out;
  }
  if (value.is_array()) {
    Json out = Json::array();
    for (const auto& v : value) out.push_back(strip_timing(v));
    return out;
  }
  return value;
}

}  // namespace prunekit
