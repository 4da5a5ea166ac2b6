#include "prunekit/registry.hpp"

#include <charconv>

#include "prunekit/bio_is.hpp"
#include "prunekit/classic.hpp"
#include "prunekit/e2sc.hpp"

namespace prunekit {

namespace {

class Params {
 public:
  Params(const MethodInfo& info, const ParamMap& overrides) : map_(info.defaults), name_(info.name) {
    for (const auto& [key, value] : overrides) {
      if (!map_.count(key)) throw UsageError(name_ + ": unknown parameter '" + key + "'");
      map_[key] = value;
    }
  }

  double real(const std::string& key) const {
    const auto& text = map_.at(key);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size()) bad(key);
    return v;
  }

  std::size_t count(const std::string& key) const {
    const auto& text = map_.at(key);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) bad(key);
    return v;
  }

  const std::string& text(const std::string& key) const { return map_.at(key); }

 private:
  [[noreturn]] void bad(const std::string& key) const {
    throw UsageError(name_ + ": cannot parse parameter " + key + "='" + map_.at(key) + "'");
  }

  ParamMap map_;
  std::string name_;
};

BiOConfig bio_config(const Params& p, std::uint64_t seed) {
  BiOConfig c;
  c.weak.l2_strength = p.real("l2");
  c.weak.max_iters = p.count("max_iters");
  c.weak.tol = p.real("tol");
  c.cv_folds = p.count("cv_folds");
  c.noise_scan.step = p.real("noise_step");
  c.noise_scan.max = p.real("noise_max");
  c.redundancy_scan.step = p.real("redundancy_step");
  c.redundancy_scan.max = p.real("redundancy_max");
  for (auto* scan : {&c.noise_scan, &c.redundancy_scan}) {
    scan->repetitions = p.count("repetitions");
    scan->level = p.real("level");
    scan->validation_fraction = p.real("validation_fraction");
  }
  const auto& order = p.text("order");
  if (order == "noise-first") {
    c.order = ArmOrder::noise_first;
  } else if (order == "redundancy-first") {
    c.order = ArmOrder::redundancy_first;
  } else {
    throw UsageError("bio-is: order must be noise-first or redundancy-first");
  }
  c.seed = seed;
  return c;
}

}  // namespace

const std::vector<MethodInfo>& method_registry() {
  static const std::vector<MethodInfo> registry = {
      {"bio-is", "noise arm (LR entropy) then redundancy arm (LR confidence)", to_params(BiOConfig{}), true},
      {"cnn", "condensed nearest neighbor", {}, true},
      {"drop3", "decremental reduction with ENN prefilter", {{"k", "3"}}, false},
      {"e2sc", "k-NN confidence weights with a beta scan",
to_params(E2SCConfig{}), true},
      {"egdis", "boundary and local density peaks", {{"k", "10"}}, false},
      {"enn", "edited nearest neighbor", {{"k", "3"}}, false},
      {"ib3", "instance-based learning with acceptance records",
       {{"accept", "0.9"}, {"drop", "0.7"}}, true},
      {"identity", "keeps every instance", {}, false},
      {"lsbo", "local-set border selector", {}, false},
      {"lssm", "local-set smoother", {}, false},
      {"noise-arm", "noise arm of bio-is alone", to_params(BiOConfig{}), true},
  };
  return registry;
}

std::vector<std::string> method_names() {
  std::vector<std::string> out;
  for (const auto& m : method_registry()) out.push_back(m.name);
  return out;
}

const MethodInfo& find_method(const std::string& name) {
  for (const auto& m : method_registry()) {
    if (m.name == name) return m;
  }
  std::string known;
  for (const auto& m : method_registry()) known += (known.empty() ? "" : ", ") + m.name;
  throw UsageError("unknown method '" + name + "' (known: " + known + ")");
}

SelectionResult run_method(const CorpusMatrix& matrix, const std::string& name,
                           const ParamMap& overrides, std::uint64_t seed) {
  const auto& info = find_method(name);
  const Params p(info, overrides);
  if (name == "identity") return identity_select(matrix);
  if (name == "enn") return enn_select(matrix, p.count("k"));
  if (name == "cnn") return cnn_select(matrix, seed);
  if (name == "drop3") return drop3_select(matrix, p.count("k"));
  if (name == "lssm") return lssm_select(matrix);
  if (name == "lsbo") return lsbo_select(matrix);
  if (name == "egdis") return egdis_select(matrix, p.count("k"));
  if (name == "ib3") return ib3_select(matrix, p.real("accept"), p.real("drop"), seed);
  if (name == "e2sc") {
    E2SCConfig c;
    c.k = p.count("k");
    c.scan.step = p.real("step");
    c.scan.max = p.real("max");
    c.scan.repetitions = p.count("repetitions");
    c.scan.level = p.real("level");
    c.scan.validation_fraction = p.real("validation_fraction");
    c.scan.seed = seed;
    return e2sc_select(matrix, c);
  }
  if (name == "bio-is") return bio_is_select(matrix, bio_config(p, seed));
  if (name == "noise-arm") return noise_arm_only(matrix, bio_config(p, seed));
  throw UsageError("method '" + name + "' is registered but has no runner");
}

std::pair<std::string, std::string> parse_param(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw UsageError("parameter '" + text + "' is not of the form key=value");
  }
  return {text.substr(0, eq), text.substr(eq + 1)};
}

}  // namespace prunekit
