// prunekit command-line front end: ingest, select, benchmark, noise-sim.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "prunekit/benchmark.hpp"
#include "prunekit/corpus.hpp"
#include "prunekit/registry.hpp"
#include "prunekit/report_json.hpp"

namespace fs = std::filesystem;
using namespace prunekit;

namespace {

struct Common {
  std::string dataset;
  std::string format;
  std::string stopwords;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::size_t min_df = 2;
  std::string config;
};

CorpusFormat resolve_format(const Common& c) {
  if (!c.format.empty()) return parse_format(c.format);
  return fs::path(c.dataset).extension() == ".jsonl" ? CorpusFormat::jsonl : CorpusFormat::tsv;
}

std::uint64_t require_seed(const Common& c) {
  if (!c.seed) throw UsageError("--seed is required");
  return *c.seed;
}

std::optional<StopwordSet> stopword_override(const Common& c) {
  if (c.stopwords.empty()) return std::nullopt;
  return load_stopwords(c.stopwords);
}

const StopwordSet& pick(const std::optional<StopwordSet>& s) {
  return s ? *s : default_stopwords();
}

Json common_echo(const Common& c) {
  return {{"dataset", c.dataset},
          {"format", c.format.empty() ? std::string("auto") : c.format},
          {"stopwords", c.stopwords.empty() ? std::string("builtin") : c.stopwords},
          {"min_df", c.min_df}};
}

void prepare_out(const Common& c) {
  fs::create_directories(c.out);
}

// "k=v" for the selected method, or "method.k=v" in multi-method commands.
ParamMap single_method_params(const std::vector<std::string>& raw) {
  ParamMap out;
  for (const auto& text : raw) {
    auto [key, value] = parse_param(text);
    out[key] = value;
  }
  return out;
}

std::map<std::string, ParamMap> qualified_params(const std::vector<std::string>& raw,
                                                 const std::vector<std::string>& methods) {
  std::map<std::string, ParamMap> out;
  for (const auto& text : raw) {
    auto [key, value] = parse_param(text);
    const auto dot = key.find('.');
    if (dot == std::string::npos) {
      throw UsageError("--param '" + text + "' must be qualified as method.key=value");
    }
    const auto method = key.substr(0, dot);
    if (std::find(methods.begin(), methods.end(), method) == methods.end()) {
      throw UsageError("--param '" + text + "' names a method that is not being run");
    }
    out[method][key.substr(dot + 1)] = value;
  }
  return out;
}

std::vector<std::string> split_methods(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const auto& item : raw) {
    std::stringstream in(item);
    std::string name;
    while (std::getline(in, name, ',')) {
      if (!name.empty()) out.push_back(name);
    }
  }
  for (const auto& m : out) find_method(m);
  return out;
}

LabeledCorpus load(const Common& c) {
  if (c.dataset.empty()) throw UsageError("--dataset is required");
  if (!fs::exists(c.dataset)) throw UsageError("dataset not found: " + c.dataset);
  return load_corpus(c.dataset, resolve_format(c));
}

int cmd_ingest(const Common& c) {
  const auto corpus = load(c);
  const auto stop = stopword_override(c);
  const auto vocab = build_vocabulary(corpus, pick(stop), c.min_df);
  VectorizeReport vr;
  const auto matrix = vectorize_tfidf(corpus, vocab, &vr);
  prepare_out(c);
  {
    std::ofstream out(fs::path(c.out) / "vocabulary.json", std::ios::binary);
    write_vocabulary_json(vocab, out);
  }
  {
    std::ofstream out(fs::path(c.out) / "matrix.pkit", std::ios::binary);
    write_matrix(matrix, out);
  }
  const auto stats = corpus_stats(matrix, vr.empty_rows.size());
  Json doc{{"provenance", provenance("ingest", c.seed.value_or(0), common_echo(c))},
           {"stats", to_json(stats)}};
  doc["stats"]["class_names"] = corpus.class_names;
  write_json_file(fs::path(c.out) / "stats.json", doc);
  std::cout << "Size=" << stats.size << " Dim=" << stats.dimensionality
            << " Classes=" << stats.n_classes << " Density=" << stats.density
            << " Skewness=" << stats.skewness << '\n';
  return 0;
}

int cmd_select(const Common& c, const std::string& method, const std::vector<std::string>& raw) {
  const auto seed = require_seed(c);
  find_method(method);
  const auto params = single_method_params(raw);
  const auto corpus = load(c);
  const auto stop = stopword_override(c);
  const auto vocab = build_vocabulary(corpus, pick(stop), c.min_df);
  const auto matrix = vectorize_tfidf(corpus, vocab);
  const auto result = run_method(matrix, method, params, seed);
  check_selection(matrix, result);
  auto echo = common_echo(c);
  echo["method"] = method;
  echo["param_overrides"] = params;
  prepare_out(c);
  const auto path = fs::path(c.out) / "selection.json";
  write_json_file(path, Json{{"provenance", provenance("select", seed, echo)},
                             {"selection", to_json(result)}});
  std::cout << method << ": retained " << result.retained.size() << " of "
            << matrix.size() << " (reduction " << result.reduction() << ") -> " << path.string()
            << '\n';
  return 0;
}

int cmd_benchmark(const Common& c, const std::vector<std::string>& raw_methods,
                  const std::vector<std::string>& raw_params, std::size_t folds,
                  const std::string& end_model) {
  const auto seed = require_seed(c);
  const auto methods = split_methods(raw_methods);
  if (methods.empty()) throw UsageError("--method is required");
  BenchmarkConfig config;
  config.end_model = parse_end_model(end_model);
  config.method_params = qualified_params(raw_params, methods);
  config.seed = seed;
  config.min_df = c.min_df;
  const auto stop = stopword_override(c);
  if (stop) config.stopwords = &*stop;
  const auto corpus = load(c);
  if (folds == 0) folds = corpus.texts.size() > 100000 ? 5 : 10;
  const auto plan = stratified_kfold(corpus.labels, folds, seed);
  const auto report = run_benchmark(corpus, methods, plan, config);

  auto echo = common_echo(c);
  echo["methods"] = methods;
  echo["param_overrides"] = config.method_params;
  echo["folds"] = folds;
  echo["end_model"] = end_model;
  prepare_out(c);
  write_json_file(fs::path(c.out) / "benchmark.json",
                  Json{{"provenance", provenance("benchmark", seed, echo)},
                       {"report", to_json(report)}});
  {
    std::ofstream csv(fs::path(c.out) / "benchmark.csv", std::ios::binary);
    write_eval_csv(report, csv);
  }
  for (const auto& m : report.methods) {
    std::cout << m.method << ": R=" << m.reduction_mean << " speedup=" << m.speedup
              << " verdict=" << to_string(m.verdict) << " (p=" << m.ttest.p << ")\n";
  }
  return 0;
}

int cmd_noise_sim(const Common& c, const std::vector<std::string>& raw_methods,
                  const std::vector<std::string>& raw_params, const std::vector<double>& rates,
                  const std::string& reference) {
  const auto seed = require_seed(c);
  const auto methods = split_methods(raw_methods);
  if (methods.empty()) throw UsageError("--method is required");
  NoiseSimConfig config;
  config.rates = rates;
  config.reference_method = reference;
  config.seed = seed;
  config.min_df = c.min_df;
  config.method_params = qualified_params(raw_params, methods);
  const auto stop = stopword_override(c);
  if (stop) config.stopwords = &*stop;
  const auto corpus = load(c);
  const auto report = run_noise_sim(corpus, methods, config);

  auto echo = common_echo(c);
  echo["methods"] = methods;
  echo["param_overrides"] = config.method_params;
  echo["rates"] = rates;
  echo["reference_method"] = reference;
  prepare_out(c);
  write_json_file(fs::path(c.out) / "noise_sim.json",
                  Json{{"provenance", provenance("noise-sim", seed, echo)},
                       {"report", to_json(report)}});
  for (const auto& run : report.runs) {
    for (const auto& row : run.rows) {
      std::cout << "rate=" << run.rate << " " << row.method << ": recall="
                << row.removal.recall << " clean_rate=" << row.removal.clean_removal_rate
                << " matched_recall=" << row.matched_recall << '\n';
    }
  }
  return 0;
}

// Config file grammar: `key = value` per line, '#' starts a comment. Each
// entry becomes `--key value`, placed ahead of the real flags so that flags
// given on the command line win.
std::vector<std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  std::vector<std::string> args;
  std::string line;
  std::size_t number = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(number) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty() || key == "config") {
      throw UsageError(path + ":" + std::to_string(number) + ": invalid key");
    }
    args.push_back("--" + key);
    args.push_back(value);
  }
  return args;
}

std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    }
  }
  if (!path || args.empty()) return args;
  auto canonical = [](std::string key) {
    if (const auto eq = key.find('='); eq != std::string::npos) key.resize(eq);
    return key == "--methods" ? std::string("--method") : key;
  };
  std::set<std::string> given;
  for (const auto& a : args) {
    if (a.rfind("--", 0) == 0) given.insert(canonical(a));
  }
  // Repeatable options would otherwise merge file and flag values.
  const auto entries = read_config(*path);
  std::vector<std::string> extra;
  for (std::size_t i = 0; i + 1 < entries.size(); i += 2) {
    if (given.count(canonical(entries[i]))) continue;
    extra.push_back(entries[i]);
    extra.push_back(entries[i + 1]);
  }
  // Insert right after the subcommand name.
  args.insert(args.begin() + 1, extra.begin(), extra.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prunekit: instance selection for text classification"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Common c;
  std::string method;
  std::vector<std::string> methods, params;
  std::size_t folds = 0;
  std::string end_model = "logreg";
  std::vector<double> rates{0.05, 0.10, 0.20};
  std::string reference = "bio-is";
  std::optional<std::size_t> workers;

  auto add_common = [&](CLI::App* sub, bool needs_seed) {
    sub->add_option("--dataset", c.dataset, "Corpus file (TSV label<TAB>text, or JSONL)");
    sub->add_option("--format", c.format, "tsv or jsonl (default: by extension)")
        ->check(CLI::IsMember({"tsv", "jsonl"}));
    sub->add_option("--stopwords", c.stopwords, "Stopword file, one word per line")
        ->envname("PRUNEKIT_STOPWORDS");
    sub->add_option("--out", c.out, "Output directory");
    sub->add_option("--seed", c.seed, needs_seed ? "Random seed (required)" : "Random seed");
    sub->add_option("--workers", workers, "Worker threads (default: available parallelism)");
    sub->add_option("--min-df", c.min_df, "Minimum document frequency")->check(CLI::PositiveNumber);
    sub->add_option("--config", c.config, "key = value file; command-line flags win");
  };

  auto* ingest = app.add_subcommand("ingest", "Build vocabulary, TF-IDF matrix and stats");
  add_common(ingest, false);

  auto* select = app.add_subcommand("select", "Run one instance-selection method");
  add_common(select, true);
  select->add_option("--method", method, "Method name");
  select->add_option("--param", params, "Method parameter key=value (repeatable)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);

  auto* bench = app.add_subcommand("benchmark", "Stratified k-fold evaluation");
  add_common(bench, true);
  bench->add_option("--method,--methods", methods, "Methods, comma separated or repeated")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  bench->add_option("--param", params, "method.key=value (repeatable)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  bench->add_option("--folds", folds, "Folds (default 10, or 5 above 100k documents)");
  bench->add_option("--end-model", end_model, "knn or logreg")
      ->check(CLI::IsMember({"knn", "logreg"}));

  auto* noise = app.add_subcommand("noise-sim", "Inject label noise and measure its removal");
  add_common(noise, true);
  noise->add_option("--method,--methods", methods, "Methods, comma separated or repeated")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  noise->add_option("--param", params, "method.key=value (repeatable)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  noise->add_option("--rates", rates, "Injection rates")
      ->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  noise->add_option("--reference", reference, "Method whose removal count sets matched recall");

  try {
    auto args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    set_workers(workers.value_or(std::max(1u, std::thread::hardware_concurrency())));
    if (*ingest) return cmd_ingest(c);
    if (*select) {
      if (method.empty()) throw UsageError("--method is required");
      return cmd_select(c, method, params);
    }
    if (*bench) return cmd_benchmark(c, methods, params, folds, end_model);
    if (*noise) return cmd_noise_sim(c, methods, params, rates, reference);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
