#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "prunekit/benchmark.hpp"
#include "prunekit/corpus.hpp"
#include "prunekit/selection.hpp"

namespace prunekit {

using Json = nlohmann::ordered_json;

Json to_json(const SelectionPlan& plan);
Json to_json(const SelectionResult& result);
Json to_json(const EvalReport& report);
Json to_json(const NoiseSimReport& report);
Json to_json(const CorpusStats& stats);

/// {"tool", "version", "command", "seed", "workers", "config"}.
Json provenance(const std::string& command, std::uint64_t seed, const Json& config);

/// One row per method x fold.
void write_eval_csv(const EvalReport& report, std::ostream& out);

/// Pretty-printed with a trailing newline.
void write_json_file(const std::filesystem::path& path, const Json& value);

/// Copy without wall-clock fields (keys ending in "_seconds" and "speedup"),
/// for comparing runs.
Json strip_timing(const Json& value);

const char* version();

}  // namespace prunekit
