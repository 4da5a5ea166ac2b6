#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prunekit/selection.hpp"
#include "prunekit/sparse.hpp"

namespace prunekit {

/// Bad command-line style input: unknown method, unknown or malformed
/// parameter. Front ends map it to a usage error.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct MethodInfo {
  std::string name;
  std::string summary;
  ParamMap defaults;
  bool seeded = false;
};

const std::vector<MethodInfo>& method_registry();
std::vector<std::string> method_names();
const MethodInfo& find_method(const std::string& name);

/// Runs a registered method with `overrides` applied over its defaults.
/// Throws UsageError for an unknown method, an unknown parameter key or a
/// value that does not parse.
SelectionResult run_method(const CorpusMatrix& matrix, const std::string& name,
                           const ParamMap& overrides, std::uint64_t seed);

/// "a=1" -> {"a", "1"}; throws UsageError without '='.
std::pair<std::string, std::string> parse_param(const std::string& text);

}  // namespace prunekit
