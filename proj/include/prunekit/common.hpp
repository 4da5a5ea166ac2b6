#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace prunekit {

using InstanceId = std::uint32_t;
using ClassId = std::uint32_t;
using FeatureId = std::uint32_t;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input that could not be parsed; carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Mixes a base seed with a salt so that independent stages draw
/// uncorrelated streams from a single user seed (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

/// Seeded generator with platform-stable draws. std::uniform_*_distribution
/// and std::shuffle are implementation-defined, so the few draws we need
/// are spelled out on top of the (fully specified) mt19937_64 stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in the open interval (0, 1).
  double uniform01() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// Global worker budget used by parallel_for. Defaults to the hardware
/// concurrency. Results never depend on it: every task writes its own slot.
void set_workers(std::size_t workers);
std::size_t workers();

/// Runs fn(i) for i in [0, n). Nested calls from inside a worker run
/// serially on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// floor(fraction * n), robust to representation error in the fraction
/// (0.29 * 100 is 28.999999999999996 in binary floating point).
std::size_t floor_fraction(double fraction, std::size_t n);

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace prunekit
