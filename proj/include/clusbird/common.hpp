#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>

namespace clusbird {

// Invalid arguments, malformed input files, or broken model invariants.
// The CLI maps this to exit code 2 (usage/validation failure).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Filesystem or stream failures. The CLI maps this (and any other runtime
// error) to exit code 1.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Rng = std::mt19937_64;

// Mixes a stream index into a base seed (splitmix64 finalizer) so per-start,
// per-replication, and per-cell RNG streams are independent of each other
// and of the execution schedule.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// Runs fn(0), ..., fn(n - 1). With threads > 1 the indices are dispatched to
// worker threads; callers must slot results by index so output cannot depend
// on the schedule. The first exception thrown by a task is rethrown after
// all workers join.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace clusbird
