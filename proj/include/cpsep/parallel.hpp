#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>

namespace cpsep {

/// Thread cap: LAB_THREADS env var if set, else hardware concurrency.
unsigned max_threads();

// Runs fn(index) for index in [0, count) across worker threads. Each index
// must draw randomness from its own derived stream and write only its own
// slot, so results do not depend on the thread count.
void parallel_for_indexed(std::size_t count, const std::function<void(std::size_t)>& fn);

/// Custom error for runtime infeasibility (exact mode too large, etc.);
/// the CLI maps this to exit code 3.
class infeasible_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cpsep
