#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace nc {

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

/// Wilson score interval for a binomial proportion; z = 1.96 gives 95%.
Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.96);

/// Worker count from NOISY_COMMIT_THREADS, or hardware concurrency when
/// unset or unparseable. Always at least 1.
unsigned threads_from_env();

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index
/// runs exactly once; the body must only touch state owned by index i.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

} // namespace nc
