#pragma once

#include <atomic>
#include <cstdint>

namespace lcross {

// Global work counters backing the cost-scaling reports. Counters are
// monotonic within a run; callers snapshot and difference them.
struct CostCounters {
  std::atomic<std::int64_t> grid_steps{0};      // split-operator steps
  std::atomic<std::int64_t> traj_steps{0};      // classical trajectory steps
  std::atomic<std::int64_t> gaussian_evals{0};  // coherent-state overlaps vs a grid state
  std::atomic<std::int64_t> pair_evals{0};      // coherent-state pair overlaps

  static CostCounters& global() {
    static CostCounters c;
    return c;
  }
  void reset() {
    grid_steps = 0;
    traj_steps = 0;
    gaussian_evals = 0;
    pair_evals = 0;
  }
};

}  // namespace lcross
