#pragma once

#include <string>
#include <vector>

#include "nocsim/config.hpp"
#include "nocsim/metrics.hpp"

namespace nocsim {

struct RunResult {
  SimConfig config;
  MetricsReport report;
  // One line per delivered packet, in delivery order: "id inject deliver".
  // Functionally identical runs produce byte-identical logs.
  std::string delivery_log_text;
};

// Executes one experiment: warmup, measurement window, then a drain phase
// that runs until every measured packet is delivered or drain_limit extra
// cycles elapse (which sets the saturation flag). Injection continues
// through the drain so congestion is not artificially relieved.
RunResult run(const SimConfig& cfg);

// One run per rate, parallelizable across runs; rows are emitted in rate
// order regardless of worker count. Returns the sweep CSV.
std::string sweep_csv(const SimConfig& cfg, const std::vector<double>& rates,
                      int threads = 1);

// Matched-seed pair along one axis: control_layout, buffer_mode, or
// table_storage. Emits both variants' metrics plus a percentage-delta row;
// for control_layout the delta row also reports whether the two delivery
// logs matched byte for byte.
std::string compare_csv(const SimConfig& cfg, const std::string& axis,
                        int threads = 1);

// Worker threads from NOCSIM_THREADS (default 1). Results never depend on
// the thread count.
int env_thread_count();

}  // namespace nocsim
