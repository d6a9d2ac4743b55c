#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "nocsim/types.hpp"

namespace nocsim {

// Control organization under measurement. Proposed keeps the VC table
// embedded in the allocator as sequential logic, so allocator table accesses
// stay module-internal. ViCharBaseline models the external combinational
// table: every allocator table access costs an extra request/result signal
// pair. The two layouts are functionally identical; only event accounting
// differs.
enum class ControlLayout { Proposed, ViCharBaseline };

// Weight preset selector: register file backed tables, or the embedded
// memory variant with cheaper table accesses.
enum class TableStorage { Register, Memory };

enum class EventKind : int {
  TableRead = 0,
  TableWrite,
  TracerUpdate,
  DispenserUpdate,
  CrossModuleSignal,
  RegisterWrite,
  BufferRead,
  BufferWrite,
};

inline constexpr int kEventKindCount = 8;

const char* event_kind_name(EventKind k);

struct ControlEventCounts {
  std::array<std::uint64_t, kEventKindCount> by_kind{};

  std::uint64_t operator[](EventKind k) const {
    return by_kind[static_cast<int>(k)];
  }
  std::uint64_t total() const;
  ControlEventCounts& operator+=(const ControlEventCounts& o);
  bool operator==(const ControlEventCounts&) const = default;
};

// Increments the counter for kind. In the ViCharBaseline layout a table
// access made from allocator context additionally logs two cross-module
// signals (request out, result back).
void record_event(ControlEventCounts& c, EventKind kind, ControlLayout layout,
                  bool allocator_context = false);

struct CostWeights {
  double table_read = 1.0;
  double table_write = 1.0;
  double tracer_update = 1.0;
  double dispenser_update = 1.0;
  double cross_module_signal = 2.0;
  double register_write = 1.0;
  double buffer_read = 4.0;
  double buffer_write = 4.0;

  double weight(EventKind k) const;
  double& weight_ref(EventKind k);

  // Memory preset halves the table-access weights relative to the register
  // file default.
  static CostWeights for_storage(TableStorage s);

  bool operator==(const CostWeights&) const = default;
};

// Weighted event count; all weights must be positive.
double energy_proxy(const ControlEventCounts& c, const CostWeights& w);

// Fraction of the proxy spent on buffer slot accesses.
double buffer_share(const ControlEventCounts& c, const CostWeights& w);

struct LatencyStats {
  std::uint64_t count = 0;
  double avg = 0.0;
  double median = 0.0;
  double p99 = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// Everything finalize() needs from a finished run.
struct RunData {
  std::vector<double> latencies;  // measured delivered packets, cycles
  std::uint64_t delivered_packets = 0;
  std::uint64_t delivered_flits_in_window = 0;
  std::uint64_t undelivered_measured = 0;
  int nodes = 0;
  Cycle measure_cycles = 0;
  double offered_rate = 0.0;
  std::vector<std::uint64_t> occupancy_hist;  // slots occupied, per port-cycle
  std::vector<std::uint64_t> active_vc_hist;  // Active rows, per port-cycle
  ControlEventCounts events;
  CostWeights weights;
  double src_queue_mean_first_half = 0.0;
  double src_queue_mean_second_half = 0.0;
  bool drain_timed_out = false;
};

struct MetricsReport {
  bool has_latency = false;  // false when no measured packet was delivered
  LatencyStats latency;
  double accepted_tput = 0.0;  // delivered flits per node per cycle
  double offered_rate = 0.0;
  std::vector<std::uint64_t> occupancy_hist;
  std::vector<std::uint64_t> active_vc_hist;
  ControlEventCounts events;
  double proxy_total = 0.0;
  double proxy_per_flit = 0.0;
  double buffer_power_share = 0.0;
  bool saturated = false;
  std::uint64_t delivered_packets = 0;
  std::uint64_t delivered_flits = 0;
  std::uint64_t undelivered_measured = 0;
  double src_queue_mean_first_half = 0.0;
  double src_queue_mean_second_half = 0.0;

  std::string to_json() const;

  // Fixed sweep CSV schema, versioned via the trailing column.
  static std::string csv_header();
  std::string csv_row(double rate) const;
};

// Aggregates a run: latency statistics over measured packets, accepted
// throughput over the measurement window, the energy proxy per delivered
// flit, and the saturation flag. Saturation is declared when the drain
// phase timed out or the mean source-queue length grew superlinearly
// across the two measurement halves.
MetricsReport finalize(const RunData& d);

}  // namespace nocsim
