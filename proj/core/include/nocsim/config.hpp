#pragma once

#include <optional>
#include <string>

#include "nocsim/metrics.hpp"
#include "nocsim/router.hpp"
#include "nocsim/traffic.hpp"

namespace nocsim {

struct TrafficConfig {
  TrafficPattern pattern;
  double rate = 0.1;   // offered load, flits per node per cycle, in (0, 1]
  int packet_len = 4;
};

struct SimPhases {
  std::uint64_t seed = 1;
  Cycle warmup = 1000;
  Cycle measure = 5000;
  Cycle drain_limit = 20000;
};

struct SimConfig {
  int mesh_width = 4;
  int mesh_height = 4;
  RouterParams router;  // coords unused here
  TableStorage table_storage = TableStorage::Register;
  TrafficConfig traffic;
  SimPhases sim;
  CostWeights weights = CostWeights::for_storage(TableStorage::Register);

  // Throws ConfigError naming the key and constraint on any invalid value.
  void validate() const;

  std::string to_json_text() const;

  // Strict parse: unknown keys are errors. An empty object yields the
  // defaults (4x4 mesh, 16 slots, 128-bit flits, dynamic buffers, uniform
  // traffic at rate 0.1). Weight overrides apply on top of the storage
  // preset.
  static SimConfig from_json_text(const std::string& text);
};

// Command-line overrides applied after the config file is read.
struct ConfigOverrides {
  std::optional<double> rate;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> pattern;  // uniform|transpose|bit_complement|hotspot
  std::optional<int> hotspot_x, hotspot_y;
  std::optional<double> hotspot_fraction;
  std::optional<int> packet_len;
  std::optional<int> mesh_width, mesh_height;
  std::optional<int> num_slots;
  std::optional<int> flit_bits;
  std::optional<std::string> buffer_mode;  // dynamic|static
  std::optional<int> static_vcs, static_depth;
  std::optional<std::string> layout;         // proposed|vichar_baseline
  std::optional<std::string> table_storage;  // register|memory
  std::optional<Cycle> warmup, measure, drain_limit;
};

void apply_overrides(SimConfig& cfg, const ConfigOverrides& o);

const char* pattern_name(TrafficPatternKind k);
const char* layout_name(ControlLayout l);
const char* storage_name(TableStorage s);
const char* buffer_mode_name(BufferMode m);

}  // namespace nocsim
