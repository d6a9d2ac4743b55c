#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nocsim/flit.hpp"

namespace nocsim {

enum class TrafficPatternKind { UniformRandom, Transpose, BitComplement, Hotspot };

struct TrafficPattern {
  TrafficPatternKind kind = TrafficPatternKind::UniformRandom;
  Coord hotspot{0, 0};
  double fraction = 0.0;

  bool operator==(const TrafficPattern&) const = default;
};

// Counter-based draw stream for one (seed, node, cycle) key: draw i is the
// splitmix64 finalizer applied to key + i * golden ratio. Every node and
// cycle gets an independent stream, and streams are a pure function of the
// key, so adding nodes or extending a run never perturbs existing draws.
class CycleRng {
 public:
  CycleRng(std::uint64_t seed, Coord node, Cycle cycle);

  std::uint64_t next_u64();
  double next_unit();        // uniform in [0, 1)
  int next_below(int k);     // uniform in [0, k)

 private:
  std::uint64_t base_;
  std::uint64_t draw_ = 0;
};

// Destination for a packet injected at src. Never returns src: uniform
// sampling excludes it, the transpose diagonal and a source equal to its own
// image fall back to uniform, and the hotspot node itself sends uniform
// traffic.
Coord dest_for(const TrafficPattern& pattern, Coord src, int width, int height,
               CycleRng& rng);

// Bernoulli packet source shared by all nodes of a mesh: each node and
// cycle flips rate / packet_len with its own stream.
class Injector {
 public:
  Injector(TrafficPattern pattern, double rate, int packet_len, int flit_bits,
           std::uint64_t seed, int width, int height);

  std::optional<Packet> maybe_inject(Coord node, Cycle cycle);

  double rate() const { return rate_; }
  int packet_len() const { return packet_len_; }

 private:
  TrafficPattern pattern_;
  double rate_;
  int packet_len_;
  int flit_bits_;
  std::uint64_t seed_;
  int width_;
  int height_;
  std::vector<std::uint32_t> packet_counters_;  // per node
};

}  // namespace nocsim
