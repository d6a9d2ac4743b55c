#include "nocsim/traffic.hpp"

#include <string>

#include "nocsim/errors.hpp"

namespace nocsim {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

// splitmix64 output finalizer.
std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

CycleRng::CycleRng(std::uint64_t seed, Coord node, Cycle cycle) {
  std::uint64_t h = mix(seed + kGolden);
  const std::uint64_t packed_node =
      static_cast<std::uint64_t>(static_cast<std::uint32_t>(node.x)) |
      (static_cast<std::uint64_t>(static_cast<std::uint32_t>(node.y)) << 32);
  h = mix(h ^ packed_node);
  h = mix(h ^ static_cast<std::uint64_t>(cycle));
  base_ = h;
}

std::uint64_t CycleRng::next_u64() { return mix(base_ + draw_++ * kGolden); }

double CycleRng::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

int CycleRng::next_below(int k) {
  if (k <= 0) throw ConfigError("rng: next_below needs a positive range");
  const unsigned __int128 wide =
      static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned>(k);
  return static_cast<int>(wide >> 64);
}

namespace {

Coord uniform_other(Coord src, int width, int height, CycleRng& rng) {
  const int nodes = width * height;
  const int src_idx = src.y * width + src.x;
  // Sample over nodes-1 indices and skip past src, so src itself is never hit
  // and every other node keeps equal probability.
  int idx = rng.next_below(nodes - 1);
  if (idx >= src_idx) ++idx;
  return Coord{idx % width, idx / width};
}

}  // namespace

Coord dest_for(const TrafficPattern& pattern, Coord src, int width, int height,
               CycleRng& rng) {
  switch (pattern.kind) {
    case TrafficPatternKind::UniformRandom:
      return uniform_other(src, width, height, rng);
    case TrafficPatternKind::Transpose: {
      const Coord image{src.y, src.x};
      if (image == src || image.x >= width || image.y >= height) {
        return uniform_other(src, width, height, rng);
      }
      return image;
    }
    case TrafficPatternKind::BitComplement: {
      const Coord image{width - 1 - src.x, height - 1 - src.y};
      if (image == src) return uniform_other(src, width, height, rng);
      return image;
    }
    case TrafficPatternKind::Hotspot: {
      if (src == pattern.hotspot) return uniform_other(src, width, height, rng);
      if (rng.next_unit() < pattern.fraction) return pattern.hotspot;
      return uniform_other(src, width, height, rng);
    }
  }
  throw ConfigError("traffic: unknown pattern");
}

Injector::Injector(TrafficPattern pattern, double rate, int packet_len,
                   int flit_bits, std::uint64_t seed, int width, int height)
    : pattern_(pattern),
      rate_(rate),
      packet_len_(packet_len),
      flit_bits_(flit_bits),
      seed_(seed),
      width_(width),
      height_(height) {
  if (width < 1 || height < 1 || width * height < 2) {
    throw ConfigError("traffic: need at least two nodes");
  }
  if (rate < 0.0 || rate > 1.0) {
    throw ConfigError("traffic: rate must be in [0, 1] flits per node cycle");
  }
  if (packet_len < 2) {
    throw ConfigError("traffic: packets need a header and a tail");
  }
  if (!flit_width_valid(flit_bits)) {
    throw ConfigError("traffic: unsupported flit width " +
                      std::to_string(flit_bits));
  }
  if (pattern.kind == TrafficPatternKind::Hotspot) {
    if (pattern.hotspot.x < 0 || pattern.hotspot.x >= width ||
        pattern.hotspot.y < 0 || pattern.hotspot.y >= height) {
      throw ConfigError("traffic: hotspot outside the mesh");
    }
    if (pattern.fraction < 0.0 || pattern.fraction > 1.0) {
      throw ConfigError("traffic: hotspot fraction must be in [0, 1]");
    }
  }
  packet_counters_.assign(width * height, 0);
}

std::optional<Packet> Injector::maybe_inject(Coord node, Cycle cycle) {
  CycleRng rng(seed_, node, cycle);
  // rate counts flits, the coin flips packets.
  if (rng.next_unit() >= rate_ / packet_len_) return std::nullopt;
  const Coord dest = dest_for(pattern_, node, width_, height_, rng);
  const int idx = node.y * width_ + node.x;
  const std::uint32_t n = ++packet_counters_[idx];
  const PacketId id = (static_cast<PacketId>(idx + 1) << 32) | n;
  return make_packet(id, node, dest, packet_len_, cycle, flit_bits_);
}

}  // namespace nocsim
