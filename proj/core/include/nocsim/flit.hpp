#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "nocsim/types.hpp"

namespace nocsim {

// Two-bit flit tag, stored in bits 0..1 of the wire format. Empty marks an
// unoccupied buffer slot; a flit traveling on a link is never Empty.
enum class FlitType : std::uint8_t {
  Empty = 0b00,
  Header = 0b01,
  Body = 0b10,
  Tail = 0b11,
};

constexpr std::uint8_t encode_type(FlitType t) {
  return static_cast<std::uint8_t>(t);
}

// Precondition: bits in 0..3.
FlitType decode_type(std::uint8_t bits);

const char* flit_type_name(FlitType t);

bool flit_width_valid(int bits);

struct Flit {
  FlitType type = FlitType::Empty;
  PacketId packet_id = 0;
  std::uint32_t seq = 0;  // position within the packet, 0-based
  Coord src;
  Coord dest;
  Cycle inject_cycle = 0;
  std::uint16_t width_bits = 128;
  std::array<std::uint64_t, 2> payload{};  // payload_bits() significant bits

  int payload_bits() const { return width_bits - 2; }

  bool operator==(const Flit&) const = default;
};

struct Packet {
  PacketId id = 0;
  Coord src;
  Coord dest;
  int len = 0;
  std::vector<Flit> flits;
};

// Builds a len-flit packet: Header, len-2 Body flits, Tail. len must be at
// least 2 (distinct header and tail) and src must differ from dest.
Packet make_packet(PacketId id, Coord src, Coord dest, int len,
                   Cycle inject_cycle, int width_bits = 128);

}  // namespace nocsim
