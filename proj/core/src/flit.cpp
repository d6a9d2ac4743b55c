#include "nocsim/flit.hpp"

#include <cassert>

#include "nocsim/errors.hpp"

namespace nocsim {

FlitType decode_type(std::uint8_t bits) {
  assert(bits <= 3 && "flit type field is two bits");
  return static_cast<FlitType>(bits);
}

const char* flit_type_name(FlitType t) {
  switch (t) {
    case FlitType::Empty:
      return "Empty";
    case FlitType::Header:
      return "Header";
    case FlitType::Body:
      return "Body";
    case FlitType::Tail:
      return "Tail";
  }
  return "?";
}

bool flit_width_valid(int bits) {
  return bits == 16 || bits == 32 || bits == 64 || bits == 128;
}

Packet make_packet(PacketId id, Coord src, Coord dest, int len,
                   Cycle inject_cycle, int width_bits) {
  if (len < 2) {
    throw ConfigError("packet_len: a packet needs distinct header and tail flits (len >= 2), got " +
                      std::to_string(len));
  }
  if (src == dest) {
    throw ConfigError("packet: source and destination must differ, both are " +
                      to_string(src));
  }
  if (!flit_width_valid(width_bits)) {
    throw ConfigError("flit_bits: must be one of 16, 32, 64, 128, got " +
                      std::to_string(width_bits));
  }

  Packet p;
  p.id = id;
  p.src = src;
  p.dest = dest;
  p.len = len;
  p.flits.reserve(len);
  for (int i = 0; i < len; ++i) {
    Flit f;
    f.type = i == 0 ? FlitType::Header
                    : (i == len - 1 ? FlitType::Tail : FlitType::Body);
    f.packet_id = id;
    f.seq = static_cast<std::uint32_t>(i);
    f.src = src;
    f.dest = dest;
    f.inject_cycle = inject_cycle;
    f.width_bits = static_cast<std::uint16_t>(width_bits);
    p.flits.push_back(f);
  }
  return p;
}

}  // namespace nocsim
