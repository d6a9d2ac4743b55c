#pragma once

#include <cstdint>
#include <string>

namespace nocsim {

using Cycle = std::int64_t;
using PacketId = std::uint64_t;

// Router port indices. North is toward smaller y, East toward larger x;
// Local is the injection/ejection attachment of the node.
enum Port : int {
  kNorth = 0,
  kEast = 1,
  kSouth = 2,
  kWest = 3,
  kLocal = 4,
};

inline constexpr int kPortCount = 5;

constexpr Port opposite(Port p) {
  switch (p) {
    case kNorth:
      return kSouth;
    case kEast:
      return kWest;
    case kSouth:
      return kNorth;
    case kWest:
      return kEast;
    default:
      return kLocal;
  }
}

const char* port_name(int p);

struct Coord {
  int x = 0;
  int y = 0;

  bool operator==(const Coord&) const = default;
};

std::string to_string(const Coord& c);

}  // namespace nocsim
