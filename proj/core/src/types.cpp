#include "nocsim/types.hpp"

namespace nocsim {

const char* port_name(int p) {
  switch (p) {
    case kNorth:
      return "N";
    case kEast:
      return "E";
    case kSouth:
      return "S";
    case kWest:
      return "W";
    case kLocal:
      return "L";
    default:
      return "?";
  }
}

std::string to_string(const Coord& c) {
  return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")";
}

}  // namespace nocsim
