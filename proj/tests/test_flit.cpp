#include <cstdint>

#include "doctest.h"
#include "nocsim/errors.hpp"
#include "nocsim/flit.hpp"

using namespace nocsim;

TEST_SUITE("flit") {

TEST_CASE("type tag encodes to two bits and round-trips") {
  CHECK(encode_type(FlitType::Empty) == 0b00);
  CHECK(encode_type(FlitType::Header) == 0b01);
  CHECK(encode_type(FlitType::Body) == 0b10);
  CHECK(encode_type(FlitType::Tail) == 0b11);
  for (std::uint8_t b = 0; b <= 3; ++b) {
    CHECK(encode_type(decode_type(b)) == b);
  }
}

TEST_CASE("type names are distinct") {
  const char* names[4] = {
      flit_type_name(FlitType::Empty), flit_type_name(FlitType::Header),
      flit_type_name(FlitType::Body), flit_type_name(FlitType::Tail)};
  for (int i = 0; i < 4; ++i) {
    CHECK(names[i] != nullptr);
    for (int j = i + 1; j < 4; ++j) {
      CHECK(std::string(names[i]) != std::string(names[j]));
    }
  }
}

TEST_CASE("valid flit widths are exactly 16, 32, 64, 128") {
  for (int bits : {16, 32, 64, 128}) CHECK(flit_width_valid(bits));
  for (int bits : {0, 1, 8, 15, 17, 24, 48, 96, 127, 129, 256, -16}) {
    CHECK_FALSE(flit_width_valid(bits));
  }
}

TEST_CASE("payload width leaves room for the two-bit type field") {
  for (int bits : {16, 32, 64, 128}) {
    Flit f;
    f.width_bits = static_cast<std::uint16_t>(bits);
    CHECK(f.payload_bits() == bits - 2);
  }
}

TEST_CASE("make_packet builds header, bodies, tail in sequence order") {
  for (int len : {2, 3, 4, 8}) {
    Packet p = make_packet(42, {0, 0}, {3, 2}, len, 17, 64);
    CHECK(p.id == 42);
    CHECK(p.len == len);
    CHECK(static_cast<int>(p.flits.size()) == len);
    for (int i = 0; i < len; ++i) {
      const Flit& f = p.flits[static_cast<std::size_t>(i)];
      FlitType want = i == 0 ? FlitType::Header
                             : (i == len - 1 ? FlitType::Tail : FlitType::Body);
      CHECK(f.type == want);
      CHECK(f.packet_id == 42);
      CHECK(f.seq == static_cast<std::uint32_t>(i));
      CHECK(f.src == Coord{0, 0});
      CHECK(f.dest == Coord{3, 2});
      CHECK(f.inject_cycle == 17);
      CHECK(f.width_bits == 64);
    }
    // Exactly one header and one tail.
    int headers = 0, tails = 0;
    for (const Flit& f : p.flits) {
      headers += f.type == FlitType::Header;
      tails += f.type == FlitType::Tail;
    }
    CHECK(headers == 1);
    CHECK(tails == 1);
  }
}

TEST_CASE("make_packet rejects invalid arguments") {
  CHECK_THROWS_AS(make_packet(1, {0, 0}, {1, 0}, 1, 0), ConfigError);
  CHECK_THROWS_AS(make_packet(1, {0, 0}, {1, 0}, 0, 0), ConfigError);
  CHECK_THROWS_AS(make_packet(1, {2, 2}, {2, 2}, 4, 0), ConfigError);
  CHECK_THROWS_AS(make_packet(1, {0, 0}, {1, 0}, 4, 0, 48), ConfigError);
}

TEST_CASE("flit equality is field-wise") {
  Packet p = make_packet(7, {0, 0}, {1, 1}, 2, 3);
  Flit a = p.flits[0];
  Flit b = a;
  CHECK(a == b);
  b.seq = 9;
  CHECK_FALSE(a == b);
  b = a;
  b.payload[1] ^= 1;
  CHECK_FALSE(a == b);
}

}  // TEST_SUITE
