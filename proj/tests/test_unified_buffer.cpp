#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "doctest.h"
#include "nocsim/errors.hpp"
#include "nocsim/unified_buffer.hpp"

using namespace nocsim;

namespace {

Flit body(PacketId id, std::uint32_t seq) {
  Flit f;
  f.type = FlitType::Body;
  f.packet_id = id;
  f.seq = seq;
  return f;
}

}  // namespace

TEST_SUITE("unified_buffer") {

TEST_CASE("slot count must be a power of two in 4..64") {
  for (int n : {4, 8, 16, 32, 64}) CHECK_NOTHROW(UnifiedBuffer{n});
  for (int n : {0, 1, 2, 3, 5, 6, 12, 24, 48, 128, -8}) {
    CHECK_THROWS_AS(UnifiedBuffer{n}, ConfigError);
  }
}

TEST_CASE("a fresh buffer is fully free and the tracer mirrors that") {
  UnifiedBuffer b(16);
  CHECK(b.num_slots() == 16);
  CHECK(b.free_count() == 16);
  CHECK(b.occupied_count() == 0);
  CHECK(b.tracer() == 0xFFFFu);
  for (int s = 0; s < 16; ++s) CHECK(b.slot_free(s));
}

TEST_CASE("writes take the lowest free slot") {
  UnifiedBuffer b(8);
  CHECK(b.write_flit(body(1, 0)) == 0);
  CHECK(b.write_flit(body(1, 1)) == 1);
  CHECK(b.write_flit(body(1, 2)) == 2);
  b.read_and_free(1);
  CHECK(b.write_flit(body(1, 3)) == 1);  // freed slot is lowest again
  CHECK(b.free_count() == 5);
}

TEST_CASE("allowed mask restricts slot choice") {
  UnifiedBuffer b(8);
  CHECK(b.write_flit(body(1, 0), 0b11110000u) == 4);
  CHECK(b.write_flit(body(1, 1), 0b11110000u) == 5);
  CHECK(b.write_flit(body(2, 0), 0b00000010u) == 1);
  // The mask region can fill while the rest of the buffer stays free.
  b.write_flit(body(1, 2), 0b11110000u);
  b.write_flit(body(1, 3), 0b11110000u);
  CHECK(b.free_count() == 3);
  CHECK_THROWS_AS(b.write_flit(body(1, 4), 0b11110000u), ProtocolViolation);
}

TEST_CASE("writing an empty flit or into a full buffer is a violation") {
  UnifiedBuffer b(4);
  Flit e;  // default type Empty
  CHECK_THROWS_AS(b.write_flit(e), ProtocolViolation);
  for (int i = 0; i < 4; ++i) b.write_flit(body(1, static_cast<std::uint32_t>(i)));
  CHECK(b.free_count() == 0);
  CHECK_THROWS_AS(b.write_flit(body(1, 9)), ProtocolViolation);
}

TEST_CASE("read returns the stored flit and frees the slot") {
  UnifiedBuffer b(4);
  Flit f = body(77, 3);
  f.dest = {2, 1};
  int s = b.write_flit(f);
  CHECK(b.peek(s) == f);
  CHECK_FALSE(b.slot_free(s));
  Flit got = b.read_and_free(s);
  CHECK(got == f);
  CHECK(b.slot_free(s));
  CHECK_THROWS_AS(b.read_and_free(s), ProtocolViolation);
  CHECK(b.peek(s).type == FlitType::Empty);  // freed slot content is cleared
}

TEST_CASE("slot index bounds are enforced") {
  UnifiedBuffer b(4);
  CHECK_THROWS_AS(b.read_and_free(4), ProtocolViolation);
  CHECK_THROWS_AS(b.read_and_free(-1), ProtocolViolation);
  CHECK_THROWS_AS((void)b.slot_free(4), ProtocolViolation);
}

TEST_CASE("tracer stays coherent with a naive shadow under random traffic") {
  std::mt19937_64 rng(123);
  for (int n : {4, 16, 64}) {
    UnifiedBuffer b(n);
    std::vector<std::optional<Flit>> shadow(static_cast<std::size_t>(n));
    std::uint64_t id = 1;
    for (int step = 0; step < 20000; ++step) {
      bool do_write = (rng() % 2 == 0) && b.free_count() > 0;
      if (b.occupied_count() == 0) do_write = true;
      if (do_write) {
        Flit f = body(id++, static_cast<std::uint32_t>(step));
        int slot = b.write_flit(f);
        // Lowest free slot per the shadow.
        int expect = -1;
        for (int s = 0; s < n; ++s) {
          if (!shadow[static_cast<std::size_t>(s)]) {
            expect = s;
            break;
          }
        }
        REQUIRE(slot == expect);
        shadow[static_cast<std::size_t>(slot)] = f;
      } else {
        // Pick a random occupied slot.
        int pick;
        do {
          pick = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
        } while (!shadow[static_cast<std::size_t>(pick)]);
        Flit got = b.read_and_free(pick);
        REQUIRE(got == *shadow[static_cast<std::size_t>(pick)]);
        shadow[static_cast<std::size_t>(pick)].reset();
      }
      // Tracer bit pattern must equal shadow emptiness exactly.
      std::uint64_t want = 0;
      int occupied = 0;
      for (int s = 0; s < n; ++s) {
        if (!shadow[static_cast<std::size_t>(s)]) {
          want |= std::uint64_t{1} << s;
        } else {
          ++occupied;
        }
      }
      REQUIRE(b.tracer() == want);
      REQUIRE(b.occupied_count() == occupied);
      REQUIRE(b.free_count() == n - occupied);
    }
  }
}

TEST_CASE("64-slot buffer uses the full mask width") {
  UnifiedBuffer b(64);
  CHECK(b.tracer() == ~std::uint64_t{0});
  for (int i = 0; i < 64; ++i) {
    CHECK(b.write_flit(body(1, static_cast<std::uint32_t>(i))) == i);
  }
  CHECK(b.free_count() == 0);
  CHECK(b.tracer() == 0);
  CHECK(b.read_and_free(63).seq == 63);
  CHECK(b.tracer() == (std::uint64_t{1} << 63));
}

}  // TEST_SUITE
