#include <cstdint>
#include <set>
#include <vector>

#include "doctest.h"
#include "nocsim/errors.hpp"
#include "nocsim/traffic.hpp"

using namespace nocsim;

TEST_SUITE("traffic") {

TEST_CASE("draw streams are a pure function of seed, node and cycle") {
  CycleRng a(42, {1, 2}, 100);
  CycleRng b(42, {1, 2}, 100);
  for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());

  // Any key component change moves the whole stream.
  CycleRng c(42, {1, 2}, 101);
  CycleRng d(42, {2, 1}, 100);
  CycleRng e(43, {1, 2}, 100);
  CycleRng base(42, {1, 2}, 100);
  std::uint64_t first = base.next_u64();
  CHECK(c.next_u64() != first);
  CHECK(d.next_u64() != first);
  CHECK(e.next_u64() != first);
}

TEST_CASE("unit draws stay in [0, 1)") {
  CycleRng r(7, {0, 0}, 0);
  for (int i = 0; i < 10000; ++i) {
    double u = r.next_unit();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("bounded draws cover their range roughly uniformly") {
  std::vector<int> hits(5, 0);
  for (int cycle = 0; cycle < 10000; ++cycle) {
    CycleRng r(123, {3, 3}, cycle);
    int v = r.next_below(5);
    REQUIRE(v >= 0);
    REQUIRE(v < 5);
    ++hits[static_cast<std::size_t>(v)];
  }
  for (int h : hits) {
    CHECK(h > 1600);  // expected 2000 each
    CHECK(h < 2400);
  }
  CycleRng r(1, {0, 0}, 0);
  CHECK(r.next_below(1) == 0);
  CHECK_THROWS_AS(r.next_below(0), ConfigError);
}

TEST_CASE("uniform destinations exclude the source and cover the mesh") {
  std::set<std::pair<int, int>> seen;
  TrafficPattern uniform;
  for (int cycle = 0; cycle < 3000; ++cycle) {
    CycleRng r(9, {1, 1}, cycle);
    Coord d = dest_for(uniform, {1, 1}, 4, 4, r);
    REQUIRE(d.x >= 0);
    REQUIRE(d.x < 4);
    REQUIRE(d.y >= 0);
    REQUIRE(d.y < 4);
    REQUIRE_FALSE(d == Coord{1, 1});
    seen.insert({d.x, d.y});
  }
  CHECK(seen.size() == 15);  // every node except the source
}

TEST_CASE("transpose swaps coordinates and falls back off the diagonal") {
  TrafficPattern t{TrafficPatternKind::Transpose, {0, 0}, 0.0};
  CycleRng r(1, {0, 0}, 0);
  CHECK(dest_for(t, {3, 1}, 4, 4, r) == Coord{1, 3});
  CHECK(dest_for(t, {0, 2}, 4, 4, r) == Coord{2, 0});
  // Diagonal nodes have no distinct image: uniform fallback, never self.
  for (int cycle = 0; cycle < 200; ++cycle) {
    CycleRng rr(1, {2, 2}, cycle);
    Coord d = dest_for(t, {2, 2}, 4, 4, rr);
    REQUIRE_FALSE(d == Coord{2, 2});
  }
  // Non-square mesh: an image outside the mesh also falls back.
  for (int cycle = 0; cycle < 200; ++cycle) {
    CycleRng rr(1, {0, 3}, cycle);
    Coord d = dest_for(t, {0, 3}, 2, 5, rr);  // image {3, 0} is off-mesh
    REQUIRE(d.x >= 0);
    REQUIRE(d.x < 2);
    REQUIRE(d.y >= 0);
    REQUIRE(d.y < 5);
    REQUIRE_FALSE(d == Coord{0, 3});
  }
}

TEST_CASE("bit-complement mirrors both axes and handles the fixed point") {
  TrafficPattern b{TrafficPatternKind::BitComplement, {0, 0}, 0.0};
  CycleRng r(1, {0, 0}, 0);
  CHECK(dest_for(b, {0, 0}, 4, 4, r) == Coord{3, 3});
  CHECK(dest_for(b, {1, 2}, 4, 4, r) == Coord{2, 1});
  CHECK(dest_for(b, {3, 0}, 8, 4, r) == Coord{4, 3});
  // The center of an odd mesh maps to itself: uniform fallback.
  for (int cycle = 0; cycle < 200; ++cycle) {
    CycleRng rr(1, {1, 1}, cycle);
    Coord d = dest_for(b, {1, 1}, 3, 3, rr);
    REQUIRE_FALSE(d == Coord{1, 1});
  }
}

TEST_CASE("hotspot sends the configured fraction toward one node") {
  TrafficPattern h{TrafficPatternKind::Hotspot, {2, 2}, 1.0};
  for (int cycle = 0; cycle < 100; ++cycle) {
    CycleRng r(4, {0, 0}, cycle);
    CHECK(dest_for(h, {0, 0}, 4, 4, r) == Coord{2, 2});
  }
  // The hotspot node itself sends uniform traffic, never to itself.
  for (int cycle = 0; cycle < 200; ++cycle) {
    CycleRng r(4, {2, 2}, cycle);
    REQUIRE_FALSE(dest_for(h, {2, 2}, 4, 4, r) == Coord{2, 2});
  }
  // Statistical check at fraction one half.
  TrafficPattern half{TrafficPatternKind::Hotspot, {2, 2}, 0.5};
  int hits = 0;
  const int n = 4000;
  for (int cycle = 0; cycle < n; ++cycle) {
    CycleRng r(4, {0, 0}, cycle);
    if (dest_for(half, {0, 0}, 4, 4, r) == Coord{2, 2}) ++hits;
  }
  // Slightly above one half: the uniform remainder can also hit the spot.
  CHECK(hits > n / 2 - 200);
  CHECK(hits < n / 2 + 400);
}

TEST_CASE("injector validates its configuration") {
  TrafficPattern uniform;
  CHECK_THROWS_AS(Injector(uniform, 0.1, 4, 128, 1, 1, 1), ConfigError);
  CHECK_THROWS_AS(Injector(uniform, -0.1, 4, 128, 1, 4, 4), ConfigError);
  CHECK_THROWS_AS(Injector(uniform, 1.5, 4, 128, 1, 4, 4), ConfigError);
  CHECK_THROWS_AS(Injector(uniform, 0.1, 1, 128, 1, 4, 4), ConfigError);
  CHECK_THROWS_AS(Injector(uniform, 0.1, 4, 100, 1, 4, 4), ConfigError);
  TrafficPattern h{TrafficPatternKind::Hotspot, {4, 0}, 0.5};
  CHECK_THROWS_AS(Injector(h, 0.1, 4, 128, 1, 4, 4), ConfigError);
  TrafficPattern h2{TrafficPatternKind::Hotspot, {1, 1}, 1.5};
  CHECK_THROWS_AS(Injector(h2, 0.1, 4, 128, 1, 4, 4), ConfigError);
  CHECK_NOTHROW(Injector(uniform, 0.0, 2, 16, 1, 2, 1));
}

TEST_CASE("injection frequency matches rate / packet_len") {
  Injector inj(TrafficPattern{}, 0.2, 4, 128, 777, 4, 4);
  int injected = 0;
  for (int cycle = 0; cycle < 20000; ++cycle) {
    if (auto p = inj.maybe_inject({2, 1}, cycle)) {
      ++injected;
      CHECK(p->src == Coord{2, 1});
      CHECK(p->len == 4);
      CHECK(static_cast<int>(p->flits.size()) == 4);
      CHECK(p->flits[0].width_bits == 128);
    }
  }
  // Expected 20000 * 0.05 = 1000 packets; allow about four standard
  // deviations of binomial noise on either side.
  CHECK(injected > 850);
  CHECK(injected < 1150);
}

TEST_CASE("a zero rate never injects") {
  Injector inj(TrafficPattern{}, 0.0, 4, 128, 1, 4, 4);
  for (int cycle = 0; cycle < 2000; ++cycle) {
    for (int y = 0; y < 4; ++y) {
      for (int x = 0; x < 4; ++x) {
        REQUIRE_FALSE(inj.maybe_inject({x, y}, cycle).has_value());
      }
    }
  }
}

TEST_CASE("packet ids are unique across nodes and cycles") {
  Injector inj(TrafficPattern{}, 0.5, 2, 128, 3, 4, 4);
  std::set<PacketId> ids;
  int count = 0;
  for (int cycle = 0; cycle < 2000; ++cycle) {
    for (int y = 0; y < 4; ++y) {
      for (int x = 0; x < 4; ++x) {
        if (auto p = inj.maybe_inject({x, y}, cycle)) {
          CHECK(ids.insert(p->id).second);
          ++count;
        }
      }
    }
  }
  CHECK(count > 1000);
  CHECK(static_cast<int>(ids.size()) == count);
}

TEST_CASE("a node's injection decisions do not depend on the mesh size") {
  // The same node coordinate flips the same coins in a 4x4 and an 8x8
  // mesh, so growing the mesh never perturbs existing nodes' timelines.
  Injector small(TrafficPattern{}, 0.3, 4, 128, 21, 4, 4);
  Injector large(TrafficPattern{}, 0.3, 4, 128, 21, 8, 8);
  std::vector<Cycle> small_cycles, large_cycles;
  for (int cycle = 0; cycle < 5000; ++cycle) {
    if (small.maybe_inject({1, 2}, cycle)) small_cycles.push_back(cycle);
    if (large.maybe_inject({1, 2}, cycle)) large_cycles.push_back(cycle);
  }
  CHECK(small_cycles.size() > 200);
  CHECK(small_cycles == large_cycles);
}

TEST_CASE("injected destinations always stay inside the mesh") {
  for (auto kind :
       {TrafficPatternKind::UniformRandom, TrafficPatternKind::Transpose,
        TrafficPatternKind::BitComplement, TrafficPatternKind::Hotspot}) {
    TrafficPattern p{kind, {1, 1}, 0.7};
    Injector inj(p, 0.5, 2, 32, 11, 5, 3);
    for (int cycle = 0; cycle < 1000; ++cycle) {
      for (int y = 0; y < 3; ++y) {
        for (int x = 0; x < 5; ++x) {
          if (auto pk = inj.maybe_inject({x, y}, cycle)) {
            REQUIRE(pk->dest.x >= 0);
            REQUIRE(pk->dest.x < 5);
            REQUIRE(pk->dest.y >= 0);
            REQUIRE(pk->dest.y < 3);
            REQUIRE_FALSE(pk->dest == pk->src);
          }
        }
      }
    }
  }
}

}  // TEST_SUITE
