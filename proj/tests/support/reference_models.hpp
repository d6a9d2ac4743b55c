#pragma once

// Independently written reference implementations used as oracles by the
// unit and acceptance tests. They restate the arbitration and allocation
// semantics in the most literal form possible (linear scans, nested loops)
// so that agreement with the optimized production code is meaningful.

#include <cstdint>
#include <optional>
#include <vector>

#include "nocsim/allocators.hpp"
#include "nocsim/types.hpp"
#include "nocsim/vc_control.hpp"

namespace refmodel {

// Round-robin arbiter restated as a modular scan: the winner is the first
// requesting index found when scanning all positions starting just after the
// previously committed winner. A fresh arbiter behaves as if index width-1
// had just won, so index 0 has top priority initially.
class ScanArbiter {
 public:
  explicit ScanArbiter(int width) : width_(width), last_(width - 1) {}

  std::optional<int> peek(std::uint64_t request_mask) const {
    for (int i = 1; i <= width_; ++i) {
      const int idx = (last_ + i) % width_;
      if ((request_mask >> idx) & 1u) return idx;
    }
    return std::nullopt;
  }

  void commit(int idx) { last_ = idx; }

  std::optional<int> arbitrate(std::uint64_t request_mask) {
    auto g = peek(request_mask);
    if (g) commit(*g);
    return g;
  }

  int last() const { return last_; }

 private:
  int width_;
  int last_;
};

// Two-stage separable VC allocator, written as plain nested loops over a
// 5x5 grid of per-(input,output) first-stage scans plus one second-stage
// scan per output. Requests whose output has no free downstream VC token
// are dropped from the masks up front (the token counts are sampled once
// at the start of the cycle); a first-stage winner advances its arbiter's
// priority only if it also wins stage two.
class ReferenceVa {
 public:
  explicit ReferenceVa(int rows) : rows_(rows) {
    stage1_.reserve(nocsim::kPortCount * nocsim::kPortCount);
    stage2_.reserve(nocsim::kPortCount);
    for (int i = 0; i < nocsim::kPortCount; ++i)
      for (int o = 0; o < nocsim::kPortCount; ++o) stage1_.emplace_back(rows_);
    for (int o = 0; o < nocsim::kPortCount; ++o)
      stage2_.emplace_back(nocsim::kPortCount);
  }

  std::vector<nocsim::VaGrant> cycle(
      const std::vector<nocsim::VaRequest>& requests,
      std::vector<nocsim::VcAvailabilityTracer>& tracers) {
    const int P = nocsim::kPortCount;
    // Token availability is sampled before anything is consumed this cycle.
    int snapshot[nocsim::kPortCount];
    for (int o = 0; o < P; ++o) snapshot[o] = tracers[o].free_count();

    std::uint64_t masks[nocsim::kPortCount][nocsim::kPortCount] = {};
    for (const auto& r : requests) {
      if (snapshot[r.out_port] == 0) continue;  // waits, not an error
      masks[r.in_port][r.out_port] |= std::uint64_t{1} << r.row;
    }

    std::optional<int> cand[nocsim::kPortCount][nocsim::kPortCount];
    for (int i = 0; i < P; ++i)
      for (int o = 0; o < P; ++o) cand[i][o] = s1(i, o).peek(masks[i][o]);

    std::vector<nocsim::VaGrant> grants;
    for (int o = 0; o < P; ++o) {
      std::uint64_t in_mask = 0;
      for (int i = 0; i < P; ++i)
        if (cand[i][o]) in_mask |= std::uint64_t{1} << i;
      auto winner = stage2_[o].arbitrate(in_mask);
      if (!winner) continue;
      const int i = *winner;
      const int row = *cand[i][o];
      s1(i, o).commit(row);
      auto vc = tracers[o].consume();
      grants.push_back(nocsim::VaGrant{i, row, o, *vc});
    }
    return grants;
  }

 private:
  ScanArbiter& s1(int i, int o) { return stage1_[i * nocsim::kPortCount + o]; }

  int rows_;
  std::vector<ScanArbiter> stage1_;
  std::vector<ScanArbiter> stage2_;
};

// Two-stage separable switch allocator: one first-stage scan per input port
// across that input's rows (any output), one second-stage scan per output
// across the inputs whose candidate targets it. Requests whose credit lane
// is empty are dropped from the masks up front (credit counts sampled once
// at the start of the cycle); the stage-one priority advances only on a
// stage-two win.
class ReferenceSa {
 public:
  explicit ReferenceSa(int rows) : rows_(rows) {
    stage1_.reserve(nocsim::kPortCount);
    stage2_.reserve(nocsim::kPortCount);
    for (int i = 0; i < nocsim::kPortCount; ++i) stage1_.emplace_back(rows_);
    for (int o = 0; o < nocsim::kPortCount; ++o)
      stage2_.emplace_back(nocsim::kPortCount);
  }

  std::vector<nocsim::SaGrant> cycle(
      const std::vector<nocsim::SaRequest>& requests,
      nocsim::CreditBank& credits) {
    const int P = nocsim::kPortCount;
    const nocsim::SaRequest* by_row[nocsim::kPortCount][64] = {};
    std::uint64_t masks[nocsim::kPortCount] = {};
    for (const auto& r : requests) {
      by_row[r.in_port][r.row] = &r;
      // Credit counts are sampled before any grant consumes one; at most
      // one grant per output means the sample stays valid within a cycle.
      if (credits.available(r.out_port, r.downstream_vc) <= 0) continue;
      masks[r.in_port] |= std::uint64_t{1} << r.row;
    }

    const nocsim::SaRequest* cand[nocsim::kPortCount] = {};
    for (int i = 0; i < P; ++i) {
      auto row = stage1_[i].peek(masks[i]);
      if (row) cand[i] = by_row[i][*row];
    }

    std::vector<nocsim::SaGrant> grants;
    for (int o = 0; o < P; ++o) {
      std::uint64_t in_mask = 0;
      for (int i = 0; i < P; ++i)
        if (cand[i] && cand[i]->out_port == o) in_mask |= std::uint64_t{1} << i;
      auto winner = stage2_[o].arbitrate(in_mask);
      if (!winner) continue;
      const int i = *winner;
      const nocsim::SaRequest* r = cand[i];
      stage1_[i].commit(r->row);
      credits.consume(r->out_port, r->downstream_vc);
      grants.push_back(
          nocsim::SaGrant{i, r->row, r->out_port, r->downstream_vc, r->slot});
    }
    return grants;
  }

 private:
  int rows_;
  std::vector<ScanArbiter> stage1_;
  std::vector<ScanArbiter> stage2_;
};

}  // namespace refmodel
