#include "nocsim/allocators.hpp"

#include <string>

#include "nocsim/errors.hpp"

namespace nocsim {

VaState::VaState(int num_rows) : num_rows_(num_rows) {
  stage1_.reserve(kPortCount * kPortCount);
  for (int i = 0; i < kPortCount * kPortCount; ++i) {
    stage1_.emplace_back(num_rows);
  }
  stage2_.reserve(kPortCount);
  for (int i = 0; i < kPortCount; ++i) stage2_.emplace_back(kPortCount);
}

RoundRobinArbiter& VaState::stage1(int in_port, int out_port) {
  return stage1_[in_port * kPortCount + out_port];
}

const RoundRobinArbiter& VaState::stage1(int in_port, int out_port) const {
  return stage1_[in_port * kPortCount + out_port];
}

RoundRobinArbiter& VaState::stage2(int out_port) { return stage2_[out_port]; }

const RoundRobinArbiter& VaState::stage2(int out_port) const {
  return stage2_[out_port];
}

void VaState::reset() {
  for (auto& a : stage1_) a.reset();
  for (auto& a : stage2_) a.reset();
}

SaState::SaState(int num_rows) : num_rows_(num_rows) {
  stage1_.reserve(kPortCount);
  for (int i = 0; i < kPortCount; ++i) stage1_.emplace_back(num_rows);
  stage2_.reserve(kPortCount);
  for (int i = 0; i < kPortCount; ++i) stage2_.emplace_back(kPortCount);
}

RoundRobinArbiter& SaState::stage1(int in_port) { return stage1_[in_port]; }

const RoundRobinArbiter& SaState::stage1(int in_port) const {
  return stage1_[in_port];
}

RoundRobinArbiter& SaState::stage2(int out_port) { return stage2_[out_port]; }

const RoundRobinArbiter& SaState::stage2(int out_port) const {
  return stage2_[out_port];
}

void SaState::reset() {
  for (auto& a : stage1_) a.reset();
  for (auto& a : stage2_) a.reset();
}

CreditBank::CreditBank(bool per_vc_mode, int lanes, int per_lane)
    : per_vc_mode_(per_vc_mode), lanes_(lanes), capacity_per_port_(lanes * per_lane) {
  for (auto& v : counters_) v.assign(lanes, per_lane);
}

CreditBank CreditBank::pooled(int per_port) {
  return CreditBank(false, 1, per_port);
}

CreditBank CreditBank::per_vc(int vcs, int depth) {
  return CreditBank(true, vcs, depth);
}

int CreditBank::available(int out_port, int vc) const {
  if (out_port < 0 || out_port >= kPortCount) {
    throw ProtocolViolation("credit bank: port out of range");
  }
  int lane = per_vc_mode_ ? vc : 0;
  if (lane < 0 || lane >= lanes_) {
    throw ProtocolViolation("credit bank: vc lane out of range");
  }
  return counters_[out_port][lane];
}

int CreditBank::total(int out_port) const {
  int t = 0;
  for (int v : counters_[out_port]) t += v;
  return t;
}

void CreditBank::consume(int out_port, int vc) {
  if (available(out_port, vc) <= 0) {
    throw ProtocolViolation("credit bank: consuming with zero credits on port " +
                            std::to_string(out_port));
  }
  counters_[out_port][per_vc_mode_ ? vc : 0] -= 1;
}

void CreditBank::release(int out_port, int vc) {
  int lane = per_vc_mode_ ? vc : 0;
  if (out_port < 0 || out_port >= kPortCount || lane < 0 || lane >= lanes_) {
    throw ProtocolViolation("credit bank: release out of range");
  }
  int cap = capacity_per_port_ / lanes_;
  if (counters_[out_port][lane] >= cap) {
    throw ProtocolViolation("credit bank: credit released above capacity");
  }
  counters_[out_port][lane] += 1;
}

std::vector<VaGrant> va_cycle(VaState& va, const std::vector<VaRequest>& requests,
                              std::vector<VcAvailabilityTracer>& tracers,
                              ControlEventCounts* counts, ControlLayout layout) {
  // Stage 1: per (input, output) pair, elect one row. Requests whose output
  // has no free downstream VC wait silently.
  std::uint64_t masks[kPortCount][kPortCount] = {};
  for (const VaRequest& r : requests) {
    if (r.in_port < 0 || r.in_port >= kPortCount || r.out_port < 0 ||
        r.out_port >= kPortCount || r.row < 0 || r.row >= va.stage1_width()) {
      throw ProtocolViolation("va: request indices out of range");
    }
    if (tracers[r.out_port].free_count() == 0) continue;
    masks[r.in_port][r.out_port] |= 1ull << r.row;
  }

  struct Candidate {
    bool present = false;
    int row = -1;
  };
  Candidate cand[kPortCount][kPortCount];
  for (int i = 0; i < kPortCount; ++i) {
    for (int o = 0; o < kPortCount; ++o) {
      if (masks[i][o] == 0) continue;
      if (auto g = va.stage1(i, o).peek(masks[i][o])) {
        cand[i][o] = Candidate{true, *g};
      }
    }
  }

  // Stage 2: per output, elect one input. Only then does the winning
  // stage-1 arbiter rotate; losers keep their candidate for the retry.
  std::vector<VaGrant> grants;
  for (int o = 0; o < kPortCount; ++o) {
    std::uint32_t in_mask = 0;
    for (int i = 0; i < kPortCount; ++i) {
      if (cand[i][o].present) in_mask |= 1u << i;
    }
    if (in_mask == 0) continue;
    auto win = va.stage2(o).arbitrate(in_mask);
    int i = *win;
    va.stage1(i, o).commit(cand[i][o].row);
    auto vc = tracers[o].consume();
    if (!vc) {
      throw ProtocolViolation("va: granted an output with no free token");
    }
    grants.push_back(VaGrant{i, cand[i][o].row, o, *vc});
    if (counts) {
      // Grant bookkeeping: the row turns granted in the table, the output's
      // availability tracer drops by one, and the token dispenser advances.
      record_event(*counts, EventKind::TableWrite, layout, true);
      record_event(*counts, EventKind::TracerUpdate, layout, true);
      record_event(*counts, EventKind::DispenserUpdate, layout, true);
    }
  }
  return grants;
}

std::vector<SaGrant> sa_cycle(SaState& sa, const std::vector<SaRequest>& requests,
                              CreditBank& credits, ControlEventCounts* counts,
                              ControlLayout layout) {
  // Stage 1: per input port, elect one row among those with a buffered head
  // flit and a downstream credit.
  std::uint64_t masks[kPortCount] = {};
  const SaRequest* by_row[kPortCount][64] = {};
  for (const SaRequest& r : requests) {
    if (r.in_port < 0 || r.in_port >= kPortCount || r.out_port < 0 ||
        r.out_port >= kPortCount || r.row < 0 || r.row >= sa.stage1_width()) {
      throw ProtocolViolation("sa: request indices out of range");
    }
    if (by_row[r.in_port][r.row] != nullptr) {
      throw ProtocolViolation("sa: duplicate request for one row");
    }
    if (credits.available(r.out_port, r.downstream_vc) <= 0) continue;
    masks[r.in_port] |= 1ull << r.row;
    by_row[r.in_port][r.row] = &r;
  }

  const SaRequest* cand[kPortCount] = {};
  for (int i = 0; i < kPortCount; ++i) {
    if (masks[i] == 0) continue;
    if (auto g = sa.stage1(i).peek(masks[i])) {
      cand[i] = by_row[i][*g];
    }
  }

  // Stage 2: per output, elect one input; the pair forms a matching with at
  // most one transfer per input and per output.
  std::vector<SaGrant> grants;
  for (int o = 0; o < kPortCount; ++o) {
    std::uint32_t in_mask = 0;
    for (int i = 0; i < kPortCount; ++i) {
      if (cand[i] && cand[i]->out_port == o) in_mask |= 1u << i;
    }
    if (in_mask == 0) continue;
    auto win = sa.stage2(o).arbitrate(in_mask);
    int i = *win;
    const SaRequest& r = *cand[i];
    sa.stage1(i).commit(r.row);
    credits.consume(r.out_port, r.downstream_vc);
    grants.push_back(SaGrant{r.in_port, r.row, r.out_port, r.downstream_vc, r.slot});
    if (counts) {
      // Reading the departing pointer, advancing it, and the credit counter.
      record_event(*counts, EventKind::TableRead, layout, true);
      record_event(*counts, EventKind::TableWrite, layout, true);
      record_event(*counts, EventKind::RegisterWrite, layout, false);
    }
  }
  return grants;
}

}  // namespace nocsim
