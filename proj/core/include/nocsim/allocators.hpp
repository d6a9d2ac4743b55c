#pragma once

#include <array>
#include <vector>

#include "nocsim/arbiter.hpp"
#include "nocsim/metrics.hpp"
#include "nocsim/types.hpp"
#include "nocsim/vc_control.hpp"

namespace nocsim {

struct VaRequest {
  int in_port;
  int row;
  int out_port;
};

struct VaGrant {
  int in_port;
  int row;
  int out_port;
  int downstream_vc;  // -1 in counting mode
};

struct SaRequest {
  int in_port;
  int row;
  int out_port;
  int downstream_vc;  // credit lane in per-VC mode, -1 in pooled mode
  int slot;           // departing slot of the row
};

struct SaGrant {
  int in_port;
  int row;
  int out_port;
  int downstream_vc;
  int slot;
};

// Separable two-stage VC allocator state: one first-stage arbiter per
// (input port, output port) pair over that input's rows, then one
// second-stage arbiter per output port across the five inputs. A
// first-stage arbiter's priority advances only when its winner also wins
// stage two, so a stage-two loss costs no rotation.
class VaState {
 public:
  explicit VaState(int num_rows);

  int stage1_count() const { return kPortCount * kPortCount; }
  int stage2_count() const { return kPortCount; }
  int stage1_width() const { return num_rows_; }
  int stage2_width() const { return kPortCount; }

  RoundRobinArbiter& stage1(int in_port, int out_port);
  const RoundRobinArbiter& stage1(int in_port, int out_port) const;
  RoundRobinArbiter& stage2(int out_port);
  const RoundRobinArbiter& stage2(int out_port) const;

  void reset();

 private:
  int num_rows_;
  std::vector<RoundRobinArbiter> stage1_;
  std::vector<RoundRobinArbiter> stage2_;
};

// Separable two-stage switch allocator state: one first-stage arbiter per
// input port over its rows, then one second-stage arbiter per output port
// across the inputs. Same stage-one commit rule as VC allocation.
class SaState {
 public:
  explicit SaState(int num_rows);

  int stage1_count() const { return kPortCount; }
  int stage2_count() const { return kPortCount; }
  int stage1_width() const { return num_rows_; }
  int stage2_width() const { return kPortCount; }

  RoundRobinArbiter& stage1(int in_port);
  const RoundRobinArbiter& stage1(int in_port) const;
  RoundRobinArbiter& stage2(int out_port);
  const RoundRobinArbiter& stage2(int out_port) const;

  void reset();

 private:
  int num_rows_;
  std::vector<RoundRobinArbiter> stage1_;
  std::vector<RoundRobinArbiter> stage2_;
};

// Downstream slot credits per output port: one shared pool in dynamic
// buffer mode, one counter per (output, vc) lane in static mode.
class CreditBank {
 public:
  static CreditBank pooled(int per_port);
  static CreditBank per_vc(int vcs, int depth);

  bool is_per_vc() const { return per_vc_mode_; }
  int lanes() const { return lanes_; }
  int available(int out_port, int vc = -1) const;
  int total(int out_port) const;
  int capacity_per_port() const { return capacity_per_port_; }
  void consume(int out_port, int vc = -1);
  void release(int out_port, int vc = -1);

 private:
  CreditBank(bool per_vc_mode, int lanes, int per_lane);

  bool per_vc_mode_;
  int lanes_;
  int capacity_per_port_;
  std::array<std::vector<int>, kPortCount> counters_;
};

// One VC-allocation cycle. Requests must name Active, ungranted rows whose
// head is the header; requests for outputs with no free token wait (they are
// masked, not errors). Grants form a partial matching with at most one
// winner per output port; each grant consumes one token from the output's
// tracer. counts may be null when accounting is off.
std::vector<VaGrant> va_cycle(VaState& va, const std::vector<VaRequest>& requests,
                              std::vector<VcAvailabilityTracer>& tracers,
                              ControlEventCounts* counts, ControlLayout layout);

// One switch-allocation cycle. Requests must name Active, granted rows with
// a buffered head flit; requests whose credit lane is empty wait. Grants
// form a partial matching with at most one winner per input and per output;
// each grant consumes one downstream credit. The winning flits are read out
// and dequeued by the traversal stage in the following cycle.
std::vector<SaGrant> sa_cycle(SaState& sa, const std::vector<SaRequest>& requests,
                              CreditBank& credits, ControlEventCounts* counts,
                              ControlLayout layout);

}  // namespace nocsim
