#pragma once

#include <array>
#include <optional>
#include <vector>

#include "nocsim/allocators.hpp"
#include "nocsim/link.hpp"
#include "nocsim/metrics.hpp"
#include "nocsim/unified_buffer.hpp"
#include "nocsim/vc_control.hpp"

namespace nocsim {

enum class BufferMode { Dynamic, Static };

struct RouterParams {
  Coord coords;
  int num_slots = 16;
  BufferMode buffer_mode = BufferMode::Dynamic;
  int static_vcs = 4;    // static mode: VCs per port
  int static_depth = 4;  // static mode: slots per VC
  ControlLayout layout = ControlLayout::Proposed;
  int flit_bits = 128;
};

struct PortInput {
  std::optional<WireFlit> flit;
  std::optional<CreditMsg> credit;        // for this router's output side
  std::optional<VcRetiredMsg> retired;    // for this router's output side
};

struct PortOutput {
  std::optional<WireFlit> flit;           // traversal result toward neighbor
  std::optional<CreditMsg> credit;        // for this router's input side
  std::optional<VcRetiredMsg> retired;    // for this router's input side
};

// Switch transfer latched by switch allocation, executed by the traversal
// stage one cycle later.
struct ScheduledTransfer {
  int row;
  int slot;
  int out_port;
  int downstream_vc;
};

struct ArrivedFlit {
  Flit flit;
  int in_port;
};

// XY dimension-order route: correct x first (East/West), then y
// (North toward smaller y), then eject Local.
int route_compute(Coord dest, Coord here);

// Four-stage virtual-channel router pipeline over a unified buffer
// structure: buffer write + route compute, VC allocation, switch
// allocation, switch + link traversal. One cycle() call advances all
// stages by one cycle; stages are executed in reverse dependency order so
// each consumes state its producer latched the cycle before.
class Router {
 public:
  Router(const RouterParams& p, std::array<bool, kPortCount> port_enabled);

  // Runs one router cycle: applies incoming credits and vc_retired signals,
  // executes latched transfers (emitting flits, credits, and retires on
  // out), allocates the switch and VCs, and writes arriving flits into the
  // buffer. Flits written this cycle are appended to arrivals when given.
  void cycle(Cycle now, const std::array<PortInput, kPortCount>& in,
             std::array<PortOutput, kPortCount>& out,
             std::vector<ArrivedFlit>* arrivals = nullptr);

  const RouterParams& params() const { return p_; }
  Coord coords() const { return p_.coords; }
  int num_rows() const { return rows_; }
  bool port_enabled(int p) const { return enabled_[p]; }

  const UnifiedBuffer& buffer(int port) const { return ubs_[port]; }
  const VcControlTable& table(int port) const { return tables_[port]; }
  const TokenDispenser& dispenser(int port) const { return dispensers_[port]; }
  const VcAvailabilityTracer& tracer(int out_port) const { return tracers_[out_port]; }
  const CreditBank& credits() const { return credits_; }
  const std::optional<ScheduledTransfer>& pending_transfer(int in_port) const {
    return pending_[in_port];
  }
  const VaState& va() const { return va_; }
  const SaState& sa() const { return sa_; }

  int active_vc_count(int port) const { return tables_[port].active_rows(); }

  void set_recording(bool on) { recording_ = on; }
  const ControlEventCounts& counts() const { return counts_; }

 private:
  void apply_signals(const std::array<PortInput, kPortCount>& in);
  void do_traversal(Cycle now, std::array<PortOutput, kPortCount>& out);
  void do_switch_allocation();
  void do_vc_allocation();
  void do_buffer_write(Cycle now, const std::array<PortInput, kPortCount>& in,
                       std::vector<ArrivedFlit>* arrivals);
  ControlEventCounts* rec() { return recording_ ? &counts_ : nullptr; }
  void record(EventKind k, bool allocator_context = false);
  std::uint64_t partition_mask(int vc) const;

  RouterParams p_;
  int rows_;
  std::array<bool, kPortCount> enabled_;
  std::vector<UnifiedBuffer> ubs_;          // per input port
  std::vector<VcControlTable> tables_;      // per input port
  std::vector<TokenDispenser> dispensers_;  // per input port
  std::vector<VcAvailabilityTracer> tracers_;  // per output port
  CreditBank credits_;
  VaState va_;
  SaState sa_;
  std::array<std::optional<ScheduledTransfer>, kPortCount> pending_;
  ControlEventCounts counts_;
  bool recording_ = false;
};

}  // namespace nocsim
