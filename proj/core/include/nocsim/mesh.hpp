#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <unordered_map>
#include <vector>

#include "nocsim/link.hpp"
#include "nocsim/router.hpp"

namespace nocsim {

struct MeshParams {
  int width = 4;
  int height = 4;
  RouterParams router;  // coords are filled per node
};

struct DeliveryRecord {
  PacketId id;
  Cycle inject;
  Cycle deliver;

  bool operator==(const DeliveryRecord&) const = default;
};

struct PacketInfo {
  PacketId id;
  Coord src;
  Coord dest;
  int len;
  Cycle inject;
  Cycle deliver = -1;  // tail written at the destination router
  int hops;
  bool measured;
};

struct TraceEvent {
  Cycle cycle;
  char kind;  // I inject, A arrive, T transmit, D deliver, X exit
  Coord at;
  int port;
  PacketId packet;
  std::uint32_t seq;
};

using TraceSink = std::function<void(const TraceEvent&)>;

// 2D mesh of routers joined by one-cycle links, stepped in lockstep. Each
// step latches every router's outputs into the link delay lines, so router
// evaluation order never changes results. Packet latency runs from
// injection to the tail flit's buffer write at the destination router;
// flits then drain through the destination's local port into the node sink,
// which closes the credit and VC-token loops.
class Mesh {
 public:
  explicit Mesh(const MeshParams& p);

  int width() const { return p_.width; }
  int height() const { return p_.height; }
  int node_count() const { return p_.width * p_.height; }
  int node_index(Coord c) const { return c.y * p_.width + c.x; }
  bool in_bounds(Coord c) const;
  Router& router(Coord c);
  const Router& router(Coord c) const;

  // Undirected neighbor-to-neighbor edge count: 2wh - w - h.
  int edge_count() const;
  int directed_link_count() const { return 2 * edge_count(); }

  Cycle now() const { return now_; }

  // Queues a packet at its source node. Flits enter the router's local
  // input as credits allow, starting this cycle; an uncontended header is
  // buffer-written in the same cycle it was injected.
  void inject(const Packet& p, bool measured = true);

  void step();

  std::uint64_t injected_flits() const { return injected_flits_; }
  std::uint64_t injected_packets() const { return packets_.size(); }
  std::uint64_t delivered_flits() const { return delivered_flits_; }
  std::uint64_t delivered_packets() const { return delivery_log_.size(); }
  std::uint64_t exited_flits() const { return exited_flits_; }
  std::uint64_t measured_open() const { return measured_open_; }
  bool all_measured_delivered() const { return measured_open_ == 0; }
  std::uint64_t in_network_flits() const;

  std::size_t source_queue_len(Coord node) const;
  double total_source_queue_len() const;

  const std::vector<DeliveryRecord>& delivery_log() const { return delivery_log_; }
  const std::vector<PacketInfo>& packets() const { return packets_; }

  void set_trace(TraceSink sink) { trace_ = std::move(sink); }
  void set_validation(bool on) { validate_each_step_ = on; }

  // Full invariant scan: tracer and dispenser coherence, row/queue
  // consistency, the per-link credit and VC-token conservation ledgers, and
  // global flit conservation. Throws ProtocolViolation on any breach.
  void validate() const;

  void set_recording(bool on);
  ControlEventCounts merged_counts() const;
  void sample_histograms(std::vector<std::uint64_t>& occupancy_hist,
                         std::vector<std::uint64_t>& active_vc_hist) const;

 private:
  struct SourceState {
    std::deque<Flit> queue;
    int credits = 0;                  // dynamic mode pool
    std::vector<int> vc_credits;      // static mode, per vc
    int tokens = 0;                   // dynamic mode: free rows at the local input
    std::uint64_t free_vcs = 0;       // static mode: free local-input vc ids
    int active_vc = -1;               // vc of the packet currently streaming
    DelayLine<CreditMsg> credit_return;
    DelayLine<VcRetiredMsg> retired_return;
  };

  struct SinkState {
    DelayLine<WireFlit> incoming;
    DelayLine<CreditMsg> credit_back;
    DelayLine<VcRetiredMsg> retired_back;
    std::unordered_map<PacketId, std::uint32_t> open;  // next expected seq
  };

  Coord coord_of(int idx) const { return {idx % p_.width, idx / p_.width}; }
  Coord neighbor(Coord c, int port) const;
  bool has_neighbor(Coord c, int port) const;
  Link& link_from(int node_idx, int port);
  const Link& link_from(int node_idx, int port) const;
  void pop_source_returns(SourceState& src);
  void drain_sink(int idx, SinkState& sink);
  std::optional<WireFlit> next_injection(SourceState& src);
  void trace(char kind, Coord at, int port, const Flit& f);
  void note_arrivals(int idx, const std::vector<ArrivedFlit>& arrivals);
  void check_deadlock_sentinel();

  MeshParams p_;
  Cycle now_ = 0;
  std::vector<Router> routers_;
  std::vector<std::array<std::unique_ptr<Link>, 4>> links_;  // [node][dir port]
  std::vector<SourceState> sources_;
  std::vector<SinkState> sinks_;

  std::vector<PacketInfo> packets_;
  std::unordered_map<PacketId, std::size_t> packet_lookup_;
  std::vector<DeliveryRecord> delivery_log_;
  std::uint64_t injected_flits_ = 0;
  std::uint64_t delivered_flits_ = 0;
  std::uint64_t exited_flits_ = 0;
  std::uint64_t measured_open_ = 0;
  Cycle last_activity_ = 0;
  bool validate_each_step_ = false;
  TraceSink trace_;
  std::vector<ArrivedFlit> arrivals_scratch_;
};

}  // namespace nocsim
