#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "nocsim/flit.hpp"

namespace nocsim {

enum class VcState : std::uint8_t { Free, Active };

struct QueuedFlit {
  std::uint32_t seq;
  std::uint8_t slot;
  FlitType type;
};

// One row of a port's VC control table. A row serves exactly one packet from
// header admission to tail departure; the queue holds the packet's buffered
// flits in arrival order (head departs first). The queue may drain empty
// mid-packet when upstream stalls open a gap, so Active with an empty queue
// is legal only while the tail has not arrived yet.
class VcRow {
 public:
  VcState state() const { return state_; }
  PacketId packet_id() const { return packet_id_; }
  int out_port() const { return out_port_; }
  bool downstream_granted() const { return downstream_granted_; }
  int downstream_vc() const { return downstream_vc_; }
  bool tail_seen() const { return tail_seen_; }
  std::uint32_t next_seq() const { return next_seq_; }

  int queue_size() const { return size_; }
  bool queue_empty() const { return size_ == 0; }
  const QueuedFlit& queue_at(int i) const;  // 0 = head
  const QueuedFlit& head() const { return queue_at(0); }

 private:
  friend class VcControlTable;

  void reset_ring(int capacity);
  void push_back(QueuedFlit f);
  QueuedFlit pop_front();

  VcState state_ = VcState::Free;
  PacketId packet_id_ = 0;
  int out_port_ = -1;
  bool downstream_granted_ = false;
  int downstream_vc_ = -1;
  bool tail_seen_ = false;
  std::uint32_t next_seq_ = 0;

  std::vector<QueuedFlit> ring_;
  int head_ = 0;
  int size_ = 0;
};

// Pool of Free row ids for one port. Hands out the lowest free id.
class TokenDispenser {
 public:
  explicit TokenDispenser(int num_rows);

  int num_rows() const { return num_rows_; }
  int free_count() const;
  bool is_free(int row) const;
  std::uint64_t free_mask() const { return free_mask_; }

  int acquire_lowest();
  void acquire(int row);
  void release(int row);

 private:
  int num_rows_;
  std::uint64_t free_mask_;
  std::uint64_t full_mask_;
};

// Table-based VC state of one input port: one row per virtual channel, with
// arriving (queue tail) and departing (queue head) positions per row and a
// packet index for follower lookup.
class VcControlTable {
 public:
  VcControlTable(int num_rows, int num_slots);

  int num_rows() const { return static_cast<int>(rows_.size()); }
  const VcRow& row(int r) const;
  int active_rows() const { return active_rows_; }
  int total_queued() const { return total_queued_; }
  std::optional<int> find_packet(PacketId pid) const;

  // Admits a header into the lowest-id Free row. The caller guarantees a
  // free row exists (rows = slots and the flit held a slot credit); none
  // free is a protocol violation, as is a second header for an Active
  // packet. The row starts ungranted with no output port.
  int admit_header(TokenDispenser& disp, PacketId pid, int slot);

  // Static buffer mode: admits a header into the row named by the upstream
  // VC assignment.
  int admit_header_at(TokenDispenser& disp, int row, PacketId pid, int slot);

  // Appends a body/tail flit to its packet's Active row. A follower without
  // an Active row means the link reordered or dropped the header; an
  // out-of-order seq means flits were reordered in flight.
  int append_follower(PacketId pid, int slot, std::uint32_t seq, FlitType type);

  struct DequeueResult {
    QueuedFlit flit;
    bool retired;  // the dequeued flit was the Tail; the row is Free again
  };

  // Pops the departing flit of the row. Dequeueing the tail retires the row;
  // the caller emits the vc_retired signal toward the upstream router.
  DequeueResult dequeue_head(TokenDispenser& disp, int r);

  void set_out_port(int r, int port);
  void set_downstream_grant(int r, int downstream_vc);

 private:
  VcRow& row_mut(int r);

  std::vector<VcRow> rows_;
  std::unordered_map<PacketId, int> packet_index_;
  int active_rows_ = 0;
  int total_queued_ = 0;
};

// Per-output count of free virtual channels at the link's downstream input
// port. Consumed by VC allocation, replenished by vc_retired signals. In
// counting mode only the number matters (the downstream port names rows
// itself); in id-tracking mode concrete VC ids are handed out, lowest first.
class VcAvailabilityTracer {
 public:
  static VcAvailabilityTracer counting(int capacity);
  static VcAvailabilityTracer id_tracking(int capacity);

  int capacity() const { return capacity_; }
  int free_count() const;
  bool tracks_ids() const { return tracks_ids_; }

  // Consumes one token. Returns the assigned VC id in id-tracking mode, -1
  // in counting mode, nullopt when no token is available.
  std::optional<int> consume();

  // Returns a token (vc_id -1 in counting mode). Releasing above capacity,
  // or releasing an id that is already free, is a protocol violation.
  void release(int vc_id);

 private:
  VcAvailabilityTracer(int capacity, bool tracks_ids);

  int capacity_;
  bool tracks_ids_;
  int count_;
  std::uint64_t free_mask_;
};

}  // namespace nocsim
