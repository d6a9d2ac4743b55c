#include "nocsim/vc_control.hpp"

#include <bit>
#include <string>

#include "nocsim/errors.hpp"

namespace nocsim {

const QueuedFlit& VcRow::queue_at(int i) const {
  if (i < 0 || i >= size_) {
    throw ProtocolViolation("vc row: queue index out of range");
  }
  return ring_[(head_ + i) % ring_.size()];
}

void VcRow::reset_ring(int capacity) {
  ring_.resize(capacity);
  head_ = 0;
  size_ = 0;
}

void VcRow::push_back(QueuedFlit f) {
  if (size_ == static_cast<int>(ring_.size())) {
    throw ProtocolViolation("vc row: queue overflow");
  }
  ring_[(head_ + size_) % ring_.size()] = f;
  ++size_;
}

QueuedFlit VcRow::pop_front() {
  if (size_ == 0) {
    throw ProtocolViolation("vc row: dequeue from empty queue");
  }
  QueuedFlit f = ring_[head_];
  head_ = (head_ + 1) % static_cast<int>(ring_.size());
  --size_;
  return f;
}

TokenDispenser::TokenDispenser(int num_rows) : num_rows_(num_rows) {
  if (num_rows < 1 || num_rows > 64) {
    throw ConfigError("dispenser rows: must be in 1..64");
  }
  full_mask_ = num_rows == 64 ? ~0ull : ((1ull << num_rows) - 1ull);
  free_mask_ = full_mask_;
}

int TokenDispenser::free_count() const { return std::popcount(free_mask_); }

bool TokenDispenser::is_free(int row) const {
  if (row < 0 || row >= num_rows_) {
    throw ProtocolViolation("dispenser: row index out of range");
  }
  return (free_mask_ >> row) & 1ull;
}

int TokenDispenser::acquire_lowest() {
  if (free_mask_ == 0) {
    throw ProtocolViolation("dispenser: no free row; admission outran retirement");
  }
  int row = std::countr_zero(free_mask_);
  free_mask_ &= ~(1ull << row);
  return row;
}

void TokenDispenser::acquire(int row) {
  if (!is_free(row)) {
    throw ProtocolViolation("dispenser: acquiring row " + std::to_string(row) +
                            " that is not free");
  }
  free_mask_ &= ~(1ull << row);
}

void TokenDispenser::release(int row) {
  if (is_free(row)) {
    throw ProtocolViolation("dispenser: releasing row " + std::to_string(row) +
                            " that is already free");
  }
  free_mask_ |= 1ull << row;
}

VcControlTable::VcControlTable(int num_rows, int num_slots) {
  if (num_rows < 1 || num_rows > num_slots) {
    throw ConfigError("vc table rows: must be in 1..num_slots");
  }
  rows_.resize(num_rows);
  for (VcRow& r : rows_) r.reset_ring(num_slots);
}

const VcRow& VcControlTable::row(int r) const {
  if (r < 0 || r >= num_rows()) {
    throw ProtocolViolation("vc table: row index out of range");
  }
  return rows_[r];
}

VcRow& VcControlTable::row_mut(int r) {
  if (r < 0 || r >= num_rows()) {
    throw ProtocolViolation("vc table: row index out of range");
  }
  return rows_[r];
}

std::optional<int> VcControlTable::find_packet(PacketId pid) const {
  auto it = packet_index_.find(pid);
  if (it == packet_index_.end()) return std::nullopt;
  return it->second;
}

int VcControlTable::admit_header(TokenDispenser& disp, PacketId pid, int slot) {
  return admit_header_at(disp, disp.free_mask() == 0 ? -1 : std::countr_zero(disp.free_mask()),
                         pid, slot);
}

int VcControlTable::admit_header_at(TokenDispenser& disp, int r, PacketId pid,
                                    int slot) {
  if (r < 0 || r >= num_rows()) {
    throw ProtocolViolation("vc table: no free row for header of packet " +
                            std::to_string(pid));
  }
  if (packet_index_.count(pid)) {
    throw ProtocolViolation("vc table: duplicate header for packet " +
                            std::to_string(pid));
  }
  disp.acquire(r);
  VcRow& row = rows_[r];
  if (row.state_ != VcState::Free) {
    throw ProtocolViolation("vc table: admitting header into non-free row " +
                            std::to_string(r));
  }
  row.state_ = VcState::Active;
  row.packet_id_ = pid;
  row.out_port_ = -1;
  row.downstream_granted_ = false;
  row.downstream_vc_ = -1;
  row.tail_seen_ = false;
  row.next_seq_ = 1;
  row.push_back(QueuedFlit{0, static_cast<std::uint8_t>(slot), FlitType::Header});
  packet_index_.emplace(pid, r);
  ++active_rows_;
  ++total_queued_;
  return r;
}

int VcControlTable::append_follower(PacketId pid, int slot, std::uint32_t seq,
                                    FlitType type) {
  if (type != FlitType::Body && type != FlitType::Tail) {
    throw ProtocolViolation("vc table: follower must be Body or Tail");
  }
  auto it = packet_index_.find(pid);
  if (it == packet_index_.end()) {
    throw ProtocolViolation("vc table: follower for packet " + std::to_string(pid) +
                            " without an admitted header");
  }
  VcRow& row = rows_[it->second];
  if (row.tail_seen_) {
    throw ProtocolViolation("vc table: flit after tail for packet " +
                            std::to_string(pid));
  }
  if (seq != row.next_seq_) {
    throw ProtocolViolation("vc table: packet " + std::to_string(pid) +
                            " flit seq " + std::to_string(seq) + " arrived, expected " +
                            std::to_string(row.next_seq_));
  }
  row.next_seq_ = seq + 1;
  if (type == FlitType::Tail) row.tail_seen_ = true;
  row.push_back(QueuedFlit{seq, static_cast<std::uint8_t>(slot), type});
  ++total_queued_;
  return it->second;
}

VcControlTable::DequeueResult VcControlTable::dequeue_head(TokenDispenser& disp,
                                                           int r) {
  VcRow& row = row_mut(r);
  if (row.state_ != VcState::Active) {
    throw ProtocolViolation("vc table: dequeue from Free row " + std::to_string(r));
  }
  QueuedFlit f = row.pop_front();
  --total_queued_;
  bool retired = f.type == FlitType::Tail;
  if (retired) {
    if (!row.queue_empty()) {
      throw ProtocolViolation("vc table: flits queued behind the tail");
    }
    packet_index_.erase(row.packet_id_);
    row.state_ = VcState::Free;
    row.packet_id_ = 0;
    row.out_port_ = -1;
    row.downstream_granted_ = false;
    row.downstream_vc_ = -1;
    row.tail_seen_ = false;
    row.next_seq_ = 0;
    disp.release(r);
    --active_rows_;
  }
  return DequeueResult{f, retired};
}

void VcControlTable::set_out_port(int r, int port) {
  VcRow& row = row_mut(r);
  if (row.state_ != VcState::Active) {
    throw ProtocolViolation("vc table: routing a Free row");
  }
  row.out_port_ = port;
}

void VcControlTable::set_downstream_grant(int r, int downstream_vc) {
  VcRow& row = row_mut(r);
  if (row.state_ != VcState::Active || row.downstream_granted_) {
    throw ProtocolViolation("vc table: invalid downstream grant on row " +
                            std::to_string(r));
  }
  row.downstream_granted_ = true;
  row.downstream_vc_ = downstream_vc;
}

VcAvailabilityTracer::VcAvailabilityTracer(int capacity, bool tracks_ids)
    : capacity_(capacity), tracks_ids_(tracks_ids), count_(capacity) {
  if (capacity < 1 || capacity > 64) {
    throw ConfigError("vc tracer capacity: must be in 1..64");
  }
  free_mask_ = capacity == 64 ? ~0ull : ((1ull << capacity) - 1ull);
}

VcAvailabilityTracer VcAvailabilityTracer::counting(int capacity) {
  return VcAvailabilityTracer(capacity, false);
}

VcAvailabilityTracer VcAvailabilityTracer::id_tracking(int capacity) {
  return VcAvailabilityTracer(capacity, true);
}

int VcAvailabilityTracer::free_count() const {
  return tracks_ids_ ? std::popcount(free_mask_) : count_;
}

std::optional<int> VcAvailabilityTracer::consume() {
  if (free_count() == 0) return std::nullopt;
  if (!tracks_ids_) {
    --count_;
    return -1;
  }
  int id = std::countr_zero(free_mask_);
  free_mask_ &= ~(1ull << id);
  return id;
}

void VcAvailabilityTracer::release(int vc_id) {
  if (!tracks_ids_) {
    if (count_ >= capacity_) {
      throw ProtocolViolation("vc tracer: token released above capacity");
    }
    ++count_;
    return;
  }
  if (vc_id < 0 || vc_id >= capacity_) {
    throw ProtocolViolation("vc tracer: released id out of range");
  }
  if ((free_mask_ >> vc_id) & 1ull) {
    throw ProtocolViolation("vc tracer: id " + std::to_string(vc_id) +
                            " released twice");
  }
  free_mask_ |= 1ull << vc_id;
}

}  // namespace nocsim
