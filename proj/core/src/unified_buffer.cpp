#include "nocsim/unified_buffer.hpp"

#include <bit>
#include <string>

#include "nocsim/errors.hpp"

namespace nocsim {

UnifiedBuffer::UnifiedBuffer(int num_slots) {
  if (num_slots < 4 || num_slots > 64 || (num_slots & (num_slots - 1)) != 0) {
    throw ConfigError("num_slots: must be a power of two in 4..64, got " +
                      std::to_string(num_slots));
  }
  slots_.resize(num_slots);
  full_mask_ = num_slots == 64 ? ~0ull : ((1ull << num_slots) - 1ull);
  tracer_ = full_mask_;
}

int UnifiedBuffer::free_count() const { return std::popcount(tracer_); }

void UnifiedBuffer::check_slot(int slot) const {
  if (slot < 0 || slot >= num_slots()) {
    throw ProtocolViolation("buffer: slot index " + std::to_string(slot) +
                            " out of range");
  }
}

bool UnifiedBuffer::slot_free(int slot) const {
  check_slot(slot);
  return (tracer_ >> slot) & 1ull;
}

const Flit& UnifiedBuffer::peek(int slot) const {
  check_slot(slot);
  return slots_[slot];
}

int UnifiedBuffer::write_flit(const Flit& flit, std::uint64_t allowed_mask) {
  if (flit.type == FlitType::Empty) {
    throw ProtocolViolation("buffer: writing an Empty flit");
  }
  std::uint64_t candidates = tracer_ & allowed_mask & full_mask_;
  if (candidates == 0) {
    throw ProtocolViolation(
        "buffer: write with no free slot; upstream sent without a credit");
  }
  int slot = std::countr_zero(candidates);
  slots_[slot] = flit;
  tracer_ &= ~(1ull << slot);
  return slot;
}

int UnifiedBuffer::write_flit(const Flit& flit) {
  return write_flit(flit, full_mask_);
}

Flit UnifiedBuffer::read_and_free(int slot) {
  check_slot(slot);
  if (slot_free(slot)) {
    throw ProtocolViolation("buffer: reading empty slot " + std::to_string(slot));
  }
  Flit f = slots_[slot];
  slots_[slot] = Flit{};
  tracer_ |= 1ull << slot;
  return f;
}

}  // namespace nocsim
