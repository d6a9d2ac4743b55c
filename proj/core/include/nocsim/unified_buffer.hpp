#pragma once

#include <cstdint>
#include <vector>

#include "nocsim/flit.hpp"

namespace nocsim {

// Unified slot pool of one input port. All virtual channels of the port
// share these slots; ownership of an occupied slot is tracked by the VC
// control table, not here. The availability tracer is a bitmask mirroring
// slot emptiness (bit set = free) and backs the credit count exported
// upstream.
class UnifiedBuffer {
 public:
  // num_slots must be a power of two in 4..64.
  explicit UnifiedBuffer(int num_slots);

  int num_slots() const { return static_cast<int>(slots_.size()); }
  int free_count() const;
  int occupied_count() const { return num_slots() - free_count(); }
  std::uint64_t tracer() const { return tracer_; }
  bool slot_free(int slot) const;
  const Flit& peek(int slot) const;

  // Stores the flit in the lowest-index free slot whose bit is set in
  // allowed_mask. Writing an Empty flit, or writing when no allowed slot is
  // free, is a protocol violation.
  int write_flit(const Flit& flit, std::uint64_t allowed_mask);
  int write_flit(const Flit& flit);

  // Returns the slot's flit and frees the slot. Reading a free slot is a
  // protocol violation. The caller emits the credit for the freed slot.
  Flit read_and_free(int slot);

 private:
  void check_slot(int slot) const;

  std::vector<Flit> slots_;
  std::uint64_t tracer_;
  std::uint64_t full_mask_;
};

}  // namespace nocsim
