#pragma once

#include <cstdint>
#include <optional>

namespace nocsim {

// Round-robin arbiter built from two fixed-priority passes over the request
// vector plus a rotating eligibility mask. The masked pass sees
// requests & mask with mask = { i : i > last_grant }; if it is empty the
// unmasked pass runs over the raw requests. Lowest set index wins within a
// pass, and every grant g moves the mask to { i : i > g }. Equivalent to a
// cyclic scan starting at last_grant + 1.
class RoundRobinArbiter {
 public:
  explicit RoundRobinArbiter(int width);

  int width() const { return width_; }
  std::uint64_t mask() const { return mask_; }
  std::optional<int> last_grant() const { return last_grant_; }

  // Grant decision without a state update. Bits at or above width() must be
  // zero; a wider request vector is a configuration error.
  std::optional<int> peek(std::uint64_t requests) const;

  // Records a grant: last_grant <- g, mask <- { i : i > g }.
  void commit(int grant);

  // peek() then commit() when a grant exists.
  std::optional<int> arbitrate(std::uint64_t requests);

  // Returns to the initial state: no last grant, all indices eligible.
  void reset();

 private:
  int width_;
  std::uint64_t all_;
  std::uint64_t mask_;
  std::optional<int> last_grant_;
};

}  // namespace nocsim
