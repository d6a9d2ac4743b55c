#include "nocsim/arbiter.hpp"

#include <bit>
#include <string>

#include "nocsim/errors.hpp"

namespace nocsim {

RoundRobinArbiter::RoundRobinArbiter(int width) : width_(width) {
  if (width < 1 || width > 64) {
    throw ConfigError("arbiter width: must be in 1..64, got " + std::to_string(width));
  }
  all_ = width == 64 ? ~0ull : ((1ull << width) - 1ull);
  mask_ = all_;
}

std::optional<int> RoundRobinArbiter::peek(std::uint64_t requests) const {
  if (requests & ~all_) {
    throw ConfigError("arbiter: request vector wider than arbiter width " +
                      std::to_string(width_));
  }
  std::uint64_t masked = requests & mask_;
  std::uint64_t pool = masked != 0 ? masked : requests;
  if (pool == 0) return std::nullopt;
  return std::countr_zero(pool);
}

void RoundRobinArbiter::commit(int grant) {
  if (grant < 0 || grant >= width_) {
    throw ConfigError("arbiter: grant index out of range");
  }
  last_grant_ = grant;
  // Keep only indices above the winner eligible for the next masked pass.
  mask_ = grant == 63 ? 0ull : (all_ & ~((1ull << (grant + 1)) - 1ull));
}

std::optional<int> RoundRobinArbiter::arbitrate(std::uint64_t requests) {
  std::optional<int> g = peek(requests);
  if (g) commit(*g);
  return g;
}

void RoundRobinArbiter::reset() {
  mask_ = all_;
  last_grant_.reset();
}

}  // namespace nocsim
