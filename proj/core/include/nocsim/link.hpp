#pragma once

#include <cassert>
#include <deque>
#include <optional>
#include <utility>

#include "nocsim/flit.hpp"

namespace nocsim {

// A flit on a wire, tagged with the downstream VC assignment in static
// buffer mode (-1 when the downstream port assigns rows itself).
struct WireFlit {
  Flit flit;
  int vc = -1;
};

struct CreditMsg {
  int vc = -1;
};

struct VcRetiredMsg {
  int vc = -1;
};

// An item emitted during cycle c spends cycle c+1 in flight and is consumed
// at cycle c+2: one full link cycle between the sender's traversal stage and
// the receiver's buffer write. With the four router stages this yields the
// five-cycle per-hop minimum.
inline constexpr Cycle kLinkDelay = 2;

template <typename T>
class DelayLine {
 public:
  void push(Cycle now, T item) {
    items_.push_back(Entry{now + kLinkDelay, std::move(item)});
  }

  // Consumers pop every cycle, so a due item is never stale.
  std::optional<T> pop_ready(Cycle now) {
    if (items_.empty() || items_.front().due > now) return std::nullopt;
    assert(items_.front().due == now && "link item missed its delivery cycle");
    T item = std::move(items_.front().item);
    items_.pop_front();
    return item;
  }

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

  template <typename F>
  void for_each(F&& f) const {
    for (const Entry& e : items_) f(e.item);
  }

 private:
  struct Entry {
    Cycle due;
    T item;
  };
  std::deque<Entry> items_;
};

// One directed router-to-router connection: forward flit wire plus the
// reverse credit / vc_retired sideband.
struct Link {
  DelayLine<WireFlit> flits;
  DelayLine<CreditMsg> credits;
  DelayLine<VcRetiredMsg> retired;
};

}  // namespace nocsim
