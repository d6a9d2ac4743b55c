#include "nocsim/mesh.hpp"

#include <bit>
#include <cstdlib>
#include <string>

#include "nocsim/errors.hpp"

namespace nocsim {

namespace {

int abs_delta(int a, int b) { return a > b ? a - b : b - a; }

}  // namespace

Mesh::Mesh(const MeshParams& p) : p_(p) {
  if (p.width < 1 || p.height < 1 || p.width * p.height < 2) {
    throw ConfigError("mesh: need at least two nodes");
  }
  const int n = node_count();
  routers_.reserve(n);
  links_.resize(n);
  sources_.resize(n);
  sinks_.resize(n);
  const bool is_static = p.router.buffer_mode == BufferMode::Static;
  for (int idx = 0; idx < n; ++idx) {
    const Coord c = coord_of(idx);
    RouterParams rp = p.router;
    rp.coords = c;
    std::array<bool, kPortCount> enabled{};
    enabled[kLocal] = true;
    for (int d = 0; d < 4; ++d) {
      enabled[d] = has_neighbor(c, d);
      if (enabled[d]) links_[idx][d] = std::make_unique<Link>();
    }
    routers_.emplace_back(rp, enabled);

    SourceState& src = sources_[idx];
    if (is_static) {
      src.vc_credits.assign(rp.static_vcs, rp.static_depth);
      src.free_vcs = (rp.static_vcs >= 64)
                         ? ~0ull
                         : ((1ull << rp.static_vcs) - 1ull);
    } else {
      src.credits = rp.num_slots;
      src.tokens = rp.num_slots;  // rows = slots in the unified table
    }
  }
}

bool Mesh::in_bounds(Coord c) const {
  return c.x >= 0 && c.x < p_.width && c.y >= 0 && c.y < p_.height;
}

Router& Mesh::router(Coord c) {
  if (!in_bounds(c)) throw ConfigError("mesh: router coordinate out of bounds");
  return routers_[node_index(c)];
}

const Router& Mesh::router(Coord c) const {
  if (!in_bounds(c)) throw ConfigError("mesh: router coordinate out of bounds");
  return routers_[node_index(c)];
}

int Mesh::edge_count() const {
  return 2 * p_.width * p_.height - p_.width - p_.height;
}

Coord Mesh::neighbor(Coord c, int port) const {
  switch (port) {
    case kNorth:
      return {c.x, c.y - 1};
    case kEast:
      return {c.x + 1, c.y};
    case kSouth:
      return {c.x, c.y + 1};
    case kWest:
      return {c.x - 1, c.y};
    default:
      throw ProtocolViolation("mesh: local port has no neighbor");
  }
}

bool Mesh::has_neighbor(Coord c, int port) const {
  return in_bounds(neighbor(c, port));
}

Link& Mesh::link_from(int node_idx, int port) {
  auto& l = links_[node_idx][port];
  if (!l) throw ProtocolViolation("mesh: traffic on a missing link");
  return *l;
}

const Link& Mesh::link_from(int node_idx, int port) const {
  const auto& l = links_[node_idx][port];
  if (!l) throw ProtocolViolation("mesh: traffic on a missing link");
  return *l;
}

void Mesh::inject(const Packet& p, bool measured) {
  if (!in_bounds(p.src) || !in_bounds(p.dest)) {
    throw ConfigError("mesh: packet endpoints out of bounds");
  }
  if (p.flits.empty() || static_cast<int>(p.flits.size()) != p.len) {
    throw ConfigError("mesh: packet length does not match its flits");
  }
  if (packet_lookup_.count(p.id)) {
    throw ConfigError("mesh: duplicate packet id " + std::to_string(p.id));
  }
  packet_lookup_[p.id] = packets_.size();
  packets_.push_back(PacketInfo{p.id, p.src, p.dest, p.len, now_, -1,
                                abs_delta(p.src.x, p.dest.x) +
                                    abs_delta(p.src.y, p.dest.y),
                                measured});
  if (measured) ++measured_open_;
  SourceState& src = sources_[node_index(p.src)];
  for (const Flit& f : p.flits) src.queue.push_back(f);
  injected_flits_ += p.flits.size();
  last_activity_ = now_;
  trace('I', p.src, kLocal, p.flits.front());
}

std::optional<WireFlit> Mesh::next_injection(SourceState& src) {
  if (src.queue.empty()) return std::nullopt;
  const Flit& f = src.queue.front();
  const bool is_static = p_.router.buffer_mode == BufferMode::Static;
  if (f.type == FlitType::Header) {
    if (src.active_vc != -1) {
      throw ProtocolViolation("source: header queued mid-packet");
    }
    if (is_static) {
      if (src.free_vcs == 0) return std::nullopt;
      const int vc = std::countr_zero(src.free_vcs);
      if (src.vc_credits[vc] <= 0) return std::nullopt;
      src.free_vcs &= ~(1ull << vc);
      src.vc_credits[vc] -= 1;
      src.active_vc = vc;
    } else {
      if (src.tokens <= 0 || src.credits <= 0) return std::nullopt;
      src.tokens -= 1;
      src.credits -= 1;
    }
  } else {
    if (is_static) {
      if (src.active_vc < 0) {
        throw ProtocolViolation("source: follower with no streaming packet");
      }
      if (src.vc_credits[src.active_vc] <= 0) return std::nullopt;
      src.vc_credits[src.active_vc] -= 1;
    } else {
      if (src.credits <= 0) return std::nullopt;
      src.credits -= 1;
    }
  }
  WireFlit wf{f, is_static ? src.active_vc : -1};
  if (f.type == FlitType::Tail) src.active_vc = -1;
  src.queue.pop_front();
  return wf;
}

void Mesh::pop_source_returns(SourceState& src) {
  const bool is_static = p_.router.buffer_mode == BufferMode::Static;
  while (auto c = src.credit_return.pop_ready(now_)) {
    if (is_static) {
      src.vc_credits[c->vc] += 1;
    } else {
      src.credits += 1;
    }
  }
  while (auto r = src.retired_return.pop_ready(now_)) {
    if (is_static) {
      src.free_vcs |= 1ull << r->vc;
    } else {
      src.tokens += 1;
    }
  }
}

void Mesh::step() {
  bool moved = false;
  const int n = node_count();
  std::array<PortInput, kPortCount> in;
  std::array<PortOutput, kPortCount> out;

  for (int idx = 0; idx < n; ++idx) {
    const Coord c = coord_of(idx);
    for (PortInput& pi : in) pi = PortInput{};

    for (int d = 0; d < 4; ++d) {
      if (!has_neighbor(c, d)) continue;
      const int nid = node_index(neighbor(c, d));
      const int back = opposite(static_cast<Port>(d));
      in[d].flit = link_from(nid, back).flits.pop_ready(now_);
      in[d].credit = link_from(idx, d).credits.pop_ready(now_);
      in[d].retired = link_from(idx, d).retired.pop_ready(now_);
    }

    SourceState& src = sources_[idx];
    pop_source_returns(src);
    in[kLocal].flit = next_injection(src);
    in[kLocal].credit = sinks_[idx].credit_back.pop_ready(now_);
    in[kLocal].retired = sinks_[idx].retired_back.pop_ready(now_);
    if (in[kLocal].flit) moved = true;

    arrivals_scratch_.clear();
    routers_[idx].cycle(now_, in, out, &arrivals_scratch_);
    note_arrivals(idx, arrivals_scratch_);
    if (!arrivals_scratch_.empty()) moved = true;

    for (int d = 0; d < 4; ++d) {
      if (out[d].flit) {
        link_from(idx, d).flits.push(now_, *out[d].flit);
        trace('T', c, d, out[d].flit->flit);
        moved = true;
      }
      // Credits and retirements for flits received on direction d travel
      // back on the upstream neighbor's link.
      if (out[d].credit || out[d].retired) {
        const int nid = node_index(neighbor(c, d));
        const int back = opposite(static_cast<Port>(d));
        if (out[d].credit) link_from(nid, back).credits.push(now_, *out[d].credit);
        if (out[d].retired) link_from(nid, back).retired.push(now_, *out[d].retired);
      }
    }
    if (out[kLocal].flit) {
      sinks_[idx].incoming.push(now_, *out[kLocal].flit);
      trace('T', c, kLocal, out[kLocal].flit->flit);
      moved = true;
    }
    if (out[kLocal].credit) src.credit_return.push(now_, *out[kLocal].credit);
    if (out[kLocal].retired) src.retired_return.push(now_, *out[kLocal].retired);
  }

  for (int idx = 0; idx < n; ++idx) {
    const std::size_t before = exited_flits_;
    drain_sink(idx, sinks_[idx]);
    if (exited_flits_ != before) moved = true;
  }

  if (moved) last_activity_ = now_;
  check_deadlock_sentinel();
  if (validate_each_step_) validate();
  ++now_;
}

void Mesh::note_arrivals(int idx, const std::vector<ArrivedFlit>& arrivals) {
  const Coord here = coord_of(idx);
  for (const ArrivedFlit& a : arrivals) {
    trace('A', here, a.in_port, a.flit);
    if (!(a.flit.dest == here)) continue;
    ++delivered_flits_;
    if (a.flit.type != FlitType::Tail) continue;
    auto it = packet_lookup_.find(a.flit.packet_id);
    if (it == packet_lookup_.end()) {
      throw ProtocolViolation("mesh: delivered a packet that was never injected");
    }
    PacketInfo& info = packets_[it->second];
    if (info.deliver != -1) {
      throw ProtocolViolation("mesh: packet delivered twice");
    }
    info.deliver = now_;
    delivery_log_.push_back(DeliveryRecord{info.id, info.inject, now_});
    if (info.measured) --measured_open_;
    trace('D', here, a.in_port, a.flit);
  }
}

void Mesh::drain_sink(int idx, SinkState& sink) {
  const bool is_static = p_.router.buffer_mode == BufferMode::Static;
  while (auto wf = sink.incoming.pop_ready(now_)) {
    const Flit& f = wf->flit;
    if (!(f.dest == coord_of(idx))) {
      throw ProtocolViolation("mesh: flit ejected at the wrong node");
    }
    auto it = sink.open.find(f.packet_id);
    if (f.type == FlitType::Header) {
      if (it != sink.open.end()) {
        throw ProtocolViolation("sink: second header for an open packet");
      }
      if (f.seq != 0) throw ProtocolViolation("sink: header with nonzero seq");
      sink.open.emplace(f.packet_id, 1);
    } else {
      if (it == sink.open.end() || it->second != f.seq) {
        throw ProtocolViolation("sink: flit arrived out of order");
      }
      it->second += 1;
      if (f.type == FlitType::Tail) sink.open.erase(it);
    }
    ++exited_flits_;
    trace('X', coord_of(idx), kLocal, f);
    sink.credit_back.push(now_, CreditMsg{is_static ? wf->vc : -1});
    if (f.type == FlitType::Tail) {
      sink.retired_back.push(now_, VcRetiredMsg{is_static ? wf->vc : -1});
    }
  }
}

void Mesh::check_deadlock_sentinel() {
  const Cycle limit =
      Cycle{10} * (p_.width + p_.height) * p_.router.num_slots;
  if (now_ - last_activity_ <= limit) return;
  bool work = in_network_flits() > 0;
  for (const SourceState& s : sources_) work = work || !s.queue.empty();
  if (work) {
    throw ProtocolViolation(
        "mesh: no flit moved for " + std::to_string(now_ - last_activity_) +
        " cycles with traffic pending; the network is deadlocked");
  }
}

std::uint64_t Mesh::in_network_flits() const {
  std::uint64_t total = 0;
  for (const Router& r : routers_) {
    for (int p = 0; p < kPortCount; ++p) total += r.buffer(p).occupied_count();
  }
  for (const auto& node_links : links_) {
    for (const auto& l : node_links) {
      if (l) total += l->flits.size();
    }
  }
  for (const SinkState& s : sinks_) total += s.incoming.size();
  return total;
}

std::size_t Mesh::source_queue_len(Coord node) const {
  if (!in_bounds(node)) throw ConfigError("mesh: node out of bounds");
  return sources_[node_index(node)].queue.size();
}

double Mesh::total_source_queue_len() const {
  double total = 0.0;
  for (const SourceState& s : sources_) total += static_cast<double>(s.queue.size());
  return total;
}

void Mesh::trace(char kind, Coord at, int port, const Flit& f) {
  if (trace_) trace_(TraceEvent{now_, kind, at, port, f.packet_id, f.seq});
}

void Mesh::set_recording(bool on) {
  for (Router& r : routers_) r.set_recording(on);
}

ControlEventCounts Mesh::merged_counts() const {
  ControlEventCounts total;
  for (const Router& r : routers_) total += r.counts();
  return total;
}

void Mesh::sample_histograms(std::vector<std::uint64_t>& occupancy_hist,
                             std::vector<std::uint64_t>& active_vc_hist) const {
  occupancy_hist.resize(p_.router.num_slots + 1, 0);
  const int rows = routers_.empty() ? 0 : routers_.front().num_rows();
  active_vc_hist.resize(rows + 1, 0);
  for (const Router& r : routers_) {
    for (int p = 0; p < kPortCount; ++p) {
      occupancy_hist[r.buffer(p).occupied_count()] += 1;
      active_vc_hist[r.table(p).active_rows()] += 1;
    }
  }
}

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ProtocolViolation("invariant broken at " + where + ": " + what);
}

// True when the row's header flit is still buffered at this router (the
// packet's VC token downstream is then attributed to this side of the link).
bool header_still_here(const VcRow& row) {
  return row.queue_size() > 0 && row.head().seq == 0;
}

}  // namespace

void Mesh::validate() const {
  const int n = node_count();
  const int slots = p_.router.num_slots;
  const bool is_static = p_.router.buffer_mode == BufferMode::Static;
  const int depth = p_.router.static_depth;

  for (int idx = 0; idx < n; ++idx) {
    const Router& r = routers_[idx];
    const std::string at = to_string(coord_of(idx));
    const int rows = r.num_rows();

    for (int p = 0; p < kPortCount; ++p) {
      const UnifiedBuffer& ub = r.buffer(p);
      const VcControlTable& tab = r.table(p);
      const TokenDispenser& disp = r.dispenser(p);

      for (int s = 0; s < slots; ++s) {
        if (ub.slot_free(s) != (ub.peek(s).type == FlitType::Empty)) {
          fail(at, "slot tracer disagrees with slot content");
        }
      }

      std::uint64_t queued_mask = 0;
      int queued = 0;
      int active = 0;
      for (int row_id = 0; row_id < rows; ++row_id) {
        const VcRow& row = tab.row(row_id);
        if (disp.is_free(row_id) != (row.state() == VcState::Free)) {
          fail(at, "dispenser disagrees with row state");
        }
        if (row.state() == VcState::Free) {
          if (row.queue_size() != 0) fail(at, "free row holds flits");
          continue;
        }
        ++active;
        if (row.out_port() < 0 || row.out_port() >= kPortCount) {
          fail(at, "active row with no route");
        }
        if (row.queue_size() == 0 && row.tail_seen()) {
          fail(at, "row with its tail buffered drained without retiring");
        }
        for (int i = 0; i < row.queue_size(); ++i) {
          const QueuedFlit& q = row.queue_at(i);
          if (ub.slot_free(q.slot)) fail(at, "row queues an empty slot");
          const Flit& f = ub.peek(q.slot);
          if (f.packet_id != row.packet_id() || f.seq != q.seq) {
            fail(at, "row queue does not match buffered flit");
          }
          if (is_static && q.slot / depth != row_id) {
            fail(at, "flit stored outside its partition");
          }
          if (queued_mask & (1ull << q.slot)) fail(at, "slot queued twice");
          queued_mask |= 1ull << q.slot;
          ++queued;
        }
        if (row.tail_seen() &&
            row.queue_at(row.queue_size() - 1).type != FlitType::Tail) {
          fail(at, "tail_seen without the tail at the queue back");
        }
      }
      if (queued != ub.occupied_count()) {
        fail(at, "buffered flits not covered by row queues");
      }
      if (active != tab.active_rows()) fail(at, "active row count drifted");
    }

    for (int ip = 0; ip < kPortCount; ++ip) {
      const auto& t = r.pending_transfer(ip);
      if (!t) continue;
      const VcRow& row = r.table(ip).row(t->row);
      if (row.state() != VcState::Active || !row.downstream_granted() ||
          row.queue_size() == 0 || row.head().slot != t->slot ||
          row.out_port() != t->out_port) {
        fail(at, "latched transfer does not match its row");
      }
    }
  }

  // Credit and VC-token conservation, one ledger per directed link. Credits
  // live at the sender, in latched transfers, on the wire, in downstream
  // slots, or on the return wire; tokens live in the tracer, with a not yet
  // departed header, on the wire, in a downstream active row (or open sink
  // packet), or on the return wire.
  for (int idx = 0; idx < n; ++idx) {
    const Router& r = routers_[idx];
    const Coord c = coord_of(idx);
    const int rows = r.num_rows();

    for (int d = 0; d <= kLocal; ++d) {
      const bool to_sink = d == kLocal;
      if (!to_sink && !has_neighbor(c, d)) continue;

      int latched = 0;
      int undeparted_headers = 0;
      for (int ip = 0; ip < kPortCount; ++ip) {
        const auto& t = r.pending_transfer(ip);
        if (t && t->out_port == d) ++latched;
        for (int row_id = 0; row_id < rows; ++row_id) {
          const VcRow& row = r.table(ip).row(row_id);
          if (row.state() == VcState::Active && row.downstream_granted() &&
              row.out_port() == d && header_still_here(row)) {
            ++undeparted_headers;
          }
        }
      }

      std::int64_t wire_flits = 0;
      std::int64_t wire_headers = 0;
      std::int64_t wire_credits = 0;
      std::int64_t wire_retired = 0;
      std::int64_t held_downstream = 0;
      std::int64_t active_downstream = 0;
      std::string where;
      if (to_sink) {
        const SinkState& sink = sinks_[idx];
        wire_flits = static_cast<std::int64_t>(sink.incoming.size());
        sink.incoming.for_each([&](const WireFlit& wf) {
          if (wf.flit.type == FlitType::Header) ++wire_headers;
        });
        wire_credits = static_cast<std::int64_t>(sink.credit_back.size());
        wire_retired = static_cast<std::int64_t>(sink.retired_back.size());
        held_downstream = 0;  // the sink drains every cycle
        active_downstream = static_cast<std::int64_t>(sink.open.size());
        where = to_string(c) + " ejection link";
      } else {
        const Link& l = link_from(idx, d);
        wire_flits = static_cast<std::int64_t>(l.flits.size());
        l.flits.for_each([&](const WireFlit& wf) {
          if (wf.flit.type == FlitType::Header) ++wire_headers;
        });
        wire_credits = static_cast<std::int64_t>(l.credits.size());
        wire_retired = static_cast<std::int64_t>(l.retired.size());
        const Router& down = routers_[node_index(neighbor(c, d))];
        const int q = opposite(static_cast<Port>(d));
        held_downstream = down.buffer(q).occupied_count();
        active_downstream = down.table(q).active_rows();
        where = to_string(c) + " " + port_name(d) + " link";
      }

      const std::int64_t credit_sum = r.credits().total(d) + latched +
                                      wire_flits + held_downstream +
                                      wire_credits;
      if (credit_sum != slots) {
        fail(where, "credit ledger sums to " + std::to_string(credit_sum) +
                        " of " + std::to_string(slots));
      }
      const std::int64_t token_sum = r.tracer(d).free_count() +
                                     undeparted_headers + wire_headers +
                                     active_downstream + wire_retired;
      if (token_sum != rows) {
        fail(where, "vc-token ledger sums to " + std::to_string(token_sum) +
                        " of " + std::to_string(rows));
      }
    }

    // The injection side mirrors a sender: the source holds the credits and
    // tokens of the local input port.
    const SourceState& src = sources_[idx];
    std::int64_t src_credits = 0;
    std::int64_t src_tokens = 0;
    if (is_static) {
      for (int v : src.vc_credits) src_credits += v;
      src_tokens = std::popcount(src.free_vcs);
      if (src.active_vc >= 0) {
        // A packet is streaming: its vc id is out of the free set but the
        // downstream row only turns Active once the header lands, which
        // next_injection makes simultaneous, so no extra term is needed.
      }
    } else {
      src_credits = src.credits;
      src_tokens = src.tokens;
    }
    const std::int64_t in_credit =
        src_credits + r.buffer(kLocal).occupied_count() +
        static_cast<std::int64_t>(src.credit_return.size());
    if (in_credit != slots) {
      fail(to_string(c) + " injection link",
           "credit ledger sums to " + std::to_string(in_credit) + " of " +
               std::to_string(slots));
    }
    const std::int64_t in_token =
        src_tokens + r.table(kLocal).active_rows() +
        static_cast<std::int64_t>(src.retired_return.size());
    if (in_token != rows) {
      fail(to_string(c) + " injection link",
           "vc-token ledger sums to " + std::to_string(in_token) + " of " +
               std::to_string(rows));
    }
  }

  std::uint64_t queued_at_sources = 0;
  for (const SourceState& s : sources_) queued_at_sources += s.queue.size();
  const std::uint64_t accounted =
      queued_at_sources + in_network_flits() + exited_flits_;
  if (accounted != injected_flits_) {
    fail("the mesh", "flit conservation: " + std::to_string(accounted) +
                         " accounted of " + std::to_string(injected_flits_) +
                         " injected");
  }
}

}  // namespace nocsim
