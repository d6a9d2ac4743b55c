#include "nocsim/router.hpp"

#include <string>

#include "nocsim/errors.hpp"

namespace nocsim {

int route_compute(Coord dest, Coord here) {
  if (dest.x > here.x) return kEast;
  if (dest.x < here.x) return kWest;
  if (dest.y > here.y) return kSouth;
  if (dest.y < here.y) return kNorth;
  return kLocal;
}

namespace {

int row_count(const RouterParams& p) {
  return p.buffer_mode == BufferMode::Static ? p.static_vcs : p.num_slots;
}

CreditBank make_credits(const RouterParams& p) {
  return p.buffer_mode == BufferMode::Static
             ? CreditBank::per_vc(p.static_vcs, p.static_depth)
             : CreditBank::pooled(p.num_slots);
}

}  // namespace

Router::Router(const RouterParams& p, std::array<bool, kPortCount> port_enabled)
    : p_(p),
      rows_(row_count(p)),
      enabled_(port_enabled),
      credits_(make_credits(p)),
      va_(row_count(p)),
      sa_(row_count(p)) {
  if (!flit_width_valid(p.flit_bits)) {
    throw ConfigError("router: unsupported flit width " +
                      std::to_string(p.flit_bits));
  }
  if (p.buffer_mode == BufferMode::Static &&
      (p.static_vcs < 1 || p.static_depth < 1 ||
       p.static_vcs * p.static_depth != p.num_slots)) {
    throw ConfigError("router: static partition must tile the slot pool exactly");
  }
  ubs_.reserve(kPortCount);
  tables_.reserve(kPortCount);
  dispensers_.reserve(kPortCount);
  tracers_.reserve(kPortCount);
  for (int i = 0; i < kPortCount; ++i) {
    ubs_.emplace_back(p.num_slots);
    tables_.emplace_back(rows_, p.num_slots);
    dispensers_.emplace_back(rows_);
    tracers_.push_back(p.buffer_mode == BufferMode::Static
                           ? VcAvailabilityTracer::id_tracking(rows_)
                           : VcAvailabilityTracer::counting(rows_));
  }
}

void Router::cycle(Cycle now, const std::array<PortInput, kPortCount>& in,
                   std::array<PortOutput, kPortCount>& out,
                   std::vector<ArrivedFlit>* arrivals) {
  for (PortOutput& o : out) o = PortOutput{};
  // Reverse dependency order: each stage consumes what its upstream stage
  // latched on the previous cycle, so one pass per cycle needs no shadow
  // copies of router state.
  apply_signals(in);
  do_traversal(now, out);
  do_switch_allocation();
  do_vc_allocation();
  do_buffer_write(now, in, arrivals);
}

void Router::apply_signals(const std::array<PortInput, kPortCount>& in) {
  for (int p = 0; p < kPortCount; ++p) {
    if (in[p].credit) {
      credits_.release(p, in[p].credit->vc);
      record(EventKind::RegisterWrite);
    }
    if (in[p].retired) {
      tracers_[p].release(in[p].retired->vc);
      record(EventKind::TracerUpdate);
    }
  }
}

void Router::do_traversal(Cycle, std::array<PortOutput, kPortCount>& out) {
  const bool per_vc = credits_.is_per_vc();
  for (int ip = 0; ip < kPortCount; ++ip) {
    if (!pending_[ip]) continue;
    const ScheduledTransfer t = *pending_[ip];
    pending_[ip].reset();

    Flit f = ubs_[ip].read_and_free(t.slot);
    record(EventKind::BufferRead);
    record(EventKind::TracerUpdate);

    VcControlTable::DequeueResult res =
        tables_[ip].dequeue_head(dispensers_[ip], t.row);
    if (res.flit.slot != t.slot || res.flit.type != f.type) {
      throw ProtocolViolation("traversal: row head does not match the slot read");
    }

    out[t.out_port].flit = WireFlit{f, t.downstream_vc};
    // The freed slot's credit rides the reverse wire of the input port.
    out[ip].credit = CreditMsg{per_vc ? t.row : -1};
    if (res.retired) {
      out[ip].retired = VcRetiredMsg{per_vc ? t.row : -1};
      record(EventKind::TableWrite, true);
      record(EventKind::DispenserUpdate, true);
    }
  }
}

void Router::do_switch_allocation() {
  std::vector<SaRequest> reqs;
  const bool per_vc = credits_.is_per_vc();
  for (int ip = 0; ip < kPortCount; ++ip) {
    const VcControlTable& tab = tables_[ip];
    if (tab.active_rows() == 0) continue;
    for (int r = 0; r < rows_; ++r) {
      const VcRow& row = tab.row(r);
      if (row.state() != VcState::Active || !row.downstream_granted() ||
          row.queue_empty()) {
        continue;
      }
      reqs.push_back(SaRequest{ip, r, row.out_port(),
                               per_vc ? row.downstream_vc() : -1,
                               row.head().slot});
    }
  }
  for (const SaGrant& g : sa_cycle(sa_, reqs, credits_, rec(), p_.layout)) {
    if (pending_[g.in_port]) {
      throw ProtocolViolation("switch allocation: two grants for one input port");
    }
    pending_[g.in_port] =
        ScheduledTransfer{g.row, g.slot, g.out_port, g.downstream_vc};
  }
}

void Router::do_vc_allocation() {
  std::vector<VaRequest> reqs;
  for (int ip = 0; ip < kPortCount; ++ip) {
    const VcControlTable& tab = tables_[ip];
    if (tab.active_rows() == 0) continue;
    for (int r = 0; r < rows_; ++r) {
      const VcRow& row = tab.row(r);
      if (row.state() != VcState::Active || row.downstream_granted()) continue;
      reqs.push_back(VaRequest{ip, r, row.out_port()});
    }
  }
  for (const VaGrant& g : va_cycle(va_, reqs, tracers_, rec(), p_.layout)) {
    tables_[g.in_port].set_downstream_grant(g.row, g.downstream_vc);
  }
}

void Router::do_buffer_write(Cycle, const std::array<PortInput, kPortCount>& in,
                             std::vector<ArrivedFlit>* arrivals) {
  const bool is_static = p_.buffer_mode == BufferMode::Static;
  for (int ip = 0; ip < kPortCount; ++ip) {
    if (!in[ip].flit) continue;
    const WireFlit& wf = *in[ip].flit;
    const Flit& f = wf.flit;
    if (f.type == FlitType::Empty) {
      throw ProtocolViolation("buffer write: empty flit on the wire");
    }
    if (f.width_bits != p_.flit_bits) {
      throw ProtocolViolation("buffer write: flit width does not match the port");
    }

    int slot;
    if (is_static) {
      if (wf.vc < 0 || wf.vc >= rows_) {
        throw ProtocolViolation("buffer write: flit carries no VC assignment");
      }
      slot = ubs_[ip].write_flit(f, partition_mask(wf.vc));
    } else {
      slot = ubs_[ip].write_flit(f);
    }
    record(EventKind::BufferWrite);
    record(EventKind::TracerUpdate);

    if (f.type == FlitType::Header) {
      int row = is_static ? tables_[ip].admit_header_at(dispensers_[ip], wf.vc,
                                                        f.packet_id, slot)
                          : tables_[ip].admit_header(dispensers_[ip],
                                                     f.packet_id, slot);
      tables_[ip].set_out_port(row, route_compute(f.dest, p_.coords));
      record(EventKind::TableWrite);
      record(EventKind::DispenserUpdate);
    } else {
      int row = tables_[ip].append_follower(f.packet_id, slot, f.seq, f.type);
      if (is_static && row != wf.vc) {
        throw ProtocolViolation("buffer write: follower strayed from its VC");
      }
      record(EventKind::TableRead);
      record(EventKind::TableWrite);
    }
    if (arrivals) arrivals->push_back(ArrivedFlit{f, ip});
  }
}

void Router::record(EventKind k, bool allocator_context) {
  if (recording_) record_event(counts_, k, p_.layout, allocator_context);
}

std::uint64_t Router::partition_mask(int vc) const {
  const int depth = p_.static_depth;
  return ((1ull << depth) - 1) << (vc * depth);
}

}  // namespace nocsim
