#include "nocsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "nocsim/errors.hpp"

namespace nocsim {

const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::TableRead:
      return "table_read";
    case EventKind::TableWrite:
      return "table_write";
    case EventKind::TracerUpdate:
      return "tracer_update";
    case EventKind::DispenserUpdate:
      return "dispenser_update";
    case EventKind::CrossModuleSignal:
      return "cross_module_signal";
    case EventKind::RegisterWrite:
      return "register_write";
    case EventKind::BufferRead:
      return "buffer_read";
    case EventKind::BufferWrite:
      return "buffer_write";
  }
  return "?";
}

std::uint64_t ControlEventCounts::total() const {
  std::uint64_t t = 0;
  for (std::uint64_t v : by_kind) t += v;
  return t;
}

ControlEventCounts& ControlEventCounts::operator+=(const ControlEventCounts& o) {
  for (int i = 0; i < kEventKindCount; ++i) by_kind[i] += o.by_kind[i];
  return *this;
}

void record_event(ControlEventCounts& c, EventKind kind, ControlLayout layout,
                  bool allocator_context) {
  c.by_kind[static_cast<int>(kind)] += 1;
  if (layout == ControlLayout::ViCharBaseline && allocator_context &&
      (kind == EventKind::TableRead || kind == EventKind::TableWrite)) {
    // External combinational table: request out, result back.
    c.by_kind[static_cast<int>(EventKind::CrossModuleSignal)] += 2;
  }
}

double CostWeights::weight(EventKind k) const {
  switch (k) {
    case EventKind::TableRead:
      return table_read;
    case EventKind::TableWrite:
      return table_write;
    case EventKind::TracerUpdate:
      return tracer_update;
    case EventKind::DispenserUpdate:
      return dispenser_update;
    case EventKind::CrossModuleSignal:
      return cross_module_signal;
    case EventKind::RegisterWrite:
      return register_write;
    case EventKind::BufferRead:
      return buffer_read;
    case EventKind::BufferWrite:
      return buffer_write;
  }
  return 0.0;
}

double& CostWeights::weight_ref(EventKind k) {
  switch (k) {
    case EventKind::TableRead:
      return table_read;
    case EventKind::TableWrite:
      return table_write;
    case EventKind::TracerUpdate:
      return tracer_update;
    case EventKind::DispenserUpdate:
      return dispenser_update;
    case EventKind::CrossModuleSignal:
      return cross_module_signal;
    case EventKind::RegisterWrite:
      return register_write;
    case EventKind::BufferRead:
      return buffer_read;
    default:
      return buffer_write;
  }
}

CostWeights CostWeights::for_storage(TableStorage s) {
  CostWeights w;
  if (s == TableStorage::Memory) {
    w.table_read /= 2.0;
    w.table_write /= 2.0;
  }
  return w;
}

double energy_proxy(const ControlEventCounts& c, const CostWeights& w) {
  double total = 0.0;
  for (int i = 0; i < kEventKindCount; ++i) {
    EventKind k = static_cast<EventKind>(i);
    double wk = w.weight(k);
    if (wk <= 0.0) {
      throw ConfigError(std::string("weights.") + event_kind_name(k) +
                        ": must be positive");
    }
    total += wk * static_cast<double>(c[k]);
  }
  return total;
}

double buffer_share(const ControlEventCounts& c, const CostWeights& w) {
  double total = energy_proxy(c, w);
  if (total <= 0.0) return 0.0;
  double buf = w.buffer_read * static_cast<double>(c[EventKind::BufferRead]) +
               w.buffer_write * static_cast<double>(c[EventKind::BufferWrite]);
  return buf / total;
}

namespace {

double yes_no(bool b) { return b ? 1.0 : 0.0; }

// Nearest-rank percentile over a sorted sample.
double percentile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  std::size_t rank = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(sorted.size())));
  if (rank == 0) rank = 1;
  if (rank > sorted.size()) rank = sorted.size();
  return sorted[rank - 1];
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

MetricsReport finalize(const RunData& d) {
  MetricsReport r;
  r.offered_rate = d.offered_rate;
  r.occupancy_hist = d.occupancy_hist;
  r.active_vc_hist = d.active_vc_hist;
  r.events = d.events;
  r.delivered_packets = d.delivered_packets;
  r.undelivered_measured = d.undelivered_measured;
  r.src_queue_mean_first_half = d.src_queue_mean_first_half;
  r.src_queue_mean_second_half = d.src_queue_mean_second_half;

  std::vector<double> lat = d.latencies;
  std::sort(lat.begin(), lat.end());
  r.has_latency = !lat.empty();
  if (r.has_latency) {
    LatencyStats& s = r.latency;
    s.count = lat.size();
    double sum = 0.0;
    for (double v : lat) sum += v;
    s.avg = sum / static_cast<double>(lat.size());
    s.median = percentile(lat, 0.5);
    s.p99 = percentile(lat, 0.99);
    s.min = lat.front();
    s.max = lat.back();
  }

  r.delivered_flits = d.delivered_flits_in_window;
  if (d.nodes > 0 && d.measure_cycles > 0) {
    r.accepted_tput = static_cast<double>(d.delivered_flits_in_window) /
                      (static_cast<double>(d.nodes) *
                       static_cast<double>(d.measure_cycles));
  }

  r.proxy_total = energy_proxy(d.events, d.weights);
  if (d.delivered_flits_in_window > 0) {
    r.proxy_per_flit =
        r.proxy_total / static_cast<double>(d.delivered_flits_in_window);
  }
  r.buffer_power_share = buffer_share(d.events, d.weights);

  // Superlinear source-queue growth across the measurement halves marks
  // saturation; a stable run keeps both halves near the same mean.
  bool growing = d.src_queue_mean_second_half >
                 2.0 * d.src_queue_mean_first_half + 0.5;
  r.saturated = d.drain_timed_out || growing;
  return r;
}

std::string MetricsReport::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  if (has_latency) {
    j["latency"] = {{"count", latency.count}, {"avg", latency.avg},
                    {"median", latency.median}, {"p99", latency.p99},
                    {"min", latency.min},       {"max", latency.max}};
  } else {
    j["latency"] = nullptr;
  }
  j["no_measured_packets"] = !has_latency;
  j["accepted_tput"] = accepted_tput;
  j["offered_rate"] = offered_rate;
  j["occupancy_hist"] = occupancy_hist;
  j["active_vc_hist"] = active_vc_hist;
  nlohmann::json ev;
  for (int i = 0; i < kEventKindCount; ++i) {
    EventKind k = static_cast<EventKind>(i);
    ev[event_kind_name(k)] = events[k];
  }
  j["events"] = ev;
  j["energy_proxy"] = proxy_total;
  j["proxy_per_flit"] = proxy_per_flit;
  j["buffer_share"] = buffer_power_share;
  j["saturated"] = saturated;
  j["delivered_packets"] = delivered_packets;
  j["delivered_flits"] = delivered_flits;
  j["undelivered_measured"] = undelivered_measured;
  j["src_queue_mean"] = {{"first_half", src_queue_mean_first_half},
                         {"second_half", src_queue_mean_second_half}};
  return j.dump(2);
}

std::string MetricsReport::csv_header() {
  return "rate,accepted_tput,avg_lat,p99_lat,proxy_per_flit,saturated,"
         "median_lat,min_lat,max_lat,delivered_packets,delivered_flits,"
         "buffer_share,src_queue_mean_h1,src_queue_mean_h2,"
         "undelivered_measured,schema_version";
}

std::string MetricsReport::csv_row(double rate) const {
  std::string nan = "nan";
  std::string row = format_double(rate);
  row += "," + format_double(accepted_tput);
  row += "," + (has_latency ? format_double(latency.avg) : nan);
  row += "," + (has_latency ? format_double(latency.p99) : nan);
  row += "," + format_double(proxy_per_flit);
  row += "," + format_double(yes_no(saturated));
  row += "," + (has_latency ? format_double(latency.median) : nan);
  row += "," + (has_latency ? format_double(latency.min) : nan);
  row += "," + (has_latency ? format_double(latency.max) : nan);
  row += "," + std::to_string(delivered_packets);
  row += "," + std::to_string(delivered_flits);
  row += "," + format_double(buffer_power_share);
  row += "," + format_double(src_queue_mean_first_half);
  row += "," + format_double(src_queue_mean_second_half);
  row += "," + std::to_string(undelivered_measured);
  row += ",1";
  return row;
}

}  // namespace nocsim
