#include "nocsim/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <future>
#include <string>
#include <utility>
#include <vector>

#include "nocsim/errors.hpp"
#include "nocsim/mesh.hpp"
#include "nocsim/traffic.hpp"

namespace nocsim {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void inject_all(Mesh& mesh, Injector& inj, bool measured) {
  const Cycle now = mesh.now();
  for (int y = 0; y < mesh.height(); ++y) {
    for (int x = 0; x < mesh.width(); ++x) {
      if (auto p = inj.maybe_inject(Coord{x, y}, now)) {
        mesh.inject(*p, measured);
      }
    }
  }
}

}  // namespace

RunResult run(const SimConfig& cfg) {
  cfg.validate();

  MeshParams mp;
  mp.width = cfg.mesh_width;
  mp.height = cfg.mesh_height;
  mp.router = cfg.router;
  Mesh mesh(mp);
  Injector inj(cfg.traffic.pattern, cfg.traffic.rate, cfg.traffic.packet_len,
               cfg.router.flit_bits, cfg.sim.seed, cfg.mesh_width,
               cfg.mesh_height);

  RunData data;
  data.nodes = mesh.node_count();
  data.measure_cycles = cfg.sim.measure;
  data.offered_rate = cfg.traffic.rate;
  data.weights = cfg.weights;

  for (Cycle c = 0; c < cfg.sim.warmup; ++c) {
    inject_all(mesh, inj, false);
    mesh.step();
  }

  // Control events, occupancy samples, and queue growth are taken over the
  // measurement window only.
  mesh.set_recording(true);
  const std::uint64_t flits_before = mesh.delivered_flits();
  const Cycle first_half = cfg.sim.measure / 2;
  const Cycle second_half = cfg.sim.measure - first_half;
  double queue_first = 0.0;
  double queue_second = 0.0;
  for (Cycle c = 0; c < cfg.sim.measure; ++c) {
    inject_all(mesh, inj, true);
    mesh.step();
    mesh.sample_histograms(data.occupancy_hist, data.active_vc_hist);
    const double q = mesh.total_source_queue_len() / mesh.node_count();
    (c < first_half ? queue_first : queue_second) += q;
  }
  mesh.set_recording(false);
  data.delivered_flits_in_window = mesh.delivered_flits() - flits_before;
  data.src_queue_mean_first_half =
      first_half > 0 ? queue_first / static_cast<double>(first_half) : 0.0;
  data.src_queue_mean_second_half =
      queue_second / static_cast<double>(second_half);

  // Drain until every measured packet lands; injection keeps running so the
  // congestion the window saw is not artificially relieved.
  Cycle drained = 0;
  while (!mesh.all_measured_delivered() && drained < cfg.sim.drain_limit) {
    inject_all(mesh, inj, false);
    mesh.step();
    ++drained;
  }
  data.drain_timed_out = !mesh.all_measured_delivered();

  for (const PacketInfo& p : mesh.packets()) {
    if (!p.measured) continue;
    if (p.deliver >= 0) {
      data.latencies.push_back(static_cast<double>(p.deliver - p.inject));
      ++data.delivered_packets;
    } else {
      ++data.undelivered_measured;
    }
  }
  data.events = mesh.merged_counts();

  RunResult result;
  result.config = cfg;
  result.report = finalize(data);
  result.delivery_log_text.reserve(mesh.delivery_log().size() * 24);
  for (const DeliveryRecord& d : mesh.delivery_log()) {
    result.delivery_log_text += std::to_string(d.id);
    result.delivery_log_text += ' ';
    result.delivery_log_text += std::to_string(d.inject);
    result.delivery_log_text += ' ';
    result.delivery_log_text += std::to_string(d.deliver);
    result.delivery_log_text += '\n';
  }
  return result;
}

namespace {

// Runs one config per entry, at most `threads` in flight, results in input
// order so worker count never changes the output.
std::vector<RunResult> run_all(const std::vector<SimConfig>& configs,
                               int threads) {
  std::vector<RunResult> results(configs.size());
  if (threads <= 1) {
    for (std::size_t i = 0; i < configs.size(); ++i) results[i] = run(configs[i]);
    return results;
  }
  std::size_t next = 0;
  while (next < configs.size()) {
    const std::size_t batch =
        std::min<std::size_t>(threads, configs.size() - next);
    std::vector<std::future<RunResult>> inflight;
    inflight.reserve(batch);
    for (std::size_t i = 0; i < batch; ++i) {
      const SimConfig& c = configs[next + i];
      inflight.push_back(
          std::async(std::launch::async, [&c]() { return run(c); }));
    }
    for (std::size_t i = 0; i < batch; ++i) {
      results[next + i] = inflight[i].get();
    }
    next += batch;
  }
  return results;
}

}  // namespace

std::string sweep_csv(const SimConfig& cfg, const std::vector<double>& rates,
                      int threads) {
  if (rates.empty()) throw ConfigError("sweep: no rates given");
  std::vector<SimConfig> configs;
  configs.reserve(rates.size());
  for (double r : rates) {
    SimConfig c = cfg;
    c.traffic.rate = r;
    c.validate();
    configs.push_back(std::move(c));
  }
  std::vector<RunResult> results = run_all(configs, threads);
  std::string out = MetricsReport::csv_header() + "\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    out += results[i].report.csv_row(rates[i]);
    out += '\n';
  }
  return out;
}

namespace {

struct CompareMetric {
  const char* name;
  double a;
  double b;
  bool has_a;
  bool has_b;
};

std::string delta_pct(double a, double b) {
  if (a == 0.0) return "";
  return format_double((b - a) / a * 100.0);
}

}  // namespace

std::string compare_csv(const SimConfig& cfg, const std::string& axis,
                        int threads) {
  SimConfig a = cfg;
  SimConfig b = cfg;
  std::string name_a;
  std::string name_b;
  if (axis == "control_layout") {
    a.router.layout = ControlLayout::Proposed;
    b.router.layout = ControlLayout::ViCharBaseline;
    name_a = layout_name(a.router.layout);
    name_b = layout_name(b.router.layout);
  } else if (axis == "buffer_mode") {
    a.router.buffer_mode = BufferMode::Dynamic;
    b.router.buffer_mode = BufferMode::Static;
    name_a = buffer_mode_name(a.router.buffer_mode);
    name_b = buffer_mode_name(b.router.buffer_mode);
  } else if (axis == "table_storage") {
    a.table_storage = TableStorage::Register;
    a.weights = CostWeights::for_storage(a.table_storage);
    b.table_storage = TableStorage::Memory;
    b.weights = CostWeights::for_storage(b.table_storage);
    name_a = storage_name(a.table_storage);
    name_b = storage_name(b.table_storage);
  } else {
    throw ConfigError(
        "compare: unknown axis \"" + axis +
        "\" (expected control_layout, buffer_mode, or table_storage)");
  }
  a.validate();
  b.validate();

  std::vector<RunResult> results = run_all({a, b}, threads);
  const MetricsReport& ra = results[0].report;
  const MetricsReport& rb = results[1].report;

  const CompareMetric metrics[] = {
      {"rate", ra.offered_rate, rb.offered_rate, true, true},
      {"accepted_tput", ra.accepted_tput, rb.accepted_tput, true, true},
      {"avg_lat", ra.latency.avg, rb.latency.avg, ra.has_latency, rb.has_latency},
      {"median_lat", ra.latency.median, rb.latency.median, ra.has_latency,
       rb.has_latency},
      {"p99_lat", ra.latency.p99, rb.latency.p99, ra.has_latency, rb.has_latency},
      {"proxy_total", ra.proxy_total, rb.proxy_total, true, true},
      {"proxy_per_flit", ra.proxy_per_flit, rb.proxy_per_flit, true, true},
      {"buffer_share", ra.buffer_power_share, rb.buffer_power_share, true, true},
      {"saturated", ra.saturated ? 1.0 : 0.0, rb.saturated ? 1.0 : 0.0, true,
       true},
      {"delivered_packets", static_cast<double>(ra.delivered_packets),
       static_cast<double>(rb.delivered_packets), true, true},
      {"delivered_flits", static_cast<double>(ra.delivered_flits),
       static_cast<double>(rb.delivered_flits), true, true},
  };

  std::string out = "metric," + name_a + "," + name_b + ",delta_pct\n";
  for (const CompareMetric& m : metrics) {
    out += m.name;
    out += ',';
    out += m.has_a ? format_double(m.a) : "nan";
    out += ',';
    out += m.has_b ? format_double(m.b) : "nan";
    out += ',';
    if (m.has_a && m.has_b) out += delta_pct(m.a, m.b);
    out += '\n';
  }
  if (axis == "control_layout") {
    const bool match =
        results[0].delivery_log_text == results[1].delivery_log_text;
    const char* flag = match ? "1" : "0";
    out += std::string("delivery_logs_match,") + flag + "," + flag + ",\n";
  }
  return out;
}

int env_thread_count() {
  const char* env = std::getenv("NOCSIM_THREADS");
  if (!env || *env == '\0') return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 1) return 1;
  return static_cast<int>(std::min<long>(v, 64));
}

}  // namespace nocsim
