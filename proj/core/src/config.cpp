#include "nocsim/config.hpp"

#include <initializer_list>
#include <string>

#include "json.hpp"
#include "nocsim/errors.hpp"

namespace nocsim {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw ConfigError("config: " + what); }

void check_keys(const json& j, const char* where,
                std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) bad(std::string("unknown key \"") + key + "\" in " + where);
  }
}

const json* find(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

void read_int(const json& j, const char* where, const char* key, int& out) {
  if (const json* v = find(j, key)) {
    if (!v->is_number_integer()) bad(std::string(where) + "." + key + " must be an integer");
    out = v->get<int>();
  }
}

void read_cycle(const json& j, const char* where, const char* key, Cycle& out) {
  if (const json* v = find(j, key)) {
    if (!v->is_number_integer()) bad(std::string(where) + "." + key + " must be an integer");
    out = v->get<Cycle>();
  }
}

void read_u64(const json& j, const char* where, const char* key, std::uint64_t& out) {
  if (const json* v = find(j, key)) {
    if (!v->is_number_integer() && !v->is_number_unsigned()) {
      bad(std::string(where) + "." + key + " must be an integer");
    }
    out = v->get<std::uint64_t>();
  }
}

void read_double(const json& j, const char* where, const char* key, double& out) {
  if (const json* v = find(j, key)) {
    if (!v->is_number()) bad(std::string(where) + "." + key + " must be a number");
    out = v->get<double>();
  }
}

std::string read_string(const json& j, const char* where, const char* key,
                        const std::string& fallback) {
  if (const json* v = find(j, key)) {
    if (!v->is_string()) bad(std::string(where) + "." + key + " must be a string");
    return v->get<std::string>();
  }
  return fallback;
}

TrafficPatternKind parse_pattern(const std::string& s) {
  if (s == "uniform") return TrafficPatternKind::UniformRandom;
  if (s == "transpose") return TrafficPatternKind::Transpose;
  if (s == "bit_complement") return TrafficPatternKind::BitComplement;
  if (s == "hotspot") return TrafficPatternKind::Hotspot;
  bad("unknown traffic pattern \"" + s +
      "\" (expected uniform, transpose, bit_complement, or hotspot)");
}

BufferMode parse_buffer_mode(const std::string& s) {
  if (s == "dynamic") return BufferMode::Dynamic;
  if (s == "static") return BufferMode::Static;
  bad("unknown buffer mode \"" + s + "\" (expected dynamic or static)");
}

ControlLayout parse_layout(const std::string& s) {
  if (s == "proposed") return ControlLayout::Proposed;
  if (s == "vichar_baseline") return ControlLayout::ViCharBaseline;
  bad("unknown control layout \"" + s +
      "\" (expected proposed or vichar_baseline)");
}

TableStorage parse_storage(const std::string& s) {
  if (s == "register") return TableStorage::Register;
  if (s == "memory") return TableStorage::Memory;
  bad("unknown table storage \"" + s + "\" (expected register or memory)");
}

bool power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

}  // namespace

void SimConfig::validate() const {
  if (mesh_width < 1 || mesh_height < 1 || mesh_width * mesh_height < 2) {
    bad("mesh must have at least two nodes");
  }
  if (!power_of_two(router.num_slots) || router.num_slots < 4 ||
      router.num_slots > 64) {
    bad("router.num_slots must be a power of two in 4..64");
  }
  if (!flit_width_valid(router.flit_bits)) {
    bad("router.flit_bits must be 16, 32, 64, or 128");
  }
  if (router.buffer_mode == BufferMode::Static) {
    if (router.static_vcs < 1 || router.static_depth < 1 ||
        router.static_vcs * router.static_depth != router.num_slots) {
      bad("router.static_vcs * router.static_depth must equal router.num_slots");
    }
  }
  if (traffic.rate < 0.0 || traffic.rate > 1.0) {
    bad("traffic.rate must be in [0, 1] flits per node per cycle");
  }
  if (traffic.packet_len < 2) bad("traffic.packet_len must be at least 2");
  if (traffic.pattern.kind == TrafficPatternKind::Hotspot) {
    if (traffic.pattern.hotspot.x < 0 ||
        traffic.pattern.hotspot.x >= mesh_width ||
        traffic.pattern.hotspot.y < 0 ||
        traffic.pattern.hotspot.y >= mesh_height) {
      bad("traffic.hotspot must name a mesh node");
    }
    if (traffic.pattern.fraction < 0.0 || traffic.pattern.fraction > 1.0) {
      bad("traffic.hotspot.fraction must be in [0, 1]");
    }
  }
  if (sim.warmup < 0) bad("sim.warmup must be non-negative");
  if (sim.measure < 1) bad("sim.measure must be positive");
  if (sim.drain_limit < 0) bad("sim.drain_limit must be non-negative");
  for (int k = 0; k < kEventKindCount; ++k) {
    if (weights.weight(static_cast<EventKind>(k)) <= 0.0) {
      bad(std::string("weights.") + event_kind_name(static_cast<EventKind>(k)) +
          " must be positive");
    }
  }
}

std::string SimConfig::to_json_text() const {
  json j;
  j["mesh"] = {{"width", mesh_width}, {"height", mesh_height}};
  j["router"] = {{"num_slots", router.num_slots},
                 {"buffer_mode", buffer_mode_name(router.buffer_mode)},
                 {"static_vcs", router.static_vcs},
                 {"static_depth", router.static_depth},
                 {"layout", layout_name(router.layout)},
                 {"flit_bits", router.flit_bits}};
  j["table_storage"] = storage_name(table_storage);
  json t;
  t["pattern"] = pattern_name(traffic.pattern.kind);
  if (traffic.pattern.kind == TrafficPatternKind::Hotspot) {
    t["hotspot"] = {{"x", traffic.pattern.hotspot.x},
                    {"y", traffic.pattern.hotspot.y},
                    {"fraction", traffic.pattern.fraction}};
  }
  t["rate"] = traffic.rate;
  t["packet_len"] = traffic.packet_len;
  j["traffic"] = std::move(t);
  j["sim"] = {{"seed", sim.seed},
              {"warmup", sim.warmup},
              {"measure", sim.measure},
              {"drain_limit", sim.drain_limit}};
  json w;
  for (int k = 0; k < kEventKindCount; ++k) {
    const EventKind kind = static_cast<EventKind>(k);
    w[event_kind_name(kind)] = weights.weight(kind);
  }
  j["weights"] = std::move(w);
  return j.dump(2) + "\n";
}

SimConfig SimConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    bad(std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) bad("top level must be an object");
  check_keys(j, "the top level",
             {"mesh", "router", "table_storage", "traffic", "sim", "weights"});

  SimConfig cfg;
  if (const json* m = find(j, "mesh")) {
    if (!m->is_object()) bad("mesh must be an object");
    check_keys(*m, "mesh", {"width", "height"});
    read_int(*m, "mesh", "width", cfg.mesh_width);
    read_int(*m, "mesh", "height", cfg.mesh_height);
  }
  if (const json* r = find(j, "router")) {
    if (!r->is_object()) bad("router must be an object");
    check_keys(*r, "router",
               {"num_slots", "buffer_mode", "static_vcs", "static_depth",
                "layout", "flit_bits"});
    read_int(*r, "router", "num_slots", cfg.router.num_slots);
    cfg.router.buffer_mode = parse_buffer_mode(
        read_string(*r, "router", "buffer_mode", buffer_mode_name(cfg.router.buffer_mode)));
    read_int(*r, "router", "static_vcs", cfg.router.static_vcs);
    read_int(*r, "router", "static_depth", cfg.router.static_depth);
    cfg.router.layout =
        parse_layout(read_string(*r, "router", "layout", layout_name(cfg.router.layout)));
    read_int(*r, "router", "flit_bits", cfg.router.flit_bits);
  }
  cfg.table_storage =
      parse_storage(read_string(j, "the top level", "table_storage",
                                storage_name(cfg.table_storage)));
  cfg.weights = CostWeights::for_storage(cfg.table_storage);
  if (const json* t = find(j, "traffic")) {
    if (!t->is_object()) bad("traffic must be an object");
    check_keys(*t, "traffic", {"pattern", "hotspot", "rate", "packet_len"});
    cfg.traffic.pattern.kind = parse_pattern(
        read_string(*t, "traffic", "pattern", pattern_name(cfg.traffic.pattern.kind)));
    if (const json* h = find(*t, "hotspot")) {
      if (!h->is_object()) bad("traffic.hotspot must be an object");
      check_keys(*h, "traffic.hotspot", {"x", "y", "fraction"});
      read_int(*h, "traffic.hotspot", "x", cfg.traffic.pattern.hotspot.x);
      read_int(*h, "traffic.hotspot", "y", cfg.traffic.pattern.hotspot.y);
      read_double(*h, "traffic.hotspot", "fraction", cfg.traffic.pattern.fraction);
    }
    read_double(*t, "traffic", "rate", cfg.traffic.rate);
    read_int(*t, "traffic", "packet_len", cfg.traffic.packet_len);
  }
  if (const json* s = find(j, "sim")) {
    if (!s->is_object()) bad("sim must be an object");
    check_keys(*s, "sim", {"seed", "warmup", "measure", "drain_limit"});
    read_u64(*s, "sim", "seed", cfg.sim.seed);
    read_cycle(*s, "sim", "warmup", cfg.sim.warmup);
    read_cycle(*s, "sim", "measure", cfg.sim.measure);
    read_cycle(*s, "sim", "drain_limit", cfg.sim.drain_limit);
  }
  if (const json* w = find(j, "weights")) {
    if (!w->is_object()) bad("weights must be an object");
    check_keys(*w, "weights",
               {"table_read", "table_write", "tracer_update", "dispenser_update",
                "cross_module_signal", "register_write", "buffer_read",
                "buffer_write"});
    for (int k = 0; k < kEventKindCount; ++k) {
      const EventKind kind = static_cast<EventKind>(k);
      read_double(*w, "weights", event_kind_name(kind),
                  cfg.weights.weight_ref(kind));
    }
  }
  cfg.validate();
  return cfg;
}

void apply_overrides(SimConfig& cfg, const ConfigOverrides& o) {
  if (o.rate) cfg.traffic.rate = *o.rate;
  if (o.seed) cfg.sim.seed = *o.seed;
  if (o.pattern) cfg.traffic.pattern.kind = parse_pattern(*o.pattern);
  if (o.hotspot_x) cfg.traffic.pattern.hotspot.x = *o.hotspot_x;
  if (o.hotspot_y) cfg.traffic.pattern.hotspot.y = *o.hotspot_y;
  if (o.hotspot_fraction) cfg.traffic.pattern.fraction = *o.hotspot_fraction;
  if (o.packet_len) cfg.traffic.packet_len = *o.packet_len;
  if (o.mesh_width) cfg.mesh_width = *o.mesh_width;
  if (o.mesh_height) cfg.mesh_height = *o.mesh_height;
  if (o.num_slots) cfg.router.num_slots = *o.num_slots;
  if (o.flit_bits) cfg.router.flit_bits = *o.flit_bits;
  if (o.buffer_mode) cfg.router.buffer_mode = parse_buffer_mode(*o.buffer_mode);
  if (o.static_vcs) cfg.router.static_vcs = *o.static_vcs;
  if (o.static_depth) cfg.router.static_depth = *o.static_depth;
  if (o.layout) cfg.router.layout = parse_layout(*o.layout);
  if (o.table_storage) {
    cfg.table_storage = parse_storage(*o.table_storage);
    // Switching the storage preset on the command line re-derives the
    // weights; file-level weight overrides do not survive the switch.
    cfg.weights = CostWeights::for_storage(cfg.table_storage);
  }
  if (o.warmup) cfg.sim.warmup = *o.warmup;
  if (o.measure) cfg.sim.measure = *o.measure;
  if (o.drain_limit) cfg.sim.drain_limit = *o.drain_limit;
  cfg.validate();
}

const char* pattern_name(TrafficPatternKind k) {
  switch (k) {
    case TrafficPatternKind::UniformRandom:
      return "uniform";
    case TrafficPatternKind::Transpose:
      return "transpose";
    case TrafficPatternKind::BitComplement:
      return "bit_complement";
    case TrafficPatternKind::Hotspot:
      return "hotspot";
  }
  return "unknown";
}

const char* layout_name(ControlLayout l) {
  return l == ControlLayout::Proposed ? "proposed" : "vichar_baseline";
}

const char* storage_name(TableStorage s) {
  return s == TableStorage::Register ? "register" : "memory";
}

const char* buffer_mode_name(BufferMode m) {
  return m == BufferMode::Dynamic ? "dynamic" : "static";
}

}  // namespace nocsim
