// Command-line front end: run one simulation, sweep injection rates, or
// compare two configurations along one axis.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nocsim/errors.hpp"
#include "nocsim/experiment.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  nocsim::ConfigOverrides ov;
  int threads = nocsim::env_thread_count();
  std::string out_path;
};

void add_common_options(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--config", a.config_path, "JSON configuration file");
  cmd->add_option("--out", a.out_path, "Write output here instead of stdout");
  cmd->add_option("--threads", a.threads, "Worker threads for parallel runs")
      ->check(CLI::Range(1, 64));

  cmd->add_option("--rate", a.ov.rate, "Offered load, flits per node per cycle");
  cmd->add_option("--seed", a.ov.seed, "Traffic seed");
  cmd->add_option("--pattern", a.ov.pattern,
                  "Traffic pattern: uniform|transpose|bit_complement|hotspot");
  cmd->add_option("--hotspot-x", a.ov.hotspot_x, "Hotspot node x");
  cmd->add_option("--hotspot-y", a.ov.hotspot_y, "Hotspot node y");
  cmd->add_option("--hotspot-fraction", a.ov.hotspot_fraction,
                  "Fraction of traffic aimed at the hotspot");
  cmd->add_option("--packet-len", a.ov.packet_len, "Flits per packet");
  cmd->add_option("--width", a.ov.mesh_width, "Mesh width");
  cmd->add_option("--height", a.ov.mesh_height, "Mesh height");
  cmd->add_option("--slots", a.ov.num_slots, "Buffer slots per input port");
  cmd->add_option("--flit-bits", a.ov.flit_bits, "Flit width: 16|32|64|128");
  cmd->add_option("--buffer-mode", a.ov.buffer_mode,
                  "Buffer organization: dynamic|static");
  cmd->add_option("--vcs", a.ov.static_vcs, "Static mode: VCs per port");
  cmd->add_option("--vc-depth", a.ov.static_depth, "Static mode: slots per VC");
  cmd->add_option("--layout", a.ov.layout,
                  "Control layout: proposed|vichar_baseline");
  cmd->add_option("--table-storage", a.ov.table_storage,
                  "Table cost preset: register|memory");
  cmd->add_option("--warmup", a.ov.warmup, "Warmup cycles");
  cmd->add_option("--measure", a.ov.measure, "Measurement cycles");
  cmd->add_option("--drain-limit", a.ov.drain_limit, "Drain cycle budget");
}

nocsim::SimConfig load_config(const CommonArgs& a) {
  nocsim::SimConfig cfg;
  if (!a.config_path.empty()) {
    std::ifstream f(a.config_path);
    if (!f) {
      throw nocsim::ConfigError("cannot open config file " + a.config_path);
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    cfg = nocsim::SimConfig::from_json_text(ss.str());
  }
  nocsim::apply_overrides(cfg, a.ov);
  return cfg;
}

void emit(const CommonArgs& a, const std::string& text) {
  if (a.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(a.out_path);
  if (!f) throw nocsim::ConfigError("cannot write to " + a.out_path);
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Cycle-accurate 2D-mesh NoC simulator with a table-driven shared-buffer "
      "router and a control-event energy proxy"};
  app.require_subcommand(1);

  CommonArgs run_args;
  bool print_config = false;
  std::string delivery_log_path;
  CLI::App* run_cmd = app.add_subcommand("run", "Run one simulation, emit JSON metrics");
  add_common_options(run_cmd, run_args);
  run_cmd->add_flag("--print-config", print_config,
                    "Print the effective configuration and exit");
  run_cmd->add_option("--delivery-log", delivery_log_path,
                      "Also write the per-packet delivery log here");

  CommonArgs sweep_args;
  std::vector<double> rates{0.05, 0.1, 0.15, 0.2, 0.25,
                            0.3,  0.35, 0.4, 0.45, 0.5};
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Run one simulation per rate, emit CSV");
  add_common_options(sweep_cmd, sweep_args);
  sweep_cmd->add_option("--rates", rates, "Rates to sweep")
      ->delimiter(',')
      ->expected(-1);

  CommonArgs cmp_args;
  std::string axis = "control_layout";
  CLI::App* cmp_cmd = app.add_subcommand(
      "compare", "Run a matched-seed pair along one axis, emit CSV");
  add_common_options(cmp_cmd, cmp_args);
  cmp_cmd->add_option("--axis", axis,
                      "control_layout|buffer_mode|table_storage");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      nocsim::SimConfig cfg = load_config(run_args);
      if (print_config) {
        emit(run_args, cfg.to_json_text());
        return 0;
      }
      nocsim::RunResult r = nocsim::run(cfg);
      if (!delivery_log_path.empty()) {
        std::ofstream f(delivery_log_path);
        if (!f) {
          throw nocsim::ConfigError("cannot write to " + delivery_log_path);
        }
        f << r.delivery_log_text;
      }
      emit(run_args, r.report.to_json() + "\n");
    } else if (sweep_cmd->parsed()) {
      nocsim::SimConfig cfg = load_config(sweep_args);
      emit(sweep_args, nocsim::sweep_csv(cfg, rates, sweep_args.threads));
    } else if (cmp_cmd->parsed()) {
      nocsim::SimConfig cfg = load_config(cmp_args);
      emit(cmp_args, nocsim::compare_csv(cfg, axis, cmp_args.threads));
    }
  } catch (const nocsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const nocsim::ProtocolViolation& e) {
    std::cerr << "protocol violation: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
