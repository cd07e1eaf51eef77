// Command-line front end for the Monte-Carlo harness.
//
//   twr_cli wsr --pairs 2 --antennas 4 --snr-db 0,10,20 --trials 100 --out wsr.csv
//   twr_cli --config run.cfg
//
// A config file holds flat key=value lines using the long flag names
// (e.g. "snr-db = 0,10,20"); flags given on the command line win.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "twr/bench.hpp"
#include "twr/error.hpp"

int main(int argc, char** argv) {
  twr::RunConfig cfg;
  std::string mode_name;
  std::string out_path;
  std::string trace_path;
  bool serial = false;

  CLI::App app{"Two-way relay beamforming experiments"};
  app.set_config("--config", "", "Read key=value settings from a file");
  app.require_subcommand(0, 1);
  app.fallthrough();

  app.add_option("--mode", mode_name, "Mode when no subcommand is given");
  app.add_option("--pairs", cfg.pairs, "Number of user pairs K");
  app.add_option("--antennas", cfg.antennas, "Relay antennas M (relays in collab mode)");
  app.add_option("--user-antennas", cfg.user_antennas, "Per-user antennas M_i (mimo)")
      ->delimiter(',');
  app.add_option("--snr-db", cfg.snr_db, "SNR grid in dB")->delimiter(',');
  app.add_option("--trials", cfg.trials, "Monte-Carlo trials");
  app.add_option("--seed", cfg.seed, "Base seed");
  app.add_option("--eps", cfg.epsilon, "Polyblock accuracy / alternation tolerance");
  app.add_option("--tol", cfg.tol, "Dinkelbach stop tolerance / bisection accuracy");
  app.add_option("--sdp-tol", cfg.sdp_tol, "Interior-point tolerance");
  app.add_option("--max-projections", cfg.max_projections, "Polyblock projection cap");
  app.add_option("--rounding-samples", cfg.rounding_samples, "Gaussian rounding samples");
  app.add_option("--weights", cfg.weights, "Utility weights w_i")->delimiter(',');
  app.add_option("--targets", cfg.targets, "SINR targets gamma_i")->delimiter(',');
  app.add_option("--schemes", cfg.schemes, "Schemes to run")->delimiter(',');
  app.add_option("--utility", cfg.utility, "wsr, mse, ser-bpsk or ser-qpsk");
  app.add_option("--out", out_path, "Result CSV (default: stdout)");
  app.add_option("--trace-out", trace_path, "Per-iteration trace CSV");
  app.add_flag("--serial", serial, "Run trials on one thread");
  app.add_flag("--timing", cfg.timing, "Fill the runtime_ms column");

  for (auto m : {twr::RunMode::MaxMin, twr::RunMode::PowerMin, twr::RunMode::Wsr,
                 twr::RunMode::Utility, twr::RunMode::Collab, twr::RunMode::Mimo,
                 twr::RunMode::Sweep}) {
    app.add_subcommand(twr::to_string(m), std::string(twr::to_string(m)) + " experiment");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (!app.get_subcommands().empty()) mode_name = app.get_subcommands().front()->get_name();
  if (mode_name.empty()) {
    std::cerr << "error: choose a mode (subcommand or --mode)\n" << app.help();
    return 2;
  }
  const auto mode = twr::parse_run_mode(mode_name);
  if (!mode) {
    std::cerr << "error: unknown mode '" << mode_name << "'\n";
    return 2;
  }
  cfg.mode = *mode;
  cfg.parallel = !serial;
  if (cfg.mode == twr::RunMode::Sweep && app.count("--snr-db") == 0 &&
      app.get_option("--snr-db")->empty()) {
    cfg.snr_db = {0.0, 5.0, 10.0, 15.0, 20.0};
  }

  try {
    cfg.validate();
  } catch (const twr::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  twr::RunOutput out;
  try {
    out = twr::run(cfg, !trace_path.empty());
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << '\n';
    return 1;
  }
  for (const auto& f : out.failures) {
    std::cerr << "trial " << f.trial << " snr " << f.snr_db << " " << f.scheme << ": "
              << f.message << '\n';
  }

  if (out_path.empty()) {
    twr::write_csv(std::cout, out.records);
  } else {
    std::ofstream os(out_path);
    if (!os) {
      std::cerr << "error: cannot write " << out_path << '\n';
      return 1;
    }
    twr::write_csv(os, out.records);
  }
  if (!trace_path.empty()) {
    std::ofstream os(trace_path);
    if (!os) {
      std::cerr << "error: cannot write " << trace_path << '\n';
      return 1;
    }
    twr::write_trace_csv(os, out.trace);
  }
  twr::write_summary(out_path.empty() ? std::cerr : std::cout, cfg, out);
  return 0;
}
