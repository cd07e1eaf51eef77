#pragma once

// Seeded Monte-Carlo harness. Each trial draws one channel realization that
// every scheme and SNR point shares, so scheme comparisons are paired.
// Conventions: p_i = p, N0 = 1, SNR = p / N0
// and the relay budget equals p.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace twr {

enum class RunMode { MaxMin, PowerMin, Wsr, Utility, Collab, Mimo, Sweep };

const char* to_string(RunMode m);
std::optional<RunMode> parse_run_mode(const std::string& s);

struct RunConfig {
  RunMode mode = RunMode::Wsr;
  int pairs = 1;
  int antennas = 2;
  std::vector<int> user_antennas;  // mimo; empty means 2 per user
  std::vector<double> snr_db = {10.0};
  int trials = 100;
  std::uint64_t seed = 1;
  double epsilon = 0.01;  // polyblock accuracy; alternation stall tolerance in mimo mode
  double tol = 1e-2;      // Dinkelbach stop tolerance and bisection accuracy
  double sdp_tol = 1e-8;
  int max_projections = 60;
  int rounding_samples = 200;
  std::vector<double> weights;  // empty means all ones
  std::vector<double> targets;  // empty means all ones
  std::vector<std::string> schemes;  // empty means the mode's default list
  std::string utility = "wsr";  // utility mode: wsr, mse, ser-bpsk, ser-qpsk
  bool parallel = true;         // trials across OpenMP threads
  bool timing = false;          // runtime_ms column; zero when off so output is reproducible

  int users() const { return 2 * pairs; }
  /// Throws DomainError / DimensionError with a readable message.
  void validate() const;
  std::vector<std::string> resolved_schemes() const;
  std::vector<double> resolved_weights() const;
  std::vector<double> resolved_targets() const;
};

/// Schemes accepted by a mode.
std::vector<std::string> available_schemes(RunMode mode);

struct ResultRecord {
  int trial = 0;
  double snr_db = 0.0;
  std::string scheme;
  std::string metric;
  double value = 0.0;
  int iterations = 0;
  double runtime_ms = 0.0;
  int rank1_accepted = -1;               // -1: not applicable
  std::optional<double> relaxation_gap;  // upper bound minus feasible value
};

struct TraceRow {
  int trial = 0;
  double snr_db = 0.0;
  std::string algorithm;  // dinkelbach, polyblock, alternating
  int iteration = 0;
  double value = 0.0;
  std::optional<double> bound;
};

struct RunFailure {
  int trial = 0;
  double snr_db = 0.0;
  std::string scheme;
  std::string message;
};

struct RunOutput {
  std::vector<ResultRecord> records;
  std::vector<TraceRow> trace;
  std::vector<RunFailure> failures;
  int capped_polyblocks = 0;  // polyblock runs stopped by the projection cap
};

inline constexpr const char* kCsvSchema = "# twr-results v1";

/// Runs every (trial, snr, scheme); rows come out in (trial, snr, scheme)
/// order regardless of thread scheduling. Solver failures are collected and
/// the run continues.
RunOutput run(const RunConfig& config, bool collect_trace = false);

void write_csv(std::ostream& os, const std::vector<ResultRecord>& records);
void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace);
/// Mean value per (snr, scheme, metric), failures and capped runs.
void write_summary(std::ostream& os, const RunConfig& config, const RunOutput& out);

/// Per-iteration traces only (lambda for Dinkelbach, CBV/UB for the
/// polyblock, lambda_u for the alternation).
std::vector<TraceRow> convergence_trace(const RunConfig& config);

/// Per-trial channel seed shared by all schemes and SNR points.
std::uint64_t trial_seed(std::uint64_t base, int trial);

}  // namespace twr
