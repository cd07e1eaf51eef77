#include "twr/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "twr/baselines.hpp"
#include "twr/collaborative.hpp"
#include "twr/error.hpp"
#include "twr/fractional.hpp"
#include "twr/mimo.hpp"
#include "twr/monotonic.hpp"

namespace twr {

const char* to_string(RunMode m) {
  switch (m) {
    case RunMode::MaxMin: return "maxmin";
    case RunMode::PowerMin: return "powermin";
    case RunMode::Wsr: return "wsr";
    case RunMode::Utility: return "utility";
    case RunMode::Collab: return "collab";
    case RunMode::Mimo: return "mimo";
    case RunMode::Sweep: return "sweep";
  }
  return "unknown";
}

std::optional<RunMode> parse_run_mode(const std::string& s) {
  for (auto m : {RunMode::MaxMin, RunMode::PowerMin, RunMode::Wsr, RunMode::Utility,
                 RunMode::Collab, RunMode::Mimo, RunMode::Sweep}) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

std::vector<std::string> available_schemes(RunMode mode) {
  switch (mode) {
    case RunMode::MaxMin:
      return {"maxmin", "bisection", "identity", "antenna-selection", "zf", "mmse"};
    case RunMode::PowerMin:
      return {"powermin", "bisection"};
    case RunMode::Wsr:
    case RunMode::Utility:
    case RunMode::Sweep:
      return {"proposed-mp", "maxmin", "identity", "antenna-selection", "zf", "mmse"};
    case RunMode::Collab:
      return {"proposed-mp", "collab-total", "collab-individual"};
    case RunMode::Mimo:
      return {"mimo-maxmin", "mimo-init", "mimo-wsr"};
  }
  return {};
}

namespace {

bool needs_full_rank(const std::string& s) { return s == "zf" || s == "mmse"; }

Utility make_utility(const std::string& name, const std::vector<double>& w) {
  if (name == "wsr") return Utility::weighted_sum_rate(w);
  if (name == "mse") return Utility::neg_weighted_sum_mse(w);
  if (name == "ser-bpsk") return Utility::neg_weighted_sum_ser(w, Modulation::Bpsk);
  if (name == "ser-qpsk") return Utility::neg_weighted_sum_ser(w, Modulation::Qpsk);
  throw DomainError("unknown utility '" + name + "' (wsr, mse, ser-bpsk, ser-qpsk)");
}

std::string metric_name(const RunConfig& c) {
  switch (c.mode) {
    case RunMode::MaxMin: return "min_sinr_ratio";
    case RunMode::PowerMin: return "relay_power";
    case RunMode::Utility: return c.utility == "wsr" ? "wsr" : "utility_" + c.utility;
    default: return "wsr";
  }
}

}  // namespace

void RunConfig::validate() const {
  if (pairs < 1) throw DomainError("pairs must be >= 1");
  if (antennas < 1) throw DomainError("antennas must be >= 1");
  if (trials < 1) throw DomainError("trials must be >= 1");
  if (snr_db.empty()) throw DomainError("snr-db list must not be empty");
  if (!(epsilon > 0.0) || !(tol > 0.0) || !(sdp_tol > 0.0)) {
    throw DomainError("eps, tol and sdp-tol must be > 0");
  }
  if (max_projections < 1) throw DomainError("max-projections must be >= 1");
  if (rounding_samples < 0) throw DomainError("rounding-samples must be >= 0");
  const auto n = static_cast<std::size_t>(users());
  if (!weights.empty() && weights.size() != n) {
    throw DimensionError("weights needs " + std::to_string(n) + " entries");
  }
  if (!targets.empty() && targets.size() != n) {
    throw DimensionError("targets needs " + std::to_string(n) + " entries");
  }
  for (double w : weights) {
    if (!(w > 0.0)) throw DomainError("weights must be > 0");
  }
  for (double g : targets) {
    if (!(g > 0.0)) throw DomainError("targets must be > 0");
  }
  if (!user_antennas.empty() && user_antennas.size() != n) {
    throw DimensionError("user-antennas needs " + std::to_string(n) + " entries");
  }
  for (int m : user_antennas) {
    if (m < 1) throw DomainError("user-antennas entries must be >= 1");
  }
  if (mode == RunMode::Utility) make_utility(utility, resolved_weights());
  const auto known = available_schemes(mode);
  for (const auto& s : schemes) {
    if (std::find(known.begin(), known.end(), s) == known.end()) {
      throw DomainError("scheme '" + s + "' is not available in mode " + to_string(mode));
    }
    if (needs_full_rank(s) && antennas < users()) {
      throw DomainError("scheme '" + s + "' needs at least 2K relay antennas");
    }
  }
}

std::vector<std::string> RunConfig::resolved_schemes() const {
  if (!schemes.empty()) return schemes;
  std::vector<std::string> out;
  for (const auto& s : available_schemes(mode)) {
    if (needs_full_rank(s) && antennas < users()) continue;
    if (s == "mimo-wsr") continue;
    out.push_back(s);
  }
  return out;
}

std::vector<double> RunConfig::resolved_weights() const {
  return weights.empty() ? std::vector<double>(users(), 1.0) : weights;
}

std::vector<double> RunConfig::resolved_targets() const {
  return targets.empty() ? std::vector<double>(users(), 1.0) : targets;
}

std::uint64_t trial_seed(std::uint64_t base, int trial) {
  return base * 1000003ULL + static_cast<std::uint64_t>(trial) * 7919ULL + 1ULL;
}

namespace {

using Clock = std::chrono::steady_clock;

struct JobOutput {
  std::vector<ResultRecord> records;
  std::vector<TraceRow> trace;
  std::vector<RunFailure> failures;
  int capped = 0;
};

class TrialRunner {
 public:
  TrialRunner(const RunConfig& cfg, int trial, double snr_db, bool collect_trace)
      : cfg_(cfg), trial_(trial), snr_(snr_db), collect_(collect_trace) {
    p_ = std::pow(10.0, snr_db / 10.0);
    seed_ = trial_seed(cfg.seed, trial);
    weights_ = cfg.resolved_weights();
    targets_ = cfg.resolved_targets();
    dopts_.stop_tol = cfg.tol;
    dopts_.sdp.tol = cfg.sdp_tol;
    dopts_.rounding.samples = cfg.rounding_samples;
    dopts_.rounding.seed = seed_;
    dopts_.rounding.execution = cfg.parallel ? Execution::Serial : Execution::Parallel;
    popts_.epsilon = cfg.epsilon;
    popts_.max_projections = cfg.max_projections;
  }

  JobOutput run() {
    if (cfg_.mode == RunMode::Mimo) {
      mimo_ = make_mimo_instance(
          generate_channels(seed_, cfg_.pairs, cfg_.antennas, user_antennas()), p_, p_, 1.0);
      mimo_.sinr_targets = targets_;
    } else {
      inst_ = make_symmetric_instance(generate_channels(seed_, cfg_.pairs, cfg_.antennas), p_,
                                      p_, 1.0);
      inst_.sinr_targets = targets_;
      forms_ = build_forms(inst_);
    }
    for (const auto& scheme : cfg_.resolved_schemes()) {
      const auto t0 = Clock::now();
      try {
        auto recs = dispatch(scheme);
        const double ms =
            cfg_.timing ? std::chrono::duration<double, std::milli>(Clock::now() - t0).count()
                        : 0.0;
        for (auto& r : recs) {
          r.trial = trial_;
          r.snr_db = snr_;
          r.scheme = scheme;
          r.runtime_ms = ms;
          out_.records.push_back(std::move(r));
        }
      } catch (const std::exception& e) {
        out_.failures.push_back({trial_, snr_, scheme, e.what()});
      }
    }
    return std::move(out_);
  }

 private:
  std::vector<int> user_antennas() const {
    return cfg_.user_antennas.empty() ? std::vector<int>(cfg_.users(), 2) : cfg_.user_antennas;
  }

  Utility utility() const {
    return make_utility(cfg_.mode == RunMode::Utility ? cfg_.utility : "wsr", weights_);
  }

  double utility_of_sinr(const std::vector<double>& s) const {
    RVector z(static_cast<Index>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i) z(static_cast<Index>(i)) = 1.0 + s[i];
    return utility()(z);
  }

  void add_trace(const char* algo, int it, double value, std::optional<double> bound = {}) {
    if (collect_) out_.trace.push_back({trial_, snr_, algo, it, value, bound});
  }

  ResultRecord record(double value, int iterations = 0, int rank1 = -1,
                      std::optional<double> gap = {}) const {
    ResultRecord r;
    r.metric = metric_name(cfg_);
    r.value = value;
    r.iterations = iterations;
    r.rank1_accepted = rank1;
    r.relaxation_gap = gap;
    return r;
  }

  MaxMinSpec relay_spec() const { return twr_maxmin_spec(forms_, targets_, inst_.power_budget); }

  std::vector<ResultRecord> dispatch(const std::string& s) {
    if (auto kind = parse_baseline(s)) return baseline(*kind);
    if (s == "maxmin") return maxmin();
    if (s == "bisection") return cfg_.mode == RunMode::PowerMin ? bisection_power() : bisection_maxmin();
    if (s == "powermin") return powermin();
    if (s == "proposed-mp") return proposed();
    if (s == "collab-total") return collab(CollabBudget::Total);
    if (s == "collab-individual") return collab(CollabBudget::Individual);
    if (s == "mimo-maxmin") return mimo(MimoObjective::MaxMin);
    if (s == "mimo-wsr") return mimo(MimoObjective::WeightedSumRate);
    if (s == "mimo-init") return mimo_init();
    throw DomainError("unknown scheme '" + s + "'");
  }

  std::vector<ResultRecord> baseline(BaselineKind kind) {
    const CMatrix A = baseline_beamformer(kind, inst_);
    const auto s = sinr_of_A(inst_, A);
    const double v = cfg_.mode == RunMode::MaxMin ? min_ratio(s, targets_) : utility_of_sinr(s);
    return {record(v, 0, 1)};
  }

  std::vector<ResultRecord> maxmin() {
    const auto r = dinkelbach_maxmin(relay_spec(), dopts_);
    for (std::size_t k = 0; k < r.lambda_trace.size(); ++k) {
      add_trace("dinkelbach", static_cast<int>(k), r.lambda_trace[k]);
    }
    const auto& rs = *r.rounded;
    if (cfg_.mode == RunMode::MaxMin) {
      return {record(rs.objective, r.iterations, rs.rank_one, r.lambda_opt - rs.objective)};
    }
    return {record(utility_of_sinr(forms_.sinr(rs.vector)), r.iterations, rs.rank_one)};
  }

  std::vector<ResultRecord> bisection_maxmin() {
    const auto r = maxmin_via_powermin(forms_, targets_, inst_.power_budget, cfg_.tol, dopts_.sdp);
    return {record(r.value, r.iterations)};
  }

  std::vector<ResultRecord> powermin() {
    const auto r = power_min(forms_, targets_, 1.0, dopts_.sdp);
    if (r.status != SdpStatus::Optimal) {
      throw SolverError(std::string("power minimization: ") + to_string(r.status));
    }
    const auto ext = extract_rank_one(r.X, dopts_.rank_one_tol);
    return {record(r.power, r.iterations, ext.accepted)};
  }

  std::vector<ResultRecord> bisection_power() {
    const auto r = powermin_via_maxmin(forms_, targets_, cfg_.tol, dopts_);
    return {record(r.value, r.iterations)};
  }

  // Boundary points of simple feasible schemes give the polyblock an early
  // incumbent: projecting along their ray can only improve on them.
  std::vector<RVector> seed_rays() const {
    std::vector<RVector> rays{RVector::Ones(inst_.users())};
    for (auto kind : {BaselineKind::ScaledIdentity, BaselineKind::AntennaSelection,
                      BaselineKind::ZeroForcing, BaselineKind::MmseRelay}) {
      if ((kind == BaselineKind::ZeroForcing || kind == BaselineKind::MmseRelay) &&
          inst_.relay_antennas < inst_.users()) {
        continue;
      }
      const auto s = sinr_of_A(inst_, baseline_beamformer(kind, inst_));
      RVector z(inst_.users());
      for (int i = 0; i < inst_.users(); ++i) z(i) = 1.0 + s[i];
      rays.push_back(z);
    }
    return rays;
  }

  std::vector<ResultRecord> from_utility(const UtilityResult& r) {
    if (r.polyblock.status != PolyblockStatus::Converged) ++out_.capped;
    for (const auto& row : r.polyblock.trace) {
      add_trace("polyblock", row.iteration, row.cbv, row.upper_bound);
    }
    return {record(r.feasible_value, r.polyblock.projections, r.rank_one,
                   r.polyblock.upper_bound - r.feasible_value)};
  }

  std::vector<ResultRecord> proposed() {
    const MaxMinSpec spec = relay_spec();
    const RVector corner = tight_initial_vertex(inst_).cwiseMin(spec_upper_corner(spec));
    PolyblockOptions o = popts_;
    o.seed_rays = seed_rays();
    return from_utility(maximize_utility(spec, corner, utility(), o, dopts_));
  }

  std::vector<ResultRecord> collab(CollabBudget budget) {
    const CollabInstance ci = make_collab_instance(inst_.channels, p_, inst_.power_budget, 1.0);
    PolyblockOptions o = popts_;
    o.seed_rays = {RVector::Ones(inst_.users())};
    return from_utility(collab_utility_maximize(ci, utility(), budget, o, dopts_));
  }

  std::vector<ResultRecord> mimo_rows(const BeamformingState& s, int iterations) {
    ResultRecord a = record(min_weighted_sinr(s, mimo_), iterations);
    a.metric = "min_sinr_ratio";
    ResultRecord b = record(mimo_weighted_sum_rate(s, mimo_, weights_), iterations);
    b.metric = "wsr";
    return {a, b};
  }

  std::vector<ResultRecord> mimo(MimoObjective objective) {
    AlternateOptions o;
    o.epsilon = cfg_.epsilon;
    o.objective = objective;
    o.weights = weights_;
    o.dinkelbach = dopts_;
    o.polyblock = popts_;
    const auto r = alternate(mimo_, o);
    for (std::size_t k = 0; k < r.lambda_trace.size(); ++k) {
      add_trace("alternating", static_cast<int>(k),
                objective == MimoObjective::MaxMin ? r.lambda_trace[k] : r.wsr_trace[k]);
    }
    return mimo_rows(r.state, r.outer_iterations);
  }

  std::vector<ResultRecord> mimo_init() { return mimo_rows(initial_state(mimo_), 0); }

  const RunConfig& cfg_;
  int trial_;
  double snr_;
  bool collect_;
  double p_ = 1.0;
  std::uint64_t seed_ = 0;
  std::vector<double> weights_, targets_;
  DinkelbachOptions dopts_;
  PolyblockOptions popts_;
  SystemInstance inst_;
  QuadraticForms forms_;
  MimoInstance mimo_;
  JobOutput out_;
};

}  // namespace

RunOutput run(const RunConfig& config, bool collect_trace) {
  config.validate();
  const int nsnr = static_cast<int>(config.snr_db.size());
  const int jobs = config.trials * nsnr;
  std::vector<JobOutput> results(jobs);
  auto work = [&](int j) {
    TrialRunner runner(config, j / nsnr, config.snr_db[j % nsnr], collect_trace);
    results[j] = runner.run();
  };
  if (config.parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int j = 0; j < jobs; ++j) work(j);
  } else {
    for (int j = 0; j < jobs; ++j) work(j);
  }
  RunOutput out;
  for (auto& r : results) {
    out.records.insert(out.records.end(), r.records.begin(), r.records.end());
    out.trace.insert(out.trace.end(), r.trace.begin(), r.trace.end());
    out.failures.insert(out.failures.end(), r.failures.begin(), r.failures.end());
    out.capped_polyblocks += r.capped;
  }
  return out;
}

std::vector<TraceRow> convergence_trace(const RunConfig& config) {
  return run(config, true).trace;
}

void write_csv(std::ostream& os, const std::vector<ResultRecord>& records) {
  os << kCsvSchema << '\n'
     << "trial,snr_db,scheme,metric,value,iterations,runtime_ms,rank1_accepted,relaxation_gap\n";
  std::ostringstream line;
  line << std::setprecision(12);
  for (const auto& r : records) {
    line.str("");
    line << r.trial << ',' << r.snr_db << ',' << r.scheme << ',' << r.metric << ',' << r.value
         << ',' << r.iterations << ',' << r.runtime_ms << ',';
    if (r.rank1_accepted >= 0) line << r.rank1_accepted;
    line << ',';
    if (r.relaxation_gap) line << *r.relaxation_gap;
    os << line.str() << '\n';
  }
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace) {
  os << "# twr-trace v1\n"
     << "trial,snr_db,algorithm,iteration,value,bound\n";
  std::ostringstream line;
  line << std::setprecision(12);
  for (const auto& t : trace) {
    line.str("");
    line << t.trial << ',' << t.snr_db << ',' << t.algorithm << ',' << t.iteration << ','
         << t.value << ',';
    if (t.bound) line << *t.bound;
    os << line.str() << '\n';
  }
}

void write_summary(std::ostream& os, const RunConfig& config, const RunOutput& out) {
  struct Acc {
    double sum = 0.0;
    int n = 0;
  };
  std::map<std::tuple<double, std::string, std::string>, Acc> acc;
  std::vector<std::tuple<double, std::string, std::string>> order;
  for (const auto& r : out.records) {
    auto key = std::make_tuple(r.snr_db, r.scheme, r.metric);
    if (!acc.count(key)) order.push_back(key);
    acc[key].sum += r.value;
    acc[key].n += 1;
  }
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    return std::get<0>(a) < std::get<0>(b);
  });
  os << "mode " << to_string(config.mode) << ", K=" << config.pairs << ", M=" << config.antennas
     << ", trials=" << config.trials << ", seed=" << config.seed << '\n';
  os << std::left << std::setw(10) << "snr_db" << std::setw(20) << "scheme" << std::setw(16)
     << "metric" << std::setw(14) << "mean" << "n\n";
  os << std::setprecision(6);
  for (const auto& k : order) {
    const auto& a = acc[k];
    os << std::left << std::setw(10) << std::get<0>(k) << std::setw(20) << std::get<1>(k)
       << std::setw(16) << std::get<2>(k) << std::setw(14) << a.sum / a.n << a.n << '\n';
  }
  if (out.capped_polyblocks > 0) {
    os << out.capped_polyblocks << " polyblock run(s) stopped at the projection cap\n";
  }
  os << out.failures.size() << " failure(s)\n";
}

}  // namespace twr
