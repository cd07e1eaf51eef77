#include "twr/mimo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "twr/error.hpp"

namespace twr {

void MimoInstance::validate() const {
  const int n = users();
  if (pairs < 1 || relay_antennas < 1) throw DimensionError("MimoInstance: need K >= 1, M >= 1");
  const auto sn = static_cast<std::size_t>(n);
  if (user_antennas.size() != sn || channels.size() != sn || user_powers.size() != sn ||
      user_noise.size() != sn || sinr_targets.size() != sn) {
    throw DimensionError("MimoInstance: per-user data have inconsistent lengths");
  }
  if (relay_noise.dim() != relay_antennas) throw DimensionError("MimoInstance: relay noise size");
  for (int i = 0; i < n; ++i) {
    if (user_antennas[i] < 1) throw DimensionError("MimoInstance: M_i must be >= 1");
    if (channels[i].rows() != relay_antennas || channels[i].cols() != user_antennas[i]) {
      throw DimensionError("MimoInstance: H_i must be M x M_i");
    }
    if (user_noise[i].dim() != user_antennas[i]) throw DimensionError("MimoInstance: Lambda_i size");
    if (!(user_powers[i] > 0.0) || !(sinr_targets[i] > 0.0)) {
      throw DomainError("MimoInstance: powers and targets must be > 0");
    }
    if (herm_eig(user_noise[i]).values(user_antennas[i] - 1) < 0.0) {
      throw DomainError("MimoInstance: Lambda_i must be PSD");
    }
  }
  if (herm_eig(relay_noise).values(relay_antennas - 1) < 0.0) {
    throw DomainError("MimoInstance: Lambda_R must be PSD");
  }
  if (!(power_budget > 0.0)) throw DomainError("MimoInstance: relay budget must be > 0");
}

MimoInstance make_mimo_instance(std::vector<CMatrix> channels, double user_power,
                                double relay_budget, double noise, double target) {
  const int n = static_cast<int>(channels.size());
  if (n < 2 || n % 2 != 0) throw DimensionError("make_mimo_instance: need an even user count");
  MimoInstance inst;
  inst.pairs = n / 2;
  inst.relay_antennas = static_cast<int>(channels.front().rows());
  for (const auto& H : channels) {
    const auto mi = static_cast<int>(H.cols());
    inst.user_antennas.push_back(mi);
    inst.user_noise.push_back(HermitianMatrix::identity(mi) * noise);
  }
  inst.channels = std::move(channels);
  inst.user_powers.assign(n, user_power);
  inst.relay_noise = HermitianMatrix::identity(inst.relay_antennas) * noise;
  inst.power_budget = relay_budget;
  inst.sinr_targets.assign(n, target);
  inst.validate();
  return inst;
}

namespace {

void check_state(const BeamformingState& s, const MimoInstance& inst) {
  const int n = inst.users();
  if (s.A.rows() != inst.relay_antennas || s.A.cols() != inst.relay_antennas ||
      static_cast<int>(s.u.size()) != n || static_cast<int>(s.v.size()) != n) {
    throw DimensionError("BeamformingState: dimensions do not match the instance");
  }
  for (int i = 0; i < n; ++i) {
    if (s.u[i].size() != inst.user_antennas[i] || s.v[i].size() != inst.user_antennas[i]) {
      throw DimensionError("BeamformingState: u_i / v_i length");
    }
  }
}

// alpha_{i,j} = H_i^T A H_j u_j
CVector alpha(const BeamformingState& s, const MimoInstance& inst, int i, int j) {
  return inst.channels[i].transpose() * s.A * inst.channels[j] * s.u[j];
}

double relay_noise_power(const CMatrix& A, const HermitianMatrix& noise) {
  return (A * noise.matrix() * A.adjoint()).trace().real();
}

std::vector<Index> block_offsets(const MimoInstance& inst) {
  std::vector<Index> off(inst.users() + 1, 0);
  for (int i = 0; i < inst.users(); ++i) off[i + 1] = off[i] + inst.user_antennas[i];
  return off;
}

}  // namespace

std::vector<double> sinr_mimo(const BeamformingState& state, const MimoInstance& inst) {
  check_state(state, inst);
  const int n = inst.users();
  std::vector<double> out(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const CVector& v = state.v[i];
    if (v.squaredNorm() == 0.0) continue;
    const int j = partner(i, n);
    const double desired = std::norm(v.dot(alpha(state, inst, i, j)));
    double den = inst.user_noise[i].quad(v);
    for (int k = 0; k < n; ++k) {
      if (k != i && k != j) den += std::norm(v.dot(alpha(state, inst, i, k)));
    }
    const CVector g = inst.channels[i].conjugate() * v;
    den += inst.relay_noise.quad(state.A.adjoint() * g);
    out[i] = den > 0.0 ? desired / den : 0.0;
  }
  return out;
}

double min_weighted_sinr(const BeamformingState& state, const MimoInstance& inst) {
  return min_ratio(sinr_mimo(state, inst), inst.sinr_targets);
}

double mimo_relay_power(const BeamformingState& state, const MimoInstance& inst) {
  check_state(state, inst);
  double p = relay_noise_power(state.A, inst.relay_noise);
  for (int i = 0; i < inst.users(); ++i) p += (state.A * inst.channels[i] * state.u[i]).squaredNorm();
  return p;
}

double mimo_weighted_sum_rate(const BeamformingState& state, const MimoInstance& inst,
                              const std::vector<double>& weights) {
  const auto s = sinr_mimo(state, inst);
  if (weights.size() != s.size()) throw DimensionError("mimo_weighted_sum_rate: weight count");
  double r = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) r += 0.5 * weights[i] * std::log2(1.0 + s[i]);
  return r;
}

std::vector<CVector> mmse_combiners(const BeamformingState& state, const MimoInstance& inst) {
  check_state(state, inst);
  const int n = inst.users();
  std::vector<CVector> v(n);
  for (int i = 0; i < n; ++i) {
    const CMatrix Hi_t = inst.channels[i].transpose();
    CMatrix R = inst.user_noise[i].matrix() +
                Hi_t * state.A * inst.relay_noise.matrix() * state.A.adjoint() *
                    inst.channels[i].conjugate();
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const CVector a = alpha(state, inst, i, j);
      R += a * a.adjoint();
    }
    try {
      v[i] = solve_hpd(HermitianMatrix(R), alpha(state, inst, i, partner(i, n)));
    } catch (const DomainError&) {
      throw DomainError("mmse_combiners: R_" + std::to_string(i) + " is singular");
    }
  }
  return v;
}

QuadraticForms mimo_relay_forms(const BeamformingState& state, const MimoInstance& inst) {
  check_state(state, inst);
  std::vector<CVector> tx, rx;
  std::vector<double> offset;
  for (int i = 0; i < inst.users(); ++i) {
    tx.push_back(inst.channels[i] * state.u[i]);
    rx.push_back(inst.channels[i].conjugate() * state.v[i]);
    offset.push_back(inst.user_noise[i].quad(state.v[i]));
  }
  return relay_forms(tx, rx, inst.relay_noise, offset);
}

MaxMinSpec mimo_transmit_spec(const BeamformingState& state, const MimoInstance& inst) {
  check_state(state, inst);
  const int n = inst.users();
  const auto off = block_offsets(inst);
  const Index dim = off[n];

  // beta_{i,j} = H_j^H A^H H_i^* v_i, so |beta_{i,j}^H u_j|^2 is the coupling i <- j.
  auto block = [&](int i, int j) {
    const CVector b = inst.channels[j].adjoint() * state.A.adjoint() *
                      inst.channels[i].conjugate() * state.v[i];
    return embed_block(HermitianMatrix::outer(b), off[j], dim);
  };

  MaxMinSpec spec;
  spec.weights = inst.sinr_targets;
  HermitianMatrix relay = HermitianMatrix::zero(dim);
  for (int j = 0; j < n; ++j) {
    const CMatrix AH = state.A * inst.channels[j];
    relay += embed_block(HermitianMatrix(AH.adjoint() * AH), off[j], dim);
  }
  spec.forms.E0 = relay;
  for (int i = 0; i < n; ++i) {
    const int j = partner(i, n);
    spec.forms.signal.push_back(block(i, j));
    HermitianMatrix interf = HermitianMatrix::zero(dim);
    for (int k = 0; k < n; ++k) {
      if (k != i && k != j) interf += block(i, k);
    }
    spec.forms.interference.push_back(interf);
    const CVector g = inst.channels[i].conjugate() * state.v[i];
    spec.forms.noise.push_back(inst.relay_noise.quad(state.A.adjoint() * g) +
                               inst.user_noise[i].quad(state.v[i]));
  }
  for (int i = 0; i < n; ++i) {
    spec.power.push_back(
        {embed_block(HermitianMatrix::identity(inst.user_antennas[i]), off[i], dim),
         inst.user_powers[i]});
  }
  const double room = inst.power_budget - relay_noise_power(state.A, inst.relay_noise);
  if (!(room > 0.0)) {
    throw NumericalError("mimo_transmit_spec: relay noise alone exhausts the relay budget");
  }
  spec.power.push_back({relay, room});
  spec.start.resize(dim);
  for (int i = 0; i < n; ++i) spec.start.segment(off[i], inst.user_antennas[i]) = state.u[i];
  spec.validate();
  return spec;
}

namespace {

std::vector<CVector> split_blocks(const CVector& x, const MimoInstance& inst) {
  const auto off = block_offsets(inst);
  std::vector<CVector> out;
  for (int i = 0; i < inst.users(); ++i) out.push_back(x.segment(off[i], inst.user_antennas[i]));
  return out;
}

std::string stage_error(const char* stage, const std::exception& e) {
  std::ostringstream msg;
  msg << stage << " stage failed: " << e.what();
  return msg.str();
}

}  // namespace

StageReport relay_subproblem(BeamformingState& state, const MimoInstance& inst,
                             const DinkelbachOptions& options) {
  StageReport rep;
  const double incumbent = min_weighted_sinr(state, inst);
  rep.lambda = incumbent;
  try {
    MaxMinSpec spec = twr_maxmin_spec(mimo_relay_forms(state, inst), inst.sinr_targets,
                                      inst.power_budget);
    DinkelbachOptions opts = options;
    opts.round = true;
    const CVector a0 = vec(state.A);
    if (a0.squaredNorm() > 0.0) opts.initial = HermitianMatrix::outer(a0);
    const auto r = dinkelbach_maxmin(spec, opts);
    rep.rank_one = r.rounded->rank_one;
    BeamformingState trial = state;
    trial.A = unvec(r.rounded->vector, inst.relay_antennas, inst.relay_antennas);
    const double lam = min_weighted_sinr(trial, inst);
    if (lam > incumbent) {
      state.A = trial.A;
      rep.lambda = lam;
      rep.accepted = true;
    }
  } catch (const Error& e) {
    throw SolverError(stage_error("relay", e));
  }
  return rep;
}

StageReport transmit_subproblem(BeamformingState& state, const MimoInstance& inst,
                                const DinkelbachOptions& options) {
  StageReport rep;
  const double incumbent = min_weighted_sinr(state, inst);
  rep.lambda = incumbent;
  try {
    const MaxMinSpec spec = mimo_transmit_spec(state, inst);
    DinkelbachOptions opts = options;
    opts.round = false;
    opts.initial = HermitianMatrix::outer(spec.start);
    const auto r = dinkelbach_maxmin(spec, opts);

    const int n = inst.users();
    const auto off = block_offsets(inst);
    std::vector<CMatrix> roots(n);
    std::vector<double> block_power(n);
    CVector first(spec.dim());
    rep.rank_one = true;
    for (int i = 0; i < n; ++i) {
      const HermitianMatrix Xi(r.X_opt.matrix().block(off[i], off[i], inst.user_antennas[i],
                                                      inst.user_antennas[i]));
      block_power[i] = std::max(Xi.trace(), 0.0);
      const auto eig = herm_eig(Xi);
      const double l1 = std::max(eig.values(0), 0.0);
      first.segment(off[i], inst.user_antennas[i]) = std::sqrt(l1) * eig.vectors.col(0);
      if (eig.values.size() > 1 && l1 > 0.0 &&
          std::max(eig.values(1), 0.0) / l1 > options.rank_one_tol) {
        rep.rank_one = false;
      }
      roots[i] = l1 > 0.0 ? psd_sqrt(Xi).matrix() : CMatrix::Zero(Xi.dim(), Xi.dim());
    }

    const int samples = rep.rank_one ? 0 : std::max(0, options.rounding.samples);
    std::vector<CVector> cand(samples + 1);
    cand[0] = first;
    Rng rng(options.rounding.seed);
    for (int s = 1; s <= samples; ++s) {
      CVector x(spec.dim());
      for (int i = 0; i < n; ++i) {
        CVector w(inst.user_antennas[i]);
        for (Index k = 0; k < w.size(); ++k) w(k) = complex_normal(rng);
        CVector ui = roots[i] * w;
        const double nn = ui.squaredNorm();
        if (nn > 0.0) ui *= std::sqrt(block_power[i] / nn);
        x.segment(off[i], inst.user_antennas[i]) = ui;
      }
      cand[s] = x;
    }
    std::vector<double> value(cand.size(), -std::numeric_limits<double>::infinity());
    auto evaluate = [&](std::size_t s) {
      const double c = max_feasible_scale(cand[s], spec.power);
      if (c > 0.0) {
        cand[s] *= c;
        value[s] = spec.objective(cand[s]);
      }
    };
    if (options.rounding.execution == Execution::Parallel) {
#pragma omp parallel for schedule(static)
      for (int s = 0; s < static_cast<int>(cand.size()); ++s) evaluate(s);
    } else {
      for (std::size_t s = 0; s < cand.size(); ++s) evaluate(s);
    }
    const auto best = static_cast<std::size_t>(
        std::max_element(value.begin(), value.end()) - value.begin());

    BeamformingState trial = state;
    trial.u = split_blocks(cand[best], inst);
    const double lam = min_weighted_sinr(trial, inst);
    if (lam > incumbent) {
      state.u = trial.u;
      rep.lambda = lam;
      rep.accepted = true;
    }
  } catch (const Error& e) {
    throw SolverError(stage_error("transmit", e));
  }
  return rep;
}

BeamformingState initial_state(const MimoInstance& inst) {
  inst.validate();
  const int n = inst.users();
  BeamformingState s;
  double used = inst.relay_noise.trace();
  for (int i = 0; i < n; ++i) {
    Eigen::JacobiSVD<CMatrix> svd(inst.channels[i], Eigen::ComputeFullV);
    s.u.push_back(std::sqrt(inst.user_powers[i]) * svd.matrixV().col(0));
    used += (inst.channels[i] * s.u.back()).squaredNorm();
  }
  const Index M = inst.relay_antennas;
  s.A = std::sqrt(inst.power_budget / used) * CMatrix::Identity(M, M);
  s.v.resize(n);
  for (int i = 0; i < n; ++i) s.v[i] = CVector::Zero(inst.user_antennas[i]);
  s.v = mmse_combiners(s, inst);
  s.lambda_u = min_weighted_sinr(s, inst);
  return s;
}

namespace {

// Weighted-sum-rate variants of the two optimization stages: polyblock over
// the SINR region of the stage, incumbent kept unless the sum-rate improves.
void wsr_relay_stage(BeamformingState& state, const MimoInstance& inst,
                     const AlternateOptions& o, const std::vector<double>& w) {
  MaxMinSpec spec = twr_maxmin_spec(mimo_relay_forms(state, inst), inst.sinr_targets,
                                    inst.power_budget);
  const auto r = maximize_utility(spec, spec_upper_corner(spec), Utility::weighted_sum_rate(w),
                                  o.polyblock, o.dinkelbach);
  BeamformingState trial = state;
  trial.A = unvec(r.beamformer, inst.relay_antennas, inst.relay_antennas);
  if (mimo_weighted_sum_rate(trial, inst, w) > mimo_weighted_sum_rate(state, inst, w)) {
    state.A = trial.A;
  }
}

void wsr_transmit_stage(BeamformingState& state, const MimoInstance& inst,
                        const AlternateOptions& o, const std::vector<double>& w) {
  const MaxMinSpec spec = mimo_transmit_spec(state, inst);
  const auto r = maximize_utility(spec, spec_upper_corner(spec), Utility::weighted_sum_rate(w),
                                  o.polyblock, o.dinkelbach);
  BeamformingState trial = state;
  trial.u = split_blocks(r.beamformer, inst);
  if (mimo_weighted_sum_rate(trial, inst, w) > mimo_weighted_sum_rate(state, inst, w)) {
    state.u = trial.u;
  }
}

}  // namespace

AlternateResult alternate(const MimoInstance& inst, const AlternateOptions& options) {
  if (!(options.epsilon > 0.0)) throw DomainError("alternate: epsilon must be > 0");
  if (options.max_outer < 1) throw DomainError("alternate: max_outer must be >= 1");
  const bool wsr_mode = options.objective == MimoObjective::WeightedSumRate;
  const std::vector<double> w =
      options.weights.empty() ? std::vector<double>(inst.users(), 1.0) : options.weights;

  AlternateResult res;
  res.state = initial_state(inst);
  auto& s = res.state;
  auto tracked = [&]() {
    return wsr_mode ? mimo_weighted_sum_rate(s, inst, w) : min_weighted_sinr(s, inst);
  };
  res.lambda_trace.push_back(min_weighted_sinr(s, inst));
  res.wsr_trace.push_back(mimo_weighted_sum_rate(s, inst, w));
  double prev = tracked();

  for (int n = 0; n < options.max_outer; ++n) {
    const double before = tracked();
    const auto old_v = s.v;
    try {
      s.v = mmse_combiners(s, inst);
    } catch (const Error& e) {
      throw SolverError(stage_error("combiner", e));
    }
    if (tracked() < before) s.v = old_v;

    if (wsr_mode) {
      wsr_relay_stage(s, inst, options, w);
      wsr_transmit_stage(s, inst, options, w);
    } else {
      relay_subproblem(s, inst, options.dinkelbach);
      transmit_subproblem(s, inst, options.dinkelbach);
    }
    s.lambda_u = min_weighted_sinr(s, inst);
    res.lambda_trace.push_back(s.lambda_u);
    res.wsr_trace.push_back(mimo_weighted_sum_rate(s, inst, w));
    ++res.outer_iterations;
    const double now = tracked();
    if (std::abs(now - prev) < options.epsilon) {
      res.converged = true;
      break;
    }
    prev = now;
  }
  return res;
}

}  // namespace twr
