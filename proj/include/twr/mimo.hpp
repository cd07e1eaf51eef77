#pragma once

// Multi-pair MIMO two-way relaying. User i has M_i antennas, transmits one
// stream through precoder u_i and combines with v_i:
//
//   SINR_i = |v_i^H H_i^T A H_j u_j|^2 /
//            (sum_{k != i,j} |v_i^H H_i^T A H_k u_k|^2
//             + ||Lambda_R^{1/2} A^H H_i^* v_i||^2 + ||Lambda_i^{1/2} v_i||^2)
//
// with j the partner of i. The joint max-min problem is handled by
// alternating over combiners, relay matrix and precoders.

#include <string>
#include <vector>

#include "twr/fractional.hpp"
#include "twr/monotonic.hpp"

namespace twr {

struct MimoInstance {
  int pairs = 0;
  int relay_antennas = 0;
  std::vector<int> user_antennas;           // M_i
  std::vector<CMatrix> channels;            // H_i, M x M_i
  std::vector<double> user_powers;          // p_i
  std::vector<HermitianMatrix> user_noise;  // Lambda_i, M_i x M_i
  HermitianMatrix relay_noise;              // Lambda_R
  double power_budget = 0.0;
  std::vector<double> sinr_targets;

  int users() const { return 2 * pairs; }
  void validate() const;
};

/// p_i = user_power, identity noises scaled by `noise`.
MimoInstance make_mimo_instance(std::vector<CMatrix> channels, double user_power,
                                double relay_budget, double noise, double target = 1.0);

struct BeamformingState {
  CMatrix A;
  std::vector<CVector> u;
  std::vector<CVector> v;
  double lambda_u = 0.0;
};

/// Per-user SINR; a zero combiner gives SINR 0.
std::vector<double> sinr_mimo(const BeamformingState& state, const MimoInstance& inst);

/// min_i SINR_i / gamma_i
double min_weighted_sinr(const BeamformingState& state, const MimoInstance& inst);

/// sum_i ||A H_i u_i||^2 + tr(A Lambda_R A^H)
double mimo_relay_power(const BeamformingState& state, const MimoInstance& inst);

/// v_i = R_i^{-1} alpha_{i,j}. Throws DomainError if some R_i is singular.
std::vector<CVector> mmse_combiners(const BeamformingState& state, const MimoInstance& inst);

/// Relay forms for fixed u, v: tx_j = H_j u_j, rx_i = H_i^* v_i, offsets ||Lambda_i^{1/2} v_i||^2.
QuadraticForms mimo_relay_forms(const BeamformingState& state, const MimoInstance& inst);

/// Block-diagonal forms over X = blkdiag(X_1, ..., X_2K) for fixed A, v.
/// Power constraints: tr(X_i) <= p_i for each user and the relay budget
/// sum_i tr(H_i^H A^H A H_i X_i) <= P - tr(A Lambda_R A^H).
MaxMinSpec mimo_transmit_spec(const BeamformingState& state, const MimoInstance& inst);

struct StageReport {
  double lambda = 0.0;  // min weighted SINR after the stage
  bool accepted = false;  // false if the incumbent was kept
  bool rank_one = false;
};

/// Max-min relay step; returns the improved A or keeps the incumbent.
StageReport relay_subproblem(BeamformingState& state, const MimoInstance& inst,
                             const DinkelbachOptions& options = {});

/// Max-min precoder step; per-block rounding, incumbent kept if not better.
StageReport transmit_subproblem(BeamformingState& state, const MimoInstance& inst,
                                const DinkelbachOptions& options = {});

/// u_i = sqrt(p_i) times the dominant right singular vector of H_i, A a
/// scaled identity meeting the relay budget, v from MMSE.
BeamformingState initial_state(const MimoInstance& inst);

enum class MimoObjective { MaxMin, WeightedSumRate };

struct AlternateOptions {
  double epsilon = 1e-3;
  int max_outer = 30;
  MimoObjective objective = MimoObjective::MaxMin;
  std::vector<double> weights;  // for WeightedSumRate; empty means all ones
  DinkelbachOptions dinkelbach;
  PolyblockOptions polyblock;
};

struct AlternateResult {
  BeamformingState state;
  std::vector<double> lambda_trace;  // lambda_u after each outer iteration (entry 0: initial)
  std::vector<double> wsr_trace;     // weighted sum-rate after each outer iteration
  int outer_iterations = 0;
  bool converged = false;
};

/// Weighted sum of 0.5 log2(1 + SINR_i).
double mimo_weighted_sum_rate(const BeamformingState& state, const MimoInstance& inst,
                              const std::vector<double>& weights);

AlternateResult alternate(const MimoInstance& inst, const AlternateOptions& options = {});

}  // namespace twr
