#pragma once

// Max-min fractional programs over the lifted variable X:
//
//   max_X  min_i  num_i(X) / (w_i * den_i(X))
//   s.t.   tr(P_m X) <= b_m,  X PSD
//
// with num_i = tr(E1_i X) (Sinr mode) or tr((E1_i + E2_i) X) + sigma_i^2
// (OnePlusSinr mode) and den_i = tr(E2_i X) + sigma_i^2. Solved by the
// Dinkelbach-type iteration on parametric SDPs, plus the SINR-constrained
// power minimization and the two bisection equivalences between them.

#include <optional>
#include <vector>

#include "twr/model.hpp"
#include "twr/sdp.hpp"

namespace twr {

enum class RatioMode { Sinr, OnePlusSinr };

struct MaxMinSpec {
  QuadraticForms forms;
  std::vector<double> weights;  // gamma_i, or z_i for projections
  RatioMode mode = RatioMode::Sinr;
  std::vector<PowerConstraint> power;
  CVector start;  // direction of the initial point; empty -> all-ones

  int users() const { return forms.users(); }
  Index dim() const { return forms.dim(); }
  void validate() const;

  HermitianMatrix numerator_form(int i) const;
  double numerator_offset(int i) const;
  double ratio(int i, const HermitianMatrix& X) const;
  double ratio(int i, const CVector& a) const;
  /// min_i ratio_i
  double objective(const HermitianMatrix& X) const;
  double objective(const CVector& a) const;
  bool feasible(const HermitianMatrix& X, double rel_tol = 1e-6) const;
};

/// Single relay-power constraint tr(E0 X) <= budget, start at A = I.
MaxMinSpec twr_maxmin_spec(const QuadraticForms& forms, const std::vector<double>& targets,
                           double budget);

/// max tau s.t. [tr((N_i - lambda w_i E2_i) X) + n_i - lambda w_i sigma_i^2] / s_i >= tau,
/// power constraints, X PSD. Posed as a minimization of -tau with tau as
/// the only free scalar. `row_scale` holds s_i > 0; empty means all ones.
SdpProblem parametric_sdp(const MaxMinSpec& spec, double lambda,
                          const std::vector<double>& row_scale = {});

struct RoundedSolution {
  CVector vector;
  double objective = 0.0;  // min_i ratio_i at the rounded point
  bool rank_one = false;
  double eig_ratio = 0.0;
};

struct DinkelbachOptions {
  // Stop once the parametric value shows lambda is within stop_tol (1 + lambda)
  // of the optimum (normalized), or tau <= stop_tol (1 + lambda) max_i w_i sigma_i^2.
  double stop_tol = 1e-6;
  // Divide user i's parametric term by w_i den_i(X) at the previous iterate.
  // This makes the step invariant to per-user scaling of the forms; the plain
  // subtractive form converges linearly and can stall on badly scaled forms.
  bool normalize = true;
  int max_iter = 50;
  SdpOptions sdp;
  std::optional<HermitianMatrix> initial;  // must be feasible
  bool round = true;
  double rank_one_tol = 1e-6;
  RoundingOptions rounding;
};

struct DinkelbachResult {
  double lambda_opt = 0.0;
  HermitianMatrix X_opt;
  int iterations = 0;  // parametric SDPs solved
  std::vector<double> lambda_trace;
  double final_parametric = 0.0;
  std::optional<RoundedSolution> rounded;
};

DinkelbachResult dinkelbach_maxmin(const MaxMinSpec& spec, const DinkelbachOptions& options = {});

/// Rank-one extraction followed by Gaussian rounding when the extraction is
/// rejected. The result meets every power constraint of the spec.
RoundedSolution round_solution(const MaxMinSpec& spec, const HermitianMatrix& X,
                               double rank_one_tol, const RoundingOptions& options);

struct PowerMinResult {
  SdpStatus status = SdpStatus::NumericalError;
  double power = 0.0;
  HermitianMatrix X;
  int iterations = 0;
};

/// min tr(E0 X) s.t. tr(E1_i X) >= lambda gamma_i (tr(E2_i X) + sigma_i^2).
PowerMinResult power_min(const QuadraticForms& forms, const std::vector<double>& targets,
                         double lambda = 1.0, const SdpOptions& options = {});

struct BisectionResult {
  double value = 0.0;
  int iterations = 0;  // SDP/Dinkelbach solves used by the search
  std::vector<double> lower_trace;
  std::vector<double> upper_trace;
};

/// SINR-ratio upper bound min_i budget * lambda_max(E1_i, E0) / (gamma_i sigma_i^2).
double lambda_upper_bound(const QuadraticForms& forms, const std::vector<double>& targets,
                          double budget);

/// Bisection over lambda until P_R(lambda) meets the budget;
/// stops when (hi - lo) <= bisect_tol * max(hi, 1e-12).
BisectionResult maxmin_via_powermin(const QuadraticForms& forms,
                                    const std::vector<double>& targets, double budget,
                                    double bisect_tol, const SdpOptions& options = {});

/// Bisection over the budget until the max-min value equals 1.
BisectionResult powermin_via_maxmin(const QuadraticForms& forms,
                                    const std::vector<double>& targets, double bisect_tol,
                                    const DinkelbachOptions& options = {});

}  // namespace twr
