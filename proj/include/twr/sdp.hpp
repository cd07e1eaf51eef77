#pragma once

// Dense complex semidefinite programming.
//
//   minimize    <C, X> + sum_k c_k t_k
//   subject to  <A_j, X> + sum_k a_jk t_k  (<=, >=, =)  b_j
//               X Hermitian PSD (n x n), t_k free scalars
//
// <A, X> = Re tr(A X). Solved by an infeasible-start primal-dual
// path-following method working directly in complex arithmetic:
// HKM search direction, Mehrotra predictor-corrector, inequality slacks
// carried as a nonnegative orthant block, free scalars eliminated from the
// Schur complement. Infeasibility and unboundedness are reported when the
// diverging iterates yield a Farkas-type certificate.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "twr/numkernel.hpp"

namespace twr {

enum class Sense { LessEqual, GreaterEqual, Equal };

enum class SdpStatus { Optimal, Infeasible, Unbounded, MaxIter, NumericalError };

const char* to_string(SdpStatus s);

struct SdpConstraint {
  HermitianMatrix lhs;
  std::vector<double> scalar_coeffs;  // empty means all zero
  Sense sense = Sense::Equal;
  double rhs = 0.0;
};

struct SdpProblem {
  Index dim = 0;
  HermitianMatrix objective;
  std::vector<double> scalar_objective;  // one entry per free scalar
  std::vector<SdpConstraint> constraints;

  int scalars() const { return static_cast<int>(scalar_objective.size()); }
  void validate() const;
};

struct SdpOptions {
  double tol = 1e-7;
  int max_iter = 100;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::NumericalError;
  HermitianMatrix X;
  std::vector<double> scalars;
  std::vector<double> duals;  // y_j; Z = C - sum_j y_j A_j
  HermitianMatrix dual_slack;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  // Relative gap max(|p - d|, <X, Z>) / (1 + |p| + |d|), measured on the
  // internally normalized problem (rows scaled to unit norm, objective to
  // norm <= 1) so that it does not depend on the units of the data.
  double gap = 0.0;
  double primal_residual = 0.0;  // max_j violation_j / (1 + |b_j|), original units
  double dual_residual = 0.0;    // normalized problem
  double accuracy = 0.0;         // max of the normalized residuals and gap

  int iterations = 0;

  bool optimal() const { return status == SdpStatus::Optimal; }
};

SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& options = {});

/// <A_j, X> + a_j^T t for the given point.
double constraint_value(const SdpConstraint& c, const HermitianMatrix& X,
                        const std::vector<double>& scalars);

/// Plain-text dump for cross-checking against external solvers:
///
///   twr-sdp 1
///   dim <n> constraints <m> scalars <q>
///   objective
///   <n lines of n "re,im" pairs>
///   scalar_objective <c_1 ... c_q>
///   constraint <j> <le|ge|eq> <b_j> scalars <a_j1 ... a_jq>
///   <n lines of n "re,im" pairs>
///   ...
void write_sdp(std::ostream& os, const SdpProblem& problem);

// ---------------------------------------------------------------------------
// Rank-one recovery

struct RankOneExtraction {
  CVector vector;     // sqrt(lambda_1) v_1
  bool accepted = false;
  double ratio = 0.0;  // lambda_2 / lambda_1
};

/// Throws DomainError if X is zero.
RankOneExtraction extract_rank_one(const HermitianMatrix& X, double ratio_tol = 1e-6);

struct PowerConstraint {
  HermitianMatrix form;
  double budget = 0.0;
};

enum class Execution { Serial, Parallel };

struct RoundingOptions {
  int samples = 200;
  std::uint64_t seed = 1;
  Execution execution = Execution::Parallel;
};

struct RoundingResult {
  CVector vector;
  double objective = 0.0;
  int best_candidate = 0;  // 0 is the principal eigenvector
};

/// Largest c >= 0 such that every constraint holds for c * a. Returns 0 if a
/// carries no power in any constraint's range and +inf never occurs because
/// at least one form must be positive definite on a.
double max_feasible_scale(const CVector& a, const std::vector<PowerConstraint>& constraints);

/// Gaussian randomized rounding: candidate 0 is the principal eigenvector,
/// the remaining ones are drawn from CN(0, X). Each candidate is scaled so
/// that the tightest power constraint holds with equality, and the candidate
/// with the largest objective is returned (ties go to the lower index).
/// `objective` must be safe to call concurrently.
RoundingResult gaussian_rounding(const HermitianMatrix& X,
                                 const std::function<double(const CVector&)>& objective,
                                 const std::vector<PowerConstraint>& constraints,
                                 const RoundingOptions& options = {});

}  // namespace twr
