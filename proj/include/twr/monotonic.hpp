#pragma once

// Polyblock outer approximation for maximizing an increasing utility over a
// normal set G intersected with H = {z : z_i >= 1}. For relay beamforming G
// is the region of achievable (1 + SINR_i) vectors, and projecting a vertex
// onto its upper boundary is an extended max-min SINR problem.

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "twr/fractional.hpp"

namespace twr {

enum class Modulation { Bpsk, Qpsk };

/// Gaussian tail probability Q(x) = 0.5 erfc(x / sqrt(2)).
double q_function(double x);

/// Symbol error rate at the given SINR: Q(sqrt(c * sinr)) with c = 2 for
/// BPSK and c = 1 for QPSK (per-quadrature approximation).
double symbol_error_rate(double sinr, Modulation mod);

class Utility {
 public:
  enum class Kind { WeightedSumRate, NegWeightedSumMse, NegWeightedSumSer, Custom };

  /// sum_i 0.5 w_i log2(z_i)
  static Utility weighted_sum_rate(std::vector<double> weights);
  /// -sum_i w_i / z_i, i.e. minus the weighted sum of 1 / (1 + SINR_i)
  static Utility neg_weighted_sum_mse(std::vector<double> weights);
  /// -sum_i w_i SER(z_i - 1)
  static Utility neg_weighted_sum_ser(std::vector<double> weights, Modulation mod);
  /// Any evaluator increasing in every coordinate on z > 1.
  static Utility custom(std::function<double(const RVector&)> fn, int dims);

  Kind kind() const { return kind_; }
  int dims() const { return dims_; }
  const std::vector<double>& weights() const { return weights_; }

  /// Throws DomainError if some z_i < 1 or the length is wrong.
  double operator()(const RVector& z) const;

 private:
  Utility() = default;
  void check_monotone() const;

  Kind kind_ = Kind::WeightedSumRate;
  int dims_ = 0;
  std::vector<double> weights_;
  Modulation mod_ = Modulation::Qpsk;
  std::function<double(const RVector&)> fn_;
};

/// Result of projecting z onto the upper boundary of G.
struct Projection {
  double lambda = 0.0;  // y = lambda z
  RVector y;
  std::shared_ptr<const HermitianMatrix> X;  // lifted point achieving y, if any
};

/// A normal set accessed only through its upper corner and its projection.
class NormalSet {
 public:
  virtual ~NormalSet() = default;
  virtual int dims() const = 0;
  /// A point dominating every z in G intersected with H.
  virtual RVector upper_corner() const = 0;
  /// `warm` is the projection of the vertex that generated z, when known.
  virtual Projection project(const RVector& z, const Projection* warm) = 0;
};

/// G = {z >= 0 : inside(z)} for a monotone membership predicate; projection
/// by bisection on the ray. Used for synthetic regions with known optima.
class PredicateSet : public NormalSet {
 public:
  PredicateSet(int dims, RVector corner, std::function<bool(const RVector&)> inside,
               double tol = 1e-12);
  int dims() const override { return dims_; }
  RVector upper_corner() const override { return corner_; }
  Projection project(const RVector& z, const Projection* warm) override;

 private:
  int dims_;
  RVector corner_;
  std::function<bool(const RVector&)> inside_;
  double tol_;
};

/// Achievable (1 + SINR) region of a relay described by a max-min spec in
/// Sinr mode; each projection runs the Dinkelbach solver in OnePlusSinr mode
/// with weights z, warm-started from the parent vertex's solution.
class SinrRegion : public NormalSet {
 public:
  SinrRegion(MaxMinSpec spec, RVector corner, DinkelbachOptions options = {});
  int dims() const override { return spec_.users(); }
  RVector upper_corner() const override { return corner_; }
  Projection project(const RVector& z, const Projection* warm) override;

  const MaxMinSpec& spec() const { return spec_; }
  int dinkelbach_iterations() const { return dinkelbach_iterations_; }

 private:
  MaxMinSpec spec_;
  RVector corner_;
  DinkelbachOptions options_;
  int dinkelbach_iterations_ = 0;
};

/// Upper corner from the relay-power budget:
///   d_i = 1 + p_j P ||h_i||^2 ||h_j||^2 / (sigma_i^2 lambda_min(Lambda_R))
/// with j the partner of i (infinite if Lambda_R is singular).
RVector initial_vertex(const SystemInstance& inst);

/// Componentwise min of initial_vertex and 1 + P ||h_i||^2 / sigma_i^2, the
/// Cauchy-Schwarz bound from p_j ||A h_j||^2 <= P.
RVector tight_initial_vertex(const SystemInstance& inst);

/// Upper corner valid for any spec: 1 + c * lambda_max(E1_i, S) / sigma_i^2
/// with S = sum_m P_m / b_m and c the number of power constraints.
RVector spec_upper_corner(const MaxMinSpec& spec);

struct Vertex {
  RVector z;
  double phi = 0.0;
  std::shared_ptr<const Projection> parent;  // warm start for the projection
};

/// Children z - (z_i - y_i) e_i for every i with a strict decrease.
std::vector<RVector> children(const RVector& z, const RVector& y, double min_step = 1e-9);

/// Componentwise a <= b.
bool dominated(const RVector& a, const RVector& b);

/// Drops every candidate that is dominated by a member of `set` or by another
/// candidate (duplicates keep the first occurrence).
std::vector<RVector> proper_filter(const std::vector<RVector>& candidates,
                                   const std::vector<RVector>& set);

enum class PolyblockStatus { Converged, VertexCap, ProjectionCap };

const char* to_string(PolyblockStatus s);

struct PolyblockTraceRow {
  int iteration = 0;
  int vertices = 0;
  int projections = 0;
  double cbv = 0.0;
  double upper_bound = 0.0;
};

struct PolyblockOptions {
  double epsilon = 0.01;
  std::size_t max_vertices = 100000;
  int max_projections = 20000;
  bool prune_by_cbv = true;
  /// Directions projected before the main loop; each boundary point found
  /// only raises CBV, so pruning stays valid. Empty by default.
  std::vector<RVector> seed_rays;
  /// Called after every iteration with the current vertex set.
  std::function<void(const PolyblockTraceRow&, const std::vector<Vertex>&)> observer;
};

struct PolyblockResult {
  PolyblockStatus status = PolyblockStatus::Converged;
  RVector z_best;  // best point of G found (empty if none lies in H)
  double cbv = 0.0;
  double upper_bound = 0.0;
  std::shared_ptr<const HermitianMatrix> X_best;
  int iterations = 0;
  int projections = 0;
  std::vector<PolyblockTraceRow> trace;
};

PolyblockResult polyblock_maximize(NormalSet& set, const Utility& utility,
                                   const PolyblockOptions& options = {});

void write_polyblock_trace(std::ostream& os, const std::vector<PolyblockTraceRow>& trace);

/// Relay utility maximization: polyblock over the SINR region of `spec`,
/// followed by rank-one extraction / Gaussian rounding of the best X.
struct UtilityResult {
  PolyblockResult polyblock;
  double relaxation_value = 0.0;  // CBV; an upper bound on the rank-one value up to epsilon
  double feasible_value = 0.0;    // utility at the rounded beamformer
  CVector beamformer;
  std::vector<double> sinr;  // at the rounded beamformer
  bool rank_one = false;
};

UtilityResult maximize_utility(const MaxMinSpec& spec, const RVector& corner,
                               const Utility& utility, const PolyblockOptions& options = {},
                               const DinkelbachOptions& dinkelbach = {});

}  // namespace twr
