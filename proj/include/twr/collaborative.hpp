#pragma once

// Collaborative two-way relaying: M single-antenna relays, each applying its
// own complex gain, so the relay matrix is diag(a). The lifted variable is
// X = a a^H of size M x M and relay m has its own power budget.

#include <vector>

#include "twr/fractional.hpp"
#include "twr/monotonic.hpp"

namespace twr {

struct CollabInstance {
  int pairs = 0;
  int relays = 0;
  std::vector<double> user_powers;    // p_i
  std::vector<double> relay_noise;    // sigma_{R_m}^2
  std::vector<double> user_noise;     // sigma_i^2
  std::vector<double> relay_budgets;  // per-relay budgets
  std::vector<double> sinr_targets;   // gamma_i
  std::vector<CVector> channels;      // h_i, entry m is the gain to relay m

  int users() const { return 2 * pairs; }
  void validate() const;
};

/// Relays with equal noise and budget total_budget / M each.
CollabInstance make_collab_instance(std::vector<CVector> channels, double user_power,
                                    double total_budget, double noise, double target = 1.0);

/// The equivalent single-relay instance with A = diag(a), used for checks.
SystemInstance as_diagonal_relay(const CollabInstance& inst);

/// Per-relay power factor theta_m = sum_i p_i |h_{i,m}|^2 + sigma_{R_m}^2.
RVector relay_power_factors(const CollabInstance& inst);

/// SINR forms over X = a a^H. E0 holds the total relay power form.
QuadraticForms build_collab_forms(const CollabInstance& inst);

/// One constraint theta_m |a_m|^2 <= budget_m per relay.
std::vector<PowerConstraint> collab_power_constraints(const CollabInstance& inst);

enum class CollabBudget { Individual, Total };

MaxMinSpec collab_maxmin_spec(const CollabInstance& inst, CollabBudget budget);

/// SINR_i at diag(a), evaluated directly.
std::vector<double> collab_sinr(const CollabInstance& inst, const CVector& a);

DinkelbachResult collab_maxmin(const CollabInstance& inst,
                               CollabBudget budget = CollabBudget::Individual,
                               const DinkelbachOptions& options = {});

/// Upper corner from |(h_i . h_j)^T a|^2 <= ||h_i . h_j||_D^2 ||a||_{D^-1}^2
/// where D = diag(theta_m / budget_m) normalizes the power constraints.
RVector collab_initial_vertex(const CollabInstance& inst, CollabBudget budget);

UtilityResult collab_utility_maximize(const CollabInstance& inst, const Utility& utility,
                                      CollabBudget budget = CollabBudget::Individual,
                                      const PolyblockOptions& options = {},
                                      const DinkelbachOptions& dinkelbach = {});

}  // namespace twr
