#include "twr/collaborative.hpp"

#include <cmath>
#include <numeric>

#include "twr/error.hpp"

namespace twr {

void CollabInstance::validate() const {
  if (pairs < 1 || relays < 1) throw DimensionError("CollabInstance: need K >= 1 and M >= 1");
  const auto n = static_cast<std::size_t>(users());
  const auto m = static_cast<std::size_t>(relays);
  if (user_powers.size() != n || user_noise.size() != n || sinr_targets.size() != n ||
      channels.size() != n || relay_noise.size() != m || relay_budgets.size() != m) {
    throw DimensionError("CollabInstance: inconsistent lengths");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (channels[i].size() != relays) throw DimensionError("CollabInstance: channel length");
    if (!(user_powers[i] > 0.0) || !(user_noise[i] > 0.0) || !(sinr_targets[i] > 0.0)) {
      throw DomainError("CollabInstance: powers, noises and targets must be > 0");
    }
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (!(relay_noise[k] > 0.0) || !(relay_budgets[k] > 0.0)) {
      throw DomainError("CollabInstance: relay noises and budgets must be > 0");
    }
  }
}

CollabInstance make_collab_instance(std::vector<CVector> channels, double user_power,
                                    double total_budget, double noise, double target) {
  CollabInstance inst;
  const int n = static_cast<int>(channels.size());
  if (n < 2 || n % 2 != 0) throw DimensionError("make_collab_instance: need an even user count");
  inst.pairs = n / 2;
  inst.relays = static_cast<int>(channels.front().size());
  inst.user_powers.assign(n, user_power);
  inst.user_noise.assign(n, noise);
  inst.sinr_targets.assign(n, target);
  inst.relay_noise.assign(inst.relays, noise);
  inst.relay_budgets.assign(inst.relays, total_budget / inst.relays);
  inst.channels = std::move(channels);
  inst.validate();
  return inst;
}

SystemInstance as_diagonal_relay(const CollabInstance& inst) {
  inst.validate();
  SystemInstance s;
  s.pairs = inst.pairs;
  s.relay_antennas = inst.relays;
  s.user_powers = inst.user_powers;
  s.relay_noise = HermitianMatrix::diagonal(
      Eigen::Map<const RVector>(inst.relay_noise.data(), inst.relays));
  s.user_noise = inst.user_noise;
  s.power_budget = std::accumulate(inst.relay_budgets.begin(), inst.relay_budgets.end(), 0.0);
  s.sinr_targets = inst.sinr_targets;
  s.channels = inst.channels;
  return s;
}

RVector relay_power_factors(const CollabInstance& inst) {
  RVector theta(inst.relays);
  for (int m = 0; m < inst.relays; ++m) {
    double t = inst.relay_noise[m];
    for (int i = 0; i < inst.users(); ++i) t += inst.user_powers[i] * std::norm(inst.channels[i](m));
    theta(m) = t;
  }
  return theta;
}

QuadraticForms build_collab_forms(const CollabInstance& inst) {
  inst.validate();
  const int n = inst.users();
  const Index M = inst.relays;
  // h_i^T diag(a) h_j = (h_i . h_j)^T a, so |.|^2 = a^H conj(q) q^T a.
  auto coupling = [&](int i, int j) {
    const CVector q = inst.channels[i].cwiseProduct(inst.channels[j]);
    return HermitianMatrix(inst.user_powers[j] * q.conjugate() * q.transpose());
  };
  QuadraticForms f;
  f.E0 = HermitianMatrix::diagonal(relay_power_factors(inst));
  for (int i = 0; i < n; ++i) {
    const int j = partner(i, n);
    f.signal.push_back(coupling(i, j));
    RVector amp(M);
    for (Index m = 0; m < M; ++m) amp(m) = inst.relay_noise[m] * std::norm(inst.channels[i](m));
    HermitianMatrix interf = HermitianMatrix::diagonal(amp);
    for (int k = 0; k < n; ++k) {
      if (k != i && k != j) interf += coupling(i, k);
    }
    f.interference.push_back(interf);
    f.noise.push_back(inst.user_noise[i]);
  }
  return f;
}

std::vector<PowerConstraint> collab_power_constraints(const CollabInstance& inst) {
  const RVector theta = relay_power_factors(inst);
  std::vector<PowerConstraint> out;
  for (int m = 0; m < inst.relays; ++m) {
    RVector d = RVector::Zero(inst.relays);
    d(m) = theta(m);
    out.push_back({HermitianMatrix::diagonal(d), inst.relay_budgets[m]});
  }
  return out;
}

MaxMinSpec collab_maxmin_spec(const CollabInstance& inst, CollabBudget budget) {
  MaxMinSpec spec;
  spec.forms = build_collab_forms(inst);
  spec.weights = inst.sinr_targets;
  if (budget == CollabBudget::Individual) {
    spec.power = collab_power_constraints(inst);
  } else {
    const double total =
        std::accumulate(inst.relay_budgets.begin(), inst.relay_budgets.end(), 0.0);
    spec.power.push_back({spec.forms.E0, total});
  }
  spec.start = CVector::Ones(inst.relays);
  spec.validate();
  return spec;
}

std::vector<double> collab_sinr(const CollabInstance& inst, const CVector& a) {
  inst.validate();
  if (a.size() != inst.relays) throw DimensionError("collab_sinr: gain vector length");
  return sinr_of_A(as_diagonal_relay(inst), a.asDiagonal().toDenseMatrix());
}

DinkelbachResult collab_maxmin(const CollabInstance& inst, CollabBudget budget,
                               const DinkelbachOptions& options) {
  return dinkelbach_maxmin(collab_maxmin_spec(inst, budget), options);
}

RVector collab_initial_vertex(const CollabInstance& inst, CollabBudget budget) {
  inst.validate();
  const int n = inst.users();
  const RVector theta = relay_power_factors(inst);
  const double total = std::accumulate(inst.relay_budgets.begin(), inst.relay_budgets.end(), 0.0);
  RVector d(n);
  for (int i = 0; i < n; ++i) {
    const int j = partner(i, n);
    const CVector q = inst.channels[i].cwiseProduct(inst.channels[j]);
    double bound = 0.0;
    if (budget == CollabBudget::Individual) {
      // |a_m|^2 <= budget_m / theta_m for every m separately.
      double s = 0.0;
      for (int m = 0; m < inst.relays; ++m) {
        s += std::abs(q(m)) * std::sqrt(inst.relay_budgets[m] / theta(m));
      }
      bound = s * s;
    } else {
      // sum_m theta_m |a_m|^2 <= total.
      for (int m = 0; m < inst.relays; ++m) bound += std::norm(q(m)) * total / theta(m);
    }
    d(i) = 1.0 + inst.user_powers[j] * bound / inst.user_noise[i];
  }
  return d;
}

UtilityResult collab_utility_maximize(const CollabInstance& inst, const Utility& utility,
                                      CollabBudget budget, const PolyblockOptions& options,
                                      const DinkelbachOptions& dinkelbach) {
  return maximize_utility(collab_maxmin_spec(inst, budget), collab_initial_vertex(inst, budget),
                          utility, options, dinkelbach);
}

}  // namespace twr
