#include "twr/baselines.hpp"

#include <cmath>
#include <limits>

#include "twr/error.hpp"

namespace twr {

const char* to_string(BaselineKind k) {
  switch (k) {
    case BaselineKind::ScaledIdentity: return "identity";
    case BaselineKind::AntennaSelection: return "antenna-selection";
    case BaselineKind::ZeroForcing: return "zf";
    case BaselineKind::MmseRelay: return "mmse";
  }
  return "unknown";
}

std::optional<BaselineKind> parse_baseline(const std::string& name) {
  for (auto k : {BaselineKind::ScaledIdentity, BaselineKind::AntennaSelection,
                 BaselineKind::ZeroForcing, BaselineKind::MmseRelay}) {
    if (name == to_string(k)) return k;
  }
  return std::nullopt;
}

CMatrix relay_input_covariance(const SystemInstance& inst) {
  CMatrix theta = inst.relay_noise.matrix();
  for (int i = 0; i < inst.users(); ++i) {
    theta += inst.user_powers[i] * inst.channels[i] * inst.channels[i].adjoint();
  }
  return theta;
}

CMatrix scale_to_budget(const SystemInstance& inst, const CMatrix& A) {
  const double used = relay_power_of_A(inst, A);
  if (!(used > 0.0)) throw NumericalError("scale_to_budget: A uses no power");
  return std::sqrt(inst.power_budget / used) * A;
}

namespace {

CMatrix pair_swap(int users) {
  CMatrix P = CMatrix::Zero(users, users);
  for (int i = 0; i < users; ++i) P(i, partner(i, users)) = 1.0;
  return P;
}

CMatrix inverse_relay(const SystemInstance& inst, double reg) {
  const int n = inst.users();
  const Index M = inst.relay_antennas;
  if (M < n) throw DomainError("baseline_beamformer: needs at least 2K relay antennas");
  CMatrix H(M, n);
  for (int i = 0; i < n; ++i) H.col(i) = inst.channels[i];
  const CMatrix I = CMatrix::Identity(n, n);
  const CMatrix left = (H.transpose() * H.conjugate() + reg * I).inverse();
  const CMatrix right = (H.adjoint() * H + reg * I).inverse();
  const CMatrix A = H.conjugate() * left * pair_swap(n) * right * H.adjoint();
  require_finite(A, "baseline_beamformer");
  return A;
}

}  // namespace

CMatrix baseline_beamformer(BaselineKind kind, const SystemInstance& inst) {
  inst.validate();
  const Index M = inst.relay_antennas;
  switch (kind) {
    case BaselineKind::ScaledIdentity:
      return scale_to_budget(inst, CMatrix::Identity(M, M));
    case BaselineKind::AntennaSelection: {
      CMatrix best;
      double best_value = -std::numeric_limits<double>::infinity();
      for (Index m = 0; m < M; ++m) {
        CMatrix A = CMatrix::Zero(M, M);
        A(m, m) = 1.0;
        A = scale_to_budget(inst, A);
        const double v = min_ratio(sinr_of_A(inst, A), inst.sinr_targets);
        if (v > best_value) {
          best_value = v;
          best = A;
        }
      }
      return best;
    }
    case BaselineKind::ZeroForcing:
      return scale_to_budget(inst, inverse_relay(inst, 0.0));
    case BaselineKind::MmseRelay: {
      double p = 0.0;
      for (double x : inst.user_powers) p += x;
      p /= inst.users();
      const double n0 = inst.relay_noise.trace() / static_cast<double>(M);
      return scale_to_budget(inst, inverse_relay(inst, n0 / p));
    }
  }
  throw DomainError("baseline_beamformer: unknown kind");
}

}  // namespace twr
