#include "twr/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "twr/error.hpp"

namespace twr {

Complex complex_normal(Rng& rng) {
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  const double re = gauss(rng);
  const double im = gauss(rng);
  return {re, im};
}

void SystemInstance::validate() const {
  if (pairs < 1) throw DomainError("SystemInstance: need at least one pair");
  if (relay_antennas < 1) throw DomainError("SystemInstance: need at least one relay antenna");
  const auto n = static_cast<std::size_t>(users());
  if (user_powers.size() != n || user_noise.size() != n || sinr_targets.size() != n ||
      channels.size() != n) {
    throw DimensionError("SystemInstance: per-user vectors must have 2K entries");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(user_powers[i] > 0.0)) throw DomainError("SystemInstance: user power must be > 0");
    if (!(user_noise[i] > 0.0)) throw DomainError("SystemInstance: user noise must be > 0");
    if (!(sinr_targets[i] > 0.0)) throw DomainError("SystemInstance: SINR target must be > 0");
    if (channels[i].size() != relay_antennas) {
      throw DimensionError("SystemInstance: channel " + std::to_string(i) + " has wrong length");
    }
  }
  if (!(power_budget > 0.0)) throw DomainError("SystemInstance: relay budget must be > 0");
  if (relay_noise.dim() != relay_antennas) {
    throw DimensionError("SystemInstance: relay noise covariance must be M x M");
  }
  const auto eig = herm_eig(relay_noise);
  if (eig.values(eig.values.size() - 1) < -1e-12 * std::max(1.0, relay_noise.frobenius_norm())) {
    throw DomainError("SystemInstance: relay noise covariance is not PSD");
  }
}

SystemInstance make_symmetric_instance(std::vector<CVector> channels, double user_power,
                                       double relay_budget, double noise, double target) {
  if (channels.empty() || channels.size() % 2 != 0) {
    throw DimensionError("make_symmetric_instance: need an even, nonzero number of users");
  }
  SystemInstance inst;
  const auto n = channels.size();
  inst.pairs = static_cast<int>(n / 2);
  inst.relay_antennas = static_cast<int>(channels.front().size());
  inst.user_powers.assign(n, user_power);
  inst.relay_noise = HermitianMatrix::identity(inst.relay_antennas) * noise;
  inst.user_noise.assign(n, noise);
  inst.power_budget = relay_budget;
  inst.sinr_targets.assign(n, target);
  inst.channels = std::move(channels);
  inst.validate();
  return inst;
}

std::vector<CVector> generate_channels(std::uint64_t seed, int pairs, int relay_antennas) {
  if (pairs < 1 || relay_antennas < 1) throw DomainError("generate_channels: K, M must be >= 1");
  Rng rng(seed);
  std::vector<CVector> h(static_cast<std::size_t>(2 * pairs), CVector(relay_antennas));
  for (auto& v : h) {
    for (Index m = 0; m < relay_antennas; ++m) v(m) = complex_normal(rng);
  }
  return h;
}

std::vector<CMatrix> generate_channels(std::uint64_t seed, int pairs, int relay_antennas,
                                       const std::vector<int>& user_antennas) {
  if (pairs < 1 || relay_antennas < 1) throw DomainError("generate_channels: K, M must be >= 1");
  if (user_antennas.size() != static_cast<std::size_t>(2 * pairs)) {
    throw DimensionError("generate_channels: need one antenna count per user");
  }
  Rng rng(seed);
  std::vector<CMatrix> h;
  h.reserve(user_antennas.size());
  for (int mi : user_antennas) {
    if (mi < 1) throw DomainError("generate_channels: user antenna count must be >= 1");
    CMatrix H(relay_antennas, mi);
    for (Index c = 0; c < mi; ++c) {
      for (Index r = 0; r < relay_antennas; ++r) H(r, c) = complex_normal(rng);
    }
    h.push_back(std::move(H));
  }
  return h;
}

int partner(int i, int users) {
  if (i < 0 || i >= users || users % 2 != 0) {
    throw DomainError("partner: user index " + std::to_string(i) + " out of range");
  }
  return i ^ 1;
}

std::vector<double> QuadraticForms::sinr(const HermitianMatrix& X) const {
  std::vector<double> out(signal.size());
  for (int i = 0; i < users(); ++i) out[i] = numerator(i, X) / denominator(i, X);
  return out;
}

std::vector<double> QuadraticForms::sinr(const CVector& a) const {
  std::vector<double> out(signal.size());
  for (int i = 0; i < users(); ++i) {
    out[i] = signal[i].quad(a) / (interference[i].quad(a) + noise[i]);
  }
  return out;
}

QuadraticForms relay_forms(const std::vector<CVector>& tx, const std::vector<CVector>& rx,
                           const HermitianMatrix& relay_noise,
                           const std::vector<double>& receiver_noise) {
  const int users = static_cast<int>(tx.size());
  if (users < 2 || users % 2 != 0 || rx.size() != tx.size() ||
      receiver_noise.size() != tx.size()) {
    throw DimensionError("relay_forms: inconsistent user counts");
  }
  const Index M = relay_noise.dim();

  // r^H A t = q^T a with q = vec(conj(r) t^T), so |r^H A t|^2 = tr(q* q^T X).
  auto coupling = [&](const CVector& r, const CVector& t) {
    const CVector q = vec(r.conjugate() * t.transpose());
    return HermitianMatrix(q.conjugate() * q.transpose());
  };

  // Relay noise seen by user i: r^H A L A^H r = a^H B^H conj(L) B a with
  // B = I_M (x) r^H. The conjugate is what makes the lifted form agree with
  // the direct expression for a general Hermitian L.
  const CMatrix conj_noise = relay_noise.matrix().conjugate();

  CMatrix theta = relay_noise.matrix();
  for (const auto& t : tx) theta += t * t.adjoint();

  QuadraticForms forms;
  // ||A Theta^{1/2}||_F^2 = a^H (Theta^T (x) I) a.
  forms.E0 = HermitianMatrix(kron(theta.transpose(), CMatrix::Identity(M, M)));
  forms.signal.reserve(users);
  forms.interference.reserve(users);
  for (int i = 0; i < users; ++i) {
    if (tx[i].size() != M || rx[i].size() != M) {
      throw DimensionError("relay_forms: vector length differs from relay antenna count");
    }
    const int j = partner(i, users);
    forms.signal.push_back(coupling(rx[i], tx[j]));

    const CMatrix B = kron(CMatrix::Identity(M, M), rx[i].adjoint());
    CMatrix interf = B.adjoint() * conj_noise * B;
    for (int k = 0; k < users; ++k) {
      if (k == i || k == j) continue;
      interf += coupling(rx[i], tx[k]).matrix();
    }
    forms.interference.emplace_back(interf);
    forms.noise.push_back(receiver_noise[i]);
  }
  return forms;
}

QuadraticForms build_forms(const SystemInstance& inst) {
  inst.validate();
  std::vector<CVector> tx, rx;
  for (int i = 0; i < inst.users(); ++i) {
    tx.push_back(std::sqrt(inst.user_powers[i]) * inst.channels[i]);
    rx.push_back(inst.channels[i].conjugate());
  }
  return relay_forms(tx, rx, inst.relay_noise, inst.user_noise);
}

std::vector<double> sinr_of_A(const SystemInstance& inst, const CMatrix& A) {
  const int users = inst.users();
  if (A.rows() != inst.relay_antennas || A.cols() != inst.relay_antennas) {
    throw DimensionError("sinr_of_A: A must be M x M");
  }
  const CMatrix noise_root = psd_sqrt(inst.relay_noise).matrix();
  std::vector<double> out(users);
  for (int i = 0; i < users; ++i) {
    const int j = partner(i, users);
    const auto& hi = inst.channels[i];
    const Complex desired = hi.transpose() * A * inst.channels[j];
    double interference = 0.0;
    for (int k = 0; k < users; ++k) {
      if (k == i || k == j) continue;
      const Complex c = hi.transpose() * A * inst.channels[k];
      interference += inst.user_powers[k] * std::norm(c);
    }
    const double amplified = (noise_root * A.adjoint() * hi.conjugate()).squaredNorm();
    out[i] = inst.user_powers[j] * std::norm(desired) /
             (interference + amplified + inst.user_noise[i]);
  }
  return out;
}

double relay_power_of_A(const SystemInstance& inst, const CMatrix& A) {
  if (A.rows() != inst.relay_antennas || A.cols() != inst.relay_antennas) {
    throw DimensionError("relay_power_of_A: A must be M x M");
  }
  double p = (A * inst.relay_noise.matrix() * A.adjoint()).trace().real();
  for (int i = 0; i < inst.users(); ++i) p += inst.user_powers[i] * (A * inst.channels[i]).squaredNorm();
  return p;
}

double min_ratio(const std::vector<double>& values, const std::vector<double>& targets) {
  if (values.size() != targets.size()) throw DimensionError("min_ratio: size mismatch");
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) m = std::min(m, values[i] / targets[i]);
  return m;
}

}  // namespace twr
