#pragma once

// Multi-pair amplify-and-forward two-way relay model.
//
// Users are indexed 0..2K-1 and paired (0,1), (2,3), ...; user i decodes the
// signal of partner(i) after cancelling its own echo. The relay applies
// x_R = A y_R with A an M x M complex matrix; a = vec(A) (column-major) and
// X = a a^H is the lifted variable every solver works with.

#include <cstdint>
#include <random>
#include <vector>

#include "twr/numkernel.hpp"

namespace twr {

using Rng = std::mt19937_64;

/// Draws one CN(0, 1) sample (real and imaginary parts each N(0, 1/2)).
Complex complex_normal(Rng& rng);

struct SystemInstance {
  int pairs = 0;
  int relay_antennas = 0;
  std::vector<double> user_powers;  // p_i, linear scale
  HermitianMatrix relay_noise;      // Lambda_R, M x M PSD
  std::vector<double> user_noise;   // sigma_i^2
  double power_budget = 0.0;        // relay budget
  std::vector<double> sinr_targets; // gamma_i
  std::vector<CVector> channels;    // h_i, length M

  int users() const { return 2 * pairs; }
  /// Throws DomainError/DimensionError on any broken invariant.
  void validate() const;
};

/// Instance with p_i = user_power, Lambda_R = noise * I, sigma_i^2 = noise and
/// every target equal to `target`.
SystemInstance make_symmetric_instance(std::vector<CVector> channels, double user_power,
                                       double relay_budget, double noise, double target = 1.0);

/// i.i.d. CN(0,1) channel vectors h_i in C^M for 2K users.
std::vector<CVector> generate_channels(std::uint64_t seed, int pairs, int relay_antennas);

/// i.i.d. CN(0,1) channel matrices H_i in C^{M x M_i}; user_antennas has 2K entries.
std::vector<CMatrix> generate_channels(std::uint64_t seed, int pairs, int relay_antennas,
                                       const std::vector<int>& user_antennas);

/// Partner of user i (0-based): 0 <-> 1, 2 <-> 3, ...
int partner(int i, int users);

/// Lifted Hermitian forms describing every SINR and the relay power in X-space:
///   SINR_i(X) = tr(signal_i X) / (tr(interference_i X) + noise_i),
///   p_R(X)    = tr(E0 X).
struct QuadraticForms {
  HermitianMatrix E0;
  std::vector<HermitianMatrix> signal;
  std::vector<HermitianMatrix> interference;
  std::vector<double> noise;

  int users() const { return static_cast<int>(signal.size()); }
  Index dim() const { return E0.dim(); }

  double numerator(int i, const HermitianMatrix& X) const { return signal[i].inner(X); }
  double denominator(int i, const HermitianMatrix& X) const {
    return interference[i].inner(X) + noise[i];
  }
  std::vector<double> sinr(const HermitianMatrix& X) const;
  /// SINR at X = a a^H without forming X.
  std::vector<double> sinr(const CVector& a) const;
};

/// Forms for a relay seen through effective transmit vectors t_j (signal j
/// arrives at the relay as t_j s_j, powers folded in) and receive vectors r_i
/// (user i observes r_i^H A t_j). `receiver_noise` is the post-combining noise
/// power at each user.
QuadraticForms relay_forms(const std::vector<CVector>& tx, const std::vector<CVector>& rx,
                           const HermitianMatrix& relay_noise,
                           const std::vector<double>& receiver_noise);

QuadraticForms build_forms(const SystemInstance& inst);

/// Per-user SINR evaluated directly from A with the self-interference removed.
std::vector<double> sinr_of_A(const SystemInstance& inst, const CMatrix& A);

/// sum_i p_i ||A h_i||^2 + tr(A Lambda_R A^H)
double relay_power_of_A(const SystemInstance& inst, const CMatrix& A);

/// min_i values[i] / targets[i]
double min_ratio(const std::vector<double>& values, const std::vector<double>& targets);

}  // namespace twr
