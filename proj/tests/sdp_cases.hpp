#pragma once

// Random strictly feasible SDPs with a known strictly feasible dual point,
// shared by the unit tests, the acceptance binary and the export tool.

#include "helpers.hpp"
#include "twr/sdp.hpp"

namespace testing {

inline twr::SdpProblem random_feasible_sdp(std::uint64_t seed, twr::Index n, int m) {
  using namespace twr;
  Rng rng(seed);
  std::normal_distribution<double> g;
  SdpProblem p;
  p.dim = n;
  // X0 interior primal point, (y, Z0) interior dual point.
  const CMatrix X0 = random_psd(rng, n, n).matrix() + CMatrix::Identity(n, n);
  CMatrix C = random_psd(rng, n, n).matrix() + 0.1 * CMatrix::Identity(n, n);
  for (int j = 0; j < m; ++j) {
    const HermitianMatrix A(random_matrix(rng, n, n));
    const Sense s = j % 3 == 0 ? Sense::Equal : (j % 3 == 1 ? Sense::LessEqual : Sense::GreaterEqual);
    double y = g(rng);
    if (s == Sense::LessEqual) y = -std::abs(y);
    if (s == Sense::GreaterEqual) y = std::abs(y);
    C += y * A.matrix();
    double b = A.inner(HermitianMatrix(X0));
    if (s == Sense::LessEqual) b += 1.0;
    if (s == Sense::GreaterEqual) b -= 1.0;
    p.constraints.push_back({A, {}, s, b});
  }
  p.objective = HermitianMatrix(C);
  return p;
}

// Independent optimality check from the returned primal/dual pair.
struct Kkt {
  double primal = 0.0;      // max relative constraint violation
  double dual_sign = 0.0;   // wrong-sign multiplier magnitude
  double dual_slack = 0.0;  // || C - sum y A - Z ||
  double min_eig_x = 0.0;
  double min_eig_z = 0.0;
  double gap = 0.0;         // |<C,X> - b^T y| / (1 + |<C,X>|)
};

inline Kkt kkt(const twr::SdpProblem& p, const twr::SdpSolution& s) {
  using namespace twr;
  Kkt k;
  CMatrix z = p.objective.matrix();
  double by = 0.0;
  for (std::size_t j = 0; j < p.constraints.size(); ++j) {
    const auto& c = p.constraints[j];
    const double v = c.lhs.inner(s.X);
    double viol = 0.0;
    if (c.sense != Sense::GreaterEqual) viol = std::max(viol, v - c.rhs);
    if (c.sense != Sense::LessEqual) viol = std::max(viol, c.rhs - v);
    k.primal = std::max(k.primal, viol / (1.0 + std::abs(c.rhs)));
    const double y = s.duals[j];
    if (c.sense == Sense::LessEqual) k.dual_sign = std::max(k.dual_sign, y);
    if (c.sense == Sense::GreaterEqual) k.dual_sign = std::max(k.dual_sign, -y);
    z -= y * c.lhs.matrix();
    by += y * c.rhs;
  }
  k.dual_slack = (z - s.dual_slack.matrix()).norm() / (1.0 + p.objective.frobenius_norm());
  k.min_eig_x = herm_eig(s.X).values(p.dim - 1);
  k.min_eig_z = herm_eig(HermitianMatrix(z)).values(p.dim - 1);
  const double cx = p.objective.inner(s.X);
  k.gap = std::abs(cx - by) / (1.0 + std::abs(cx));
  return k;
}

}  // namespace testing
