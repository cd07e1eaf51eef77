#include <algorithm>
#include <cmath>
#include <limits>

#include "twr/error.hpp"
#include "twr/model.hpp"
#include "twr/sdp.hpp"

namespace twr {

RankOneExtraction extract_rank_one(const HermitianMatrix& X, double ratio_tol) {
  const auto eig = herm_eig(X);
  const double l1 = eig.values(0);
  if (!(l1 > 0.0)) throw DomainError("extract_rank_one: X has no positive eigenvalue");
  const double l2 = eig.values.size() > 1 ? std::max(0.0, eig.values(1)) : 0.0;
  RankOneExtraction out;
  out.vector = std::sqrt(l1) * eig.vectors.col(0);
  out.ratio = l2 / l1;
  out.accepted = out.ratio <= ratio_tol;
  return out;
}

double max_feasible_scale(const CVector& a, const std::vector<PowerConstraint>& constraints) {
  double scale2 = std::numeric_limits<double>::infinity();
  for (const auto& c : constraints) {
    const double used = c.form.quad(a);
    if (used > 0.0) scale2 = std::min(scale2, c.budget / used);
  }
  if (!std::isfinite(scale2)) return 0.0;
  return std::sqrt(scale2);
}

RoundingResult gaussian_rounding(const HermitianMatrix& X,
                                 const std::function<double(const CVector&)>& objective,
                                 const std::vector<PowerConstraint>& constraints,
                                 const RoundingOptions& options) {
  const Index n = X.dim();
  const int count = std::max(1, options.samples + 1);
  std::vector<CVector> cand(count);
  cand[0] = extract_rank_one(X).vector;

  const CMatrix root = psd_sqrt(X).matrix();
  Rng rng(options.seed);
  CVector w(n);
  for (int s = 1; s < count; ++s) {
    for (Index k = 0; k < n; ++k) w(k) = complex_normal(rng);
    cand[s] = root * w;
  }

  std::vector<double> value(count, -std::numeric_limits<double>::infinity());
  auto evaluate = [&](int s) {
    const double c = max_feasible_scale(cand[s], constraints);
    if (c > 0.0) {
      cand[s] *= c;
      value[s] = objective(cand[s]);
    }
  };
  if (options.execution == Execution::Parallel) {
#pragma omp parallel for schedule(static)
    for (int s = 0; s < count; ++s) evaluate(s);
  } else {
    for (int s = 0; s < count; ++s) evaluate(s);
  }

  int best = 0;
  for (int s = 1; s < count; ++s) {
    if (value[s] > value[best]) best = s;
  }
  return {cand[best], value[best], best};
}

}  // namespace twr
