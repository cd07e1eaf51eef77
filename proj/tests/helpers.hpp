#pragma once

#include <cmath>
#include <random>

#include "twr/model.hpp"

namespace testing {

inline twr::CMatrix random_matrix(twr::Rng& rng, twr::Index rows, twr::Index cols) {
  twr::CMatrix m(rows, cols);
  for (twr::Index i = 0; i < rows; ++i) {
    for (twr::Index j = 0; j < cols; ++j) m(i, j) = twr::complex_normal(rng);
  }
  return m;
}

inline twr::CVector random_vector(twr::Rng& rng, twr::Index n) {
  return random_matrix(rng, n, 1).col(0);
}

inline twr::HermitianMatrix random_psd(twr::Rng& rng, twr::Index n, twr::Index rank) {
  const twr::CMatrix g = random_matrix(rng, n, rank);
  return twr::HermitianMatrix(g * g.adjoint());
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace testing
