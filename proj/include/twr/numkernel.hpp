#pragma once

// Dense complex linear algebra used by every other module.
//
// Matrices are Eigen column-major; vec() stacks columns, so the entry A(r, c)
// of an M x M matrix sits at index r + c * M of vec(A). That convention is
// fixed for the whole library.

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace twr {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Square complex matrix that is Hermitian by construction: the input is
/// replaced by (M + M^H) / 2.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const CMatrix& m);

  static HermitianMatrix zero(Index n);
  static HermitianMatrix identity(Index n);
  /// v v^H
  static HermitianMatrix outer(const CVector& v);
  static HermitianMatrix diagonal(const RVector& d);

  Index dim() const { return m_.rows(); }
  const CMatrix& matrix() const { return m_; }
  Complex operator()(Index r, Index c) const { return m_(r, c); }

  double trace() const;
  /// Re tr(this * other), the real inner product on Hermitian matrices.
  double inner(const HermitianMatrix& other) const;
  /// v^H M v (real).
  double quad(const CVector& v) const;
  double frobenius_norm() const { return m_.norm(); }

  HermitianMatrix& operator+=(const HermitianMatrix& o);
  HermitianMatrix& operator-=(const HermitianMatrix& o);
  HermitianMatrix& operator*=(double s);

  friend HermitianMatrix operator+(HermitianMatrix a, const HermitianMatrix& b) { return a += b; }
  friend HermitianMatrix operator-(HermitianMatrix a, const HermitianMatrix& b) { return a -= b; }
  friend HermitianMatrix operator*(HermitianMatrix a, double s) { return a *= s; }
  friend HermitianMatrix operator*(double s, HermitianMatrix a) { return a *= s; }

 private:
  CMatrix m_;
};

struct EigenDecomposition {
  RVector values;   // descending
  CMatrix vectors;  // orthonormal columns, vectors.col(k) pairs with values(k)
};

/// Householder tridiagonalization + implicit symmetric QR. Throws
/// NumericalError when the iteration cap (30 * dim sweeps) is exhausted.
EigenDecomposition herm_eig(const HermitianMatrix& m);

CMatrix kron(const CMatrix& a, const CMatrix& b);

CVector vec(const CMatrix& m);
CMatrix unvec(const CVector& v, Index rows, Index cols);

/// Principal square root of a PSD matrix. Eigenvalues down to
/// -1e-12 * ||m||_F are clipped to zero; anything more negative is an error.
HermitianMatrix psd_sqrt(const HermitianMatrix& m);

/// Solves m x = rhs for Hermitian positive definite m via Cholesky. Throws
/// DomainError if m is not positive definite.
CMatrix solve_hpd(const HermitianMatrix& m, const CMatrix& rhs);

/// Largest lambda with a v = lambda b v, i.e. max_v (v^H a v) / (v^H b v).
/// b must be positive definite.
double generalized_max_eigenvalue(const HermitianMatrix& a, const HermitianMatrix& b);

/// Block-diagonal embedding: places `block` at rows/cols [offset, offset+k).
HermitianMatrix embed_block(const HermitianMatrix& block, Index offset, Index total_dim);

/// Throws NumericalError if any entry is NaN or infinite.
void require_finite(const CMatrix& m, const char* what);

}  // namespace twr
