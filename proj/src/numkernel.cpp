#include "twr/numkernel.hpp"

#include <string>

#include "twr/error.hpp"

namespace twr {

HermitianMatrix::HermitianMatrix(const CMatrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionError("HermitianMatrix: matrix is " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
  require_finite(m, "HermitianMatrix");
  m_ = 0.5 * (m + m.adjoint());
}

HermitianMatrix HermitianMatrix::zero(Index n) { return HermitianMatrix(CMatrix::Zero(n, n)); }

HermitianMatrix HermitianMatrix::identity(Index n) {
  return HermitianMatrix(CMatrix::Identity(n, n));
}

HermitianMatrix HermitianMatrix::outer(const CVector& v) { return HermitianMatrix(v * v.adjoint()); }

HermitianMatrix HermitianMatrix::diagonal(const RVector& d) {
  return HermitianMatrix(CMatrix(d.cast<Complex>().asDiagonal()));
}

double HermitianMatrix::trace() const { return m_.trace().real(); }

double HermitianMatrix::inner(const HermitianMatrix& other) const {
  if (other.dim() != dim()) throw DimensionError("HermitianMatrix::inner: dimension mismatch");
  // tr(A B) = sum_{ab} A_ab B_ba = sum conj(A_ba) B_ba for Hermitian A.
  return (m_.conjugate().cwiseProduct(other.m_)).sum().real();
}

double HermitianMatrix::quad(const CVector& v) const {
  if (v.size() != dim()) throw DimensionError("HermitianMatrix::quad: dimension mismatch");
  return v.dot(m_ * v).real();
}

HermitianMatrix& HermitianMatrix::operator+=(const HermitianMatrix& o) {
  if (o.dim() != dim()) throw DimensionError("HermitianMatrix +=: dimension mismatch");
  m_ += o.m_;
  return *this;
}

HermitianMatrix& HermitianMatrix::operator-=(const HermitianMatrix& o) {
  if (o.dim() != dim()) throw DimensionError("HermitianMatrix -=: dimension mismatch");
  m_ -= o.m_;
  return *this;
}

HermitianMatrix& HermitianMatrix::operator*=(double s) {
  m_ *= s;
  return *this;
}

EigenDecomposition herm_eig(const HermitianMatrix& m) {
  if (m.dim() < 1) throw DimensionError("herm_eig: empty matrix");
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(m.matrix());
  if (solver.info() != Eigen::Success) {
    throw NumericalError("herm_eig: QR iteration did not converge (dim " +
                         std::to_string(m.dim()) + ")");
  }
  const Index n = m.dim();
  EigenDecomposition out{RVector(n), CMatrix(n, n)};
  for (Index k = 0; k < n; ++k) {
    out.values(k) = solver.eigenvalues()(n - 1 - k);
    out.vectors.col(k) = solver.eigenvectors().col(n - 1 - k);
  }
  return out;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CVector vec(const CMatrix& m) { return Eigen::Map<const CVector>(m.data(), m.size()); }

CMatrix unvec(const CVector& v, Index rows, Index cols) {
  if (rows < 0 || cols < 0 || v.size() != rows * cols) {
    throw DimensionError("unvec: vector of length " + std::to_string(v.size()) +
                         " cannot be reshaped to " + std::to_string(rows) + "x" +
                         std::to_string(cols));
  }
  return Eigen::Map<const CMatrix>(v.data(), rows, cols);
}

HermitianMatrix psd_sqrt(const HermitianMatrix& m) {
  const auto eig = herm_eig(m);
  const double clip = 1e-12 * std::max(m.frobenius_norm(), 1e-300);
  RVector root(eig.values.size());
  for (Index k = 0; k < eig.values.size(); ++k) {
    const double lam = eig.values(k);
    if (lam < -clip) {
      throw DomainError("psd_sqrt: not PSD (eigenvalue " + std::to_string(lam) + ")");
    }
    root(k) = lam > 0.0 ? std::sqrt(lam) : 0.0;
  }
  return HermitianMatrix(eig.vectors * root.cast<Complex>().asDiagonal() * eig.vectors.adjoint());
}

CMatrix solve_hpd(const HermitianMatrix& m, const CMatrix& rhs) {
  if (rhs.rows() != m.dim()) throw DimensionError("solve_hpd: right-hand side has wrong rows");
  Eigen::LLT<CMatrix> llt(m.matrix());
  if (llt.info() != Eigen::Success) throw DomainError("solve_hpd: matrix is not positive definite");
  return llt.solve(rhs);
}

double generalized_max_eigenvalue(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionError("generalized_max_eigenvalue: dimension mismatch");
  Eigen::LLT<CMatrix> llt(b.matrix());
  if (llt.info() != Eigen::Success) {
    throw DomainError("generalized_max_eigenvalue: b is not positive definite");
  }
  const CMatrix L = llt.matrixL();
  CMatrix w = L.triangularView<Eigen::Lower>().solve(a.matrix());
  w = L.triangularView<Eigen::Lower>().solve(w.adjoint().eval()).adjoint();
  return herm_eig(HermitianMatrix(w)).values(0);
}

HermitianMatrix embed_block(const HermitianMatrix& block, Index offset, Index total_dim) {
  if (offset < 0 || offset + block.dim() > total_dim) {
    throw DimensionError("embed_block: block does not fit");
  }
  CMatrix out = CMatrix::Zero(total_dim, total_dim);
  out.block(offset, offset, block.dim(), block.dim()) = block.matrix();
  return HermitianMatrix(out);
}

void require_finite(const CMatrix& m, const char* what) {
  if (!m.allFinite()) throw NumericalError(std::string(what) + ": non-finite entry");
}

}  // namespace twr
