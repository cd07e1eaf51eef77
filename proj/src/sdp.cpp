#include "twr/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "twr/error.hpp"

namespace twr {

const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::Infeasible: return "infeasible";
    case SdpStatus::Unbounded: return "unbounded";
    case SdpStatus::MaxIter: return "max-iter";
    case SdpStatus::NumericalError: return "numerical-error";
  }
  return "unknown";
}

void SdpProblem::validate() const {
  if (dim < 1) throw DimensionError("SdpProblem: dim must be >= 1");
  if (objective.dim() != dim) throw DimensionError("SdpProblem: objective has wrong dimension");
  for (std::size_t j = 0; j < constraints.size(); ++j) {
    const auto& c = constraints[j];
    if (c.lhs.dim() != dim) {
      throw DimensionError("SdpProblem: constraint " + std::to_string(j) + " has wrong dimension");
    }
    if (!c.scalar_coeffs.empty() && static_cast<int>(c.scalar_coeffs.size()) != scalars()) {
      throw DimensionError("SdpProblem: constraint " + std::to_string(j) +
                           " has wrong scalar coefficient count");
    }
    if (!std::isfinite(c.rhs)) throw NumericalError("SdpProblem: non-finite right-hand side");
  }
}

double constraint_value(const SdpConstraint& c, const HermitianMatrix& X,
                        const std::vector<double>& scalars) {
  double v = c.lhs.inner(X);
  for (std::size_t k = 0; k < c.scalar_coeffs.size() && k < scalars.size(); ++k) {
    v += c.scalar_coeffs[k] * scalars[k];
  }
  return v;
}

namespace {

// Re <A, B> = Re tr(A^H B) for arbitrary complex matrices.
double real_inner(const CMatrix& a, const CMatrix& b) {
  return (a.conjugate().cwiseProduct(b)).sum().real();
}

CMatrix herm_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

// Largest alpha with P + alpha * dP still PSD (infinity if never violated).
// Returns a negative number if P itself is not positive definite.
double max_psd_step(const CMatrix& P, const CMatrix& dP) {
  Eigen::LLT<CMatrix> llt(P);
  if (llt.info() != Eigen::Success) return -1.0;
  const CMatrix L = llt.matrixL();
  CMatrix W = L.triangularView<Eigen::Lower>().solve(dP);
  W = L.triangularView<Eigen::Lower>().solve(W.adjoint().eval()).adjoint();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm_part(W), Eigen::EigenvaluesOnly);
  const double lam_min = es.eigenvalues()(0);
  return lam_min < 0.0 ? -1.0 / lam_min : std::numeric_limits<double>::infinity();
}

double max_orthant_step(const RVector& x, const RVector& dx) {
  double a = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < x.size(); ++k) {
    if (dx(k) < 0.0) a = std::min(a, -x(k) / dx(k));
  }
  return a;
}

// Standard-form data after row scaling:
//   <A_j, X> + (Al x)_j + (Af t)_j = b_j,  X PSD, x >= 0 (slacks), t free.
struct StandardForm {
  Index n = 0;
  int m = 0;
  int p = 0;  // slacks
  int q = 0;  // free scalars
  std::vector<CMatrix> A;
  RVector b;
  Eigen::MatrixXd Al;  // m x p
  Eigen::MatrixXd Af;  // m x q
  CMatrix C;
  RVector cf;
  RVector row_scale;  // b_scaled = row_scale .* b_original
  RVector col_scale;  // t_original = col_scale .* t_scaled
  double obj_scale = 1.0;
};

StandardForm to_standard_form(const SdpProblem& prob) {
  StandardForm sf;
  sf.n = prob.dim;
  sf.m = static_cast<int>(prob.constraints.size());
  sf.q = prob.scalars();
  for (const auto& c : prob.constraints) {
    if (c.sense != Sense::Equal) ++sf.p;
  }
  sf.A.reserve(sf.m);
  sf.b.resize(sf.m);
  sf.Al = Eigen::MatrixXd::Zero(sf.m, sf.p);
  sf.Af = Eigen::MatrixXd::Zero(sf.m, sf.q);
  sf.row_scale.resize(sf.m);
  int slack = 0;
  for (int j = 0; j < sf.m; ++j) {
    const auto& c = prob.constraints[j];
    double norm2 = c.lhs.matrix().squaredNorm();
    for (double a : c.scalar_coeffs) norm2 += a * a;
    const double s = norm2 > 0.0 ? 1.0 / std::sqrt(norm2) : 1.0;
    sf.row_scale(j) = s;
    sf.A.push_back(s * c.lhs.matrix());
    sf.b(j) = s * c.rhs;
    for (int k = 0; k < static_cast<int>(c.scalar_coeffs.size()); ++k) {
      sf.Af(j, k) = s * c.scalar_coeffs[k];
    }
    if (c.sense == Sense::LessEqual) sf.Al(j, slack++) = 1.0;
    if (c.sense == Sense::GreaterEqual) sf.Al(j, slack++) = -1.0;
  }
  // Free scalars may end up with tiny coefficients after row scaling (a
  // parametric row dominated by its matrix part); rescale each column to
  // unit max-abs so the eliminated block stays well conditioned.
  sf.col_scale = RVector::Ones(sf.q);
  RVector cf = Eigen::Map<const RVector>(prob.scalar_objective.data(), sf.q);
  for (int k = 0; k < sf.q; ++k) {
    const double mx = sf.Af.col(k).cwiseAbs().maxCoeff();
    if (mx > 0.0) {
      sf.col_scale(k) = 1.0 / mx;
      sf.Af.col(k) *= sf.col_scale(k);
      cf(k) *= sf.col_scale(k);
    }
  }
  const double cnorm2 = prob.objective.matrix().squaredNorm() + cf.squaredNorm();
  sf.obj_scale = 1.0 / std::max(1.0, std::sqrt(cnorm2));
  sf.C = sf.obj_scale * prob.objective.matrix();
  sf.cf = sf.obj_scale * cf;
  return sf;
}

struct Iterate {
  CMatrix X, Z;
  RVector x, z;  // slack block and its dual
  RVector t;     // free scalars
  RVector y;
};

struct Residuals {
  RVector rp;
  CMatrix Rd;
  RVector rdl, rdf;
  double pobj = 0.0, dobj = 0.0, mu = 0.0;
};

Residuals residuals(const StandardForm& sf, const Iterate& it) {
  Residuals r;
  r.rp = sf.b - sf.Al * it.x - sf.Af * it.t;
  r.Rd = sf.C - it.Z;
  for (int j = 0; j < sf.m; ++j) {
    r.rp(j) -= real_inner(sf.A[j], it.X);
    r.Rd -= it.y(j) * sf.A[j];
  }
  r.rdl = -sf.Al.transpose() * it.y - it.z;
  r.rdf = sf.cf - sf.Af.transpose() * it.y;
  r.pobj = real_inner(sf.C, it.X) + sf.cf.dot(it.t);
  r.dobj = sf.b.dot(it.y);
  r.mu = (real_inner(it.X, it.Z) + it.x.dot(it.z)) / static_cast<double>(sf.n + sf.p);
  return r;
}

struct Direction {
  CMatrix dX, dZ;
  RVector dx, dz, dt, dy;
};

}  // namespace

SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& options) {
  problem.validate();
  const StandardForm sf = to_standard_form(problem);
  const Index n = sf.n;
  const int m = sf.m, p = sf.p, q = sf.q;

  double max_a = 0.0;
  double xi_rhs = 0.0;
  for (int j = 0; j < m; ++j) {
    const double an = sf.A[j].norm();
    max_a = std::max(max_a, an);
    xi_rhs = std::max(xi_rhs, (1.0 + std::abs(sf.b(j))) / (1.0 + an));
  }
  const double rootn = std::sqrt(static_cast<double>(n));
  const double xi = std::max({10.0, rootn, static_cast<double>(n) * xi_rhs});
  const double eta = std::max({10.0, rootn, max_a, sf.C.norm()});

  Iterate it;
  it.X = xi * CMatrix::Identity(n, n);
  it.Z = eta * CMatrix::Identity(n, n);
  it.x = RVector::Constant(p, xi);
  it.z = RVector::Constant(p, eta);
  it.t = RVector::Zero(q);
  it.y = RVector::Zero(m);

  const double b_norm = sf.b.norm();
  const double c_norm = std::sqrt(sf.C.squaredNorm() + sf.cf.squaredNorm());

  SdpSolution sol;
  auto finish = [&](SdpStatus status, const Residuals& r, int iters) {
    sol.status = status;
    sol.iterations = iters;
    sol.X = HermitianMatrix(it.X);
    sol.dual_slack = HermitianMatrix(it.Z / sf.obj_scale);
    const RVector t = sf.col_scale.cwiseProduct(it.t);
    sol.scalars.assign(t.data(), t.data() + q);
    sol.duals.resize(m);
    for (int j = 0; j < m; ++j) sol.duals[j] = it.y(j) * sf.row_scale(j) / sf.obj_scale;
    sol.primal_objective = r.pobj / sf.obj_scale;
    sol.dual_objective = r.dobj / sf.obj_scale;
    sol.gap = std::max(std::abs(r.pobj - r.dobj), r.mu * static_cast<double>(n + p)) /
              (1.0 + std::abs(r.pobj) + std::abs(r.dobj));
    sol.accuracy = std::max({r.rp.norm() / (1.0 + b_norm),
                             std::sqrt(r.Rd.squaredNorm() + r.rdl.squaredNorm() +
                                       r.rdf.squaredNorm()) / (1.0 + c_norm),
                             sol.gap});
    // Violation of the original constraints, not of the slack equations.
    sol.primal_residual = 0.0;
    for (int j = 0; j < m; ++j) {
      const auto& c = problem.constraints[j];
      const double v = constraint_value(c, sol.X, sol.scalars);
      double viol = 0.0;
      if (c.sense == Sense::Equal) viol = std::abs(v - c.rhs);
      if (c.sense == Sense::LessEqual) viol = std::max(0.0, v - c.rhs);
      if (c.sense == Sense::GreaterEqual) viol = std::max(0.0, c.rhs - v);
      sol.primal_residual = std::max(sol.primal_residual, viol / (1.0 + std::abs(c.rhs)));
    }
    sol.dual_residual =
        std::sqrt(r.Rd.squaredNorm() + r.rdl.squaredNorm() + r.rdf.squaredNorm()) / (1.0 + c_norm);
    return sol;
  };

  constexpr double kInfeasTol = 1e-8;
  int stalled = 0;
  Residuals r = residuals(sf, it);

  // Near the solution the Schur complement becomes ill-conditioned and a
  // step can destroy accuracy already reached; the best iterate is kept and
  // returned when the run breaks down.
  Iterate best = it;
  double best_merit = std::numeric_limits<double>::infinity();
  auto fail = [&](SdpStatus status, int iters) {
    it = best;
    const Residuals rb = residuals(sf, it);
    return finish(best_merit <= options.tol ? SdpStatus::Optimal : status, rb, iters);
  };

  for (int iter = 0; iter <= options.max_iter; ++iter) {
    r = residuals(sf, it);
    const double pinf = r.rp.norm() / (1.0 + b_norm);
    const double dinf =
        std::sqrt(r.Rd.squaredNorm() + r.rdl.squaredNorm() + r.rdf.squaredNorm()) / (1.0 + c_norm);
    const double comp = r.mu * static_cast<double>(n + p);
    const double denom = 1.0 + std::abs(r.pobj) + std::abs(r.dobj);
    const double rel_gap = std::max(std::abs(r.pobj - r.dobj), comp) / denom;

    if (pinf <= options.tol && dinf <= options.tol && rel_gap <= options.tol) {
      return finish(SdpStatus::Optimal, r, iter);
    }
    const double merit = std::max({pinf, dinf, rel_gap});
    if (merit < best_merit) {
      best_merit = merit;
      best = it;
    } else if (best_merit < 1e-6 && merit > 1e3 * best_merit) {
      return fail(SdpStatus::NumericalError, iter);
    }

    // Farkas certificates from diverging iterates.
    if (r.dobj > 0.0) {
      const double ray = std::sqrt((sf.C - r.Rd).squaredNorm() + r.rdl.squaredNorm() +
                                   (sf.cf - r.rdf).squaredNorm());
      if (ray / r.dobj < kInfeasTol) return finish(SdpStatus::Infeasible, r, iter);
    }
    if (r.pobj < 0.0) {
      const double ray = (sf.b - r.rp).norm();
      if (ray / -r.pobj < kInfeasTol) return finish(SdpStatus::Unbounded, r, iter);
    }
    if (iter == options.max_iter) break;

    // Schur complement M_ij = Re <A_i, X A_j Z^-1> + (Al D Al^T)_ij.
    Eigen::LLT<CMatrix> zllt(it.Z);
    if (zllt.info() != Eigen::Success) return fail(SdpStatus::NumericalError, iter);
    const CMatrix Zinv = zllt.solve(CMatrix::Identity(n, n));
    std::vector<CMatrix> G(m);
    Eigen::MatrixXd M(m, m);
    for (int j = 0; j < m; ++j) G[j] = it.X * sf.A[j] * Zinv;
    for (int i = 0; i < m; ++i) {
      for (int j = i; j < m; ++j) {
        const double v = real_inner(sf.A[i], G[j]);
        M(i, j) = v;
        M(j, i) = v;
      }
    }
    const RVector D = it.x.cwiseQuotient(it.z);
    M += sf.Al * D.asDiagonal() * sf.Al.transpose();

    Eigen::LDLT<Eigen::MatrixXd> mfact(M);
    if (mfact.info() != Eigen::Success) return fail(SdpStatus::NumericalError, iter);
    Eigen::MatrixXd W, S;
    Eigen::LDLT<Eigen::MatrixXd> sfact;
    if (q > 0) {
      W = mfact.solve(sf.Af);
      S = sf.Af.transpose() * W;
      sfact.compute(S);
    }

    const CMatrix XRdZinv = it.X * r.Rd * Zinv;
    auto direction = [&](double sigma_mu, const CMatrix* corr, const RVector* corr_l) {
      CMatrix base = sigma_mu * Zinv - XRdZinv;
      if (corr) base -= (*corr) * Zinv;
      const CMatrix K = herm_part(base) - it.X;
      RVector kl = RVector::Constant(p, sigma_mu).cwiseQuotient(it.z) - it.x -
                   D.cwiseProduct(r.rdl);
      if (corr_l) kl -= corr_l->cwiseQuotient(it.z);
      RVector rhs = r.rp - sf.Al * kl;
      for (int j = 0; j < m; ++j) rhs(j) -= real_inner(sf.A[j], K);

      Direction d;
      if (q > 0) {
        d.dt = sfact.solve(sf.Af.transpose() * mfact.solve(rhs) - r.rdf);
        d.dy = mfact.solve(rhs - sf.Af * d.dt);
      } else {
        d.dt = RVector::Zero(0);
        d.dy = mfact.solve(rhs);
      }
      d.dZ = r.Rd;
      d.dX = K;
      for (int j = 0; j < m; ++j) {
        d.dZ -= d.dy(j) * sf.A[j];
        d.dX += d.dy(j) * herm_part(G[j]);
      }
      d.dz = r.rdl - sf.Al.transpose() * d.dy;
      d.dx = kl + D.cwiseProduct(sf.Al.transpose() * d.dy);
      return d;
    };

    auto step_lengths = [&](const Direction& d, double& ap, double& ad) {
      const double sp = max_psd_step(it.X, d.dX);
      const double sd = max_psd_step(it.Z, d.dZ);
      if (sp < 0.0 || sd < 0.0) return false;
      ap = std::min({1.0, sp, max_orthant_step(it.x, d.dx)});
      ad = std::min({1.0, sd, max_orthant_step(it.z, d.dz)});
      return true;
    };

    // Predictor.
    const Direction aff = direction(0.0, nullptr, nullptr);
    double ap_aff = 0.0, ad_aff = 0.0;
    if (!step_lengths(aff, ap_aff, ad_aff)) return fail(SdpStatus::NumericalError, iter);
    const double mu_aff =
        (real_inner(it.X + ap_aff * aff.dX, it.Z + ad_aff * aff.dZ) +
         (it.x + ap_aff * aff.dx).dot(it.z + ad_aff * aff.dz)) /
        static_cast<double>(n + p);
    const double sigma = std::clamp(std::pow(mu_aff / r.mu, 3.0), 0.0, 1.0);

    // Corrector.
    const CMatrix corr = aff.dX * aff.dZ;
    const RVector corr_l = aff.dx.cwiseProduct(aff.dz);
    const Direction d = direction(sigma * r.mu, &corr, &corr_l);
    double ap = 0.0, ad = 0.0;
    if (!step_lengths(d, ap, ad)) return fail(SdpStatus::NumericalError, iter);
    const double gamma = 0.9 + 0.09 * std::min(ap, ad);
    ap = std::min(1.0, gamma * ap);
    ad = std::min(1.0, gamma * ad);

    it.X = herm_part(it.X + ap * d.dX);
    it.x += ap * d.dx;
    it.t += ap * d.dt;
    it.y += ad * d.dy;
    it.Z = herm_part(it.Z + ad * d.dZ);
    it.z += ad * d.dz;

    if (!it.X.allFinite() || !it.Z.allFinite() || !it.y.allFinite()) {
      return fail(SdpStatus::NumericalError, iter + 1);
    }
    stalled = (ap < 1e-10 && ad < 1e-10) ? stalled + 1 : 0;
    if (stalled >= 3) return fail(SdpStatus::NumericalError, iter + 1);
  }
  return fail(SdpStatus::MaxIter, options.max_iter);
}

void write_sdp(std::ostream& os, const SdpProblem& problem) {
  problem.validate();
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(17);
  auto write_matrix = [&](const HermitianMatrix& a) {
    for (Index r = 0; r < a.dim(); ++r) {
      for (Index c = 0; c < a.dim(); ++c) {
        os << (c ? " " : "") << a(r, c).real() << ',' << a(r, c).imag();
      }
      os << '\n';
    }
  };
  os << "twr-sdp 1\n";
  os << "dim " << problem.dim << " constraints " << problem.constraints.size() << " scalars "
     << problem.scalars() << '\n';
  os << "objective\n";
  write_matrix(problem.objective);
  os << "scalar_objective";
  for (double c : problem.scalar_objective) os << ' ' << c;
  os << '\n';
  for (std::size_t j = 0; j < problem.constraints.size(); ++j) {
    const auto& c = problem.constraints[j];
    const char* sense = c.sense == Sense::LessEqual      ? "le"
                        : c.sense == Sense::GreaterEqual ? "ge"
                                                         : "eq";
    os << "constraint " << j << ' ' << sense << ' ' << c.rhs << " scalars";
    for (int k = 0; k < problem.scalars(); ++k) {
      os << ' ' << (c.scalar_coeffs.empty() ? 0.0 : c.scalar_coeffs[k]);
    }
    os << '\n';
    write_matrix(c.lhs);
  }
  os.flags(flags);
  os.precision(prec);
}

}  // namespace twr
