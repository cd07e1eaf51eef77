#include "twr/fractional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "twr/error.hpp"

namespace twr {

void MaxMinSpec::validate() const {
  const int n = users();
  if (n < 1) throw DimensionError("MaxMinSpec: no users");
  if (forms.interference.size() != forms.signal.size() ||
      forms.noise.size() != forms.signal.size() ||
      weights.size() != static_cast<std::size_t>(n)) {
    throw DimensionError("MaxMinSpec: per-user data have inconsistent lengths");
  }
  for (int i = 0; i < n; ++i) {
    if (forms.signal[i].dim() != dim() || forms.interference[i].dim() != dim()) {
      throw DimensionError("MaxMinSpec: form dimension mismatch");
    }
    if (!(weights[i] > 0.0)) throw DomainError("MaxMinSpec: weights must be > 0");
    if (!(forms.noise[i] > 0.0)) throw DomainError("MaxMinSpec: noise offsets must be > 0");
  }
  if (power.empty()) throw DomainError("MaxMinSpec: at least one power constraint is required");
  for (const auto& c : power) {
    if (c.form.dim() != dim()) throw DimensionError("MaxMinSpec: power form dimension mismatch");
    if (!(c.budget > 0.0)) throw DomainError("MaxMinSpec: budgets must be > 0");
  }
  if (start.size() != 0 && start.size() != dim()) {
    throw DimensionError("MaxMinSpec: start vector has wrong length");
  }
}

HermitianMatrix MaxMinSpec::numerator_form(int i) const {
  if (mode == RatioMode::Sinr) return forms.signal[i];
  return forms.signal[i] + forms.interference[i];
}

double MaxMinSpec::numerator_offset(int i) const {
  return mode == RatioMode::Sinr ? 0.0 : forms.noise[i];
}

double MaxMinSpec::ratio(int i, const HermitianMatrix& X) const {
  double num = forms.signal[i].inner(X);
  const double den = forms.denominator(i, X);
  if (mode == RatioMode::OnePlusSinr) num += den;
  return num / (weights[i] * den);
}

double MaxMinSpec::ratio(int i, const CVector& a) const {
  double num = forms.signal[i].quad(a);
  const double den = forms.interference[i].quad(a) + forms.noise[i];
  if (mode == RatioMode::OnePlusSinr) num += den;
  return num / (weights[i] * den);
}

double MaxMinSpec::objective(const HermitianMatrix& X) const {
  double v = std::numeric_limits<double>::infinity();
  for (int i = 0; i < users(); ++i) v = std::min(v, ratio(i, X));
  return v;
}

double MaxMinSpec::objective(const CVector& a) const {
  double v = std::numeric_limits<double>::infinity();
  for (int i = 0; i < users(); ++i) v = std::min(v, ratio(i, a));
  return v;
}

bool MaxMinSpec::feasible(const HermitianMatrix& X, double rel_tol) const {
  for (const auto& c : power) {
    if (c.form.inner(X) > c.budget * (1.0 + rel_tol)) return false;
  }
  return herm_eig(X).values(X.dim() - 1) >= -rel_tol * std::max(X.trace(), 1e-300);
}

MaxMinSpec twr_maxmin_spec(const QuadraticForms& forms, const std::vector<double>& targets,
                           double budget) {
  MaxMinSpec spec;
  spec.forms = forms;
  spec.weights = targets;
  spec.power.push_back({forms.E0, budget});
  const Index n = forms.dim();
  const auto M = static_cast<Index>(std::lround(std::sqrt(static_cast<double>(n))));
  if (M * M == n) spec.start = vec(CMatrix::Identity(M, M));
  spec.validate();
  return spec;
}

SdpProblem parametric_sdp(const MaxMinSpec& spec, double lambda,
                          const std::vector<double>& row_scale) {
  if (!(lambda >= 0.0)) throw DomainError("parametric_sdp: lambda must be >= 0");
  spec.validate();
  if (!row_scale.empty() && row_scale.size() != static_cast<std::size_t>(spec.users())) {
    throw DimensionError("parametric_sdp: row_scale length");
  }
  for (double r : row_scale) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("parametric_sdp: row_scale must be > 0");
  }
  SdpProblem p;
  p.dim = spec.dim();
  p.objective = HermitianMatrix::zero(p.dim);
  p.scalar_objective = {-1.0};
  for (int i = 0; i < spec.users(); ++i) {
    const double lw = lambda * spec.weights[i];
    const double inv = row_scale.empty() ? 1.0 : 1.0 / row_scale[i];
    SdpConstraint c;
    c.lhs = inv * (spec.numerator_form(i) - lw * spec.forms.interference[i]);
    c.scalar_coeffs = {-1.0};
    c.sense = Sense::GreaterEqual;
    c.rhs = inv * (lw * spec.forms.noise[i] - spec.numerator_offset(i));
    p.constraints.push_back(std::move(c));
  }
  for (const auto& pc : spec.power) {
    p.constraints.push_back({pc.form, {0.0}, Sense::LessEqual, pc.budget});
  }
  return p;
}

namespace {

HermitianMatrix initial_point(const MaxMinSpec& spec) {
  const CVector dir = spec.start.size() ? spec.start : CVector::Ones(spec.dim());
  const double c = max_feasible_scale(dir, spec.power);
  if (!(c > 0.0)) throw DomainError("dinkelbach_maxmin: start direction uses no power");
  return HermitianMatrix::outer(c * dir);
}

// Interior-point runs that hit the iteration cap close to optimality are
// still usable; anything else is a failure.
bool usable(const SdpSolution& s) {
  if (s.optimal()) return true;
  return (s.status == SdpStatus::MaxIter || s.status == SdpStatus::NumericalError) &&
         s.accuracy <= 1e-6;
}

}  // namespace

RoundedSolution round_solution(const MaxMinSpec& spec, const HermitianMatrix& X,
                               double rank_one_tol, const RoundingOptions& options) {
  const auto ext = extract_rank_one(X, rank_one_tol);
  RoundingOptions opts = options;
  if (ext.accepted) opts.samples = 0;
  const auto r = gaussian_rounding(
      X, [&](const CVector& a) { return spec.objective(a); }, spec.power, opts);
  return {r.vector, r.objective, ext.accepted, ext.ratio};
}

DinkelbachResult dinkelbach_maxmin(const MaxMinSpec& spec, const DinkelbachOptions& options) {
  spec.validate();
  DinkelbachResult res;
  HermitianMatrix X = options.initial ? *options.initial : initial_point(spec);
  double lambda = spec.objective(X);
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw NumericalError("dinkelbach_maxmin: initial point gives a non-finite objective");
  }
  res.lambda_trace.push_back(lambda);

  double scale = 0.0;
  for (int i = 0; i < spec.users(); ++i) {
    scale = std::max(scale, spec.weights[i] * spec.forms.noise[i]);
  }

  std::vector<double> row_scale;
  for (int k = 0; k < options.max_iter; ++k) {
    if (options.normalize) {
      row_scale.resize(spec.users());
      for (int i = 0; i < spec.users(); ++i) {
        row_scale[i] = spec.weights[i] * spec.forms.denominator(i, X);
      }
    }
    const SdpSolution sol = solve_sdp(parametric_sdp(spec, lambda, row_scale), options.sdp);
    ++res.iterations;
    if (!usable(sol)) {
      std::ostringstream msg;
      msg << "dinkelbach_maxmin: parametric SDP failed at iteration " << k + 1
          << " (lambda = " << lambda << "): " << to_string(sol.status);
      throw SolverError(msg.str());
    }
    const double tau = sol.scalars.at(0);
    res.final_parametric = tau;
    const double next = spec.objective(sol.X);
    const bool improved = next > lambda;
    if (improved) {
      lambda = next;
      X = sol.X;
      res.lambda_trace.push_back(lambda);
    }
    const double unit = options.normalize ? 1.0 : scale;
    if (tau <= options.stop_tol * (1.0 + lambda) * unit || !improved) break;
  }
  res.lambda_opt = lambda;
  res.X_opt = X;
  if (options.round) res.rounded = round_solution(spec, X, options.rank_one_tol, options.rounding);
  return res;
}

PowerMinResult power_min(const QuadraticForms& forms, const std::vector<double>& targets,
                         double lambda, const SdpOptions& options) {
  if (targets.size() != forms.signal.size()) throw DimensionError("power_min: target count");
  if (!(lambda >= 0.0)) throw DomainError("power_min: lambda must be >= 0");
  SdpProblem p;
  p.dim = forms.dim();
  p.objective = forms.E0;
  for (int i = 0; i < forms.users(); ++i) {
    const double lg = lambda * targets[i];
    if (!(targets[i] > 0.0)) throw DomainError("power_min: targets must be > 0");
    p.constraints.push_back({forms.signal[i] - lg * forms.interference[i], {},
                             Sense::GreaterEqual, lg * forms.noise[i]});
  }
  const SdpSolution sol = solve_sdp(p, options);
  PowerMinResult out;
  out.status = sol.status;
  out.X = sol.X;
  out.power = forms.E0.inner(sol.X);
  out.iterations = sol.iterations;
  if (!sol.optimal() && usable(sol)) out.status = SdpStatus::Optimal;
  return out;
}

double lambda_upper_bound(const QuadraticForms& forms, const std::vector<double>& targets,
                          double budget) {
  double ub = std::numeric_limits<double>::infinity();
  for (int i = 0; i < forms.users(); ++i) {
    const double g = generalized_max_eigenvalue(forms.signal[i], forms.E0);
    ub = std::min(ub, budget * g / (targets[i] * forms.noise[i]));
  }
  return ub;
}

BisectionResult maxmin_via_powermin(const QuadraticForms& forms,
                                    const std::vector<double>& targets, double budget,
                                    double bisect_tol, const SdpOptions& options) {
  if (!(budget > 0.0) || !(bisect_tol > 0.0)) {
    throw DomainError("maxmin_via_powermin: budget and tolerance must be > 0");
  }
  BisectionResult out;
  auto achievable = [&](double lambda) {
    const auto r = power_min(forms, targets, lambda, options);
    ++out.iterations;
    return r.status == SdpStatus::Optimal && r.power <= budget;
  };
  double lo = 0.0;
  double hi = lambda_upper_bound(forms, targets, budget);
  if (!std::isfinite(hi) || hi <= 0.0) throw NumericalError("maxmin_via_powermin: bad bracket");
  int expand = 0;
  while (achievable(hi)) {
    lo = hi;
    hi *= 2.0;
    if (++expand > 60) throw SolverError("maxmin_via_powermin: bracket expansion failed");
  }
  while (hi - lo > bisect_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (achievable(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
    out.lower_trace.push_back(lo);
    out.upper_trace.push_back(hi);
  }
  out.value = 0.5 * (lo + hi);
  return out;
}

BisectionResult powermin_via_maxmin(const QuadraticForms& forms,
                                    const std::vector<double>& targets, double bisect_tol,
                                    const DinkelbachOptions& options) {
  if (!(bisect_tol > 0.0)) throw DomainError("powermin_via_maxmin: tolerance must be > 0");
  BisectionResult out;
  DinkelbachOptions opts = options;
  opts.round = false;
  std::optional<HermitianMatrix> warm;
  double warm_budget = 0.0;
  auto lambda_at = [&](double budget) {
    MaxMinSpec spec = twr_maxmin_spec(forms, targets, budget);
    opts.initial.reset();
    if (warm) opts.initial = *warm * (budget / warm_budget);
    const auto r = dinkelbach_maxmin(spec, opts);
    ++out.iterations;
    warm = r.X_opt;
    warm_budget = budget;
    return r.lambda_opt;
  };
  double hi = 1.0;
  int expand = 0;
  while (lambda_at(hi) < 1.0) {
    hi *= 2.0;
    if (++expand > 80) throw SolverError("powermin_via_maxmin: bracket expansion failed");
  }
  double lo = 0.5 * hi;
  while (lambda_at(lo) >= 1.0) {
    hi = lo;
    lo *= 0.5;
    if (++expand > 160) throw SolverError("powermin_via_maxmin: bracket expansion failed");
  }
  while (hi - lo > bisect_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (lambda_at(mid) >= 1.0) {
      hi = mid;
    } else {
      lo = mid;
    }
    out.lower_trace.push_back(lo);
    out.upper_trace.push_back(hi);
  }
  out.value = 0.5 * (lo + hi);
  return out;
}

}  // namespace twr
