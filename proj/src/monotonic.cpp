#include "twr/monotonic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "twr/error.hpp"

namespace twr {

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double symbol_error_rate(double sinr, Modulation mod) {
  if (sinr < 0.0) throw DomainError("symbol_error_rate: negative SINR");
  const double c = mod == Modulation::Bpsk ? 2.0 : 1.0;
  return q_function(std::sqrt(c * sinr));
}

namespace {

std::vector<double> checked_weights(std::vector<double> w) {
  if (w.empty()) throw DimensionError("Utility: no weights");
  for (double x : w) {
    if (!(x > 0.0)) throw DomainError("Utility: weights must be > 0");
  }
  return w;
}

}  // namespace

Utility Utility::weighted_sum_rate(std::vector<double> weights) {
  Utility u;
  u.kind_ = Kind::WeightedSumRate;
  u.weights_ = checked_weights(std::move(weights));
  u.dims_ = static_cast<int>(u.weights_.size());
  u.check_monotone();
  return u;
}

Utility Utility::neg_weighted_sum_mse(std::vector<double> weights) {
  Utility u;
  u.kind_ = Kind::NegWeightedSumMse;
  u.weights_ = checked_weights(std::move(weights));
  u.dims_ = static_cast<int>(u.weights_.size());
  u.check_monotone();
  return u;
}

Utility Utility::neg_weighted_sum_ser(std::vector<double> weights, Modulation mod) {
  Utility u;
  u.kind_ = Kind::NegWeightedSumSer;
  u.weights_ = checked_weights(std::move(weights));
  u.dims_ = static_cast<int>(u.weights_.size());
  u.mod_ = mod;
  u.check_monotone();
  return u;
}

Utility Utility::custom(std::function<double(const RVector&)> fn, int dims) {
  if (!fn) throw DomainError("Utility::custom: empty evaluator");
  if (dims < 1) throw DimensionError("Utility::custom: dims must be >= 1");
  Utility u;
  u.kind_ = Kind::Custom;
  u.dims_ = dims;
  u.fn_ = std::move(fn);
  u.check_monotone();
  return u;
}

double Utility::operator()(const RVector& z) const {
  if (z.size() != dims_) throw DimensionError("Utility: z has wrong length");
  for (Index i = 0; i < z.size(); ++i) {
    if (!(z(i) >= 1.0)) throw DomainError("Utility: z_i < 1");
  }
  double v = 0.0;
  switch (kind_) {
    case Kind::WeightedSumRate:
      for (int i = 0; i < dims_; ++i) v += 0.5 * weights_[i] * std::log2(z(i));
      return v;
    case Kind::NegWeightedSumMse:
      for (int i = 0; i < dims_; ++i) v -= weights_[i] / z(i);
      return v;
    case Kind::NegWeightedSumSer:
      for (int i = 0; i < dims_; ++i) v -= weights_[i] * symbol_error_rate(z(i) - 1.0, mod_);
      return v;
    case Kind::Custom:
      return fn_(z);
  }
  return v;
}

void Utility::check_monotone() const {
  for (double base : {1.5, 3.0, 10.0}) {
    const RVector z = RVector::Constant(dims_, base);
    const double f0 = (*this)(z);
    for (int i = 0; i < dims_; ++i) {
      RVector zp = z;
      zp(i) += 1e-6 * base;
      if (!((*this)(zp) > f0)) {
        throw DomainError("Utility: not increasing in coordinate " + std::to_string(i) +
                          " at z = " + std::to_string(base));
      }
    }
  }
}

PredicateSet::PredicateSet(int dims, RVector corner, std::function<bool(const RVector&)> inside,
                           double tol)
    : dims_(dims), corner_(std::move(corner)), inside_(std::move(inside)), tol_(tol) {
  if (corner_.size() != dims_) throw DimensionError("PredicateSet: corner has wrong length");
}

Projection PredicateSet::project(const RVector& z, const Projection*) {
  if (z.size() != dims_) throw DimensionError("PredicateSet: z has wrong length");
  double lo = 0.0;
  double hi = 1.0;
  while (inside_(hi * z)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw NumericalError("PredicateSet: set is unbounded along the ray");
  }
  while (hi - lo > tol_ * hi) {
    const double mid = 0.5 * (lo + hi);
    if (inside_(mid * z)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {lo, lo * z, nullptr};
}

SinrRegion::SinrRegion(MaxMinSpec spec, RVector corner, DinkelbachOptions options)
    : spec_(std::move(spec)), corner_(std::move(corner)), options_(std::move(options)) {
  spec_.validate();
  if (spec_.mode != RatioMode::Sinr) {
    throw DomainError("SinrRegion: the spec must describe plain SINRs");
  }
  if (corner_.size() != spec_.users()) throw DimensionError("SinrRegion: corner has wrong length");
  options_.round = false;
}

Projection SinrRegion::project(const RVector& z, const Projection* warm) {
  MaxMinSpec s = spec_;
  s.mode = RatioMode::OnePlusSinr;
  s.weights.assign(z.data(), z.data() + z.size());
  DinkelbachOptions opts = options_;
  if (warm && warm->X) opts.initial = *warm->X;
  const auto r = dinkelbach_maxmin(s, opts);
  dinkelbach_iterations_ += r.iterations;
  return {r.lambda_opt, r.lambda_opt * z, std::make_shared<const HermitianMatrix>(r.X_opt)};
}

RVector initial_vertex(const SystemInstance& inst) {
  inst.validate();
  const int n = inst.users();
  const double lam_min = herm_eig(inst.relay_noise).values(inst.relay_antennas - 1);
  RVector d(n);
  for (int i = 0; i < n; ++i) {
    const int j = partner(i, n);
    // |h_i^T A h_j|^2 <= ||A||_F^2 ||h_i||^2 ||h_j||^2 and ||A||_F^2 <= P / lambda_min(Lambda_R).
    d(i) = lam_min > 0.0 ? 1.0 + inst.user_powers[j] * inst.power_budget *
                                     inst.channels[i].squaredNorm() *
                                     inst.channels[j].squaredNorm() /
                                     (inst.user_noise[i] * lam_min)
                         : std::numeric_limits<double>::infinity();
  }
  return d;
}

RVector tight_initial_vertex(const SystemInstance& inst) {
  RVector d = initial_vertex(inst);
  for (int i = 0; i < inst.users(); ++i) {
    d(i) = std::min(d(i), 1.0 + inst.power_budget * inst.channels[i].squaredNorm() /
                                    inst.user_noise[i]);
  }
  return d;
}

RVector spec_upper_corner(const MaxMinSpec& spec) {
  spec.validate();
  HermitianMatrix S = HermitianMatrix::zero(spec.dim());
  for (const auto& c : spec.power) S += c.form * (1.0 / c.budget);
  const double count = static_cast<double>(spec.power.size());
  RVector d(spec.users());
  for (int i = 0; i < spec.users(); ++i) {
    const double g = generalized_max_eigenvalue(spec.forms.signal[i], S);
    d(i) = 1.0 + count * std::max(g, 0.0) / spec.forms.noise[i];
  }
  return d;
}

std::vector<RVector> children(const RVector& z, const RVector& y, double min_step) {
  if (z.size() != y.size()) throw DimensionError("children: z and y differ in length");
  std::vector<RVector> out;
  for (Index i = 0; i < z.size(); ++i) {
    if (z(i) - y(i) > min_step * std::max(1.0, z(i))) {
      RVector c = z;
      c(i) = y(i);
      out.push_back(std::move(c));
    }
  }
  return out;
}

bool dominated(const RVector& a, const RVector& b) { return (a.array() <= b.array()).all(); }

std::vector<RVector> proper_filter(const std::vector<RVector>& candidates,
                                   const std::vector<RVector>& set) {
  std::vector<RVector> out;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const RVector& c = candidates[k];
    bool keep = true;
    for (const auto& s : set) {
      if (dominated(c, s)) {
        keep = false;
        break;
      }
    }
    for (std::size_t l = 0; keep && l < candidates.size(); ++l) {
      if (l == k || !dominated(c, candidates[l])) continue;
      // Equal candidates: keep the first one only.
      if (dominated(candidates[l], c) && l > k) continue;
      keep = false;
    }
    if (keep) out.push_back(c);
  }
  return out;
}

const char* to_string(PolyblockStatus s) {
  switch (s) {
    case PolyblockStatus::Converged: return "converged";
    case PolyblockStatus::VertexCap: return "vertex-cap";
    case PolyblockStatus::ProjectionCap: return "projection-cap";
  }
  return "unknown";
}

namespace {

bool lex_less(const RVector& a, const RVector& b) {
  for (Index i = 0; i < a.size(); ++i) {
    if (a(i) != b(i)) return a(i) < b(i);
  }
  return false;
}

bool in_h(const RVector& z) { return (z.array() >= 1.0).all(); }

}  // namespace

PolyblockResult polyblock_maximize(NormalSet& set, const Utility& utility,
                                   const PolyblockOptions& options) {
  if (!(options.epsilon > 0.0)) throw DomainError("polyblock_maximize: epsilon must be > 0");
  if (utility.dims() != set.dims()) throw DimensionError("polyblock_maximize: utility dims");

  const RVector corner = set.upper_corner();
  if (!in_h(corner)) throw DomainError("polyblock_maximize: upper corner lies outside H");

  PolyblockResult res;
  res.cbv = -std::numeric_limits<double>::infinity();
  std::vector<Vertex> T{{corner, utility(corner), nullptr}};
  double removed_bound = -std::numeric_limits<double>::infinity();

  auto prunable = [&](double phi) {
    return std::isfinite(res.cbv) && phi <= res.cbv + options.epsilon * std::abs(res.cbv);
  };
  auto current_bound = [&]() {
    double ub = removed_bound;
    for (const auto& v : T) ub = std::max(ub, v.phi);
    return ub;
  };

  for (const auto& ray : options.seed_rays) {
    if (ray.size() != set.dims()) throw DimensionError("polyblock_maximize: seed ray length");
    const Projection proj = set.project(ray, nullptr);
    ++res.projections;
    if (in_h(proj.y) && utility(proj.y) > res.cbv) {
      res.cbv = utility(proj.y);
      res.z_best = proj.y;
      res.X_best = proj.X;
    }
  }

  while (!T.empty()) {
    if (res.projections >= options.max_projections) {
      res.status = PolyblockStatus::ProjectionCap;
      break;
    }
    std::size_t pick = 0;
    for (std::size_t k = 1; k < T.size(); ++k) {
      if (T[k].phi > T[pick].phi || (T[k].phi == T[pick].phi && lex_less(T[k].z, T[pick].z))) {
        pick = k;
      }
    }
    const Vertex v = T[pick];
    T.erase(T.begin() + static_cast<std::ptrdiff_t>(pick));

    const Projection proj = set.project(v.z, v.parent.get());
    ++res.projections;
    if (in_h(proj.y)) {
      const double phi_y = utility(proj.y);
      if (phi_y > res.cbv) {
        res.cbv = phi_y;
        res.z_best = proj.y;
        res.X_best = proj.X;
      }
    }

    auto kids = children(v.z, proj.y);
    if (kids.empty()) removed_bound = std::max(removed_bound, v.phi);
    std::vector<RVector> kept;
    for (auto& c : kids) {
      if (in_h(c)) kept.push_back(std::move(c));
    }
    std::vector<RVector> existing;
    existing.reserve(T.size());
    for (const auto& w : T) existing.push_back(w.z);
    auto parent = std::make_shared<const Projection>(proj);
    const auto fresh = proper_filter(kept, existing);
    if (!fresh.empty()) {
      std::erase_if(T, [&](const Vertex& w) {
        for (const auto& c : fresh) {
          if (dominated(w.z, c)) return true;
        }
        return false;
      });
    }
    for (const auto& c : fresh) T.push_back({c, utility(c), parent});

    if (options.prune_by_cbv) {
      std::vector<Vertex> next;
      next.reserve(T.size());
      for (auto& w : T) {
        if (prunable(w.phi)) {
          removed_bound = std::max(removed_bound, w.phi);
        } else {
          next.push_back(std::move(w));
        }
      }
      T = std::move(next);
    }

    ++res.iterations;
    const PolyblockTraceRow row{res.iterations, static_cast<int>(T.size()), res.projections,
                                res.cbv, current_bound()};
    res.trace.push_back(row);
    if (options.observer) options.observer(row, T);
    if (T.size() > options.max_vertices) {
      res.status = PolyblockStatus::VertexCap;
      break;
    }
  }
  res.upper_bound = current_bound();
  return res;
}

void write_polyblock_trace(std::ostream& os, const std::vector<PolyblockTraceRow>& trace) {
  os << "iteration,vertices,projections,cbv,upper_bound\n";
  const auto prec = os.precision();
  os.precision(12);
  for (const auto& r : trace) {
    os << r.iteration << ',' << r.vertices << ',' << r.projections << ',' << r.cbv << ','
       << r.upper_bound << '\n';
  }
  os.precision(prec);
}

UtilityResult maximize_utility(const MaxMinSpec& spec, const RVector& corner,
                               const Utility& utility, const PolyblockOptions& options,
                               const DinkelbachOptions& dinkelbach) {
  SinrRegion region(spec, corner, dinkelbach);
  UtilityResult out;
  out.polyblock = polyblock_maximize(region, utility, options);
  out.relaxation_value = out.polyblock.cbv;
  if (!out.polyblock.X_best) {
    throw SolverError("maximize_utility: no feasible point in H was found");
  }
  auto value_of = [&](const CVector& a) {
    const auto s = spec.forms.sinr(a);
    RVector z(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) z(static_cast<Index>(i)) = 1.0 + s[i];
    return utility(z);
  };
  const auto ext = extract_rank_one(*out.polyblock.X_best, dinkelbach.rank_one_tol);
  RoundingOptions ro = dinkelbach.rounding;
  if (ext.accepted) ro.samples = 0;
  const auto r = gaussian_rounding(*out.polyblock.X_best, value_of, spec.power, ro);
  out.rank_one = ext.accepted;
  out.beamformer = r.vector;
  out.feasible_value = r.objective;
  out.sinr = spec.forms.sinr(r.vector);
  return out;
}

}  // namespace twr
