#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "twr/error.hpp"
#include "twr/monotonic.hpp"

using namespace twr;

namespace {

RVector vec2(double a, double b) {
  RVector z(2);
  z << a, b;
  return z;
}

DinkelbachOptions tight() {
  DinkelbachOptions o;
  o.stop_tol = 1e-9;
  o.sdp.tol = 1e-9;
  return o;
}

struct WsrCase {
  SystemInstance inst;
  MaxMinSpec spec;
  RVector corner;
};

WsrCase wsr_case(std::uint64_t seed, double snr_db) {
  const double p = testing::db_to_linear(snr_db);
  WsrCase c{make_symmetric_instance(generate_channels(seed, 1, 2), p, p, 1.0), {}, {}};
  c.spec = twr_maxmin_spec(build_forms(c.inst), {1.0, 1.0}, p);
  c.corner = tight_initial_vertex(c.inst);
  return c;
}

// 1 + SINR of a random relay matrix scaled onto the budget.
RVector random_achievable(Rng& rng, const SystemInstance& inst) {
  CMatrix A = testing::random_matrix(rng, inst.relay_antennas, inst.relay_antennas);
  A *= std::sqrt(inst.power_budget / relay_power_of_A(inst, A));
  const auto s = sinr_of_A(inst, A);
  RVector z(inst.users());
  for (int i = 0; i < inst.users(); ++i) z(i) = 1.0 + s[i];
  return z;
}

}  // namespace

TEST_SUITE("monotonic") {
  TEST_CASE("utility values") {
    const auto wsr = Utility::weighted_sum_rate({1.0, 1.0});
    CHECK(wsr(vec2(1, 1)) == doctest::Approx(0.0));
    CHECK(wsr(vec2(2, 4)) == doctest::Approx(1.5));
    const auto mse = Utility::neg_weighted_sum_mse({1.0, 2.0});
    CHECK(mse(vec2(2, 4)) == doctest::Approx(-1.0));
    const auto ser = Utility::neg_weighted_sum_ser({1.0, 3.0}, Modulation::Qpsk);
    CHECK(ser(vec2(1, 1)) == doctest::Approx(-0.5 * 4.0));
    CHECK_THROWS_AS(wsr(vec2(0.5, 2)), DomainError);
    CHECK_THROWS_AS(wsr(RVector::Ones(3)), DimensionError);
    CHECK_THROWS_AS(Utility::weighted_sum_rate({1.0, 0.0}), DomainError);
  }

  TEST_CASE("Q-function and error rates") {
    CHECK(q_function(0.0) == doctest::Approx(0.5));
    CHECK(q_function(1.959963984540054) == doctest::Approx(0.025).epsilon(1e-9));
    // BPSK: Q(sqrt(2 s)); QPSK per quadrature: Q(sqrt(s)).
    CHECK(symbol_error_rate(2.0, Modulation::Bpsk) == doctest::Approx(q_function(2.0)));
    CHECK(symbol_error_rate(4.0, Modulation::Qpsk) == doctest::Approx(q_function(2.0)));
    CHECK_THROWS_AS(symbol_error_rate(-1.0, Modulation::Bpsk), DomainError);
  }

  TEST_CASE("utilities increase in every coordinate") {
    for (const auto& u : {Utility::weighted_sum_rate({0.2, 0.8, 0.5}),
                          Utility::neg_weighted_sum_mse({0.2, 0.8, 0.5}),
                          Utility::neg_weighted_sum_ser({0.2, 0.8, 0.5}, Modulation::Bpsk)}) {
      for (double base : {1.2, 2.0, 5.0}) {
        const RVector z = RVector::Constant(3, base);
        for (int i = 0; i < 3; ++i) {
          RVector zp = z;
          zp(i) += 1e-6;
          CHECK(u(zp) > u(z));
        }
      }
    }
    CHECK_THROWS_AS(Utility::custom([](const RVector& z) { return -z.sum(); }, 2), DomainError);
  }

  TEST_CASE("children and proper filter") {
    const auto kids = children(vec2(4, 4), vec2(2, 3));
    REQUIRE(kids.size() == 2);
    CHECK(kids[0] == vec2(2, 4));
    CHECK(kids[1] == vec2(4, 3));
    CHECK(children(vec2(4, 4), vec2(4, 4)).empty());
    const auto kept = proper_filter({vec2(2, 4), vec2(4, 3), vec2(3, 3)}, {});
    CHECK(kept.size() == 2);
    CHECK(proper_filter({vec2(1, 1)}, {vec2(2, 2)}).empty());
    CHECK(proper_filter({vec2(1, 1), vec2(1, 1)}, {}).size() == 1);
  }

  TEST_CASE("predicate set projection") {
    PredicateSet g(2, vec2(4, 4), [](const RVector& z) { return z.sum() <= 4.0; });
    const auto p = g.project(vec2(4, 4), nullptr);
    CHECK(p.lambda == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(p.y(0) == doctest::Approx(2.0).epsilon(1e-10));
    const auto again = g.project(p.y, nullptr);
    CHECK(again.lambda == doctest::Approx(1.0).epsilon(1e-10));
  }

  TEST_CASE("synthetic disc: linear objective reaches 4 / (1 + eps)") {
    PredicateSet g(2, vec2(std::sqrt(8.0), std::sqrt(8.0)),
                   [](const RVector& z) { return z.squaredNorm() <= 8.0; });
    const auto phi = Utility::custom([](const RVector& z) { return z.sum(); }, 2);
    const auto r = polyblock_maximize(g, phi, {.epsilon = 0.01});
    CHECK(r.status == PolyblockStatus::Converged);
    CHECK(r.cbv >= 4.0 / 1.01);
    CHECK(r.cbv <= 4.0 + 1e-9);
    CHECK(r.upper_bound <= 1.01 * r.cbv + 1e-12);
  }

  TEST_CASE("trace invariants and proper vertex set") {
    const auto c = wsr_case(31, 10.0);
    SinrRegion g(c.spec, c.corner, tight());
    PolyblockOptions o;
    o.epsilon = 0.01;
    bool proper = true;
    o.observer = [&](const PolyblockTraceRow&, const std::vector<Vertex>& T) {
      for (std::size_t a = 0; a < T.size(); ++a) {
        for (std::size_t b = 0; b < T.size(); ++b) {
          if (a != b && dominated(T[a].z, T[b].z)) proper = false;
        }
      }
    };
    const auto r = polyblock_maximize(g, Utility::weighted_sum_rate({0.2, 0.8}), o);
    CHECK(proper);
    REQUIRE(!r.trace.empty());
    for (std::size_t k = 0; k < r.trace.size(); ++k) {
      CHECK(r.trace[k].cbv <= r.trace[k].upper_bound + 1e-9);
      if (k > 0) {
        CHECK(r.trace[k].cbv >= r.trace[k - 1].cbv);
        CHECK(r.trace[k].upper_bound <= r.trace[k - 1].upper_bound + 1e-12);
      }
    }
    CHECK(r.status == PolyblockStatus::Converged);
    CHECK(r.upper_bound <= 1.01 * r.cbv);
    std::ostringstream os;
    write_polyblock_trace(os, r.trace);
    CHECK(os.str().rfind("iteration,vertices,projections,cbv,upper_bound\n", 0) == 0);
  }

  TEST_CASE("containment: achievable points stay under the polyblock") {
    const auto c = wsr_case(5, 10.0);
    Rng rng(8);
    std::vector<RVector> pts;
    for (int s = 0; s < 200; ++s) pts.push_back(random_achievable(rng, c.inst));
    const auto u = Utility::weighted_sum_rate({0.2, 0.8});
    auto covered = [&](const RVector& z, const std::vector<Vertex>& T) {
      for (const auto& v : T) {
        if (dominated(z, v.z)) return true;
      }
      return false;
    };
    // Without pruning every achievable point is covered.
    {
      SinrRegion g(c.spec, c.corner, tight());
      PolyblockOptions o;
      o.prune_by_cbv = false;
      o.max_projections = 25;
      int misses = 0;
      o.observer = [&](const PolyblockTraceRow&, const std::vector<Vertex>& T) {
        for (const auto& z : pts) misses += !covered(z, T);
      };
      polyblock_maximize(g, u, o);
      CHECK(misses == 0);
    }
    // With pruning, points that could still beat the incumbent are covered.
    {
      SinrRegion g(c.spec, c.corner, tight());
      PolyblockOptions o;
      int misses = 0;
      o.observer = [&](const PolyblockTraceRow& row, const std::vector<Vertex>& T) {
        for (const auto& z : pts) {
          if (u(z) > row.cbv + o.epsilon * std::abs(row.cbv)) misses += !covered(z, T);
        }
      };
      polyblock_maximize(g, u, o);
      CHECK(misses == 0);
    }
  }

  TEST_CASE("initial vertex") {
    std::vector<CVector> ch(2, CVector::Ones(1));
    const auto scalar = make_symmetric_instance(ch, 1.0, 3.0, 1.0);
    CHECK(initial_vertex(scalar) == vec2(4, 4));
    Rng rng(12);
    for (int t = 0; t < 5; ++t) {
      const auto inst = make_symmetric_instance(generate_channels(40 + t, 2, 3), 4.0, 6.0, 0.7);
      const RVector d = initial_vertex(inst);
      const RVector dt = tight_initial_vertex(inst);
      const RVector ds = spec_upper_corner(twr_maxmin_spec(build_forms(inst), {1, 1, 1, 1}, 6.0));
      CHECK(d.size() == 4);
      CHECK((dt.array() <= d.array()).all());
      for (int s = 0; s < 100; ++s) {
        const RVector z = random_achievable(rng, inst);
        CHECK(dominated(z, d));
        CHECK(dominated(z, dt));
        CHECK(dominated(z, ds));
      }
    }
  }

  TEST_CASE("scalar projection lands on the closed-form boundary") {
    // |a|^2 <= 1 gives SINR 0.5 for both users, so z = (4, 4) projects to (1.5, 1.5).
    std::vector<CVector> ch(2, CVector::Ones(1));
    const auto inst = make_symmetric_instance(ch, 1.0, 3.0, 1.0);
    SinrRegion g(twr_maxmin_spec(build_forms(inst), {1.0, 1.0}, 3.0), vec2(4, 4), tight());
    const auto p = g.project(vec2(4, 4), nullptr);
    CHECK(p.y(0) == doctest::Approx(1.5).epsilon(1e-6));
    CHECK(p.y(1) == doctest::Approx(1.5).epsilon(1e-6));
    const auto again = g.project(p.y, &p);
    CHECK(again.lambda == doctest::Approx(1.0).epsilon(1e-6));
  }

  TEST_CASE("two-user sum rate matches ray sampling") {
    const auto c = wsr_case(17, 10.0);
    const auto u = Utility::weighted_sum_rate({0.2, 0.8});
    const auto r = maximize_utility(c.spec, c.corner, u, {.epsilon = 0.01}, tight());
    // Boundary of the achievable region along 100 rays, via the same projection.
    SinrRegion g(c.spec, c.corner, tight());
    double best = -1.0;
    for (int k = 1; k < 100; ++k) {
      const double th = 0.5 * M_PI * k / 100.0;
      const auto p = g.project(vec2(1.0 + 50.0 * std::cos(th), 1.0 + 50.0 * std::sin(th)), nullptr);
      if ((p.y.array() >= 1.0).all()) best = std::max(best, u(p.y));
    }
    CHECK(r.polyblock.cbv >= best / 1.01 - 1e-3);
    CHECK(r.rank_one);
    CHECK(r.feasible_value == doctest::Approx(r.polyblock.cbv).epsilon(1e-4));
  }

  TEST_CASE("seed rays give an incumbent at least as good as the seed") {
    const auto c = wsr_case(23, 0.0);
    const auto u = Utility::weighted_sum_rate({0.2, 0.8});
    SinrRegion g(c.spec, c.corner, tight());
    const RVector ray = vec2(1.1, 1.05);
    PolyblockOptions o;
    o.seed_rays = {ray};
    o.max_projections = 1;
    const auto r = polyblock_maximize(g, u, o);
    CHECK(r.projections == 1);
    CHECK(r.status == PolyblockStatus::ProjectionCap);
    CHECK(r.cbv >= u(ray));
  }

  TEST_CASE("MSE and SER criteria run and improve on the max-min point") {
    const auto c = wsr_case(29, 5.0);
    for (const auto& u : {Utility::neg_weighted_sum_mse({0.2, 0.8}),
                          Utility::neg_weighted_sum_ser({0.2, 0.8}, Modulation::Bpsk)}) {
      const auto r = maximize_utility(c.spec, c.corner, u, {.epsilon = 0.01}, tight());
      SinrRegion g(c.spec, c.corner, tight());
      const auto mm = g.project(RVector::Ones(2), nullptr);
      CHECK(r.polyblock.cbv >= u(mm.y) - 1e-9);
    }
  }

  TEST_CASE("bad arguments") {
    PredicateSet g(2, vec2(4, 4), [](const RVector& z) { return z.sum() <= 4.0; });
    const auto u = Utility::weighted_sum_rate({1.0, 1.0});
    CHECK_THROWS_AS(polyblock_maximize(g, u, {.epsilon = 0.0}), DomainError);
    CHECK_THROWS_AS(polyblock_maximize(g, Utility::weighted_sum_rate({1, 1, 1})), DimensionError);
    PredicateSet below(2, vec2(0.5, 4), [](const RVector& z) { return z.sum() <= 4.0; });
    CHECK_THROWS_AS(polyblock_maximize(below, u), DomainError);
  }
}
