#include <cmath>

#include <doctest.h>

#include "kinplume/core.hpp"
#include "oracles.hpp"

using namespace kinplume;

TEST_CASE("derive: kinetics-induced dispersion for equal slow rates") {
  const auto dq = derive({0.2, 0.2}, {1.0, 0.0, 0.0});
  CHECK(dq.d_star == doctest::Approx(0.625).epsilon(1e-14));
  CHECK(std::trunc(dq.d_star * 100.0) / 100.0 == doctest::Approx(0.62));
}

TEST_CASE("derive: equal rates halve the velocity") {
  for (double r : {0.01, 1.0, 37.0}) {
    const auto dq = derive({r, r}, {3.0, 0.1, 0.0});
    CHECK(dq.v_star == doctest::Approx(1.5));
    CHECK(dq.v_e == dq.v_star);
  }
}

TEST_CASE("derive: no adsorption") {
  const auto dq = derive({0.0, 2.0}, {1.0, 0.3, 0.0});
  CHECK(dq.d_star == 0.0);
  CHECK(dq.pi_f == 1.0);
  CHECK(dq.require_retardation() == 1.0);
  CHECK(dq.d_e == doctest::Approx(0.3));
}

TEST_CASE("derive: retardation undefined without release") {
  const auto dq = derive({1.0, 0.0}, {1.0, 0.0, 0.0});
  CHECK_FALSE(dq.retardation.has_value());
  CHECK_THROWS_AS(dq.require_retardation(), DegenerateKinetics);
}

TEST_CASE("derive: parameter validation") {
  CHECK_THROWS_AS(derive({0.0, 0.0}, {1.0, 0.0, 0.0}), InvalidParameter);
  CHECK_THROWS_AS(derive({-1.0, 1.0}, {1.0, 0.0, 0.0}), InvalidParameter);
  CHECK_THROWS_AS(derive({1.0, 1.0}, {-1.0, 0.0, 0.0}), InvalidParameter);
  CHECK_THROWS_AS(derive({1.0, 1.0}, {1.0, NAN, 0.0}), InvalidParameter);
}

TEST_CASE("stationary law sums to one and d_e >= d_star") {
  for (double l : {0.0, 0.3, 1.0, 7.5}) {
    for (double m : {0.1, 1.0, 4.0}) {
      const auto dq = derive({l, m}, {1.3, 0.2, 0.0});
      CHECK(dq.pi_f + dq.pi_a == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(dq.d_e >= dq.d_star);
      CHECK(dq.require_retardation() >= 1.0);
    }
  }
}

TEST_CASE("derive is scale covariant") {
  const KineticsParams kin{0.7, 1.9};
  const TransportParams tp{1.2, 0.0, 0.0};
  const auto base = derive(kin, tp);
  for (double c : {0.1, 3.0, 50.0}) {
    const auto s = derive({c * kin.lambda, c * kin.mu}, tp);
    CHECK(s.pi_f == doctest::Approx(base.pi_f));
    CHECK(s.pi_a == doctest::Approx(base.pi_a));
    CHECK(s.v_star == doctest::Approx(base.v_star));
    CHECK(s.d_star == doctest::Approx(base.d_star / c));
  }
}

TEST_CASE("discrete kinetics keep the stationary fraction") {
  const KineticsParams kin{0.4, 1.7};
  for (long n : {1L, 10L, 1000L}) {
    const auto dk = DiscreteKinetics::from_rates(kin, 0.5, n);
    CHECK(dk.a / (dk.a + dk.b) == doctest::Approx(kin.pi_free()).epsilon(1e-14));
  }
  CHECK_THROWS_AS(DiscreteKinetics::from_rates({3.0, 1.0}, 1.0, 2), InvalidParameter);
  CHECK_THROWS_AS(DiscreteKinetics::from_rates(kin, 1.0, 0), InvalidParameter);
}

TEST_CASE("scaled coordinates") {
  const auto dq = derive({1.0, 2.0}, {1.0, 0.0, 0.0});
  const double t = 3.0, d_t = 0.2;
  CHECK(scaled_x(dq.v_star * t, t, dq) == doctest::Approx(0.0));
  CHECK(scaled_y(0.0, t, d_t) == 0.0);
  CHECK(scaled_x(dq.v_star * t + std::sqrt(2 * dq.d_star * t), t, dq) == doctest::Approx(1.0));
  const auto [xh, yh] = scaled_coords(dq.v_star * t, std::sqrt(2 * d_t * t), t, dq, d_t);
  CHECK(xh == doctest::Approx(0.0));
  CHECK(yh == doctest::Approx(1.0));
  CHECK_THROWS_AS(scaled_x(1.0, 0.0, dq), DomainError);
  CHECK_THROWS_AS(scaled_y(1.0, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(scaled_x(1.0, 1.0, derive({0.0, 1.0}, {1.0, 0.0, 0.0})), DomainError);
}

TEST_CASE("transition probabilities match the matrix exponential") {
  for (const KineticsParams kin : {KineticsParams{1.0, 1.0}, {0.3, 2.2}, {5.0, 0.0}, {0.0, 4.0}}) {
    for (double t : {1e-6, 0.3, 2.0, 40.0}) {
      for (Phase i : {Phase::Free, Phase::Adsorbed}) {
        for (Phase j : {Phase::Free, Phase::Adsorbed}) {
          CHECK(transition_probability(i, j, t, kin) ==
                doctest::Approx(oracle::transition(i, j, t, kin)).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("phase names round trip") {
  CHECK(parse_phase(to_string(Phase::Adsorbed)) == Phase::Adsorbed);
  CHECK(parse_initial(to_string(Initial::Equilibrium)) == Initial::Equilibrium);
  CHECK_THROWS_AS(parse_phase("solid"), InvalidParameter);
}
