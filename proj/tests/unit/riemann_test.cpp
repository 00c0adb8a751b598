#include <doctest.h>

#include <cmath>
#include <random>

#include "jfv/riemann.hpp"
#include "jfv/suite.hpp"
#include "support.hpp"

using namespace jfv;
using jfv::test::lwr;
using jfv::test::one_to_one;
using jfv::test::state;

TEST_CASE("scalar fan shock and rarefaction") {
  const ScalarFan shock(lwr(), 0.2, 0.6);
  CHECK(shock.min_speed() == doctest::Approx(0.2));
  CHECK(shock.max_speed() == doctest::Approx(0.2));
  CHECK(shock(0.19) == 0.2);
  CHECK(shock(0.21) == 0.6);

  const ScalarFan fan(lwr(), 0.8, 0.2);
  CHECK(fan.min_speed() == doctest::Approx(-0.6));
  CHECK(fan.max_speed() == doctest::Approx(0.6));
  CHECK(fan(-0.7) == 0.8);
  CHECK(fan(0.0) == doctest::Approx(0.5));
  CHECK(fan(0.3) == doctest::Approx(0.35));
  CHECK(fan(0.7) == 0.2);
}

TEST_CASE("scalar fan envelope matches the closed form") {
  // The cubic has no closed form; its fan must still be monotone in xi and
  // reproduce the data outside the wave.
  const auto cubic = Flux::polynomial({0.0, 1.0, 0.0, -1.0}, 0.0, 1.0);
  const ScalarFan fan(cubic, 0.9, 0.1);
  double previous = fan(-10.0);
  CHECK(previous == 0.9);
  for (int k = -100; k <= 100; ++k) {
    const double v = fan(0.03 * k);
    CHECK(v <= previous + 1e-14);
    previous = v;
  }
  CHECK(fan(10.0) == 0.1);
  CHECK(fan.min_speed() == doctest::Approx(cubic.derivative(0.9)).epsilon(1e-3));
}

TEST_CASE("junction Riemann solver examples") {
  const auto worked = riemann_solve(worked_example_spec(), worked_example_datum());
  CHECK(worked.junction.fluxes[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(worked.junction.fluxes[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(worked.junction.fluxes[2] == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(is_germ_member(worked_example_spec(), worked.traces));

  const auto spec = one_to_one();
  const auto sol = riemann_solve(spec, state({0.8, 0.2}));
  CHECK(sol.traces[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(sol.traces[1] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(sol.sample(0, -0.7) == 0.8);
  CHECK(sol.sample(0, -0.3) == doctest::Approx(0.65).epsilon(1e-9));
  CHECK(sol.sample(1, 0.3) == doctest::Approx(0.35).epsilon(1e-9));
  CHECK(sol.sample(1, 0.7) == 0.2);

  const auto still = riemann_solve(spec, state({0.2, 0.8}));
  CHECK(still.traces[0] == 0.2);
  CHECK(still.traces[1] == 0.8);
  for (double xi : {-1.0, -0.1, -1e-9}) CHECK(still.sample(0, xi) == 0.2);
  for (double xi : {1e-9, 0.1, 1.0}) CHECK(still.sample(1, xi) == 0.8);
}

TEST_CASE("Riemann solver is idempotent on its traces") {
  std::mt19937_64 rng(47);
  for (const auto& topo : reference_topologies()) {
    for (int n = 0; n < 300; ++n) {
      const auto first = riemann_solve(topo.spec, test::random_state(topo.spec, rng));
      CHECK(is_germ_member(topo.spec, first.traces));
      const auto second = riemann_solve(topo.spec, first.traces);
      CHECK((second.traces - first.traces).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK((second.junction.fluxes - first.junction.fluxes).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("traces reproduce the junction fluxes") {
  std::mt19937_64 rng(53);
  for (const auto& topo : reference_topologies()) {
    for (int n = 0; n < 300; ++n) {
      const auto sol = riemann_solve(topo.spec, test::random_state(topo.spec, rng));
      for (int h = 0; h < topo.spec.roads(); ++h) {
        CHECK(topo.spec.flux(h)(sol.traces[h]) == doctest::Approx(sol.junction.fluxes[h]).epsilon(1e-9));
      }
    }
  }
}
