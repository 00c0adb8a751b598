#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "jfv/errors.hpp"
#include "jfv/flux.hpp"
#include "jfv/suite.hpp"
#include "support.hpp"

using namespace jfv;
using jfv::test::lwr;

namespace {

// Grid min/max of f over I[a, b], the brute-force Godunov oracle.
double grid_godunov(const Flux& f, double a, double b, int n = 10000) {
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  double best = a <= b ? INFINITY : -INFINITY;
  for (int k = 0; k <= n; ++k) {
    const double v = f(lo + (hi - lo) * k / n);
    best = a <= b ? std::min(best, v) : std::max(best, v);
  }
  return best;
}

std::vector<Flux> sample_fluxes() {
  std::vector<Flux> out;
  for (const auto& t : reference_topologies()) {
    for (const auto& f : t.spec.fluxes()) out.push_back(f);
  }
  return out;
}

}  // namespace

TEST_CASE("flux evaluation examples") {
  CHECK(lwr()(0.0) == 0.0);
  CHECK(lwr()(0.5) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(Flux::paper_quadratic(2.0)(0.25) == doctest::Approx(15.0 / 8.0).epsilon(1e-15));
  CHECK(Flux::paper_quadratic(3.0).rho_crit() == 0.0);
  CHECK(Flux::quadratic_lwr(2.0, 4.0).rho_crit() == doctest::Approx(2.0));
}

TEST_CASE("flux shape validation") {
  CHECK_THROWS_AS(lwr()(1.5), DomainError);
  CHECK_THROWS_AS(Flux::quadratic_lwr(-1.0, 1.0), DomainError);
  CHECK_THROWS_AS(Flux::paper_quadratic(0.0), DomainError);
  // rho^2 - rho is negative inside, not bell-shaped
  CHECK_THROWS_AS(Flux::polynomial({0.0, -1.0, 1.0}, 0.0, 1.0), DomainError);
  // plateau at the crest
  CHECK_THROWS_AS(Flux::tabulated({0.0, 0.4, 0.6, 1.0}, {0.0, 0.2, 0.2, 0.0}), DomainError);
  CHECK_THROWS_AS(Flux::tabulated({0.0, 0.6, 0.4, 1.0}, {0.0, 0.2, 0.1, 0.0}), DomainError);

  const auto cubic = Flux::polynomial({0.0, 1.0, 0.0, -1.0}, 0.0, 1.0);
  CHECK(cubic.rho_crit() == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-10));
  const auto table = Flux::tabulated({0.0, 0.3, 0.6, 1.0}, {0.0, 0.25, 0.2, 0.0});
  CHECK(table.rho_crit() == 0.3);
  CHECK(table.nld_violated());
  CHECK_FALSE(lwr().nld_violated());
}

TEST_CASE("flux invariants hold on samples") {
  std::mt19937_64 rng(7);
  for (const auto& f : sample_fluxes()) {
    CHECK(f(f.rho_min()) == 0.0);
    CHECK(f(f.rho_max()) == 0.0);
    CHECK(f.rho_min() < f.rho_crit());
    CHECK(f.rho_crit() < f.rho_max());
    std::uniform_real_distribution<double> u(f.rho_min(), f.rho_max());
    for (int n = 0; n < 200; ++n) {
      const double a = u(rng);
      const double b = u(rng);
      CHECK(std::abs(f(a) - f(b)) <= f.lipschitz() * std::abs(a - b) + 1e-15);
    }
    CHECK(f.conjugate(f.rho_crit()) == doctest::Approx(f.rho_crit()));
    const double v = 0.5 * f.max_value();
    CHECK(f(f.increasing_preimage(v)) == doctest::Approx(v).epsilon(1e-10));
    CHECK(f(f.decreasing_preimage(v)) == doctest::Approx(v).epsilon(1e-10));
  }
}

TEST_CASE("godunov flux examples") {
  const auto f = lwr();
  CHECK(godunov(f, 0.3, 0.3) == doctest::Approx(0.21).epsilon(1e-15));
  CHECK(godunov(f, 0.8, 0.2) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(godunov(f, 0.2, 0.8) == doctest::Approx(0.16).epsilon(1e-15));
  CHECK(godunov(f, 0.8, 0.2) == doctest::Approx(grid_godunov(f, 0.8, 0.2)).epsilon(1e-8));
  CHECK(godunov(f, 0.2, 0.8) == doctest::Approx(grid_godunov(f, 0.2, 0.8)).epsilon(1e-8));
}

TEST_CASE("demand and supply examples") {
  const auto f = lwr();
  CHECK(demand(f, 0.2) == doctest::Approx(0.16));
  CHECK(demand(f, 0.9) == doctest::Approx(0.25));
  CHECK(supply(f, f.rho_crit()) == doctest::Approx(0.25));
  CHECK(supply(f, 0.9) == doctest::Approx(0.09));
  // demand(a) = max_p G(a, p) by grid search
  double best = 0.0;
  for (int k = 0; k <= 1000; ++k) best = std::max(best, godunov(f, 0.2, k / 1000.0));
  CHECK(demand(f, 0.2) == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("entropy flux examples") {
  const auto f = lwr();
  CHECK(entropy_flux(f, 0.4, 0.4) == 0.0);
  CHECK(entropy_flux(f, 0.2, 0.5) == doctest::Approx(0.09));
  CHECK(entropy_flux(f, 0.8, 0.2) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(sign(0.0) == 0.0);
  CHECK(sign(-2.0) == -1.0);
}

TEST_CASE("godunov consistency, monotonicity and Lipschitz bound") {
  std::mt19937_64 rng(11);
  for (const auto& f : sample_fluxes()) {
    std::uniform_real_distribution<double> u(f.rho_min(), f.rho_max());
    for (int n = 0; n < 1000; ++n) {
      const double a = u(rng);
      CHECK(std::abs(godunov(f, a, a) - f(a)) <= 1e-12);
    }
    for (int n = 0; n < 500; ++n) {
      double a1 = u(rng);
      double a2 = u(rng);
      const double b = u(rng);
      if (a1 > a2) std::swap(a1, a2);
      CHECK(godunov(f, a1, b) <= godunov(f, a2, b) + 1e-12);
      CHECK(godunov(f, b, a1) + 1e-12 >= godunov(f, b, a2));
      CHECK(std::abs(godunov(f, a1, b) - godunov(f, a2, b)) <= f.lipschitz() * (a2 - a1) + 1e-12);
      CHECK(std::abs(godunov(f, b, a1) - godunov(f, b, a2)) <= f.lipschitz() * (a2 - a1) + 1e-12);
      CHECK(godunov(f, a1, b) == doctest::Approx(std::min(demand(f, a1), supply(f, b))).epsilon(1e-14));
    }
  }
}

TEST_CASE("godunov agrees with the grid oracle") {
  std::mt19937_64 rng(13);
  const auto fluxes = sample_fluxes();
  std::uniform_int_distribution<std::size_t> pick(0, fluxes.size() - 1);
  for (int n = 0; n < 1000; ++n) {
    const Flux& f = fluxes[pick(rng)];
    std::uniform_real_distribution<double> u(f.rho_min(), f.rho_max());
    const double a = u(rng);
    const double b = u(rng);
    const double bound = f.lipschitz() * (f.rho_max() - f.rho_min()) / 1e4;
    CHECK(std::abs(godunov(f, a, b) - grid_godunov(f, a, b)) <= bound);
  }
}

TEST_CASE("entropy flux equals |f(u) - f(k)| when the signs agree") {
  std::mt19937_64 rng(17);
  for (const auto& f : sample_fluxes()) {
    std::uniform_real_distribution<double> u(f.rho_min(), f.rho_max());
    for (int n = 0; n < 300; ++n) {
      const double a = u(rng);
      const double k = u(rng);
      if ((a - k) * (f(a) - f(k)) >= 0.0) CHECK(entropy_flux(f, a, k) == doctest::Approx(std::abs(f(a) - f(k))));
      // the numerical entropy flux is consistent
      CHECK(numerical_entropy_flux(f, a, a, k) == doctest::Approx(entropy_flux(f, a, k)).epsilon(1e-12));
    }
  }
}
