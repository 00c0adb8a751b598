#include <doctest.h>

#include <cmath>
#include <random>

#include "jfv/errors.hpp"
#include "jfv/scheme.hpp"
#include "jfv/suite.hpp"
#include "jfv/verify.hpp"
#include "jfv/viscous.hpp"
#include "support.hpp"

using namespace jfv;
using jfv::test::lwr;
using jfv::test::one_to_one;
using jfv::test::state;

namespace {

ParabolicState parabolic_from(const GridState& grid, double eps) {
  ParabolicState s;
  s.epsilon = eps;
  s.values = grid.values;
  return s;
}

double parabolic_l1(const NetworkMesh& mesh, const ParabolicState& a, const ParabolicState& b) {
  double d = 0.0;
  for (std::size_t h = 0; h < a.values.size(); ++h) d += (a.values[h] - b.values[h]).cwiseAbs().sum();
  return mesh.dx() * d;
}

double parabolic_mass(const NetworkMesh& mesh, const ParabolicState& s) {
  double m = 0.0;
  for (const auto& v : s.values) m += v.sum();
  return mesh.dx() * m;
}

// Sampling that resolves the profile layer for the fourth-order residual stencil.
int resolving_samples(const JunctionSpec& spec, double eps, double window) {
  return static_cast<int>(std::ceil(80.0 * spec.lipschitz_max() * window / eps));
}

double total_variation(const Eigen::VectorXd& v) {
  double tv = 0.0;
  for (Eigen::Index i = 1; i < v.size(); ++i) tv += std::abs(v[i] - v[i - 1]);
  return tv;
}

}  // namespace

TEST_CASE("constant profiles for constant germ elements") {
  const auto spec = one_to_one();
  const auto profile = stationary_profile(spec, state({0.3, 0.3}), 0.01, 0.1, 50);
  CHECK(profile.p == doctest::Approx(0.3));
  for (const auto& rho : profile.rho) CHECK((rho.array() - 0.3).abs().maxCoeff() <= 1e-14);
  CHECK(profile_monotone(profile));
}

TEST_CASE("incoming profile against the first-integral closed form") {
  // f_1 = rho (1 - rho), f_2 = (2/3) rho (1 - rho): k = (0.2, 0.4) is strict with p = 0.4.
  const auto spec = one_to_one(lwr(), Flux::quadratic_lwr(2.0 / 3.0, 1.0));
  const double eps = 0.01;
  const auto profile = stationary_profile(spec, state({0.2, 0.4}), eps, 0.2, resolving_samples(spec, eps, 0.2));
  CHECK(profile.p == doctest::Approx(0.4).epsilon(1e-9));
  CHECK(profile_residual(spec, profile) <= 1e-8);
  CHECK(profile_monotone(profile));
  const auto& x = profile.x[0];
  const auto& rho = profile.rho[0];
  CHECK(x[0] == 0.0);
  CHECK(rho[0] == doctest::Approx(0.4).epsilon(1e-12));
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    CHECK(x[i] <= 0.0);
    // eps rho' = -(rho - 0.2)(rho - 0.8) integrates to (rho - 0.2) / (0.8 - rho) = 0.5 exp(0.6 x / eps).
    const double e = 0.5 * std::exp(0.6 * x[i] / eps);
    const double exact = (0.2 + 0.8 * e) / (1.0 + e);
    worst = std::max(worst, std::abs(rho[i] - exact));
    if (i > 0) CHECK(rho[i] <= rho[i - 1]);
  }
  CHECK(worst <= 1e-8);
  CHECK(rho[x.size() - 1] > 0.2);
  CHECK(rho[x.size() - 1] - 0.2 <= 1e-5);
  for (Eigen::Index i = 0; i < profile.rho[1].size(); ++i) CHECK(profile.rho[1][i] == doctest::Approx(0.4));
}

TEST_CASE("profiles scale with epsilon") {
  const auto spec = worked_example_spec();
  int checked = 0;
  for (const auto& k : germ_sampler(spec, 200, 83)) {
    if (!is_strict_germ_member(spec, k)) continue;
    const int n = resolving_samples(spec, 0.01, 0.2);
    const auto fine = stationary_profile(spec, k, 0.01, 0.2, n);
    const auto unit = stationary_profile(spec, k, 1.0, 20.0, n);
    for (int h = 0; h < spec.roads(); ++h) {
      CHECK((fine.rho[h] - unit.rho[h]).cwiseAbs().maxCoeff() <= 1e-8);
      CHECK((fine.x[h] * 100.0 - unit.x[h]).cwiseAbs().maxCoeff() <= 1e-12);
    }
    CHECK(profile_residual(spec, fine) <= 1e-8);
    if (++checked == 5) break;
  }
  CHECK(checked == 5);
}

TEST_CASE("profile precondition and convergence to the constant state") {
  const auto spec = one_to_one();
  CHECK_THROWS_AS(stationary_profile(test::forced_crest(), state({0.2, 0.8}), 0.01, 0.1, 50), PreconditionError);
  CHECK_THROWS_AS(stationary_profile(spec, state({0.8, 0.2}), 0.01, 0.1, 50), PreconditionError);
  CHECK_NOTHROW(stationary_profile(spec, state({0.2, 0.8}), 0.01, 0.1, 50));

  const auto split = one_to_one(lwr(), Flux::quadratic_lwr(2.0 / 3.0, 1.0));
  double previous = INFINITY;
  for (double eps : {0.1, 0.05, 0.025}) {
    const auto profile = stationary_profile(split, state({0.2, 0.4}), eps, 1.0, 2000);
    const auto& rho = profile.rho[0];
    const double l1 = (rho.array() - 0.2).abs().sum() / 2000.0;
    CHECK(l1 < previous);
    previous = l1;
  }
}

TEST_CASE("parabolic step limits") {
  const NetworkMesh mesh(one_to_one(), 0.01, 100);
  CHECK(parabolic_step_limit(mesh, 0.01) == doctest::Approx(std::min(0.01 / 2.0, 1e-4 / 0.04)));
  CHECK(parabolic_default_step(mesh, 0.01) == doctest::Approx(0.9 / (2.0 / 0.01 + 6.0 * 0.01 / 1e-4)));
  ParabolicState s = parabolic_from(constant_state(mesh, state({0.3, 0.3})), 0.01);
  CHECK_THROWS_AS(parabolic_step(s, mesh, 2.0 * parabolic_step_limit(mesh, 0.01)), ConfigError);
}

TEST_CASE("parabolic constants stay fixed") {
  const auto spec = JunctionSpec(2, 2, {lwr(), lwr(), lwr(), lwr()});
  const NetworkMesh mesh(spec, 0.01, 100);
  for (double c : {0.1, 0.5, 0.85}) {
    const auto s0 = parabolic_from(constant_state(mesh, state({c, c, c, c})), 0.01);
    const auto s1 = parabolic_step(s0, mesh, parabolic_default_step(mesh, 0.01));
    for (std::size_t h = 0; h < 4; ++h) CHECK((s1.values[h] - s0.values[h]).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("sampled profiles drift slowly under the parabolic step") {
  // Interior cells carry the first-order truncation error of the scheme; the
  // two junction cells see the O(dx) flux error of the junction closure and
  // change at a rate that stays bounded but does not vanish.
  const auto spec = one_to_one(lwr(), Flux::quadratic_lwr(2.0 / 3.0, 1.0));
  const double eps = 0.1;
  const int samples = 20000;
  const auto profile = stationary_profile(spec, state({0.2, 0.4}), eps, 1.0, samples);
  std::vector<RoadData> data;
  for (int h = 0; h < 2; ++h) {
    const Eigen::VectorXd rho = profile.rho[h];
    data.emplace_back(std::function<double(double)>([rho, samples](double at) {
      const double s = std::abs(at) * samples;
      const int i = std::min(static_cast<int>(s), samples - 1);
      const double w = s - i;
      return (1.0 - w) * rho[i] + w * rho[i + 1];
    }));
  }
  double previous_interior = INFINITY;
  double previous_junction = INFINITY;
  for (int cells : {800, 1600}) {
    const NetworkMesh mesh(spec, 1.0 / cells, cells);
    const auto s0 = parabolic_from(discretize_initial(mesh, data), eps);
    const double dt = parabolic_default_step(mesh, eps);
    const auto s1 = parabolic_step(s0, mesh, dt);
    double interior = 0.0;
    for (int h = 0; h < 2; ++h) {
      for (int c = 0; c < mesh.cells(h); ++c) {
        if (c == mesh.junction_cell(h) || c == mesh.outer_cell(h)) continue;
        interior = std::max(interior, std::abs(s1.values[h][c] - s0.values[h][c]));
      }
    }
    double junction = 0.0;
    for (int h = 0; h < 2; ++h) {
      const int c = mesh.junction_cell(h);
      junction = std::max(junction, std::abs(s1.values[h][c] - s0.values[h][c]));
    }
    CHECK(interior <= 1e-3 * dt);
    CHECK(interior / dt < 0.6 * previous_interior);
    CHECK(junction / dt <= 1.05 * previous_junction);
    previous_interior = interior / dt;
    previous_junction = junction / dt;
  }
}

TEST_CASE("parabolic range, mass balance and L1 stability") {
  std::mt19937_64 rng(89);
  for (const auto& topo : reference_topologies()) {
    const auto& spec = topo.spec;
    const double eps = 0.02;
    const NetworkMesh mesh(spec, 0.01, 100);
    const double dt = parabolic_default_step(mesh, eps);
    for (int n = 0; n < 3; ++n) {
      const auto pair = random_data_pair(spec, 0.5, false, rng);
      auto a = parabolic_from(discretize_initial(mesh, pair.first), eps);
      auto b = parabolic_from(discretize_initial(mesh, pair.second), eps);
      double distance = parabolic_l1(mesh, a, b);
      for (int s = 0; s < 150; ++s) {
        ParabolicStepInfo info;
        const double before = parabolic_mass(mesh, a);
        a = parabolic_step(a, mesh, dt, &info);
        b = parabolic_step(b, mesh, dt);
        CHECK(parabolic_mass(mesh, a) - before + dt * info.outflow == doctest::Approx(0.0).epsilon(1e-10));
        CHECK(std::abs(info.imbalance) <= 1e-10);
        for (const auto& v : a.values) {
          CHECK(v.minCoeff() >= spec.rho_min() - 1e-12);
          CHECK(v.maxCoeff() <= spec.rho_max() + 1e-12);
        }
        const double next = parabolic_l1(mesh, a, b);
        CHECK(next <= distance + 1e-10);
        distance = next;
      }
    }
  }
}

TEST_CASE("initial smoothing") {
  Eigen::VectorXd flat = Eigen::VectorXd::Constant(20, 0.4);
  CHECK((initial_smoothing(flat, 6).array() == 0.4).all());

  Eigen::VectorXd stepdata(10);
  stepdata << 0, 0, 0, 0, 0, 1, 1, 1, 1, 1;
  const auto once = initial_smoothing(stepdata, 2);
  CHECK(once[4] == doctest::Approx(1.0 / 3.0));
  CHECK(once[5] == doctest::Approx(2.0 / 3.0));
  CHECK(once[3] == 0.0);
  CHECK(total_variation(once) == doctest::Approx(total_variation(stepdata)));
  CHECK(once.sum() == doctest::Approx(stepdata.sum()));

  std::mt19937_64 rng(97);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd noisy(64);
  for (Eigen::Index i = 0; i < noisy.size(); ++i) noisy[i] = u(rng);
  const auto smooth = initial_smoothing(noisy, 9);
  CHECK(smooth.minCoeff() >= noisy.minCoeff());
  CHECK(smooth.maxCoeff() <= noisy.maxCoeff());
  CHECK(smooth.sum() == doctest::Approx(noisy.sum()).epsilon(1e-12));
  CHECK(total_variation(smooth) <= total_variation(noisy));
  CHECK(smooth.cwiseAbs().sum() <= noisy.cwiseAbs().sum() + 1e-12);
  CHECK(smoothing_width_cells(0.01, 0.05) == 5);
}
