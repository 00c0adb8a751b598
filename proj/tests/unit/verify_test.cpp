#include <doctest.h>

#include <cmath>
#include <random>

#include "jfv/errors.hpp"
#include "jfv/riemann.hpp"
#include "jfv/suite.hpp"
#include "jfv/verify.hpp"
#include "support.hpp"

using namespace jfv;
using jfv::test::lwr;
using jfv::test::one_to_one;
using jfv::test::state;

namespace {

constexpr int kSteps = 40;

Trajectory recorded(const NetworkMesh& mesh, const GridState& initial) {
  RunConfig config{mesh};
  config.t_final = kSteps * cfl_timestep(mesh, 0.9);
  config.record_all_steps = true;
  return run(config, initial);
}

TestFunction bump_for(const Trajectory& traj) {
  const double dt = traj.steps.front().dt;
  TestFunction xi;
  xi.t_start = 2.5 * dt;
  xi.t_end = traj.states.back().time - 1.5 * dt;
  xi.flat = 0.5 * traj.mesh.dx();
  xi.width_in = 0.7;
  xi.width_out = 0.6;
  return xi;
}

JunctionSpec one_to_two() { return JunctionSpec(1, 2, {lwr(), lwr(), Flux::quadratic_lwr(0.5, 1.0)}); }

}  // namespace

TEST_CASE("test function support") {
  TestFunction xi{0.1, 0.5, 0.05, 0.4, 0.3};
  CHECK(xi(0.1, 0.0) == 0.0);
  CHECK(xi(0.5, 0.0) == 0.0);
  CHECK(xi(0.3, 0.0) == 1.0);
  CHECK(xi(0.3, 0.05) == 1.0);
  CHECK(xi(0.3, -0.45) == 0.0);
  CHECK(xi(0.3, 0.35) == 0.0);
  CHECK(xi(0.3, -0.2) > 0.0);
  CHECK(xi(0.3, -0.2) < 1.0);
}

TEST_CASE("Kato audit examples") {
  const auto spec = worked_example_spec();
  const NetworkMesh mesh(spec, 0.02, 50);

  const auto a = recorded(mesh, discretize_initial(mesh, {PiecewiseConstant{{-0.3}, {0.2, -0.4}},
                                                          PiecewiseConstant{{-0.2}, {0.5, 0.1}},
                                                          PiecewiseConstant{{0.25}, {0.6, -0.2}}}));
  const auto same = kato_audit(a, a, bump_for(a));
  CHECK(same.value == 0.0);
  CHECK(same.pass);

  const auto k1 = recorded(mesh, constant_state(mesh, riemann_solve(spec, worked_example_datum()).traces));
  const auto germ2 = riemann_solve(spec, state({0.3, -0.6, 0.9})).traces;
  const auto k2 = recorded(mesh, constant_state(mesh, germ2));
  const auto constants = kato_audit(k1, k2, bump_for(k1));
  CHECK(constants.pass);
  CHECK(std::abs(constants.junction_term) <= 1e-14);

  std::mt19937_64 rng(67);
  for (int n = 0; n < 10; ++n) {
    const auto pair = random_data_pair(spec, 0.4, false, rng);
    const auto u = recorded(mesh, discretize_initial(mesh, pair.first));
    const auto v = recorded(mesh, discretize_initial(mesh, pair.second));
    const auto report = kato_audit(u, v, bump_for(u));
    CHECK(report.pass);
    CHECK(report.tolerance == doctest::Approx(1e-10 * mass_scale(mesh)));
  }
}

TEST_CASE("Kato audit preconditions") {
  const auto spec = one_to_one();
  const NetworkMesh mesh(spec, 0.02, 50);
  const auto a = recorded(mesh, constant_state(mesh, state({0.3, 0.3})));
  TestFunction early = bump_for(a);
  early.t_start = 0.0;
  CHECK_THROWS_AS(kato_audit(a, a, early), PreconditionError);
  TestFunction wide = bump_for(a);
  wide.width_in = 2.0;
  CHECK_THROWS_AS(kato_audit(a, a, wide), PreconditionError);

  const NetworkMesh other(spec, 0.025, 40);
  const auto b = recorded(other, constant_state(other, state({0.3, 0.3})));
  CHECK_THROWS_AS(kato_audit(a, b, bump_for(a)), ConfigError);

  RunConfig sparse{mesh};
  sparse.t_final = 0.1;
  const auto c = run(sparse, constant_state(mesh, state({0.3, 0.3})));
  CHECK_THROWS(kato_audit(c, c, bump_for(a)));
}

TEST_CASE("L1 contraction examples") {
  const auto spec = one_to_two();
  const NetworkMesh mesh(spec, 0.02, 50);
  const auto a = recorded(mesh, constant_state(mesh, state({0.3, 0.2, 0.4})));
  const auto same = l1_contraction_check(a, a, 0.9);
  CHECK(same.pass);
  for (double d : same.distance) CHECK(d == 0.0);
  CHECK_THROWS_AS(l1_contraction_check(a, a, 1.5), ConfigError);

  std::mt19937_64 rng(71);
  for (int n = 0; n < 50; ++n) {
    const auto pair = random_data_pair(spec, 0.4, n % 2 == 0, rng);
    const auto u = recorded(mesh, discretize_initial(mesh, pair.first));
    const auto v = recorded(mesh, discretize_initial(mesh, pair.second));
    const auto report = l1_contraction_check(u, v, 0.95);
    CHECK(report.pass);
    if (n % 2 == 0) {
      // Ordered data: the whole-network distance equals the mass difference.
      for (std::size_t s = 0; s < u.states.size(); ++s) {
        const double gap = total_mass(mesh, v.states[s]) - total_mass(mesh, u.states[s]);
        CHECK(l1_distance(mesh, u.states[s], v.states[s]) == doctest::Approx(gap).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("adapted entropy residual examples") {
  const auto spec = worked_example_spec();
  const NetworkMesh mesh(spec, 0.02, 50);
  const State traces_of_datum = riemann_solve(spec, worked_example_datum()).traces;
  const auto germ = recorded(mesh, constant_state(mesh, traces_of_datum));
  const auto still = adapted_entropy_residual(germ, traces_of_datum, bump_for(germ));
  CHECK(still.residual == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(still.pass);

  const auto traj = recorded(mesh, constant_state(mesh, worked_example_datum()));
  CHECK(adapted_entropy_residual(traj, traces_of_datum, bump_for(traj)).residual >= -1e-10);
  const State u0 = state({0.4, -0.7, 0.2});
  const auto other = recorded(mesh, constant_state(mesh, u0));
  CHECK(adapted_entropy_residual(other, riemann_solve(spec, u0).traces, bump_for(other)).residual >= -1e-10);
  for (const auto& k : germ_sampler(spec, 20, 73)) {
    CHECK(adapted_entropy_residual(traj, k, bump_for(traj)).pass);
  }
  CHECK_THROWS_AS(adapted_entropy_residual(traj, state({0.9, 0.9, -0.9}), bump_for(traj)), PreconditionError);

  const auto one = one_to_one();
  const NetworkMesh line(one, 0.02, 50);
  const auto mono = recorded(line, discretize_initial(line, {PiecewiseConstant{{-0.3}, {0.1, 0.4}},
                                                             PiecewiseConstant{{0.2}, {0.6, 0.9}}}));
  for (double c : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    CHECK(adapted_entropy_residual(mono, state({c, c}), bump_for(mono)).residual >= -1e-10);
  }
}

TEST_CASE("convergence study examples") {
  const auto spec = one_to_one();
  const auto germ = riemann_problem(spec, state({0.2, 0.8}), 0.2, 1.0);
  for (const auto& row : convergence_study(germ, {1.0 / 50, 1.0 / 100}).rows) CHECK(row.error <= 1e-12);

  const auto shock = riemann_problem(spec, state({0.2, 0.6}), 0.2, 1.0);
  const auto report = convergence_study(shock, {1.0 / 50, 1.0 / 100, 1.0 / 200, 1.0 / 400});
  REQUIRE(report.rows.size() == 4);
  CHECK(report.monotone);
  CHECK(std::isnan(report.rows[0].order));
  for (std::size_t k = 1; k < 4; ++k) CHECK(report.rows[k].error < report.rows[k - 1].error);
}

TEST_CASE("germ sampler") {
  const auto one = one_to_one();
  const auto single = germ_sampler(one, 1, 5);
  REQUIRE(single.size() == 1);
  CHECK(is_germ_member(one, single[0]));

  const auto many = germ_sampler(one, 1000, 79);
  REQUIRE(many.size() == 1000);
  for (const auto& k : many) {
    CHECK(is_germ_member(one, k));
    CHECK(is_germ_member_oleinik(one, k));
  }
  const auto again = germ_sampler(one, 1000, 79);
  for (std::size_t n = 0; n < many.size(); ++n) CHECK((many[n].array() == again[n].array()).all());

  const auto traces = riemann_solve(worked_example_spec(), worked_example_datum());
  CHECK(is_germ_member(worked_example_spec(), traces.traces));
  CHECK(junction_fluxes_at(worked_example_spec(), traces.traces, traces.junction.p)[2] ==
        doctest::Approx(2.5).epsilon(1e-12));
}
