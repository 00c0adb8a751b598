#include "jfv/suite.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "jfv/errors.hpp"
#include "jfv/riemann.hpp"
#include "jfv/verify.hpp"
#include "jfv/viscous.hpp"

namespace jfv {

namespace {

constexpr double kEnsembleDx = 1.0 / 100.0;
constexpr double kEnsembleCore = 0.4;
constexpr int kEnsembleSteps = 50;
constexpr int kPairsPerTopology = 50;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

Trajectory run_recorded(const NetworkMesh& mesh, const GridState& initial, double t_final, bool all_steps = true) {
  RunConfig config{mesh};
  config.t_final = t_final;
  config.record_all_steps = all_steps;
  return run(config, initial);
}

void note_ledger(SuiteContext& ctx, const Trajectory& traj) {
  ctx.max_mass_defect = std::max(ctx.max_mass_defect, mass_ledger(traj).max_defect);
  ++ctx.ledger_runs;
}

// The pair suite shared by the contraction and Kato checks: short runs whose
// differences stay clear of the truncated ends.
struct PairRun {
  Trajectory a;
  Trajectory b;
};

template <typename Visit>
void for_each_pair_run(SuiteContext& ctx, Visit visit) {
  std::mt19937_64 rng(ctx.seed + 4);
  for (const auto& topo : reference_topologies()) {
    const NetworkMesh mesh(topo.spec, kEnsembleDx, static_cast<int>(std::lround(1.0 / kEnsembleDx)));
    const double t_final = kEnsembleSteps * cfl_timestep(mesh, 0.9);
    for (int n = 0; n < kPairsPerTopology; ++n) {
      const auto data = random_data_pair(topo.spec, kEnsembleCore, false, rng);
      PairRun pr{run_recorded(mesh, discretize_initial(mesh, data.first), t_final),
                 run_recorded(mesh, discretize_initial(mesh, data.second), t_final)};
      note_ledger(ctx, pr.a);
      note_ledger(ctx, pr.b);
      visit(topo, pr, rng);
    }
  }
}

}  // namespace

JunctionSpec worked_example_spec() {
  return JunctionSpec(2, 1, {Flux::paper_quadratic(1.0), Flux::paper_quadratic(2.0), Flux::paper_quadratic(3.0)});
}

State worked_example_datum() {
  State u(3);
  u << -std::sqrt(0.5), 0.25, std::sqrt(1.0 / 6.0);
  return u;
}

std::vector<Topology> reference_topologies() {
  std::vector<Topology> out;
  out.push_back({"1-1", JunctionSpec(1, 1, {Flux::quadratic_lwr(1.0, 1.0), Flux::quadratic_lwr(1.5, 1.0)})});
  out.push_back({"2-1", worked_example_spec()});
  out.push_back({"2-3", JunctionSpec(2, 3,
                                     {Flux::quadratic_lwr(1.0, 1.0), Flux::polynomial({0.0, 1.0, 0.0, -1.0}, 0.0, 1.0),
                                      Flux::quadratic_lwr(2.0, 1.0), Flux::quadratic_lwr(0.8, 1.0),
                                      Flux::tabulated({0.0, 0.3, 0.6, 1.0}, {0.0, 0.25, 0.2, 0.0})})});
  return out;
}

DataPair random_data_pair(const JunctionSpec& spec, double core, bool ordered, std::mt19937_64& rng) {
  DataPair pair;
  const double a = spec.rho_min();
  const double b = spec.rho_max();
  for (int h = 0; h < spec.roads(); ++h) {
    const double background = uniform(rng, a, b);
    std::vector<double> d{uniform(rng, 0.05, 1.0) * core, uniform(rng, 0.05, 1.0) * core, uniform(rng, 0.05, 1.0) * core};
    std::sort(d.begin(), d.end());
    std::vector<double> v1(3);
    std::vector<double> v2(3);
    for (int k = 0; k < 3; ++k) {
      v1[k] = uniform(rng, a, b);
      v2[k] = uniform(rng, a, b);
      if (ordered && v1[k] > v2[k]) std::swap(v1[k], v2[k]);
    }
    PiecewiseConstant p1;
    PiecewiseConstant p2;
    if (spec.is_incoming(h)) {
      p1.breakpoints = {-d[2], -d[1], -d[0]};
      p1.values = {background, v1[2], v1[1], v1[0]};
      p2.values = {background, v2[2], v2[1], v2[0]};
    } else {
      p1.breakpoints = {d[0], d[1], d[2]};
      p1.values = {v1[0], v1[1], v1[2], background};
      p2.values = {v2[0], v2[1], v2[2], background};
    }
    p2.breakpoints = p1.breakpoints;
    pair.first.emplace_back(p1);
    pair.second.emplace_back(p2);
  }
  return pair;
}

CriterionResult check_worked_example(SuiteContext&) {
  CriterionResult r{1, "worked example fluxes and coupling interval"};
  const auto sol = solve_junction(worked_example_spec(), worked_example_datum());
  Eigen::Vector3d expected(0.5, 2.0, 2.5);
  const double flux_err = (sol.fluxes - expected).cwiseAbs().maxCoeff();
  const double p_err = std::max(std::abs(sol.p_min + std::sqrt(1.0 / 6.0)), std::abs(sol.p_max));
  r.measured = flux_err;
  r.threshold = 1e-10;
  r.pass = flux_err <= 1e-10 && p_err <= 1e-7;
  r.detail = "p in [" + fmt(sol.p_min) + ", " + fmt(sol.p_max) + "], p error " + fmt(p_err);
  return r;
}

CriterionResult check_godunov_oracle(SuiteContext& ctx) {
  CriterionResult r{2, "Godunov flux against a 10^4-point grid oracle"};
  std::mt19937_64 rng(ctx.seed + 2);
  constexpr int kGrid = 10000;
  double worst_ratio = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const int family = n % 4;
    std::optional<Flux> f;
    if (family == 0) {
      f = Flux::quadratic_lwr(uniform(rng, 0.5, 2.0), uniform(rng, 0.5, 2.0));
    } else if (family == 1) {
      f = Flux::paper_quadratic(uniform(rng, 0.5, 3.0));
    } else if (family == 2) {
      const double c = uniform(rng, 0.0, 2.0);
      f = Flux::polynomial({0.0, 1.0, c - 1.0, -c}, 0.0, 1.0);
    } else {
      const double crit = uniform(rng, 0.2, 0.8);
      const double top = uniform(rng, 0.1, 1.0);
      f = Flux::tabulated({0.0, 0.5 * crit, crit, 0.5 * (1.0 + crit), 1.0},
                          {0.0, top * uniform(rng, 0.3, 0.9), top, top * uniform(rng, 0.3, 0.9), 0.0});
    }
    const double a = uniform(rng, f->rho_min(), f->rho_max());
    const double b = uniform(rng, f->rho_min(), f->rho_max());
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    double oracle = a <= b ? INFINITY : -INFINITY;
    for (int k = 0; k < kGrid; ++k) {
      const double v = (*f)(k == kGrid - 1 ? hi : lo + (hi - lo) * k / (kGrid - 1));
      oracle = a <= b ? std::min(oracle, v) : std::max(oracle, v);
    }
    const double tol = f->lipschitz() * (f->rho_max() - f->rho_min()) / kGrid;
    worst_ratio = std::max(worst_ratio, std::abs(godunov(*f, a, b) - oracle) / tol);
  }
  r.measured = worst_ratio;
  r.threshold = 1.0;
  r.pass = worst_ratio <= 1.0;
  r.detail = "largest deviation as a fraction of L (B - A) / 10^4";
  return r;
}

CriterionResult check_well_balanced(SuiteContext& ctx) {
  CriterionResult r{3, "well-balancedness over 200 steps"};
  double drift = 0.0;
  int runs = 0;
  int t = 0;
  for (const auto& topo : reference_topologies()) {
    const auto germs = germ_sampler(topo.spec, 100, ctx.seed + 30 + static_cast<std::uint64_t>(t++));
    for (double dx : {1.0 / 50.0, 1.0 / 200.0}) {
      const NetworkMesh mesh(topo.spec, dx, static_cast<int>(std::lround(1.0 / dx)));
      const double t_final = 200 * cfl_timestep(mesh, 0.9);
      for (const auto& k : germs) {
        const auto traj = run_recorded(mesh, constant_state(mesh, k), t_final);
        if (traj.steps.size() != 200) throw ConsistencyError("well-balancedness run did not take 200 steps");
        for (const auto& st : traj.states) {
          for (int h = 0; h < mesh.roads(); ++h) {
            drift = std::max(drift, (st.values[h].array() - k[h]).abs().maxCoeff());
          }
        }
        note_ledger(ctx, traj);
        ++runs;
      }
    }
  }
  r.measured = drift;
  r.threshold = 1e-12;
  r.pass = drift <= 1e-12;
  r.detail = std::to_string(runs) + " runs on 3 topologies, dx in {1/50, 1/200}";
  return r;
}

CriterionResult check_l1_contraction(SuiteContext& ctx) {
  CriterionResult r{4, "discrete L1 contraction"};
  double worst = 0.0;
  double worst_cone = 0.0;
  int pairs = 0;
  for_each_pair_run(ctx, [&](const Topology&, const PairRun& pr, std::mt19937_64&) {
    const NetworkMesh& mesh = pr.a.mesh;
    for (std::size_t s = 1; s < pr.a.states.size(); ++s) {
      const double before = l1_distance(mesh, pr.a.states[s - 1], pr.b.states[s - 1]);
      const double after = l1_distance(mesh, pr.a.states[s], pr.b.states[s]);
      worst = std::max(worst, after - before);
    }
    const auto cone = l1_contraction_check(pr.a, pr.b, 1.0);
    worst_cone = std::max(worst_cone, cone.max_increase);
    ++pairs;
  });
  r.measured = std::max(worst, worst_cone);
  r.threshold = 1e-12;
  r.pass = r.measured <= 1e-12;
  r.detail = std::to_string(pairs) + " pairs; largest step increase " + fmt(worst) + " (network), " + fmt(worst_cone) +
             " (shrinking window)";
  return r;
}

CriterionResult check_kato(SuiteContext& ctx) {
  CriterionResult r{5, "discrete Kato inequality"};
  double worst_ratio = -INFINITY;
  double worst_junction = 0.0;
  int audits = 0;
  bool pass = true;
  for_each_pair_run(ctx, [&](const Topology&, const PairRun& pr, std::mt19937_64& rng) {
    const double t_end = pr.a.states.back().time;
    const double dx = pr.a.mesh.dx();
    for (int q = 0; q < 3; ++q) {
      TestFunction xi;
      xi.t_start = uniform(rng, 0.05, 0.3) * t_end;
      xi.t_end = uniform(rng, 0.6, 0.95) * t_end;
      xi.flat = 0.5 * dx;
      xi.width_in = uniform(rng, 0.3, 0.85);
      xi.width_out = uniform(rng, 0.3, 0.85);
      const auto report = kato_audit(pr.a, pr.b, xi);
      worst_ratio = std::max(worst_ratio, report.value / report.tolerance);
      worst_junction = std::max(worst_junction, std::abs(report.junction_term));
      pass = pass && report.pass;
      ++audits;
    }
  });
  r.measured = worst_ratio;
  r.threshold = 1.0;
  r.pass = pass;
  r.detail = std::to_string(audits) + " audits; largest form / tolerance shown; junction term <= " + fmt(worst_junction);
  return r;
}

CriterionResult check_dissipativity(SuiteContext& ctx) {
  CriterionResult r{6, "dissipativity over germ pairs"};
  double lowest = INFINITY;
  long long pairs = 0;
  int t = 0;
  for (const auto& topo : reference_topologies()) {
    const auto germs = germ_sampler(topo.spec, 1000, ctx.seed + 60 + static_cast<std::uint64_t>(t++));
    for (std::size_t i = 0; i < germs.size(); ++i) {
      for (std::size_t j = i + 1; j < germs.size(); ++j) {
        lowest = std::min(lowest, dissipativity(topo.spec, germs[i], germs[j]));
        ++pairs;
      }
    }
  }
  r.measured = lowest;
  r.threshold = -1e-12;
  r.pass = lowest >= -1e-12;
  r.detail = std::to_string(pairs) + " pairs from 10^3 germ samples per topology; smallest value shown";
  return r;
}

CriterionResult check_order_preservation(SuiteContext& ctx) {
  CriterionResult r{7, "maximum principle and order preservation"};
  std::mt19937_64 rng(ctx.seed + 7);
  double range_violation = 0.0;
  double order_violation = 0.0;
  int pairs = 0;
  for (const auto& topo : reference_topologies()) {
    const NetworkMesh mesh(topo.spec, kEnsembleDx, static_cast<int>(std::lround(1.0 / kEnsembleDx)));
    const double a = topo.spec.rho_min();
    const double b = topo.spec.rho_max();
    for (int n = 0; n < 20; ++n) {
      const auto data = random_data_pair(topo.spec, 0.9, true, rng);
      const auto lo = run_recorded(mesh, discretize_initial(mesh, data.first), 0.5);
      const auto hi = run_recorded(mesh, discretize_initial(mesh, data.second), 0.5);
      for (std::size_t s = 0; s < lo.states.size(); ++s) {
        for (int h = 0; h < mesh.roads(); ++h) {
          const auto& u = lo.states[s].values[h];
          const auto& v = hi.states[s].values[h];
          order_violation = std::max(order_violation, (u - v).maxCoeff());
          for (const auto* w : {&u, &v}) {
            range_violation = std::max({range_violation, a - w->minCoeff(), w->maxCoeff() - b});
          }
        }
      }
      ++pairs;
    }
  }
  r.measured = std::max(range_violation, order_violation);
  r.threshold = 1e-14;
  r.pass = range_violation <= 1e-14 && order_violation <= 1e-14;
  r.detail = std::to_string(pairs) + " ordered pairs to t = 0.5; range excess " + fmt(range_violation) +
             ", order excess " + fmt(order_violation);
  return r;
}

CriterionResult check_convergence(SuiteContext&) {
  CriterionResult r{8, "convergence under mesh refinement"};
  const std::vector<double> dxs{1.0 / 50.0, 1.0 / 100.0, 1.0 / 200.0, 1.0 / 400.0};
  const JunctionSpec single(1, 1, {Flux::quadratic_lwr(1.0, 1.0), Flux::quadratic_lwr(1.0, 1.0)});
  State shock(2);
  shock << 0.2, 0.6;
  State fan(2);
  fan << 0.8, 0.2;
  auto worked = riemann_problem(worked_example_spec(), worked_example_datum(), 0.2, 1.5);
  worked.exact = nullptr;
  worked.reference_dx = 1.0 / 1600.0;
  const std::vector<std::pair<std::string, ConvergenceProblem>> problems{
      {"shock", riemann_problem(single, shock, 0.2, 1.0)},
      {"rarefaction", riemann_problem(single, fan, 0.2, 1.0)},
      {"worked example", worked}};
  int failures = 0;
  std::ostringstream detail;
  for (const auto& [name, problem] : problems) {
    const auto report = convergence_study(problem, dxs);
    if (!report.monotone) ++failures;
    detail << name << ": errors";
    for (const auto& row : report.rows) detail << " " << fmt(row.error);
    detail << " orders";
    for (std::size_t k = 1; k < report.rows.size(); ++k) detail << " " << fmt(report.rows[k].order);
    detail << "; ";
  }
  r.measured = failures;
  r.threshold = 0;
  r.pass = failures == 0;
  r.detail = detail.str();
  return r;
}

CriterionResult check_viscous_profiles(SuiteContext& ctx) {
  CriterionResult r{9, "stationary viscous profiles"};
  const JunctionSpec spec = worked_example_spec();
  const auto germs = germ_sampler(spec, 2000, ctx.seed + 9);
  std::vector<State> strict;
  std::vector<State> loose;
  for (const auto& k : germs) {
    if (!is_germ_member(spec, k)) continue;
    if (is_strict_germ_member(spec, k)) {
      if (strict.size() < 20) strict.push_back(k);
    } else if (loose.size() < 10) {
      loose.push_back(k);
    }
  }
  const double eps = 0.01;
  double residual = 0.0;
  double scaling = 0.0;
  bool monotone = true;
  for (const auto& k : strict) {
    const double p = *strict_germ_witness(spec, k);
    double rate = INFINITY;
    for (int h = 0; h < spec.roads(); ++h) {
      if (k[h] != p) rate = std::min(rate, std::abs(spec.flux(h).derivative(k[h])));
    }
    rate = std::max(std::isfinite(rate) ? rate : 1.0, 0.05 * spec.lipschitz_max());
    const double window = 20.0 * eps / rate;
    const int samples = static_cast<int>(std::ceil(window * 80.0 * spec.lipschitz_max() / eps));
    const auto prof = stationary_profile(spec, k, eps, window, samples);
    const auto unit = stationary_profile(spec, k, 1.0, window / eps, samples);
    residual = std::max(residual, profile_residual(spec, prof));
    monotone = monotone && profile_monotone(prof);
    for (int h = 0; h < spec.roads(); ++h) scaling = std::max(scaling, (prof.rho[h] - unit.rho[h]).cwiseAbs().maxCoeff());
  }
  int fired = 0;
  for (const auto& k : loose) {
    try {
      stationary_profile(spec, k, eps, 0.1, 100);
    } catch (const PreconditionError&) {
      ++fired;
    }
  }
  r.measured = std::max(residual, scaling);
  r.threshold = 1e-8;
  r.pass = strict.size() == 20 && loose.size() == 10 && residual <= 1e-8 && scaling <= 1e-8 && monotone &&
           fired == static_cast<int>(loose.size());
  r.detail = std::to_string(strict.size()) + " strict elements: residual " + fmt(residual) + ", scaling gap " +
             fmt(scaling) + (monotone ? ", monotone" : ", NOT monotone") + "; precondition fired for " +
             std::to_string(fired) + "/" + std::to_string(loose.size()) + " non-strict elements";
  return r;
}

CriterionResult check_epsilon_sweep(SuiteContext&) {
  CriterionResult r{10, "vanishing viscosity sweep"};
  const JunctionSpec single(1, 1, {Flux::quadratic_lwr(1.0, 1.0), Flux::quadratic_lwr(1.0, 1.0)});
  const double dx = 1.0 / 400.0;
  const NetworkMesh mesh(single, dx, 400);
  std::ostringstream detail;
  bool pass = true;
  int worst = 0;
  for (const auto& datum : {std::pair{0.8, 0.2}, std::pair{0.2, 0.6}}) {
    State u0(2);
    u0 << datum.first, datum.second;
    const GridState initial = constant_state(mesh, u0);
    const auto hyperbolic = run_recorded(mesh, initial, 0.2, false).snapshots.back();
    double previous = INFINITY;
    detail << "(" << datum.first << ", " << datum.second << "):";
    for (double eps : {0.04, 0.02, 0.01}) {
      ParabolicState ps{eps, 0.0, initial.values, 0.0};
      const auto out = parabolic_run(mesh, ps, 0.2);
      const double d = l1_distance(mesh, GridState{0, 0.2, out.values}, hyperbolic);
      detail << " " << fmt(d);
      if (!(d < previous)) {
        pass = false;
        ++worst;
      }
      previous = d;
    }
    detail << "; ";
  }
  r.measured = worst;
  r.threshold = 0;
  r.pass = pass;
  r.detail = "L1 distances at t = 0.2 for eps = 0.04, 0.02, 0.01 " + detail.str();
  return r;
}

CriterionResult check_mass_ledger(SuiteContext& ctx) {
  CriterionResult r{11, "conservation ledger"};
  r.measured = ctx.max_mass_defect;
  r.threshold = 1e-12;
  r.pass = ctx.ledger_runs > 0 && ctx.max_mass_defect <= 1e-12;
  r.detail = std::to_string(ctx.ledger_runs) + " runs from criteria 3-5";
  return r;
}

std::vector<CriterionResult> run_acceptance_suite(SuiteContext& ctx) {
  return {check_worked_example(ctx),    check_godunov_oracle(ctx), check_well_balanced(ctx),
          check_l1_contraction(ctx),    check_kato(ctx),           check_dissipativity(ctx),
          check_order_preservation(ctx), check_convergence(ctx),    check_viscous_profiles(ctx),
          check_epsilon_sweep(ctx),     check_mass_ledger(ctx)};
}

}  // namespace jfv
