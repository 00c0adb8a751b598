#include "jfv/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>

#include "jfv/errors.hpp"

namespace jfv {

namespace {

constexpr int kSubSamples = 16;

double bump(double z) {
  if (!(std::abs(z) < 1.0)) return 0.0;
  const double w = 1.0 - z * z;
  return w * w * w;
}

void require_same_runs(const Trajectory& a, const Trajectory& b) {
  if (a.states.empty() || b.states.empty()) {
    throw ConfigError(ConfigErrorKind::Invalid, "audit needs trajectories recorded at every step");
  }
  if (a.mesh.dx() != b.mesh.dx() || a.mesh.cells() != b.mesh.cells() || a.mesh.roads() != b.mesh.roads()) {
    throw ConfigError(ConfigErrorKind::Invalid, "trajectories live on different meshes");
  }
  if (a.states.size() != b.states.size()) throw ConfigError(ConfigErrorKind::Invalid, "trajectories differ in length");
  for (std::size_t s = 0; s < a.states.size(); ++s) {
    if (a.states[s].time != b.states[s].time) {
      throw ConfigError(ConfigErrorKind::Invalid, "trajectories use different time steps");
    }
  }
}

void require_supported(const Trajectory& a, const TestFunction& xi) {
  const NetworkMesh& mesh = a.mesh;
  const std::size_t last = a.states.size() - 1;
  for (std::size_t s : {std::size_t{0}, std::min<std::size_t>(1, last), last}) {
    const double t = a.states[s].time;
    for (int h = 0; h < mesh.roads(); ++h) {
      for (int c = 0; c < mesh.cells(h); ++c) {
        if (xi(t, mesh.cell_center(h, c)) != 0.0) {
          throw PreconditionError("test function must vanish at the first two and the last time level");
        }
      }
    }
  }
  for (const auto& st : a.states) {
    for (int h = 0; h < mesh.roads(); ++h) {
      if (xi(st.time, mesh.cell_center(h, mesh.outer_cell(h))) != 0.0) {
        throw PreconditionError("test function must vanish in the outermost cells");
      }
    }
  }
}

struct FormParts {
  double value = 0.0;
  double pointwise = 0.0;
  double junction = 0.0;
};

// Kato form between the recorded states of `a` and the states produced by
// `other`. When k is given, a cell-centred entropy-flux variant is also built.
template <typename Other>
FormParts assemble(const Trajectory& a, Other other, const TestFunction& xi, const State* k) {
  const NetworkMesh& mesh = a.mesh;
  const JunctionSpec& spec = mesh.spec();
  const double dx = mesh.dx();
  const std::size_t S = a.states.size() - 1;
  FormParts out;
  double time_part = 0.0;

  for (std::size_t s = 1; s < S; ++s) {
    const GridState& u = a.states[s];
    const GridState& v = other(s);
    const double t0 = u.time;
    const double t1 = a.states[s + 1].time;
    for (int h = 0; h < mesh.roads(); ++h) {
      for (int c = 0; c < mesh.cells(h); ++c) {
        const double x = mesh.cell_center(h, c);
        const double dxi = xi(t1, x) - xi(t0, x);
        if (dxi != 0.0) time_part -= dx * std::abs(u.values[h][c] - v.values[h][c]) * dxi;
      }
    }
  }

  double space_part = 0.0;
  double space_pointwise = 0.0;
  for (std::size_t s = 0; s < S; ++s) {
    const GridState& u = a.states[s];
    const GridState& v = other(s);
    const double t1 = a.states[s + 1].time;
    const double dt = t1 - u.time;
    for (int h = 0; h < mesh.roads(); ++h) {
      const Flux& f = spec.flux(h);
      const auto& uh = u.values[h];
      const auto& vh = v.values[h];
      double xi_prev = xi(t1, mesh.cell_center(h, 0));
      for (int c = 1; c < mesh.cells(h); ++c) {
        const double xi_here = xi(t1, mesh.cell_center(h, c));
        const double dxi = xi_here - xi_prev;
        xi_prev = xi_here;
        if (dxi == 0.0) continue;
        const double q = godunov(f, std::max(uh[c - 1], vh[c - 1]), std::max(uh[c], vh[c])) -
                         godunov(f, std::min(uh[c - 1], vh[c - 1]), std::min(uh[c], vh[c]));
        space_part -= dt * q * dxi;
        if (k) {
          const double qp = 0.5 * (entropy_flux(f, uh[c - 1], (*k)[h]) + entropy_flux(f, uh[c], (*k)[h]));
          space_pointwise -= dt * qp * dxi;
        }
      }
    }
    const double xi0 = xi(t1, 0.0);
    if (xi0 != 0.0) {
      const State us = junction_state(mesh, u);
      const State vs = junction_state(mesh, v);
      const auto top = solve_junction(spec, us.cwiseMax(vs));
      const auto bottom = solve_junction(spec, us.cwiseMin(vs));
      const Eigen::VectorXd q = top.fluxes - bottom.fluxes;
      out.junction += dt * xi0 * (q.head(spec.incoming()).sum() - q.tail(spec.outgoing()).sum());
    }
  }
  out.value = time_part + space_part;
  out.pointwise = time_part + space_pointwise;
  return out;
}

}  // namespace

double TestFunction::operator()(double t, double x) const {
  if (!(t > t_start && t < t_end)) return 0.0;
  const double s = (2.0 * t - t_start - t_end) / (t_end - t_start);
  const double width = x < 0.0 ? width_in : width_out;
  const double r = std::max(std::abs(x) - flat, 0.0) / width;
  return bump(s) * bump(r);
}

double mass_scale(const NetworkMesh& mesh) { return mesh.dx() * mesh.spec().width() * mesh.total_cells(); }

KatoReport kato_audit(const Trajectory& a, const Trajectory& b, const TestFunction& xi) {
  require_same_runs(a, b);
  require_supported(a, xi);
  const auto parts = assemble(a, [&](std::size_t s) -> const GridState& { return b.states[s]; }, xi, nullptr);
  KatoReport report;
  report.value = parts.value;
  report.junction_term = parts.junction;
  report.tolerance = 1e-10 * mass_scale(a.mesh);
  report.pass = report.value <= report.tolerance;
  return report;
}

ContractionReport l1_contraction_check(const Trajectory& a, const Trajectory& b, double window,
                                       std::optional<double> speed, double tol) {
  require_same_runs(a, b);
  const NetworkMesh& mesh = a.mesh;
  const double shortest = static_cast<double>(*std::min_element(mesh.cells().begin(), mesh.cells().end())) * mesh.dx();
  if (!(window > 0.0) || window > shortest) {
    throw ConfigError(ConfigErrorKind::Range, "contraction window must lie within the truncated roads");
  }
  ContractionReport report;
  for (std::size_t s = 0; s < a.states.size(); ++s) {
    const double r = window - (speed ? *speed * a.states[s].time : static_cast<double>(s) * mesh.dx());
    double d = 0.0;
    for (int h = 0; h < mesh.roads(); ++h) {
      for (int c = 0; c < mesh.cells(h); ++c) {
        if (std::abs(mesh.cell_center(h, c)) < r) d += std::abs(a.states[s].values[h][c] - b.states[s].values[h][c]);
      }
    }
    report.radius.push_back(r);
    report.distance.push_back(mesh.dx() * d);
  }
  for (std::size_t s = 1; s < report.distance.size(); ++s) {
    report.max_increase = std::max(report.max_increase, report.distance[s] - report.distance[s - 1]);
  }
  report.pass = report.max_increase <= tol;
  return report;
}

EntropyReport adapted_entropy_residual(const Trajectory& trajectory, const State& k, const TestFunction& xi) {
  if (!is_germ_member(trajectory.mesh.spec(), k)) {
    throw PreconditionError("adapted entropy inequality needs a germ element");
  }
  if (trajectory.states.empty()) {
    throw ConfigError(ConfigErrorKind::Invalid, "audit needs a trajectory recorded at every step");
  }
  require_supported(trajectory, xi);
  const GridState frozen = constant_state(trajectory.mesh, k);
  const auto parts = assemble(trajectory, [&](std::size_t) -> const GridState& { return frozen; }, xi, &k);
  EntropyReport report;
  report.residual = -parts.value;
  report.pointwise = -parts.pointwise;
  report.junction_term = parts.junction;
  report.pass = report.residual >= -report.tolerance;
  return report;
}

ConvergenceProblem riemann_problem(const JunctionSpec& spec, const State& u0, double t_final, double road_length) {
  auto sol = std::make_shared<RiemannSolution>(riemann_solve(spec, u0));
  ConvergenceProblem problem{spec};
  for (int h = 0; h < spec.roads(); ++h) problem.initial.emplace_back(PiecewiseConstant{{}, {u0[h]}});
  problem.t_final = t_final;
  problem.road_length = road_length;
  problem.exact = [sol](int road, double x, double t) {
    return t > 0.0 ? sol->sample(road, x / t) : sol->initial[road];
  };
  return problem;
}

namespace {

GridState final_state(const ConvergenceProblem& problem, double dx) {
  const int cells = static_cast<int>(std::lround(problem.road_length / dx));
  RunConfig config{NetworkMesh(problem.spec, dx, cells)};
  config.cfl = problem.cfl;
  config.t_final = problem.t_final;
  config.outer = problem.outer;
  const auto traj = run(config, discretize_initial(config.mesh, problem.initial));
  return traj.snapshots.back();
}

}  // namespace

ConvergenceReport convergence_study(const ConvergenceProblem& problem, const std::vector<double>& dx_list) {
  if (!problem.exact && !(problem.reference_dx > 0.0)) {
    throw ConfigError(ConfigErrorKind::Invalid, "convergence study needs an exact solution or a reference mesh");
  }
  std::optional<GridState> reference;
  if (!problem.exact) reference = final_state(problem, problem.reference_dx);

  ConvergenceReport report;
  for (double dx : dx_list) {
    const GridState u = final_state(problem, dx);
    const NetworkMesh mesh(problem.spec, dx, static_cast<int>(std::lround(problem.road_length / dx)));
    double err = 0.0;
    for (int h = 0; h < mesh.roads(); ++h) {
      for (int c = 0; c < mesh.cells(h); ++c) {
        double ref = 0.0;
        if (reference) {
          const int ratio = static_cast<int>(std::lround(dx / problem.reference_dx));
          if (std::abs(ratio * problem.reference_dx - dx) > 1e-9 * dx) {
            throw ConfigError(ConfigErrorKind::Invalid, "reference mesh must refine every study mesh");
          }
          ref = reference->values[h].segment(c * ratio, ratio).mean();
        } else {
          const double left = mesh.cell_left(h, c);
          for (int q = 0; q < kSubSamples; ++q) {
            ref += problem.exact(h, left + (q + 0.5) * dx / kSubSamples, problem.t_final);
          }
          ref /= kSubSamples;
        }
        err += std::abs(u.values[h][c] - ref);
      }
    }
    ConvergenceRow row{dx, dx * err, std::numeric_limits<double>::quiet_NaN()};
    if (!report.rows.empty()) {
      const auto& prev = report.rows.back();
      row.order = std::log(prev.error / row.error) / std::log(prev.dx / row.dx);
    }
    report.rows.push_back(row);
  }
  report.monotone = true;
  for (std::size_t k = 1; k < report.rows.size(); ++k) {
    if (!(report.rows[k].error < report.rows[k - 1].error)) report.monotone = false;
  }
  return report;
}

std::vector<State> germ_sampler(const JunctionSpec& spec, int count, std::uint64_t seed) {
  if (count < 1) throw DomainError("germ sampler needs count >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<State> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int n = 0; n < count; ++n) {
    State u(spec.roads());
    for (int h = 0; h < spec.roads(); ++h) u[h] = spec.rho_min() + spec.width() * unit(rng);
    out.push_back(riemann_solve(spec, u).traces);
  }
  return out;
}

}  // namespace jfv
