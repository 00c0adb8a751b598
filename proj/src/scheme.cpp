#include "jfv/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "jfv/errors.hpp"

namespace jfv {

namespace {

// Average of a piecewise-constant table over [a, b]; a cell inside one piece
// takes that value exactly.
double table_average(const PiecewiseConstant& t, double a, double b) {
  double acc = 0.0;
  double lo = a;
  for (std::size_t k = 0; k < t.values.size(); ++k) {
    const double piece_hi = k < t.breakpoints.size() ? t.breakpoints[k] : b;
    const double hi = std::min(piece_hi, b);
    if (hi > lo) {
      if (lo == a && hi == b) return t.values[k];
      acc += t.values[k] * (hi - lo);
      lo = hi;
    }
    if (lo >= b) break;
  }
  return acc / (b - a);
}

}  // namespace

NetworkMesh::NetworkMesh(JunctionSpec spec, double dx, std::vector<int> cells)
    : spec_(std::move(spec)), dx_(dx), cells_(std::move(cells)) {
  if (!(dx_ > 0.0) || !std::isfinite(dx_)) throw DomainError("mesh needs dx > 0");
  if (static_cast<int>(cells_.size()) != spec_.roads()) throw DomainError("mesh needs one cell count per road");
  for (int n : cells_) {
    if (n < 1) throw DomainError("every road needs at least one cell");
    total_ += n;
  }
}

NetworkMesh::NetworkMesh(JunctionSpec spec, double dx, int cells)
    : NetworkMesh(spec, dx, std::vector<int>(static_cast<std::size_t>(spec.roads()), cells)) {}

double NetworkMesh::cell_left(int road, int c) const {
  return spec_.is_incoming(road) ? (c - cells(road)) * dx_ : c * dx_;
}

GridState discretize_initial(const NetworkMesh& mesh, const std::vector<RoadData>& data) {
  if (static_cast<int>(data.size()) != mesh.roads()) throw DomainError("initial data needs one entry per road");
  GridState state;
  state.values.resize(data.size());
  // Gauss-Legendre, 3 points on [-1, 1].
  const double node = std::sqrt(0.6);
  const double w_outer = 5.0 / 9.0;
  const double w_mid = 8.0 / 9.0;
  for (int h = 0; h < mesh.roads(); ++h) {
    const Flux& f = mesh.spec().flux(h);
    Eigen::VectorXd& u = state.values[h];
    u.resize(mesh.cells(h));
    const auto& d = data[static_cast<std::size_t>(h)];
    if (const auto* table = std::get_if<PiecewiseConstant>(&d)) {
      if (table->values.size() != table->breakpoints.size() + 1) {
        throw DomainError("piecewise-constant data needs one more value than breakpoints");
      }
      if (!std::is_sorted(table->breakpoints.begin(), table->breakpoints.end())) {
        throw DomainError("breakpoints must be sorted");
      }
      for (double v : table->values) f.checked(v);
      for (int c = 0; c < mesh.cells(h); ++c) {
        const double a = mesh.cell_left(h, c);
        u[c] = f.checked(table_average(*table, a, a + mesh.dx()));
      }
    } else {
      const auto& fn = std::get<std::function<double(double)>>(d);
      for (int c = 0; c < mesh.cells(h); ++c) {
        const double mid = mesh.cell_center(h, c);
        const double half = 0.5 * mesh.dx();
        const double l = f.checked(fn(mid - node * half));
        const double m = f.checked(fn(mid));
        const double r = f.checked(fn(mid + node * half));
        u[c] = 0.5 * (w_outer * l + w_mid * m + w_outer * r);
      }
    }
  }
  return state;
}

GridState constant_state(const NetworkMesh& mesh, const State& k) {
  mesh.spec().check_state(k);
  GridState state;
  for (int h = 0; h < mesh.roads(); ++h) state.values.push_back(Eigen::VectorXd::Constant(mesh.cells(h), k[h]));
  return state;
}

double cfl_timestep(const NetworkMesh& mesh, double cfl) {
  if (!(cfl > 0.0 && cfl <= 1.0)) {
    throw ConfigError(ConfigErrorKind::Range, "CFL number must lie in (0, 1]");
  }
  return cfl * mesh.dx() / (2.0 * mesh.spec().lipschitz_max());
}

State junction_state(const NetworkMesh& mesh, const GridState& state) {
  State u(mesh.roads());
  for (int h = 0; h < mesh.roads(); ++h) u[h] = state.values[h][mesh.junction_cell(h)];
  return u;
}

GridState step(const GridState& state, const NetworkMesh& mesh, double dt, const OuterBc& bc, StepInfo* info) {
  const JunctionSpec& spec = mesh.spec();
  const double limit = cfl_timestep(mesh, 1.0);
  if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "time step " << dt << " violates the CFL bound " << limit;
    throw ConfigError(ConfigErrorKind::Range, os.str());
  }
  if (bc.kind == OuterBcKind::Dirichlet && static_cast<int>(bc.values.size()) != mesh.roads()) {
    throw ConfigError(ConfigErrorKind::Invalid, "Dirichlet boundary needs one value per road");
  }

  const auto junction = solve_junction(spec, junction_state(mesh, state));
  const double lambda = dt / mesh.dx();

  GridState next;
  next.step = state.step + 1;
  next.time = state.time + dt;
  next.values.resize(state.values.size());
  double outflow = 0.0;
  Eigen::VectorXd flux;
  for (int h = 0; h < mesh.roads(); ++h) {
    const Flux& f = spec.flux(h);
    const Eigen::VectorXd& u = state.values[h];
    const int n = mesh.cells(h);
    flux.resize(n + 1);
    for (int c = 1; c < n; ++c) flux[c] = godunov(f, u[c - 1], u[c]);
    const bool dirichlet = bc.kind == OuterBcKind::Dirichlet;
    if (spec.is_incoming(h)) {
      flux[0] = dirichlet ? godunov(f, bc.values[h], u[0]) : f(u[0]);
      flux[n] = junction.fluxes[h];
      outflow -= flux[0];
    } else {
      flux[0] = junction.fluxes[h];
      flux[n] = dirichlet ? godunov(f, u[n - 1], bc.values[h]) : f(u[n - 1]);
      outflow += flux[n];
    }
    next.values[h] = u - lambda * (flux.tail(n) - flux.head(n));
  }
  if (info) {
    info->junction = junction;
    info->outflow = outflow;
  }
  return next;
}

Trajectory run(const RunConfig& config, const GridState& initial) {
  if (!(config.t_final >= 0.0)) throw ConfigError(ConfigErrorKind::Range, "t_final must be non-negative");
  const NetworkMesh& mesh = config.mesh;
  const double dt0 = cfl_timestep(mesh, config.cfl);

  std::vector<double> stops;
  for (double t : config.snapshot_times) {
    if (t < 0.0 || t > config.t_final) throw ConfigError(ConfigErrorKind::Range, "snapshot time outside [0, t_final]");
    if (t > 0.0) stops.push_back(t);
  }
  stops.push_back(config.t_final);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

  Trajectory traj{mesh};
  GridState current = initial;
  current.step = 0;
  current.time = 0.0;
  traj.initial_mass = total_mass(mesh, current);
  traj.snapshots.push_back(current);
  if (config.record_all_steps) traj.states.push_back(current);

  StepInfo info;
  for (double stop : stops) {
    if (stop <= 0.0) continue;
    while (current.time < stop) {
      double dt = dt0;
      bool lands = false;
      if (current.time + dt >= stop - 1e-12 * dt0) {
        dt = stop - current.time;
        lands = true;
      }
      current = step(current, mesh, dt, config.outer, &info);
      if (lands) current.time = stop;
      traj.junction_log.push_back({current.time - dt, info.junction.p_min, info.junction.p_max,
                                   info.junction.fluxes, info.junction.total});
      traj.steps.push_back({current.time, dt, total_mass(mesh, current), info.outflow});
      if (config.record_all_steps) traj.states.push_back(current);
    }
    traj.snapshots.push_back(current);
  }
  return traj;
}

double total_mass(const NetworkMesh& mesh, const GridState& state) {
  double acc = 0.0;
  for (const auto& u : state.values) acc += u.sum();
  return mesh.dx() * acc;
}

MassLedger mass_ledger(const Trajectory& trajectory) {
  MassLedger ledger;
  double out = 0.0;
  ledger.time.push_back(0.0);
  ledger.mass.push_back(trajectory.initial_mass);
  ledger.outflow.push_back(0.0);
  ledger.defect.push_back(0.0);
  for (const auto& rec : trajectory.steps) {
    out += rec.dt * rec.outflow;
    const double defect = rec.mass - trajectory.initial_mass + out;
    ledger.time.push_back(rec.t);
    ledger.mass.push_back(rec.mass);
    ledger.outflow.push_back(out);
    ledger.defect.push_back(defect);
    ledger.max_defect = std::max(ledger.max_defect, std::abs(defect));
  }
  return ledger;
}

double l1_distance(const NetworkMesh& mesh, const GridState& a, const GridState& b) {
  double acc = 0.0;
  for (int h = 0; h < mesh.roads(); ++h) acc += (a.values[h] - b.values[h]).cwiseAbs().sum();
  return mesh.dx() * acc;
}

}  // namespace jfv
