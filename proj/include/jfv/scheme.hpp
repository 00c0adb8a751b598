#pragma once

#include <Eigen/Core>
#include <functional>
#include <utility>
#include <variant>
#include <vector>

#include "jfv/junction.hpp"

namespace jfv {

/// Truncated star network with uniform cells. Incoming road h occupies
/// [-N_h dx, 0], outgoing road h occupies [0, N_h dx]; cell arrays run in
/// increasing x, so index N_h - 1 is the junction cell of an incoming road and
/// index 0 the junction cell of an outgoing one.
class NetworkMesh {
 public:
  NetworkMesh(JunctionSpec spec, double dx, std::vector<int> cells);
  /// Uniform variant: every road gets `cells` cells.
  NetworkMesh(JunctionSpec spec, double dx, int cells);

  const JunctionSpec& spec() const noexcept { return spec_; }
  double dx() const noexcept { return dx_; }
  int roads() const noexcept { return spec_.roads(); }
  int cells(int road) const { return cells_.at(static_cast<std::size_t>(road)); }
  const std::vector<int>& cells() const noexcept { return cells_; }
  int total_cells() const noexcept { return total_; }

  /// Signed position of the left end of cell c on road h.
  double cell_left(int road, int c) const;
  double cell_center(int road, int c) const { return cell_left(road, c) + 0.5 * dx_; }
  /// Index of the cell touching the junction.
  int junction_cell(int road) const { return spec_.is_incoming(road) ? cells(road) - 1 : 0; }
  /// Index of the cell at the truncated end.
  int outer_cell(int road) const { return spec_.is_incoming(road) ? 0 : cells(road) - 1; }

 private:
  JunctionSpec spec_;
  double dx_;
  std::vector<int> cells_;
  int total_ = 0;
};

struct GridState {
  long step = 0;
  double time = 0.0;
  std::vector<Eigen::VectorXd> values;  ///< one array per road
};

/// Initial data for one road: a piecewise-constant table in signed x
/// (values[k] on (breakpoints[k-1], breakpoints[k])), or a density function.
struct PiecewiseConstant {
  std::vector<double> breakpoints;
  std::vector<double> values;
};
using RoadData = std::variant<PiecewiseConstant, std::function<double(double)>>;

/// Cell averages: exact overlap integrals for tables, 3-point Gauss otherwise.
GridState discretize_initial(const NetworkMesh& mesh, const std::vector<RoadData>& data);
/// Road-wise constant state k.
GridState constant_state(const NetworkMesh& mesh, const State& k);

/// dt = cfl * dx / (2 max_h L_h).
double cfl_timestep(const NetworkMesh& mesh, double cfl);

enum class OuterBcKind { Absorbing, Dirichlet };

struct OuterBc {
  OuterBcKind kind = OuterBcKind::Absorbing;
  std::vector<double> values;  ///< one boundary density per road (Dirichlet only)
};

struct StepInfo {
  JunctionSolution junction;
  /// Net rate of mass leaving through the truncated ends during the step.
  double outflow = 0.0;
};

/// Junction state u* (cells adjacent to the junction).
State junction_state(const NetworkMesh& mesh, const GridState& state);

/// One step: stage I solves for p on the junction cells, stage II marches
/// every road with Godunov fluxes and G*_h at the junction interface.
/// Throws ConfigError when dt breaks the CFL bound.
GridState step(const GridState& state, const NetworkMesh& mesh, double dt, const OuterBc& bc = {},
               StepInfo* info = nullptr);

struct RunConfig {
  explicit RunConfig(NetworkMesh m) : mesh(std::move(m)) {}

  NetworkMesh mesh;
  double cfl = 0.9;
  double t_final = 0.0;
  OuterBc outer;
  std::vector<double> snapshot_times;
  /// Keep every intermediate state (needed by the Kato and contraction audits).
  bool record_all_steps = false;
};

struct JunctionLogEntry {
  double t = 0.0;
  double p_min = 0.0;
  double p_max = 0.0;
  Eigen::VectorXd fluxes;
  double total = 0.0;
};

struct StepRecord {
  double t = 0.0;  ///< time at the end of the step
  double dt = 0.0;
  double mass = 0.0;
  double outflow = 0.0;
};

struct Trajectory {
  NetworkMesh mesh;
  double initial_mass = 0.0;
  std::vector<GridState> snapshots;
  std::vector<JunctionLogEntry> junction_log;
  std::vector<StepRecord> steps;
  std::vector<GridState> states;  ///< every step, when requested
};

/// Marches to t_final with the CFL step, shortening steps to land exactly on
/// snapshot times and t_final. The initial state is always the first snapshot.
Trajectory run(const RunConfig& config, const GridState& initial);

/// sum_h dx sum_l u
double total_mass(const NetworkMesh& mesh, const GridState& state);

struct MassLedger {
  std::vector<double> time;
  std::vector<double> mass;
  std::vector<double> outflow;  ///< accumulated dt * outflow
  std::vector<double> defect;   ///< mass - mass0 + accumulated outflow
  double max_defect = 0.0;
};

MassLedger mass_ledger(const Trajectory& trajectory);

/// sum_h dx sum_l |u - v|
double l1_distance(const NetworkMesh& mesh, const GridState& a, const GridState& b);

}  // namespace jfv
