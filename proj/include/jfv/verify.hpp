#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "jfv/junction.hpp"
#include "jfv/riemann.hpp"
#include "jfv/scheme.hpp"

namespace jfv {

/// Non-negative tensor-product test function: a C^2 bump (1 - s^2)^3 in time
/// on (t_start, t_end), times a bump in |x| that is flat (= 1) on
/// [-flat, flat] and decays to zero over width_in (x < 0) or width_out (x > 0).
struct TestFunction {
  double t_start = 0.0;
  double t_end = 1.0;
  double flat = 0.0;
  double width_in = 1.0;
  double width_out = 1.0;

  double operator()(double t, double x) const;
};

/// Mass unit used to scale audit tolerances: dx (B - A) times the cell count.
double mass_scale(const NetworkMesh& mesh);

struct KatoReport {
  double value = 0.0;          ///< assembled form (<= 0 in exact arithmetic)
  double junction_term = 0.0;  ///< cancels by flux balance; reported separately
  double tolerance = 0.0;
  bool pass = false;
};

/// Discrete Kato form for two runs on the same mesh and time steps, with Q at
/// interior interfaces built from Godunov fluxes of componentwise max / min.
/// Both trajectories must carry every step. Throws ConfigError on mismatched
/// runs and PreconditionError when xi does not vanish at the first two and the
/// last time level or in the outermost cells.
KatoReport kato_audit(const Trajectory& a, const Trajectory& b, const TestFunction& xi);

struct ContractionReport {
  std::vector<double> radius;
  std::vector<double> distance;
  double max_increase = 0.0;
  bool pass = false;
};

/// L1 distance over the cells with |x| < M - r(t). By default the window loses
/// one cell per step, which is the domain of dependence of the scheme; a speed
/// gives r(t) = speed * t instead.
ContractionReport l1_contraction_check(const Trajectory& a, const Trajectory& b, double window,
                                       std::optional<double> speed = std::nullopt, double tol = 1e-12);

struct EntropyReport {
  double residual = 0.0;   ///< minus the Kato form against the constant k
  double pointwise = 0.0;  ///< same with cell-centred q_h(u, k_h); reported only
  double junction_term = 0.0;
  double tolerance = 1e-10;
  bool pass = false;
};

/// Adapted entropy inequality against a germ element k (PreconditionError
/// otherwise): the Kato form with the second solution frozen at k.
EntropyReport adapted_entropy_residual(const Trajectory& trajectory, const State& k, const TestFunction& xi);

/// Exact density on road h at signed position x and time t.
using ExactSolution = std::function<double(int road, double x, double t)>;

struct ConvergenceProblem {
  JunctionSpec spec;
  std::vector<RoadData> initial;
  double t_final = 0.2;
  double road_length = 1.0;
  double cfl = 0.9;
  OuterBc outer;
  /// Exact solution; when empty a run at reference_dx serves as reference.
  ExactSolution exact;
  double reference_dx = 0.0;
};

/// Constant-per-road datum with its self-similar exact solution.
ConvergenceProblem riemann_problem(const JunctionSpec& spec, const State& u0, double t_final, double road_length);

struct ConvergenceRow {
  double dx = 0.0;
  double error = 0.0;
  double order = 0.0;  ///< NaN on the first row
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  bool monotone = false;
};

ConvergenceReport convergence_study(const ConvergenceProblem& problem, const std::vector<double>& dx_list);

/// Germ elements from seeded uniform Riemann data mapped through the traces.
std::vector<State> germ_sampler(const JunctionSpec& spec, int count, std::uint64_t seed);

}  // namespace jfv
