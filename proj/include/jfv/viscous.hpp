#pragma once

#include <Eigen/Core>
#include <vector>

#include "jfv/junction.hpp"
#include "jfv/scheme.hpp"

namespace jfv {

/// Stationary solution of eps rho' = f_h(rho) - f_h(k_h) on every road, with
/// the common value p at the junction.
struct ViscousProfile {
  double epsilon = 0.0;
  State k;
  double p = 0.0;
  std::vector<Eigen::VectorXd> x;    ///< signed positions, x[h][0] = 0
  std::vector<Eigen::VectorXd> rho;  ///< densities at x
};

/// Integrates each road from rho(0) = p outward over |x| <= window with an
/// adaptive Dormand-Prince stepper (relative tolerance 1e-10), sampling
/// n_samples + 1 equispaced points. p is the strict-germ witness of k.
/// Throws PreconditionError unless k is a strict germ element.
ViscousProfile stationary_profile(const JunctionSpec& spec, const State& k, double epsilon, double window,
                                  int n_samples);

/// Largest |eps rho' - (f(rho) - f(k))| at sample midpoints, with rho' and rho
/// from fourth-order staggered stencils.
double profile_residual(const JunctionSpec& spec, const ViscousProfile& profile);

/// Each road moves monotonically from p at the junction to k_h and stays in
/// the closed interval between them.
bool profile_monotone(const ViscousProfile& profile, double tol = 1e-12);

struct ParabolicState {
  double epsilon = 0.0;
  double time = 0.0;
  std::vector<Eigen::VectorXd> values;
  double junction_value = 0.0;  ///< w from the last step
};

struct ParabolicStepInfo {
  double outflow = 0.0;    ///< net mass rate through the truncated ends
  double imbalance = 0.0;  ///< incoming minus outgoing junction flux
};

/// Largest admissible step, min(dx / (2L), dx^2 / (4 eps)).
double parabolic_step_limit(const NetworkMesh& mesh, double epsilon);
/// Default step 0.9 / (2L/dx + 6 eps/dx^2), which keeps the update monotone.
double parabolic_default_step(const NetworkMesh& mesh, double epsilon);

/// Explicit step: Godunov convection plus central diffusion inside roads; the
/// junction value w balances f_i(w) - eps (w - u_i)/(dx/2) against
/// f_j(w) - eps (u_j - w)/(dx/2) and those fluxes enter the junction cells.
/// Outer ends are absorbing with zero diffusive flux. Throws ConfigError when
/// dt exceeds the limit and ConsistencyError when w cannot be bracketed.
ParabolicState parabolic_step(const ParabolicState& state, const NetworkMesh& mesh, double dt,
                              ParabolicStepInfo* info = nullptr);

struct ParabolicDiagnostics {
  double l1 = 0.0;
  double energy = 0.0;         ///< sum dx u^2 / 2
  double gradient = 0.0;       ///< eps sum dx |du/dx|^2
  double time_derivative = 0.0;  ///< sum dx |du/dt| over the last step
};

ParabolicDiagnostics parabolic_diagnostics(const NetworkMesh& mesh, const ParabolicState& before,
                                           const ParabolicState& after, double dt);

/// Runs to t_final with the default step (last step shortened).
ParabolicState parabolic_run(const NetworkMesh& mesh, ParabolicState state, double t_final,
                             double* outflow_integral = nullptr);

/// Number of cells corresponding to a smoothing length eps.
int smoothing_width_cells(double dx, double epsilon);

/// floor(width / 2) passes of a reflecting 3-cell average: preserves mass and
/// range and does not increase total variation or L1 norm.
Eigen::VectorXd initial_smoothing(const Eigen::VectorXd& data, int width_cells);

}  // namespace jfv
