#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "jfv/flux.hpp"

namespace jfv {

/// Road-wise constant densities (u_1, ..., u_{m+n}); incoming roads first.
using State = Eigen::VectorXd;

/// Star junction: m incoming roads (x < 0) and n outgoing roads (x > 0),
/// all sharing one density interval.
class JunctionSpec {
 public:
  JunctionSpec(int incoming, int outgoing, std::vector<Flux> fluxes);

  int incoming() const noexcept { return m_; }
  int outgoing() const noexcept { return n_; }
  int roads() const noexcept { return m_ + n_; }
  bool is_incoming(int road) const noexcept { return road < m_; }

  const Flux& flux(int road) const { return fluxes_.at(static_cast<std::size_t>(road)); }
  const std::vector<Flux>& fluxes() const noexcept { return fluxes_; }

  double rho_min() const noexcept { return rho_min_; }
  double rho_max() const noexcept { return rho_max_; }
  double width() const noexcept { return rho_max_ - rho_min_; }
  double lipschitz_sum() const noexcept { return lipschitz_sum_; }
  double lipschitz_max() const noexcept { return lipschitz_max_; }

  /// Throws DomainError unless the vector has m+n entries inside the interval.
  void check_state(const State& u) const;

 private:
  int m_;
  int n_;
  std::vector<Flux> fluxes_;
  double rho_min_;
  double rho_max_;
  double lipschitz_sum_ = 0.0;
  double lipschitz_max_ = 0.0;
};

/// Sum of incoming Godunov fluxes G_i(u_i, p).
double phi_in(const JunctionSpec& spec, const State& u, double p);
/// Sum of outgoing Godunov fluxes G_j(p, u_j).
double phi_out(const JunctionSpec& spec, const State& u, double p);
/// Per-road Godunov fluxes against the coupling value p.
Eigen::VectorXd junction_fluxes_at(const JunctionSpec& spec, const State& u, double p);

struct JunctionSolution {
  double p_min = 0.0;  ///< leftmost coupling value balancing the fluxes
  double p_max = 0.0;  ///< rightmost coupling value
  double p = 0.0;      ///< point of [p_min, p_max] the fluxes were evaluated at
  Eigen::VectorXd fluxes;  ///< G*_h
  double total = 0.0;      ///< F* (sum of incoming entries)
  double imbalance = 0.0;  ///< phi_in(p) - phi_out(p)
};

struct SolveOptions {
  /// Flux-units tolerance deciding phi_in = phi_out. <= 0 selects 1e-12 * sum L_h * (B - A).
  double residual_tol = 0.0;
  /// Bracket width at which the p_min / p_max bisections stop. <= 0 selects 1e-13 * (B - A).
  double argument_tol = 0.0;
};

/// Coupling value and junction fluxes for u (bisection on the non-increasing
/// phi_in - phi_out). Fluxes are evaluated at the point of [p_min, p_max] with
/// the smallest balance residual among the midpoint, the sign-change point and
/// any entries of u inside the interval; on the solution set they are constant.
/// Throws ConsistencyError when the endpoint signs are wrong beyond tolerance.
JunctionSolution solve_junction(const JunctionSpec& spec, const State& u, const SolveOptions& options = {});

double total_flux(const JunctionSpec& spec, const State& u);

constexpr double kDefaultMembershipTol = 1e-9;

/// k belongs to the vanishing viscosity germ: G*_h(k) = f_h(k_h) for every road.
bool is_germ_member(const JunctionSpec& spec, const State& k, double tol = kDefaultMembershipTol);

/// Same question answered through the Oleinik-type inequalities, sampling s
/// over I[k_i, p] and I[p, k_j] at the balancing p.
bool is_germ_member_oleinik(const JunctionSpec& spec, const State& k, double tol = kDefaultMembershipTol);

/// A coupling value p for which the strict inequalities defining the strict
/// germ hold with margin > tol, or nullopt when k is not a strict member.
std::optional<double> strict_germ_witness(const JunctionSpec& spec, const State& k,
                                          double tol = kDefaultMembershipTol);

bool is_strict_germ_member(const JunctionSpec& spec, const State& k, double tol = kDefaultMembershipTol);

/// Sum_i q_i(k1_i, k2_i) - sum_j q_j(k1_j, k2_j).
double dissipativity(const JunctionSpec& spec, const State& k1, const State& k2);

}  // namespace jfv
