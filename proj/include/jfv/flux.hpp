#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace jfv {

enum class FluxFamily { QuadraticLwr, PaperQuadratic, CustomPolynomial, Tabulated };

std::string_view to_string(FluxFamily family);
std::optional<FluxFamily> parse_flux_family(std::string_view name);

/// A bell-shaped flux on a density interval [rho_min, rho_max]: zero at both
/// ends, strictly increasing up to rho_crit and strictly decreasing after it.
///
/// Immutable after construction. Every factory validates the shape by sampling
/// and throws DomainError when it does not hold (plateaus at the crest are
/// rejected).
class Flux {
 public:
  /// v * rho * (1 - rho / r_max) on [0, r_max].
  static Flux quadratic_lwr(double vmax, double r_max);
  /// -h * rho^2 + h on [-1, 1].
  static Flux paper_quadratic(double h);
  /// sum_k c_k rho^k on [a, b]. rho_crit is located numerically when omitted.
  static Flux polynomial(std::vector<double> coefficients, double a, double b,
                         std::optional<double> rho_crit = std::nullopt);
  /// Piecewise-linear interpolant of (nodes, values). Nodes strictly increasing.
  static Flux tabulated(std::vector<double> nodes, std::vector<double> values);

  FluxFamily family() const noexcept { return family_; }
  /// Family parameters as given at construction (polynomial: coefficients;
  /// tabulated: nodes followed by values).
  std::span<const double> params() const noexcept { return params_; }

  double rho_min() const noexcept { return rho_min_; }
  double rho_max() const noexcept { return rho_max_; }
  double rho_crit() const noexcept { return rho_crit_; }
  double max_value() const noexcept { return max_value_; }
  /// Upper bound on |f'| over the interval.
  double lipschitz() const noexcept { return lipschitz_; }

  /// True for quadratic fluxes, where the Riemann fan has a closed form.
  bool concave_quadratic() const noexcept { return concave_quadratic_; }
  /// Piecewise-linear fluxes have affine pieces, so f' is constant on
  /// subintervals. Accepted, but flagged.
  bool nld_violated() const noexcept { return family_ == FluxFamily::Tabulated; }

  /// f(rho). Throws DomainError outside [rho_min, rho_max] (a relative slack of
  /// 1e-12 absorbs round-off; such arguments are clamped).
  double operator()(double rho) const;
  /// f'(rho); right derivative at tabulated nodes.
  double derivative(double rho) const;

  /// Inverse of f restricted to [rho_min, rho_crit] (value clamped to [0, max]).
  double increasing_preimage(double value) const;
  /// Inverse of f restricted to [rho_crit, rho_max].
  double decreasing_preimage(double value) const;
  /// The other density with the same flux value (rho itself at the crest).
  double conjugate(double rho) const;

  /// Clamp into the interval after checking the slack; throws DomainError.
  double checked(double rho) const;

 private:
  Flux() = default;
  double raw(double rho) const;
  void finish_construction(std::optional<double> rho_crit);

  FluxFamily family_ = FluxFamily::CustomPolynomial;
  std::vector<double> params_;
  std::vector<double> coefficients_;  // polynomial families
  std::vector<double> nodes_;         // tabulated
  std::vector<double> values_;        // tabulated
  double rho_min_ = 0.0;
  double rho_max_ = 1.0;
  double rho_crit_ = 0.5;
  double max_value_ = 0.0;
  double lipschitz_ = 0.0;
  bool concave_quadratic_ = false;
};

inline double eval(const Flux& f, double rho) { return f(rho); }

/// Classical two-point Godunov flux: min of f over [a,b] if a <= b, max over
/// [b,a] otherwise. Evaluated as min(demand(a), supply(b)).
double godunov(const Flux& f, double a, double b);

/// Largest flux an upstream state can send.
double demand(const Flux& f, double a);
/// Largest flux a downstream state can receive.
double supply(const Flux& f, double b);

/// sign(u - k) (f(u) - f(k)), with sign(0) = 0.
double entropy_flux(const Flux& f, double u, double k);

/// Godunov numerical entropy flux G(a v k, b v k) - G(a ^ k, b ^ k); equals
/// entropy_flux(f, u, k) when a = b = u.
double numerical_entropy_flux(const Flux& f, double a, double b, double k);

constexpr double sign(double x) noexcept { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace jfv
