#pragma once

#include <vector>

#include "jfv/flux.hpp"
#include "jfv/junction.hpp"

namespace jfv {

/// Entropy solution of the scalar Riemann problem (left, right) as a function
/// of the ray x/t. Quadratic fluxes use the shock/rarefaction closed form;
/// other fluxes the lower (left < right) or upper (left > right) envelope of f
/// on a 2^12-point grid.
class ScalarFan {
 public:
  ScalarFan(const Flux& f, double left, double right);

  double left() const noexcept { return left_; }
  double right() const noexcept { return right_; }
  /// Slowest and fastest wave speeds (equal for a single shock, 0 when left == right).
  double min_speed() const noexcept { return speeds_.empty() ? 0.0 : speeds_.front(); }
  double max_speed() const noexcept { return speeds_.empty() ? 0.0 : speeds_.back(); }

  double operator()(double xi) const;

 private:
  double left_;
  double right_;
  // Quadratic rarefaction: f'(u) = d0 + d1 (u - a).
  bool rarefaction_closed_form_ = false;
  double a_ = 0.0;
  double d0_ = 0.0;
  double d1_ = 0.0;
  // Wave chain: states_[k] holds between speeds_[k-1] and speeds_[k].
  std::vector<double> states_;
  std::vector<double> speeds_;
};

struct RiemannSolution {
  JunctionSolution junction;
  State initial;
  State traces;  ///< gamma_h, an element of the germ
  std::vector<ScalarFan> fans;
  int incoming = 0;

  /// Density on road h along the ray x/t = xi (xi < 0 on incoming roads,
  /// xi > 0 on outgoing ones; the other side returns the trace).
  double sample(int road, double xi) const;
};

/// Junction Riemann solver: traces are the argmin/argmax of f_h over I[u_h, p]
/// at the balancing p, each road carrying the scalar fan between its datum
/// and its trace. Ties favour the datum, so germ elements are fixed points.
RiemannSolution riemann_solve(const JunctionSpec& spec, const State& u0);

/// Trace formula alone, at a given coupling value.
State riemann_traces(const JunctionSpec& spec, const State& u0, double p);

}  // namespace jfv
