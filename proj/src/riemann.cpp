#include "jfv/riemann.hpp"

#include <algorithm>
#include <cmath>

namespace jfv {

namespace {

constexpr int kEnvelopeGrid = 1 << 12;

double cross(double ox, double oy, double ax, double ay, double bx, double by) {
  return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox);
}

// Monotone chain over ascending abscissae; lower = true keeps the convex
// (lower) envelope, otherwise the concave (upper) one.
std::vector<double> envelope_vertices(const Flux& f, double lo, double hi, bool lower) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (int k = 0; k <= kEnvelopeGrid; ++k) {
    const double x = k == kEnvelopeGrid ? hi : lo + (hi - lo) * k / kEnvelopeGrid;
    const double y = f(x);
    while (xs.size() >= 2) {
      const std::size_t n = xs.size();
      const double c = cross(xs[n - 2], ys[n - 2], xs[n - 1], ys[n - 1], x, y);
      if (lower ? c <= 0.0 : c >= 0.0) {
        xs.pop_back();
        ys.pop_back();
      } else {
        break;
      }
    }
    xs.push_back(x);
    ys.push_back(y);
  }
  return xs;
}

}  // namespace

ScalarFan::ScalarFan(const Flux& f, double left, double right) : left_(f.checked(left)), right_(f.checked(right)) {
  if (left_ == right_) return;
  if (f.concave_quadratic()) {
    if (left_ < right_) {
      states_ = {left_, right_};
      speeds_ = {(f(right_) - f(left_)) / (right_ - left_)};
    } else {
      rarefaction_closed_form_ = true;
      a_ = f.rho_min();
      d0_ = f.derivative(f.rho_min());
      d1_ = (f.derivative(f.rho_max()) - d0_) / (f.rho_max() - f.rho_min());
      states_ = {left_, right_};
      speeds_ = {f.derivative(left_), f.derivative(right_)};
    }
    return;
  }
  const bool lower = left_ < right_;
  states_ = envelope_vertices(f, std::min(left_, right_), std::max(left_, right_), lower);
  if (!lower) std::reverse(states_.begin(), states_.end());
  states_.front() = left_;
  states_.back() = right_;
  for (std::size_t k = 0; k + 1 < states_.size(); ++k) {
    speeds_.push_back((f(states_[k + 1]) - f(states_[k])) / (states_[k + 1] - states_[k]));
  }
}

double ScalarFan::operator()(double xi) const {
  if (states_.empty()) return left_;
  if (rarefaction_closed_form_) {
    if (xi <= speeds_.front()) return left_;
    if (xi >= speeds_.back()) return right_;
    return std::clamp(a_ + (xi - d0_) / d1_, right_, left_);
  }
  const auto it = std::upper_bound(speeds_.begin(), speeds_.end(), xi);
  return states_[static_cast<std::size_t>(it - speeds_.begin())];
}

double RiemannSolution::sample(int road, double xi) const {
  const auto& fan = fans.at(static_cast<std::size_t>(road));
  if (road < incoming) return xi < 0.0 ? fan(xi) : traces[road];
  return xi > 0.0 ? fan(xi) : traces[road];
}

State riemann_traces(const JunctionSpec& spec, const State& u0, double p) {
  State gamma(spec.roads());
  for (int h = 0; h < spec.roads(); ++h) {
    const Flux& f = spec.flux(h);
    const double u = f.checked(u0[h]);
    const double tie = 1e-13 * f.max_value();
    // Incoming roads look for the extremum over I[u, p] as left states,
    // outgoing roads as right states; the orientation flips min and max.
    const bool want_min = spec.is_incoming(h) ? u <= p : p <= u;
    if (want_min) {
      gamma[h] = f(u) <= f(p) + tie ? u : p;
    } else {
      const double lo = std::min(u, p);
      const double hi = std::max(u, p);
      double best = f(lo) >= f(hi) ? lo : hi;
      if (f.rho_crit() > lo && f.rho_crit() < hi) best = f.rho_crit();
      gamma[h] = f(u) >= f(best) - tie ? u : best;
    }
  }
  return gamma;
}

RiemannSolution riemann_solve(const JunctionSpec& spec, const State& u0) {
  RiemannSolution sol;
  sol.junction = solve_junction(spec, u0);
  sol.initial = u0;
  sol.incoming = spec.incoming();
  sol.traces = riemann_traces(spec, u0, sol.junction.p);
  sol.fans.reserve(static_cast<std::size_t>(spec.roads()));
  for (int h = 0; h < spec.roads(); ++h) {
    if (spec.is_incoming(h)) {
      sol.fans.emplace_back(spec.flux(h), u0[h], sol.traces[h]);
    } else {
      sol.fans.emplace_back(spec.flux(h), sol.traces[h], u0[h]);
    }
  }
  return sol;
}

}  // namespace jfv
