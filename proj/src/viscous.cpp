#include "jfv/viscous.hpp"

#include <algorithm>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <sstream>

#include "jfv/errors.hpp"

namespace jfv {

namespace odeint = boost::numeric::odeint;

namespace {

constexpr double kOdeRelTol = 1e-10;
constexpr double kOdeAbsTol = 1e-14;
constexpr double kTailTol = 1e-12;

using OdeState = std::array<double, 1>;

// Samples of one road's profile as a function of the distance s = |x|.
Eigen::VectorXd integrate_road(const Flux& f, double k, double p, double epsilon, double direction, double spacing,
                               int n_samples) {
  Eigen::VectorXd rho(n_samples + 1);
  rho[0] = p;
  if (k == p) {
    rho.setConstant(k);
    return rho;
  }
  const double lo = std::min(k, p);
  const double hi = std::max(k, p);
  const double fk = f(k);
  auto rhs = [&](const OdeState& y, OdeState& dy, double) {
    dy[0] = direction * (f(std::clamp(y[0], lo, hi)) - fk) / epsilon;
  };
  auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<OdeState>>(kOdeAbsTol, kOdeRelTol);
  OdeState y{p};
  bool settled = false;
  for (int n = 1; n <= n_samples; ++n) {
    if (!settled) {
      odeint::integrate_adaptive(stepper, rhs, y, (n - 1) * spacing, n * spacing, 0.1 * spacing);
      y[0] = std::clamp(y[0], lo, hi);
      settled = std::abs(y[0] - k) < kTailTol;
    }
    rho[n] = settled ? k : y[0];
  }
  return rho;
}

}  // namespace

ViscousProfile stationary_profile(const JunctionSpec& spec, const State& k, double epsilon, double window,
                                  int n_samples) {
  if (!(epsilon > 0.0)) throw DomainError("viscous profile needs epsilon > 0");
  if (!(window > 0.0) || n_samples < 4) throw DomainError("viscous profile needs window > 0 and at least 4 samples");
  const auto witness = strict_germ_witness(spec, k);
  if (!witness) throw PreconditionError("stationary viscous profiles need a strict germ element");

  ViscousProfile profile;
  profile.epsilon = epsilon;
  profile.k = k;
  profile.p = *witness;
  const double spacing = window / n_samples;
  for (int h = 0; h < spec.roads(); ++h) {
    const double direction = spec.is_incoming(h) ? -1.0 : 1.0;
    profile.x.push_back(direction * Eigen::VectorXd::LinSpaced(n_samples + 1, 0.0, window));
    profile.x.back()[n_samples] = direction * window;
    profile.rho.push_back(integrate_road(spec.flux(h), k[h], profile.p, epsilon, direction, spacing, n_samples));
  }
  return profile;
}

double profile_residual(const JunctionSpec& spec, const ViscousProfile& profile) {
  double worst = 0.0;
  for (int h = 0; h < spec.roads(); ++h) {
    const Flux& f = spec.flux(h);
    const auto& x = profile.x[h];
    const auto& r = profile.rho[h];
    const double fk = f(profile.k[h]);
    const Eigen::Index n = r.size();
    for (Eigen::Index i = 1; i + 2 < n; ++i) {
      const double step = x[i + 1] - x[i];
      const double slope = (-r[i + 2] + 27.0 * r[i + 1] - 27.0 * r[i] + r[i - 1]) / (24.0 * step);
      const double mid = (-r[i + 2] + 9.0 * r[i + 1] + 9.0 * r[i] - r[i - 1]) / 16.0;
      const double lo = std::min(profile.k[h], profile.p);
      const double hi = std::max(profile.k[h], profile.p);
      worst = std::max(worst, std::abs(profile.epsilon * slope - (f(std::clamp(mid, lo, hi)) - fk)));
    }
  }
  return worst;
}

bool profile_monotone(const ViscousProfile& profile, double tol) {
  for (std::size_t h = 0; h < profile.rho.size(); ++h) {
    const auto& r = profile.rho[h];
    const double k = profile.k[static_cast<Eigen::Index>(h)];
    const double dir = sign(k - profile.p);
    const double lo = std::min(k, profile.p) - tol;
    const double hi = std::max(k, profile.p) + tol;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      if (r[i] < lo || r[i] > hi) return false;
      if (i > 0 && dir * (r[i] - r[i - 1]) < -tol) return false;
    }
  }
  return true;
}

double parabolic_step_limit(const NetworkMesh& mesh, double epsilon) {
  const double dx = mesh.dx();
  return std::min(dx / (2.0 * mesh.spec().lipschitz_max()), dx * dx / (4.0 * epsilon));
}

double parabolic_default_step(const NetworkMesh& mesh, double epsilon) {
  const double dx = mesh.dx();
  return 0.9 / (2.0 * mesh.spec().lipschitz_max() / dx + 6.0 * epsilon / (dx * dx));
}

ParabolicState parabolic_step(const ParabolicState& state, const NetworkMesh& mesh, double dt,
                              ParabolicStepInfo* info) {
  const JunctionSpec& spec = mesh.spec();
  const double eps = state.epsilon;
  const double dx = mesh.dx();
  if (!(eps > 0.0)) throw DomainError("parabolic step needs epsilon > 0");
  const double limit = parabolic_step_limit(mesh, eps);
  if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "parabolic time step " << dt << " exceeds " << limit;
    throw ConfigError(ConfigErrorKind::Range, os.str());
  }

  const State u = junction_state(mesh, GridState{0, 0.0, state.values});
  auto junction_flux = [&](int h, double w) {
    const double diffusive = spec.is_incoming(h) ? (w - u[h]) : (u[h] - w);
    return spec.flux(h)(w) - 2.0 * eps * diffusive / dx;
  };
  auto residual = [&](double w) {
    double acc = 0.0;
    for (int h = 0; h < spec.roads(); ++h) acc += spec.is_incoming(h) ? junction_flux(h, w) : -junction_flux(h, w);
    return acc;
  };

  double lo = spec.rho_min();
  double hi = spec.rho_max();
  const double r_lo = residual(lo);
  const double r_hi = residual(hi);
  if (std::isnan(r_lo) || std::isnan(r_hi)) throw ConsistencyError("junction value residual is not finite");
  double w;
  if (r_lo <= 0.0) {
    w = lo;
  } else if (r_hi >= 0.0) {
    w = hi;
  } else {
    for (;;) {
      const double mid = lo + 0.5 * (hi - lo);
      if (mid <= lo || mid >= hi) break;
      (residual(mid) > 0.0 ? lo : hi) = mid;
    }
    w = std::abs(residual(lo)) <= std::abs(residual(hi)) ? lo : hi;
  }

  ParabolicState next;
  next.epsilon = eps;
  next.time = state.time + dt;
  next.junction_value = w;
  next.values.resize(state.values.size());
  const double lambda = dt / dx;
  double outflow = 0.0;
  Eigen::VectorXd flux;
  for (int h = 0; h < mesh.roads(); ++h) {
    const Flux& f = spec.flux(h);
    const Eigen::VectorXd& v = state.values[h];
    const int n = mesh.cells(h);
    flux.resize(n + 1);
    for (int c = 1; c < n; ++c) flux[c] = godunov(f, v[c - 1], v[c]) - eps * (v[c] - v[c - 1]) / dx;
    if (spec.is_incoming(h)) {
      flux[0] = f(v[0]);
      flux[n] = junction_flux(h, w);
      outflow -= flux[0];
    } else {
      flux[0] = junction_flux(h, w);
      flux[n] = f(v[n - 1]);
      outflow += flux[n];
    }
    next.values[h] = v - lambda * (flux.tail(n) - flux.head(n));
  }
  if (info) {
    info->outflow = outflow;
    info->imbalance = residual(w);
  }
  return next;
}

ParabolicDiagnostics parabolic_diagnostics(const NetworkMesh& mesh, const ParabolicState& before,
                                           const ParabolicState& after, double dt) {
  ParabolicDiagnostics d;
  const double dx = mesh.dx();
  for (std::size_t h = 0; h < after.values.size(); ++h) {
    const auto& u = after.values[h];
    d.l1 += dx * u.cwiseAbs().sum();
    d.energy += 0.5 * dx * u.squaredNorm();
    if (u.size() > 1) {
      const Eigen::VectorXd grad = (u.tail(u.size() - 1) - u.head(u.size() - 1)) / dx;
      d.gradient += after.epsilon * dx * grad.squaredNorm();
    }
    d.time_derivative += dx * (u - before.values[h]).cwiseAbs().sum() / dt;
  }
  return d;
}

ParabolicState parabolic_run(const NetworkMesh& mesh, ParabolicState state, double t_final, double* outflow_integral) {
  const double dt0 = parabolic_default_step(mesh, state.epsilon);
  ParabolicStepInfo info;
  double out = 0.0;
  while (state.time < t_final) {
    double dt = dt0;
    bool lands = false;
    if (state.time + dt >= t_final - 1e-12 * dt0) {
      dt = t_final - state.time;
      lands = true;
    }
    state = parabolic_step(state, mesh, dt, &info);
    if (lands) state.time = t_final;
    out += dt * info.outflow;
  }
  if (outflow_integral) *outflow_integral = out;
  return state;
}

int smoothing_width_cells(double dx, double epsilon) {
  if (!(dx > 0.0) || !(epsilon >= 0.0)) throw DomainError("smoothing needs dx > 0 and epsilon >= 0");
  return static_cast<int>(std::lround(epsilon / dx));
}

Eigen::VectorXd initial_smoothing(const Eigen::VectorXd& data, int width_cells) {
  Eigen::VectorXd u = data;
  const Eigen::Index n = u.size();
  if (n < 2) return u;
  Eigen::VectorXd next(n);
  for (int pass = 0; pass < width_cells / 2; ++pass) {
    for (Eigen::Index c = 0; c < n; ++c) {
      const double left = u[c == 0 ? 0 : c - 1];
      const double right = u[c == n - 1 ? n - 1 : c + 1];
      // Flat neighbourhoods are left exact; (3c) / 3 need not round back to c.
      next[c] = left == u[c] && right == u[c] ? u[c] : (left + u[c] + right) / 3.0;
    }
    u.swap(next);
  }
  return u;
}

}  // namespace jfv
