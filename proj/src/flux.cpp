#include "jfv/flux.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "jfv/errors.hpp"

namespace jfv {

namespace {

constexpr int kShapeSamples = 4096;
constexpr double kDomainSlack = 1e-12;

std::string describe(double a, double b) {
  std::ostringstream os;
  os << "[" << a << ", " << b << "]";
  return os.str();
}

// Bisection on a monotone branch until the bracket cannot be split further.
template <typename Pred>
double bisect_until_adjacent(double lo, double hi, Pred goes_left) {
  for (int it = 0; it < 200; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (goes_left(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return lo + 0.5 * (hi - lo);
}

}  // namespace

std::string_view to_string(FluxFamily family) {
  switch (family) {
    case FluxFamily::QuadraticLwr:
      return "quadratic-lwr";
    case FluxFamily::PaperQuadratic:
      return "paper-quadratic";
    case FluxFamily::CustomPolynomial:
      return "custom-polynomial";
    case FluxFamily::Tabulated:
      return "tabulated";
  }
  return "unknown";
}

std::optional<FluxFamily> parse_flux_family(std::string_view name) {
  if (name == "quadratic-lwr") return FluxFamily::QuadraticLwr;
  if (name == "paper-quadratic") return FluxFamily::PaperQuadratic;
  if (name == "custom-polynomial" || name == "polynomial") return FluxFamily::CustomPolynomial;
  if (name == "tabulated") return FluxFamily::Tabulated;
  return std::nullopt;
}

Flux Flux::quadratic_lwr(double vmax, double r_max) {
  if (!(vmax > 0.0) || !(r_max > 0.0)) {
    throw DomainError("quadratic-lwr needs positive speed and jam density");
  }
  Flux f;
  f.family_ = FluxFamily::QuadraticLwr;
  f.params_ = {vmax, r_max};
  f.coefficients_ = {0.0, vmax, -vmax / r_max};
  f.rho_min_ = 0.0;
  f.rho_max_ = r_max;
  f.finish_construction(0.5 * r_max);
  return f;
}

Flux Flux::paper_quadratic(double h) {
  if (!(h > 0.0)) throw DomainError("paper-quadratic needs h > 0");
  Flux f;
  f.family_ = FluxFamily::PaperQuadratic;
  f.params_ = {h};
  f.coefficients_ = {h, 0.0, -h};
  f.rho_min_ = -1.0;
  f.rho_max_ = 1.0;
  f.finish_construction(0.0);
  return f;
}

Flux Flux::polynomial(std::vector<double> coefficients, double a, double b,
                      std::optional<double> rho_crit) {
  if (coefficients.empty()) throw DomainError("polynomial flux needs coefficients");
  if (!(a < b)) throw DomainError("polynomial flux needs a < b, got " + describe(a, b));
  Flux f;
  f.family_ = FluxFamily::CustomPolynomial;
  f.params_ = coefficients;
  while (coefficients.size() > 1 && coefficients.back() == 0.0) coefficients.pop_back();
  f.coefficients_ = std::move(coefficients);
  f.rho_min_ = a;
  f.rho_max_ = b;
  f.finish_construction(rho_crit);
  return f;
}

Flux Flux::tabulated(std::vector<double> nodes, std::vector<double> values) {
  if (nodes.size() != values.size() || nodes.size() < 3) {
    throw DomainError("tabulated flux needs at least three (node, value) pairs");
  }
  for (std::size_t k = 1; k < nodes.size(); ++k) {
    if (!(nodes[k] > nodes[k - 1])) throw DomainError("tabulated flux nodes must increase strictly");
  }
  Flux f;
  f.family_ = FluxFamily::Tabulated;
  f.params_ = nodes;
  f.params_.insert(f.params_.end(), values.begin(), values.end());
  f.rho_min_ = nodes.front();
  f.rho_max_ = nodes.back();
  const auto top = std::max_element(values.begin(), values.end());
  const auto crit = nodes[static_cast<std::size_t>(top - values.begin())];
  f.nodes_ = std::move(nodes);
  f.values_ = std::move(values);
  f.finish_construction(crit);
  return f;
}

double Flux::raw(double rho) const {
  if (family_ == FluxFamily::Tabulated) {
    const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), rho);
    if (it == nodes_.begin()) return values_.front();
    if (it == nodes_.end()) return values_.back();
    const auto k = static_cast<std::size_t>(it - nodes_.begin());
    const double t = (rho - nodes_[k - 1]) / (nodes_[k] - nodes_[k - 1]);
    return values_[k - 1] + t * (values_[k] - values_[k - 1]);
  }
  double acc = 0.0;
  for (auto c = coefficients_.rbegin(); c != coefficients_.rend(); ++c) acc = acc * rho + *c;
  return acc;
}

void Flux::finish_construction(std::optional<double> rho_crit) {
  const double width = rho_max_ - rho_min_;
  const double h = width / kShapeSamples;
  std::vector<double> xs(kShapeSamples + 1);
  std::vector<double> fs(kShapeSamples + 1);
  for (int k = 0; k <= kShapeSamples; ++k) {
    xs[k] = k == kShapeSamples ? rho_max_ : rho_min_ + k * h;
    fs[k] = raw(xs[k]);
  }
  const auto top = static_cast<std::size_t>(std::max_element(fs.begin(), fs.end()) - fs.begin());
  const double scale = std::max(1.0, std::abs(fs[top]));

  if (std::abs(fs.front()) > 1e-12 * scale || std::abs(fs.back()) > 1e-12 * scale) {
    throw DomainError("flux must vanish at both ends of " + describe(rho_min_, rho_max_));
  }

  if (rho_crit) {
    rho_crit_ = *rho_crit;
  } else if (family_ == FluxFamily::Tabulated) {
    rho_crit_ = nodes_[static_cast<std::size_t>(std::max_element(values_.begin(), values_.end()) - values_.begin())];
  } else {
    // Sign change of f' next to the sampled maximizer; comparing f values
    // there would only resolve the crest to sqrt(eps).
    const double lo = xs[top == 0 ? 0 : top - 1];
    const double hi = xs[std::min(top + 1, fs.size() - 1)];
    rho_crit_ = bisect_until_adjacent(lo, hi, [&](double r) { return derivative(r) <= 0.0; });
  }
  if (!(rho_crit_ > rho_min_ && rho_crit_ < rho_max_)) {
    throw DomainError("rho_crit must lie strictly inside " + describe(rho_min_, rho_max_));
  }
  max_value_ = raw(rho_crit_);
  if (!(max_value_ > 0.0) || max_value_ < fs[top] - 1e-12 * scale) {
    throw DomainError("rho_crit is not the maximizer of the flux");
  }

  // Strict unimodality on the sampling grid, with rho_crit spliced in.
  double prev_x = rho_min_;
  double prev_f = fs.front();
  for (int k = 1; k <= kShapeSamples; ++k) {
    if (xs[k] >= rho_crit_) break;
    if (!(fs[k] > prev_f)) {
      throw DomainError("flux is not strictly increasing below rho_crit near rho = " +
                        std::to_string(prev_x));
    }
    prev_x = xs[k];
    prev_f = fs[k];
  }
  if (!(max_value_ > prev_f)) throw DomainError("flux has a plateau at its crest");
  prev_f = max_value_;
  for (int k = 0; k <= kShapeSamples; ++k) {
    if (xs[k] <= rho_crit_) continue;
    if (!(fs[k] < prev_f)) {
      throw DomainError("flux is not strictly decreasing above rho_crit near rho = " +
                        std::to_string(xs[k]));
    }
    prev_f = fs[k];
  }

  if (family_ == FluxFamily::Tabulated) {
    lipschitz_ = 0.0;
    for (std::size_t k = 1; k < nodes_.size(); ++k) {
      lipschitz_ = std::max(lipschitz_, std::abs((values_[k] - values_[k - 1]) / (nodes_[k] - nodes_[k - 1])));
    }
    concave_quadratic_ = false;
    return;
  }

  const std::size_t degree = coefficients_.size() - 1;
  concave_quadratic_ = degree == 2 && coefficients_[2] < 0.0;
  if (degree <= 2) {
    // f' is affine: its extreme values sit at the interval ends.
    lipschitz_ = std::max(std::abs(derivative(rho_min_)), std::abs(derivative(rho_max_)));
    return;
  }
  // Sampled max |f'| plus a bound on the gap to the true maximum.
  double sampled = 0.0;
  for (double x : xs) sampled = std::max(sampled, std::abs(derivative(x)));
  const double radius = std::max(std::abs(rho_min_), std::abs(rho_max_));
  double second = 0.0;
  for (std::size_t k = 2; k <= degree; ++k) {
    second += static_cast<double>(k * (k - 1)) * std::abs(coefficients_[k]) *
              std::pow(radius, static_cast<double>(k - 2));
  }
  lipschitz_ = sampled + 0.5 * h * second;
}

double Flux::checked(double rho) const {
  const double slack = kDomainSlack * (rho_max_ - rho_min_);
  if (!(rho >= rho_min_ - slack && rho <= rho_max_ + slack)) {
    std::ostringstream os;
    os << "density " << rho << " outside " << describe(rho_min_, rho_max_);
    throw DomainError(os.str());
  }
  return std::clamp(rho, rho_min_, rho_max_);
}

double Flux::operator()(double rho) const { return raw(checked(rho)); }

double Flux::derivative(double rho) const {
  rho = checked(rho);
  if (family_ == FluxFamily::Tabulated) {
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), rho);
    if (it == nodes_.end()) --it;
    if (it == nodes_.begin()) ++it;
    const auto k = static_cast<std::size_t>(it - nodes_.begin());
    return (values_[k] - values_[k - 1]) / (nodes_[k] - nodes_[k - 1]);
  }
  double acc = 0.0;
  for (std::size_t k = coefficients_.size() - 1; k >= 1; --k) {
    acc = acc * rho + static_cast<double>(k) * coefficients_[k];
  }
  return acc;
}

double Flux::increasing_preimage(double value) const {
  if (value <= 0.0) return rho_min_;
  if (value >= max_value_) return rho_crit_;
  return bisect_until_adjacent(rho_min_, rho_crit_, [&](double r) { return raw(r) >= value; });
}

double Flux::decreasing_preimage(double value) const {
  if (value <= 0.0) return rho_max_;
  if (value >= max_value_) return rho_crit_;
  return bisect_until_adjacent(rho_crit_, rho_max_, [&](double r) { return raw(r) <= value; });
}

double Flux::conjugate(double rho) const {
  rho = checked(rho);
  if (rho < rho_crit_) return decreasing_preimage(raw(rho));
  if (rho > rho_crit_) return increasing_preimage(raw(rho));
  return rho_crit_;
}

double demand(const Flux& f, double a) {
  a = f.checked(a);
  return a <= f.rho_crit() ? f(a) : f.max_value();
}

double supply(const Flux& f, double b) {
  b = f.checked(b);
  return b >= f.rho_crit() ? f(b) : f.max_value();
}

double godunov(const Flux& f, double a, double b) { return std::min(demand(f, a), supply(f, b)); }

double entropy_flux(const Flux& f, double u, double k) { return sign(u - k) * (f(u) - f(k)); }

double numerical_entropy_flux(const Flux& f, double a, double b, double k) {
  return godunov(f, std::max(a, k), std::max(b, k)) - godunov(f, std::min(a, k), std::min(b, k));
}

}  // namespace jfv
