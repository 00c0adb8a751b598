#pragma once

#include <cmath>
#include <random>

#include "jfv/flux.hpp"
#include "jfv/junction.hpp"

namespace jfv::test {

// rho (1 - rho) on [0, 1]
inline Flux lwr() { return Flux::quadratic_lwr(1.0, 1.0); }

inline JunctionSpec one_to_one(const Flux& in, const Flux& out) { return JunctionSpec(1, 1, {in, out}); }
inline JunctionSpec one_to_one() { return one_to_one(lwr(), lwr()); }

// Outgoing flux peaking at 0.9 with f(0.8) = 0.16: against rho (1 - rho) the
// state (0.2, 0.8) forces p = 0.8, where f_1(0.2) = f_1(p) breaks strictness.
inline JunctionSpec forced_crest() {
  return JunctionSpec(1, 1, {lwr(), Flux::tabulated({0.0, 0.9, 1.0}, {0.0, 0.18, 0.0})});
}

inline State state(std::initializer_list<double> v) {
  State s(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) s[i++] = x;
  return s;
}

inline State random_state(const JunctionSpec& spec, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(spec.rho_min(), spec.rho_max());
  State s(spec.roads());
  for (int h = 0; h < spec.roads(); ++h) s[h] = u(rng);
  return s;
}

}  // namespace jfv::test
