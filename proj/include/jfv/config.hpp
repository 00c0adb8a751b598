#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jfv/flux.hpp"
#include "jfv/junction.hpp"
#include "jfv/scheme.hpp"

namespace jfv {

struct RoadConfig {
  std::string name;
  int line = 0;  ///< line of the section header
  bool incoming = true;
  Flux flux = Flux::quadratic_lwr(1.0, 1.0);
  double length = 1.0;
  std::optional<int> cells;
  PiecewiseConstant initial;
  std::optional<double> bc_value;
};

struct ViscousConfig {
  double epsilon = 0.01;
  double window = 1.0;
  int samples = 400;
};

/// Parsed and validated configuration. Roads keep their file order within
/// each direction; incoming roads come first.
struct ConfigDocument {
  double dx = 0.01;
  std::vector<RoadConfig> roads;
  double cfl = 0.9;
  double t_final = 0.0;
  std::vector<double> snapshots;
  OuterBcKind outer = OuterBcKind::Absorbing;
  std::optional<ViscousConfig> viscous;

  int incoming() const;
  int outgoing() const;
  JunctionSpec spec() const;
  NetworkMesh mesh(std::optional<double> dx_override = std::nullopt) const;
  std::vector<RoadData> initial_data() const;
  /// Initial value of each road next to the junction.
  State junction_datum() const;
  OuterBc outer_bc() const;
  RunConfig run_config(std::optional<double> dx_override = std::nullopt,
                       std::optional<double> t_final_override = std::nullopt) const;
};

/// Line-oriented format: `[section]` headers ([mesh], [road NAME], [run],
/// [viscous]), `key = value` assignments, `#` comments, lists separated by
/// spaces or commas. Throws ConfigError with the offending line.
ConfigDocument parse_config(std::string_view text);
ConfigDocument load_config(const std::string& path);

/// Locale-independent number parsing; nullopt on trailing garbage.
std::optional<double> parse_double(std::string_view text);

}  // namespace jfv
