#include "jfv/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "jfv/errors.hpp"

namespace jfv {

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

using Section = std::map<std::string, Entry>;

struct RawRoad {
  std::string name;
  int line = 0;
  Section keys;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double number(const Entry& e, std::string_view key) {
  const auto v = parse_double(e.value);
  if (!v) throw ConfigError(ConfigErrorKind::Syntax, "'" + std::string(key) + "' expects a number", e.line);
  return *v;
}

std::vector<double> numbers(const Entry& e, std::string_view key) {
  std::vector<double> out;
  std::string text = e.value;
  std::replace(text.begin(), text.end(), ',', ' ');
  std::istringstream is(text);
  std::string token;
  while (is >> token) {
    const auto v = parse_double(token);
    if (!v) throw ConfigError(ConfigErrorKind::Syntax, "'" + std::string(key) + "' expects numbers", e.line);
    out.push_back(*v);
  }
  return out;
}

int integer(const Entry& e, std::string_view key) {
  int v = 0;
  const auto s = trim(e.value);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigError(ConfigErrorKind::Syntax, "'" + std::string(key) + "' expects an integer", e.line);
  }
  return v;
}

void reject_unknown(const Section& section, std::initializer_list<std::string_view> known, std::string_view where) {
  for (const auto& [key, entry] : section) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError(ConfigErrorKind::UnknownKey, "unknown key '" + key + "' in " + std::string(where), entry.line);
    }
  }
}

const Entry* find(const Section& s, const std::string& key) {
  const auto it = s.find(key);
  return it == s.end() ? nullptr : &it->second;
}

Flux build_flux(const RawRoad& raw) {
  const Entry* family_entry = find(raw.keys, "flux.family");
  if (!family_entry) throw ConfigError(ConfigErrorKind::Invalid, "road '" + raw.name + "' needs flux.family", raw.line);
  const auto family = parse_flux_family(trim(family_entry->value));
  if (!family) {
    throw ConfigError(ConfigErrorKind::Invalid, "unknown flux family '" + family_entry->value + "'", family_entry->line);
  }
  const Entry* params_entry = find(raw.keys, "flux.params");
  const std::vector<double> params = params_entry ? numbers(*params_entry, "flux.params") : std::vector<double>{};
  const int line = params_entry ? params_entry->line : family_entry->line;
  auto need = [&](std::size_t n) {
    if (params.size() != n) {
      throw ConfigError(ConfigErrorKind::Invalid,
                        "flux family '" + std::string(to_string(*family)) + "' needs " + std::to_string(n) + " parameter(s)",
                        line);
    }
  };
  try {
    switch (*family) {
      case FluxFamily::QuadraticLwr:
        need(2);
        return Flux::quadratic_lwr(params[0], params[1]);
      case FluxFamily::PaperQuadratic:
        need(1);
        return Flux::paper_quadratic(params[0]);
      case FluxFamily::CustomPolynomial: {
        const Entry* interval = find(raw.keys, "flux.interval");
        if (!interval) throw ConfigError(ConfigErrorKind::Invalid, "custom-polynomial needs flux.interval", line);
        const auto ab = numbers(*interval, "flux.interval");
        if (ab.size() != 2) throw ConfigError(ConfigErrorKind::Invalid, "flux.interval needs two numbers", interval->line);
        std::optional<double> crit;
        if (const Entry* c = find(raw.keys, "flux.rho_crit")) crit = number(*c, "flux.rho_crit");
        return Flux::polynomial(params, ab[0], ab[1], crit);
      }
      case FluxFamily::Tabulated: {
        const Entry* nodes = find(raw.keys, "flux.nodes");
        const Entry* values = find(raw.keys, "flux.values");
        if (!nodes || !values) throw ConfigError(ConfigErrorKind::Invalid, "tabulated flux needs flux.nodes and flux.values", line);
        return Flux::tabulated(numbers(*nodes, "flux.nodes"), numbers(*values, "flux.values"));
      }
    }
  } catch (const DomainError& e) {
    throw ConfigError(ConfigErrorKind::Range, e.what(), line);
  }
  throw ConfigError(ConfigErrorKind::Invalid, "unsupported flux family", line);
}

RoadConfig build_road(const RawRoad& raw) {
  reject_unknown(raw.keys,
                 {"direction", "flux.family", "flux.params", "flux.interval", "flux.rho_crit", "flux.nodes", "flux.values",
                  "length", "cells", "initial.values", "initial.breakpoints", "initial.preset", "bc_value"},
                 "road section");
  RoadConfig road;
  road.name = raw.name;
  road.line = raw.line;
  const Entry* dir = find(raw.keys, "direction");
  if (!dir) throw ConfigError(ConfigErrorKind::Invalid, "road '" + raw.name + "' needs a direction", raw.line);
  const auto d = trim(dir->value);
  if (d == "in" || d == "incoming") {
    road.incoming = true;
  } else if (d == "out" || d == "outgoing") {
    road.incoming = false;
  } else {
    throw ConfigError(ConfigErrorKind::Topology, "direction must be 'in' or 'out'", dir->line);
  }
  road.flux = build_flux(raw);

  if (const Entry* e = find(raw.keys, "length")) {
    road.length = number(*e, "length");
    if (!(road.length > 0.0)) throw ConfigError(ConfigErrorKind::Range, "length must be positive", e->line);
  }
  if (const Entry* e = find(raw.keys, "cells")) {
    road.cells = integer(*e, "cells");
    if (*road.cells < 1) throw ConfigError(ConfigErrorKind::Range, "cells must be at least 1", e->line);
  }

  const Flux& f = road.flux;
  auto in_range = [&](double v, int line, std::string_view what) {
    if (!(v >= f.rho_min() && v <= f.rho_max())) {
      std::ostringstream os;
      os << what << " " << v << " outside [" << f.rho_min() << ", " << f.rho_max() << "]";
      throw ConfigError(ConfigErrorKind::Range, os.str(), line);
    }
  };
  const Entry* preset = find(raw.keys, "initial.preset");
  const Entry* values = find(raw.keys, "initial.values");
  const Entry* breaks = find(raw.keys, "initial.breakpoints");
  if (preset && (values || breaks)) {
    throw ConfigError(ConfigErrorKind::Invalid, "initial.preset cannot be combined with a table", preset->line);
  }
  if (preset) {
    const auto name = trim(preset->value);
    double v;
    if (name == "empty") {
      v = f.rho_min();
    } else if (name == "jam") {
      v = f.rho_max();
    } else if (name == "critical") {
      v = f.rho_crit();
    } else {
      throw ConfigError(ConfigErrorKind::Invalid, "unknown preset '" + std::string(name) + "'", preset->line);
    }
    road.initial = {{}, {v}};
  } else if (values) {
    road.initial.values = numbers(*values, "initial.values");
    if (breaks) road.initial.breakpoints = numbers(*breaks, "initial.breakpoints");
    const int line = values->line;
    if (road.initial.values.size() != road.initial.breakpoints.size() + 1) {
      throw ConfigError(ConfigErrorKind::Invalid, "initial.values needs one more entry than initial.breakpoints", line);
    }
    if (!std::is_sorted(road.initial.breakpoints.begin(), road.initial.breakpoints.end())) {
      throw ConfigError(ConfigErrorKind::Invalid, "initial.breakpoints must increase", breaks->line);
    }
    for (double v : road.initial.values) in_range(v, line, "initial value");
  } else if (breaks) {
    throw ConfigError(ConfigErrorKind::Invalid, "initial.breakpoints without initial.values", breaks->line);
  } else {
    road.initial = {{}, {f.rho_min()}};
  }
  if (const Entry* e = find(raw.keys, "bc_value")) {
    road.bc_value = number(*e, "bc_value");
    in_range(*road.bc_value, e->line, "bc_value");
  }
  return road;
}

}  // namespace

std::optional<double> parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

ConfigDocument parse_config(std::string_view text) {
  Section mesh;
  Section run;
  Section viscous;
  bool has_viscous = false;
  std::vector<RawRoad> raw_roads;
  Section* current = nullptr;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(ConfigErrorKind::Syntax, "unterminated section header", line_no);
      const auto inner = trim(line.substr(1, line.size() - 2));
      const auto space = inner.find_first_of(" \t");
      const auto kind = inner.substr(0, space);
      const auto name = space == std::string_view::npos ? std::string_view{} : trim(inner.substr(space));
      if (kind == "road") {
        RawRoad road;
        road.name = name.empty() ? "road" + std::to_string(raw_roads.size() + 1) : std::string(name);
        road.line = line_no;
        for (const auto& other : raw_roads) {
          if (other.name == road.name) throw ConfigError(ConfigErrorKind::Invalid, "duplicate road '" + road.name + "'", line_no);
        }
        raw_roads.push_back(std::move(road));
        current = &raw_roads.back().keys;
      } else if (!name.empty()) {
        throw ConfigError(ConfigErrorKind::Syntax, "only road sections take a name", line_no);
      } else if (kind == "mesh") {
        current = &mesh;
      } else if (kind == "run") {
        current = &run;
      } else if (kind == "viscous") {
        current = &viscous;
        has_viscous = true;
      } else {
        throw ConfigError(ConfigErrorKind::UnknownKey, "unknown section [" + std::string(kind) + "]", line_no);
      }
    } else {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) throw ConfigError(ConfigErrorKind::Syntax, "expected 'key = value'", line_no);
      const auto key = trim(line.substr(0, eq));
      const auto value = trim(line.substr(eq + 1));
      if (key.empty() || value.empty()) throw ConfigError(ConfigErrorKind::Syntax, "empty key or value", line_no);
      if (!current) throw ConfigError(ConfigErrorKind::Syntax, "assignment outside any section", line_no);
      if (!current->emplace(std::string(key), Entry{std::string(value), line_no}).second) {
        throw ConfigError(ConfigErrorKind::Invalid, "duplicate key '" + std::string(key) + "'", line_no);
      }
    }
    if (end == text.size()) break;
  }

  ConfigDocument doc;
  reject_unknown(mesh, {"dx"}, "[mesh]");
  if (const Entry* e = find(mesh, "dx")) {
    doc.dx = number(*e, "dx");
    if (!(doc.dx > 0.0)) throw ConfigError(ConfigErrorKind::Range, "dx must be positive", e->line);
  }

  reject_unknown(run, {"cfl", "t_final", "snapshots", "outer_bc"}, "[run]");
  if (const Entry* e = find(run, "cfl")) {
    doc.cfl = number(*e, "cfl");
    if (!(doc.cfl > 0.0 && doc.cfl <= 1.0)) throw ConfigError(ConfigErrorKind::Range, "cfl must lie in (0, 1]", e->line);
  }
  if (const Entry* e = find(run, "t_final")) {
    doc.t_final = number(*e, "t_final");
    if (!(doc.t_final >= 0.0)) throw ConfigError(ConfigErrorKind::Range, "t_final must be non-negative", e->line);
  }
  if (const Entry* e = find(run, "snapshots")) {
    doc.snapshots = numbers(*e, "snapshots");
    for (double t : doc.snapshots) {
      if (!(t >= 0.0 && t <= doc.t_final)) throw ConfigError(ConfigErrorKind::Range, "snapshot outside [0, t_final]", e->line);
    }
  }
  bool dirichlet = false;
  if (const Entry* e = find(run, "outer_bc")) {
    const auto v = trim(e->value);
    if (v == "dirichlet") {
      dirichlet = true;
      doc.outer = OuterBcKind::Dirichlet;
    } else if (v != "absorbing") {
      throw ConfigError(ConfigErrorKind::Invalid, "outer_bc must be 'absorbing' or 'dirichlet'", e->line);
    }
  }

  if (has_viscous) {
    reject_unknown(viscous, {"epsilon", "window", "samples"}, "[viscous]");
    ViscousConfig v;
    if (const Entry* e = find(viscous, "epsilon")) {
      v.epsilon = number(*e, "epsilon");
      if (!(v.epsilon > 0.0)) throw ConfigError(ConfigErrorKind::Range, "epsilon must be positive", e->line);
    }
    if (const Entry* e = find(viscous, "window")) {
      v.window = number(*e, "window");
      if (!(v.window > 0.0)) throw ConfigError(ConfigErrorKind::Range, "window must be positive", e->line);
    }
    if (const Entry* e = find(viscous, "samples")) {
      v.samples = integer(*e, "samples");
      if (v.samples < 4) throw ConfigError(ConfigErrorKind::Range, "samples must be at least 4", e->line);
    }
    doc.viscous = v;
  }

  std::vector<RoadConfig> in;
  std::vector<RoadConfig> out;
  for (const auto& raw : raw_roads) {
    auto road = build_road(raw);
    if (dirichlet && !road.bc_value) {
      throw ConfigError(ConfigErrorKind::Invalid, "dirichlet outer_bc needs bc_value on road '" + road.name + "'", raw.line);
    }
    const int cells = road.cells ? *road.cells : static_cast<int>(std::lround(road.length / doc.dx));
    if (cells < 1) throw ConfigError(ConfigErrorKind::Range, "road '" + road.name + "' is shorter than one cell", raw.line);
    (road.incoming ? in : out).push_back(std::move(road));
  }
  if (in.empty() || out.empty()) {
    throw ConfigError(ConfigErrorKind::Topology, "the junction needs at least one incoming and one outgoing road",
                      line_no);
  }
  doc.roads = std::move(in);
  doc.roads.insert(doc.roads.end(), std::make_move_iterator(out.begin()), std::make_move_iterator(out.end()));
  const Flux& first = doc.roads.front().flux;
  for (const auto& road : doc.roads) {
    const double tol = 1e-12 * (first.rho_max() - first.rho_min());
    if (std::abs(road.flux.rho_min() - first.rho_min()) > tol || std::abs(road.flux.rho_max() - first.rho_max()) > tol) {
      throw ConfigError(ConfigErrorKind::Range, "road '" + road.name + "' does not share the common density interval",
                        road.line);
    }
  }
  return doc;
}

ConfigDocument load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(ConfigErrorKind::Invalid, "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

int ConfigDocument::incoming() const {
  return static_cast<int>(std::count_if(roads.begin(), roads.end(), [](const RoadConfig& r) { return r.incoming; }));
}

int ConfigDocument::outgoing() const { return static_cast<int>(roads.size()) - incoming(); }

JunctionSpec ConfigDocument::spec() const {
  std::vector<Flux> fluxes;
  for (const auto& r : roads) fluxes.push_back(r.flux);
  return JunctionSpec(incoming(), outgoing(), fluxes);
}

NetworkMesh ConfigDocument::mesh(std::optional<double> dx_override) const {
  const double h = dx_override.value_or(dx);
  if (!(h > 0.0)) throw ConfigError(ConfigErrorKind::Range, "dx must be positive");
  std::vector<int> cells;
  for (const auto& r : roads) {
    const int n = dx_override || !r.cells ? static_cast<int>(std::lround((r.cells ? *r.cells * dx : r.length) / h))
                                          : *r.cells;
    if (n < 1) throw ConfigError(ConfigErrorKind::Range, "road '" + r.name + "' is shorter than one cell");
    cells.push_back(n);
  }
  return NetworkMesh(spec(), h, cells);
}

std::vector<RoadData> ConfigDocument::initial_data() const {
  std::vector<RoadData> data;
  for (const auto& r : roads) data.emplace_back(r.initial);
  return data;
}

State ConfigDocument::junction_datum() const {
  State u(static_cast<Eigen::Index>(roads.size()));
  for (std::size_t h = 0; h < roads.size(); ++h) {
    const auto& v = roads[h].initial.values;
    u[static_cast<Eigen::Index>(h)] = roads[h].incoming ? v.back() : v.front();
  }
  return u;
}

OuterBc ConfigDocument::outer_bc() const {
  OuterBc bc;
  bc.kind = outer;
  if (outer == OuterBcKind::Dirichlet) {
    for (const auto& r : roads) bc.values.push_back(*r.bc_value);
  }
  return bc;
}

RunConfig ConfigDocument::run_config(std::optional<double> dx_override, std::optional<double> t_final_override) const {
  RunConfig config{mesh(dx_override)};
  config.cfl = cfl;
  config.t_final = t_final_override.value_or(t_final);
  if (!(config.t_final >= 0.0)) throw ConfigError(ConfigErrorKind::Range, "t_final must be non-negative");
  config.outer = outer_bc();
  for (double t : snapshots) {
    if (t <= config.t_final) config.snapshot_times.push_back(t);
  }
  return config;
}

}  // namespace jfv
