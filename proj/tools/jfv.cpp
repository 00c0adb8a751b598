// jfv: command-line driver for the junction finite volume library.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "jfv/config.hpp"
#include "jfv/csv.hpp"
#include "jfv/errors.hpp"
#include "jfv/junction.hpp"
#include "jfv/riemann.hpp"
#include "jfv/scheme.hpp"
#include "jfv/suite.hpp"
#include "jfv/verify.hpp"
#include "jfv/viscous.hpp"

namespace {

using namespace jfv;

enum ExitCode : int {
  kOk = 0,
  kAssertion = 1,
  kConfig = 2,
  kConsistency = 3,
  kUnknownKey = 4,
  kRange = 5,
  kTopology = 6,
};

struct Options {
  std::string config;
  std::string out;
  std::uint64_t seed = 20241015;
  std::optional<double> dx;
  std::optional<double> t_final;
  std::optional<double> epsilon;
  double tol = kDefaultMembershipTol;
  std::vector<std::string> candidates;
  int samples = 0;
};

void add_common(CLI::App* cmd, Options& o, bool needs_config) {
  auto* c = cmd->add_option("--config", o.config, "configuration file");
  if (needs_config) c->required();
  cmd->add_option("--out", o.out, "output directory");
}

ConfigDocument load(const Options& o) { return load_config(o.config); }

// Output goes to DIR/name when --out is set, to stdout otherwise.
class Sink {
 public:
  Sink(const Options& o, const std::string& name) {
    if (o.out.empty()) return;
    std::filesystem::create_directories(o.out);
    path_ = (std::filesystem::path(o.out) / name).string();
    file_.open(path_, std::ios::binary);
    if (!file_) throw ConfigError(ConfigErrorKind::Invalid, "cannot write '" + path_ + "'");
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::string path_;
  std::ofstream file_;
};

State parse_candidate(const std::string& text, int roads) {
  std::vector<double> v;
  std::string token;
  std::istringstream in(text);
  std::string piece;
  while (std::getline(in, piece, ',')) {
    std::istringstream words(piece);
    while (words >> token) {
      const auto x = parse_double(token);
      if (!x) throw ConfigError(ConfigErrorKind::Syntax, "bad number '" + token + "' in --candidate");
      v.push_back(*x);
    }
  }
  if (static_cast<int>(v.size()) != roads) {
    throw ConfigError(ConfigErrorKind::Topology,
                      "--candidate has " + std::to_string(v.size()) + " entries, the network has " +
                          std::to_string(roads) + " roads");
  }
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<std::string> road_header(const std::string& prefix, int roads) {
  std::vector<std::string> h;
  for (int r = 1; r <= roads; ++r) h.push_back(prefix + std::to_string(r));
  return h;
}

int cmd_run(const Options& o) {
  const auto doc = load(o);
  const auto config = doc.run_config(o.dx, o.t_final);
  const auto initial = discretize_initial(config.mesh, doc.initial_data());
  const auto traj = run(config, initial);
  const int roads = config.mesh.roads();

  Options dir = o;
  if (dir.out.empty()) dir.out = ".";
  {
    Sink sink(dir, "snapshots.csv");
    CsvWriter csv(sink.stream(), {"t", "road", "x", "rho"});
    for (const auto& snap : traj.snapshots) {
      for (int h = 0; h < roads; ++h) {
        for (int c = 0; c < config.mesh.cells(h); ++c) {
          csv.row({snap.time, static_cast<long long>(h + 1), config.mesh.cell_center(h, c),
                   snap.values[static_cast<std::size_t>(h)][c]});
        }
      }
    }
  }
  {
    Sink sink(dir, "junction.csv");
    std::vector<std::string> header{"t", "p_min", "p_max"};
    for (auto& g : road_header("G*_", roads)) header.push_back(g);
    header.push_back("F*");
    CsvWriter csv(sink.stream(), header);
    for (const auto& e : traj.junction_log) {
      std::vector<CsvWriter::Field> row{e.t, e.p_min, e.p_max};
      for (int h = 0; h < roads; ++h) row.emplace_back(e.fluxes[h]);
      row.emplace_back(e.total);
      csv.row(row);
    }
  }
  const auto ledger = mass_ledger(traj);
  std::cout << "steps " << traj.steps.size() << ", snapshots " << traj.snapshots.size() << ", mass defect "
            << format_double(ledger.max_defect) << "\n";
  return kOk;
}

int cmd_riemann(const Options& o) {
  const auto doc = load(o);
  const auto spec = doc.spec();
  const State u0 = o.candidates.empty() ? doc.junction_datum() : parse_candidate(o.candidates.front(), spec.roads());
  const auto sol = riemann_solve(spec, u0);

  std::cout << "p interval [" << format_double(sol.junction.p_min) << ", " << format_double(sol.junction.p_max)
            << "], p = " << format_double(sol.junction.p) << "\n";
  std::cout << "fluxes";
  for (int h = 0; h < spec.roads(); ++h) std::cout << ' ' << format_double(sol.junction.fluxes[h]);
  std::cout << "\ntotal " << format_double(sol.junction.total) << "\n";

  Sink sink(o, "riemann.csv");
  CsvWriter csv(sink.stream(), {"road", "direction", "datum", "trace", "flux", "min_speed", "max_speed"});
  for (int h = 0; h < spec.roads(); ++h) {
    const auto& fan = sol.fans[static_cast<std::size_t>(h)];
    csv.row({static_cast<long long>(h + 1), std::string(spec.is_incoming(h) ? "in" : "out"), u0[h], sol.traces[h],
             sol.junction.fluxes[h], fan.min_speed(), fan.max_speed()});
  }
  return kOk;
}

int cmd_germ_check(const Options& o) {
  const auto doc = load(o);
  const auto spec = doc.spec();
  std::vector<State> candidates;
  for (const auto& c : o.candidates) candidates.push_back(parse_candidate(c, spec.roads()));
  if (o.samples > 0) {
    for (auto& k : germ_sampler(spec, o.samples, o.seed)) candidates.push_back(std::move(k));
  }
  if (candidates.empty()) candidates.push_back(doc.junction_datum());

  Sink sink(o, "germ.csv");
  std::vector<std::string> header{"candidate"};
  for (auto& k : road_header("k_", spec.roads())) header.push_back(k);
  for (const char* c : {"godunov", "oleinik", "strict", "witness_p"}) header.emplace_back(c);
  CsvWriter csv(sink.stream(), header);

  int disagreements = 0;
  for (std::size_t n = 0; n < candidates.size(); ++n) {
    const State& k = candidates[n];
    spec.check_state(k);
    const bool godunov_path = is_germ_member(spec, k, o.tol);
    const bool oleinik_path = is_germ_member_oleinik(spec, k, o.tol);
    const auto witness = strict_germ_witness(spec, k, o.tol);
    if (godunov_path != oleinik_path) ++disagreements;
    std::vector<CsvWriter::Field> row{static_cast<long long>(n + 1)};
    for (int h = 0; h < spec.roads(); ++h) row.emplace_back(k[h]);
    row.emplace_back(static_cast<long long>(godunov_path));
    row.emplace_back(static_cast<long long>(oleinik_path));
    row.emplace_back(static_cast<long long>(witness.has_value()));
    row.emplace_back(witness ? *witness : std::nan(""));
    csv.row(row);
  }
  if (disagreements > 0) {
    std::cerr << "membership paths disagree on " << disagreements << " candidate(s)\n";
    return kAssertion;
  }
  return kOk;
}

int cmd_profile(const Options& o) {
  const auto doc = load(o);
  const auto spec = doc.spec();
  const ViscousConfig v = doc.viscous.value_or(ViscousConfig{});
  const double eps = o.epsilon.value_or(v.epsilon);
  if (!(eps > 0.0)) throw ConfigError(ConfigErrorKind::Range, "epsilon must be positive");
  const State k = o.candidates.empty() ? doc.junction_datum() : parse_candidate(o.candidates.front(), spec.roads());
  const auto profile = stationary_profile(spec, k, eps, v.window, v.samples);

  Sink sink(o, "profile.csv");
  CsvWriter csv(sink.stream(), {"road", "x", "rho"});
  for (int h = 0; h < spec.roads(); ++h) {
    const auto& x = profile.x[static_cast<std::size_t>(h)];
    const auto& rho = profile.rho[static_cast<std::size_t>(h)];
    for (Eigen::Index i = 0; i < x.size(); ++i) csv.row({static_cast<long long>(h + 1), x[i] + 0.0, rho[i]});
  }
  const double residual = profile_residual(spec, profile);
  const bool monotone = profile_monotone(profile);
  std::cerr << "p = " << format_double(profile.p) << ", residual " << format_double(residual)
            << (monotone ? ", monotone" : ", NOT monotone") << "\n";
  return monotone ? kOk : kAssertion;
}

int cmd_verify(const Options& o) {
  SuiteContext ctx;
  ctx.seed = o.seed;
  std::vector<CriterionResult> results;
  std::vector<double> seconds;
  using Check = CriterionResult (*)(SuiteContext&);
  const Check checks[] = {check_worked_example, check_godunov_oracle,     check_well_balanced, check_l1_contraction,
                          check_kato,           check_dissipativity,      check_order_preservation,
                          check_convergence,    check_viscous_profiles,   check_epsilon_sweep, check_mass_ledger};
  for (Check check : checks) {
    const auto start = std::chrono::steady_clock::now();
    results.push_back(check(ctx));
    seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }

  // Timings go to stderr so the table stays reproducible.
  // Optional audit of the configured run: conservation and the invariant range.
  if (!o.config.empty()) {
    const auto doc = load(o);
    const auto config = doc.run_config(o.dx, o.t_final);
    const auto traj = run(config, discretize_initial(config.mesh, doc.initial_data()));
    const auto ledger = mass_ledger(traj);
    results.push_back({12, "configured run: conservation ledger", ledger.max_defect <= 1e-12, ledger.max_defect, 1e-12,
                       o.config});
    const auto& spec = config.mesh.spec();
    double excess = 0.0;
    for (const auto& s : traj.snapshots) {
      for (const auto& v : s.values) {
        excess = std::max({excess, spec.rho_min() - v.minCoeff(), v.maxCoeff() - spec.rho_max()});
      }
    }
    results.push_back({13, "configured run: maximum principle", excess <= 1e-14, excess, 1e-14, o.config});
    seconds.push_back(0.0);
    seconds.push_back(0.0);
  }

  Sink sink(o, "verify.csv");
  CsvWriter csv(sink.stream(), {"criterion", "name", "pass", "measured", "threshold"});
  int failed = 0;
  for (std::size_t n = 0; n < results.size(); ++n) {
    const auto& r = results[n];
    csv.row({static_cast<long long>(r.id), r.name, std::string(r.pass ? "PASS" : "FAIL"), r.measured, r.threshold});
    std::cerr << "criterion " << r.id << ": " << (r.pass ? "PASS" : "FAIL") << " in " << seconds[n] << " s\n";
    if (!r.pass) {
      ++failed;
      std::cerr << "criterion " << r.id << " failed: " << r.detail << "\n";
    }
  }
  std::cerr << results.size() - static_cast<std::size_t>(failed) << " of " << results.size() << " passed\n";
  return failed == 0 ? kOk : kAssertion;
}

int cmd_convergence(const Options& o) {
  const auto doc = load(o);
  const auto spec = doc.spec();
  const double t_final = o.t_final.value_or(doc.t_final > 0.0 ? doc.t_final : 0.2);
  if (!(t_final > 0.0)) throw ConfigError(ConfigErrorKind::Range, "convergence needs a positive t_final");
  double length = doc.roads.front().length;
  for (const auto& r : doc.roads) length = std::min(length, r.length);
  auto problem = riemann_problem(spec, doc.junction_datum(), t_final, length);
  problem.cfl = doc.cfl;

  const double dx0 = o.dx.value_or(doc.dx);
  std::vector<double> dx_list;
  for (int k = 0; k < 4; ++k) dx_list.push_back(dx0 / std::pow(2.0, k));
  const auto report = convergence_study(problem, dx_list);

  Sink sink(o, "convergence.csv");
  CsvWriter csv(sink.stream(), {"dx", "error", "order"});
  for (const auto& row : report.rows) csv.row({row.dx, row.error, row.order});
  if (!report.monotone) {
    std::cerr << "L1 error does not decrease under refinement\n";
    return kAssertion;
  }
  return kOk;
}

int exit_code(const ConfigError& e) {
  switch (e.kind()) {
    case ConfigErrorKind::UnknownKey:
      return kUnknownKey;
    case ConfigErrorKind::Range:
      return kRange;
    case ConfigErrorKind::Topology:
      return kTopology;
    case ConfigErrorKind::Syntax:
    case ConfigErrorKind::Invalid:
      break;
  }
  return kConfig;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Godunov finite volume solver and germ toolkit for a star-shaped traffic junction"};
  app.require_subcommand(1);
  Options o;

  auto* run_cmd = app.add_subcommand("run", "simulate the configured network; writes snapshots.csv and junction.csv");
  add_common(run_cmd, o, true);
  run_cmd->add_option("--dx", o.dx, "override the mesh width")->check(CLI::PositiveNumber);
  run_cmd->add_option("--t-final", o.t_final, "override the final time")->check(CLI::NonNegativeNumber);

  auto* riemann_cmd = app.add_subcommand("riemann", "junction Riemann problem for the data next to the junction");
  add_common(riemann_cmd, o, true);
  riemann_cmd->add_option("--candidate", o.candidates, "datum u_1,...,u_{m+n} instead of the configured one");

  auto* germ_cmd = app.add_subcommand("germ-check", "germ membership by both paths, plus strict membership");
  add_common(germ_cmd, o, true);
  germ_cmd->add_option("--candidate", o.candidates, "state k_1,...,k_{m+n} (repeatable)");
  germ_cmd->add_option("--samples", o.samples, "also test this many sampled germ elements")->check(CLI::NonNegativeNumber);
  germ_cmd->add_option("--seed", o.seed, "sampler seed");
  germ_cmd->add_option("--tol", o.tol, "membership tolerance")->check(CLI::PositiveNumber);

  auto* profile_cmd = app.add_subcommand("profile", "stationary viscous profile of a strict germ element");
  add_common(profile_cmd, o, true);
  profile_cmd->add_option("--candidate", o.candidates, "state k_1,...,k_{m+n} instead of the configured datum");
  profile_cmd->add_option("--epsilon", o.epsilon, "viscosity")->check(CLI::PositiveNumber);

  auto* verify_cmd = app.add_subcommand("verify", "acceptance suite; with --config also audits that run");
  add_common(verify_cmd, o, false);
  verify_cmd->add_option("--seed", o.seed, "ensemble seed");
  verify_cmd->add_option("--dx", o.dx, "override the mesh width of the configured run")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--t-final", o.t_final, "override the final time of the configured run")
      ->check(CLI::NonNegativeNumber);

  auto* conv_cmd = app.add_subcommand("convergence", "L1 error of the configured Riemann datum under refinement");
  add_common(conv_cmd, o, true);
  conv_cmd->add_option("--dx", o.dx, "coarsest mesh width (halved three times)")->check(CLI::PositiveNumber);
  conv_cmd->add_option("--t-final", o.t_final, "comparison time")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run_cmd) return cmd_run(o);
    if (*riemann_cmd) return cmd_riemann(o);
    if (*germ_cmd) return cmd_germ_check(o);
    if (*profile_cmd) return cmd_profile(o);
    if (*verify_cmd) return cmd_verify(o);
    if (*conv_cmd) return cmd_convergence(o);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kConfig;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition violated: " << e.what() << "\n";
    return kConfig;
  } catch (const ConsistencyError& e) {
    std::cerr << "internal consistency error: " << e.what() << "\n";
    return kConsistency;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConsistency;
  }
  return kConfig;
}
