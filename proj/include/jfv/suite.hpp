#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "jfv/junction.hpp"
#include "jfv/scheme.hpp"

namespace jfv {

/// The three reference networks used by the ensemble checks.
struct Topology {
  std::string name;
  JunctionSpec spec;
};

/// 1-1 (two quadratic LWR roads), 2-1 (-h rho^2 + h, h = 1, 2, 3 on [-1, 1]) and
/// 2-3 (LWR, cubic and tabulated roads on [0, 1]).
std::vector<Topology> reference_topologies();

/// 2-in/1-out junction with f_h = -h rho^2 + h, and its textbook datum.
JunctionSpec worked_example_spec();
State worked_example_datum();

/// Per-road piecewise-constant data that share a background constant beyond
/// |x| = core and differ only inside it. With `ordered`, first <= second.
struct DataPair {
  std::vector<RoadData> first;
  std::vector<RoadData> second;
};
DataPair random_data_pair(const JunctionSpec& spec, double core, bool ordered, std::mt19937_64& rng);

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct SuiteContext {
  std::uint64_t seed = 20241015;
  /// Largest mass defect seen by the runs of criteria 3-5.
  double max_mass_defect = 0.0;
  int ledger_runs = 0;
};

CriterionResult check_worked_example(SuiteContext& ctx);
CriterionResult check_godunov_oracle(SuiteContext& ctx);
CriterionResult check_well_balanced(SuiteContext& ctx);
CriterionResult check_l1_contraction(SuiteContext& ctx);
CriterionResult check_kato(SuiteContext& ctx);
CriterionResult check_dissipativity(SuiteContext& ctx);
CriterionResult check_order_preservation(SuiteContext& ctx);
CriterionResult check_convergence(SuiteContext& ctx);
CriterionResult check_viscous_profiles(SuiteContext& ctx);
CriterionResult check_epsilon_sweep(SuiteContext& ctx);
/// Reads the defects gathered by criteria 3-5; run those first.
CriterionResult check_mass_ledger(SuiteContext& ctx);

/// All eleven criteria in order.
std::vector<CriterionResult> run_acceptance_suite(SuiteContext& ctx);

}  // namespace jfv
