#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "emdq/geometry.hpp"

namespace emdq {

/// A balanced transportation instance: supplies at `sources`, demands at
/// `sinks`, ground cost = Euclidean distance. The reference mass is the scale
/// against which balance and feasibility tolerances are measured; it defaults
/// to max(total supply, total demand, 1) and is overridden by callers whose
/// instance is a reduction of a heavier one.
class TransportInstance {
 public:
  TransportInstance(WeightedPointSet sources, WeightedPointSet sinks,
                    double reference_mass = 0.0, const Tolerances& tol = {});

  const WeightedPointSet& sources() const noexcept { return sources_; }
  const WeightedPointSet& sinks() const noexcept { return sinks_; }
  double reference_mass() const noexcept { return reference_mass_; }

  /// Materializes the dense cost matrix (row-major, sources x sinks).
  /// Refuses instances beyond the entry cap.
  std::vector<double> cost_matrix() const;
  double max_distance() const;

  static constexpr std::size_t kCostMatrixCap = 50'000'000;

 private:
  WeightedPointSet sources_;
  WeightedPointSet sinks_;
  double reference_mass_;
};

struct Flow {
  std::uint32_t source;
  std::uint32_t sink;
  double amount;
};

/// A feasible flow and its cost. `normalized` records whether `cost` has
/// already been divided by the total mass W (solvers always return it false).
struct TransportPlan {
  std::vector<Flow> flows;
  double cost = 0.0;
  bool normalized = false;
};

struct ExactSolverOptions {
  // 0 = choose automatically from the instance size.
  std::size_t max_pivots = 0;
};

/// Exact minimum-cost transportation via primal network simplex on the dense
/// bipartite graph. The returned plan is optimal and passes validate_plan.
TransportPlan solve_exact(const TransportInstance& inst,
                          const ExactSolverOptions& opts = {},
                          const Tolerances& tol = {});

struct SinkhornOptions {
  // Entropic regularization strength; 0 selects 0.02 * max pairwise distance.
  double eta = 0.0;
  int max_iter = 10'000;
  // Stop when the L1 marginal violation drops below tol * W.
  double tolerance = 1e-6;
};

struct SinkhornDiagnostics {
  bool converged = false;
  int iterations = 0;
  double marginal_violation = 0.0;
  double eta = 0.0;
};

/// Log-domain Sinkhorn iterations followed by rounding to exact feasibility,
/// so the returned cost is a valid upper bound on the optimum.
/// Non-convergence is reported through `diagnostics`, not as an error.
TransportPlan solve_sinkhorn(const TransportInstance& inst,
                             const SinkhornOptions& opts = {},
                             SinkhornDiagnostics* diagnostics = nullptr,
                             const Tolerances& tol = {});

/// Exhaustive minimum over integral feasible flows. Requires nonnegative
/// integer weights with total mass at most 12; exact by integrality of the
/// transportation polytope.
double brute_force_oracle(const TransportInstance& inst);

struct ValidationReport {
  bool ok = false;
  double max_source_violation = 0.0;
  double max_sink_violation = 0.0;
  double cost_discrepancy = 0.0;
  std::size_t negative_flow_count = 0;
  std::string message;
};

/// Checks plan feasibility (marginals, nonnegativity) and that the stored
/// cost matches a recomputation from the flows.
ValidationReport validate_plan(const TransportInstance& inst,
                               const TransportPlan& plan,
                               const Tolerances& tol = {});

/// For an instance whose j-th source and j-th sink share coordinates:
/// verifies that the optimal cost equals the optimal cost of the reduced
/// instance obtained by cancelling min(supply_j, demand_j) at every
/// co-located pair. Throws InputError when the input is not co-located.
bool diagonal_flow_property_check(const TransportInstance& inst,
                                  const Tolerances& tol = {});

}  // namespace emdq
