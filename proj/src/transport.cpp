#include "emdq/transport.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "network_simplex.hpp"

namespace emdq {

namespace {

double effective_reference(double requested, double wa, double wb) {
  if (requested > 0.0) return requested;
  return std::max({wa, wb, 1.0});
}

// Indices of points carrying positive weight; zero-weight points are inert
// in any feasible flow.
std::vector<std::uint32_t> positive_indices(const WeightedPointSet& s) {
  std::vector<std::uint32_t> idx;
  idx.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.weight(i) > 0.0) idx.push_back(static_cast<std::uint32_t>(i));
  }
  return idx;
}

}  // namespace

TransportInstance::TransportInstance(WeightedPointSet sources,
                                     WeightedPointSet sinks,
                                     double reference_mass,
                                     const Tolerances& tol)
    : sources_(std::move(sources)), sinks_(std::move(sinks)) {
  if (sources_.dim() != sinks_.dim()) {
    throw InputError("TransportInstance: dimension mismatch");
  }
  reference_mass_ = effective_reference(reference_mass,
                                        sources_.total_weight(),
                                        sinks_.total_weight());
  const double imbalance =
      std::abs(sources_.total_weight() - sinks_.total_weight());
  if (imbalance > tol.balance_rel * std::max(reference_mass_, 1.0)) {
    throw BalanceError("TransportInstance: supply " +
                       std::to_string(sources_.total_weight()) +
                       " != demand " + std::to_string(sinks_.total_weight()));
  }
}

std::vector<double> TransportInstance::cost_matrix() const {
  const std::size_t na = sources_.size();
  const std::size_t nb = sinks_.size();
  if (na > kCostMatrixCap / nb) {
    throw SolverError("cost matrix would exceed " +
                      std::to_string(kCostMatrixCap) + " entries (" +
                      std::to_string(na) + " x " + std::to_string(nb) + ")");
  }
  std::vector<double> cost(na * nb);
  for (std::size_t i = 0; i < na; ++i) {
    const auto p = sources_.point(i);
    for (std::size_t j = 0; j < nb; ++j) {
      const double d = distance(p, sinks_.point(j));
      if (!std::isfinite(d)) {
        throw InputError("cost matrix: non-finite distance");
      }
      cost[i * nb + j] = d;
    }
  }
  return cost;
}

double TransportInstance::max_distance() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < sources_.size(); ++i) {
    const auto p = sources_.point(i);
    for (std::size_t j = 0; j < sinks_.size(); ++j) {
      worst = std::max(worst, distance(p, sinks_.point(j)));
    }
  }
  return worst;
}

TransportPlan solve_exact(const TransportInstance& inst,
                          const ExactSolverOptions& opts,
                          const Tolerances& tol) {
  const WeightedPointSet& A = inst.sources();
  const WeightedPointSet& B = inst.sinks();
  const std::vector<std::uint32_t> ia = positive_indices(A);
  const std::vector<std::uint32_t> ib = positive_indices(B);
  if (ia.empty() && ib.empty()) {
    return TransportPlan{};  // no mass to move
  }
  if (ia.empty() || ib.empty()) {
    throw BalanceError("solve_exact: one side has no positive weight");
  }

  const std::size_t na = ia.size();
  const std::size_t nb = ib.size();
  if (na > TransportInstance::kCostMatrixCap / nb) {
    throw SolverError("solve_exact: instance too large to materialize");
  }
  std::vector<double> cost(na * nb);
  std::vector<double> supply(na), demand(nb);
  for (std::size_t i = 0; i < na; ++i) supply[i] = A.weight(ia[i]);
  for (std::size_t j = 0; j < nb; ++j) demand[j] = B.weight(ib[j]);
  for (std::size_t i = 0; i < na; ++i) {
    const auto p = A.point(ia[i]);
    for (std::size_t j = 0; j < nb; ++j) {
      const double d = distance(p, B.point(ib[j]));
      if (!std::isfinite(d)) throw InputError("solve_exact: non-finite distance");
      cost[i * nb + j] = d;
    }
  }

  detail::TransportationSimplex simplex(na, nb, cost.data(), supply, demand);
  std::size_t max_pivots = opts.max_pivots;
  if (max_pivots == 0) {
    const std::size_t nodes = na + nb + 1;
    max_pivots = 1'000'000 + 200 * nodes * std::bit_width(nodes);
  }
  simplex.run(max_pivots);

  const double residual = simplex.max_artificial_flow();
  if (residual > tol.marginal_rel * std::max(inst.reference_mass(), 1.0)) {
    throw SolverError("solve_exact: unmatched mass " + std::to_string(residual));
  }

  TransportPlan plan;
  plan.cost = simplex.objective();
  plan.normalized = false;
  simplex.for_each_flow([&](std::uint32_t i, std::uint32_t j, double f) {
    plan.flows.push_back(Flow{ia[i], ib[j], f});
  });
  return plan;
}

double brute_force_oracle(const TransportInstance& inst) {
  const WeightedPointSet& A = inst.sources();
  const WeightedPointSet& B = inst.sinks();
  const std::size_t na = A.size();
  const std::size_t nb = B.size();

  std::vector<long long> supply(na), demand(nb);
  long long total_a = 0, total_b = 0;
  for (std::size_t i = 0; i < na; ++i) {
    const double w = A.weight(i);
    const long long r = std::llround(w);
    if (std::abs(w - static_cast<double>(r)) > 1e-9 || r < 0) {
      throw InputError("brute_force_oracle: weights must be nonnegative integers");
    }
    supply[i] = r;
    total_a += r;
  }
  for (std::size_t j = 0; j < nb; ++j) {
    const double w = B.weight(j);
    const long long r = std::llround(w);
    if (std::abs(w - static_cast<double>(r)) > 1e-9 || r < 0) {
      throw InputError("brute_force_oracle: weights must be nonnegative integers");
    }
    demand[j] = r;
    total_b += r;
  }
  if (total_a != total_b) {
    throw InputError("brute_force_oracle: integer totals differ");
  }
  if (total_a > 12) {
    throw InputError("brute_force_oracle: total mass must be <= 12");
  }

  std::vector<double> cost(na * nb);
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      cost[i * nb + j] = distance(A.point(i), B.point(j));
    }
  }

  double best = std::numeric_limits<double>::infinity();
  std::vector<long long> col_left = demand;

  // Enumerates integral flow matrices cell by cell; the remaining-capacity
  // lower bound and the running-cost prune keep the tree tiny at mass <= 12.
  auto recurse = [&](auto&& self, std::size_t i, std::size_t j,
                     long long row_left, double partial) -> void {
    if (partial >= best) return;
    if (i == na) {
      best = partial;
      return;
    }
    if (j == nb) {
      if (row_left != 0) return;
      self(self, i + 1, 0, i + 1 < na ? supply[i + 1] : 0, partial);
      return;
    }
    long long cols_after = 0;
    for (std::size_t l = j + 1; l < nb; ++l) cols_after += col_left[l];
    const long long hi = std::min(row_left, col_left[j]);
    const long long lo = std::max<long long>(0, row_left - cols_after);
    for (long long f = lo; f <= hi; ++f) {
      col_left[j] -= f;
      self(self, i, j + 1, row_left - f,
           partial + static_cast<double>(f) * cost[i * nb + j]);
      col_left[j] += f;
    }
  };

  recurse(recurse, 0, 0, supply[0], 0.0);
  if (!std::isfinite(best)) {
    throw SolverError("brute_force_oracle: no feasible flow found");
  }
  return best;
}

ValidationReport validate_plan(const TransportInstance& inst,
                               const TransportPlan& plan,
                               const Tolerances& tol) {
  const WeightedPointSet& A = inst.sources();
  const WeightedPointSet& B = inst.sinks();
  ValidationReport report;

  std::vector<NeumaierSum> row_sums(A.size()), col_sums(B.size());
  NeumaierSum recomputed;
  for (const Flow& f : plan.flows) {
    if (f.source >= A.size() || f.sink >= B.size()) {
      report.message = "flow references out-of-range point";
      return report;
    }
    if (f.amount < 0.0) ++report.negative_flow_count;
    row_sums[f.source].add(f.amount);
    col_sums[f.sink].add(f.amount);
    recomputed.add(f.amount * distance(A.point(f.source), B.point(f.sink)));
  }

  for (std::size_t i = 0; i < A.size(); ++i) {
    report.max_source_violation = std::max(
        report.max_source_violation, std::abs(row_sums[i].value() - A.weight(i)));
  }
  for (std::size_t j = 0; j < B.size(); ++j) {
    report.max_sink_violation = std::max(
        report.max_sink_violation, std::abs(col_sums[j].value() - B.weight(j)));
  }
  const double rec = recomputed.value();
  report.cost_discrepancy = std::abs(rec - plan.cost);

  const double marginal_slack =
      tol.marginal_rel * std::max(inst.reference_mass(), 1.0);
  const double cost_slack = tol.cost_rel * std::max({std::abs(rec), std::abs(plan.cost), 1.0});
  report.ok = report.negative_flow_count == 0 &&
              report.max_source_violation <= marginal_slack &&
              report.max_sink_violation <= marginal_slack &&
              report.cost_discrepancy <= cost_slack;
  if (!report.ok && report.message.empty()) {
    report.message = report.negative_flow_count > 0 ? "negative flow"
                     : report.cost_discrepancy > cost_slack
                         ? "stored cost does not match flows"
                         : "marginal violation beyond tolerance";
  }
  return report;
}

bool diagonal_flow_property_check(const TransportInstance& inst,
                                  const Tolerances& tol) {
  const WeightedPointSet& A = inst.sources();
  const WeightedPointSet& B = inst.sinks();
  if (A.size() != B.size()) {
    throw InputError("diagonal_flow_property_check: sides differ in size");
  }
  for (std::size_t j = 0; j < A.size(); ++j) {
    if (distance(A.point(j), B.point(j)) != 0.0) {
      throw InputError("diagonal_flow_property_check: pair " +
                       std::to_string(j) + " is not co-located");
    }
  }

  const double full_cost = solve_exact(inst).cost;

  // Cancel min(supply, demand) at every co-located pair; what remains is the
  // surplus instance.
  std::vector<double> a_coords, b_coords, a_weights, b_weights;
  const std::size_t d = A.dim();
  for (std::size_t j = 0; j < A.size(); ++j) {
    const double s = A.weight(j) - B.weight(j);
    if (s > 0.0) {
      a_coords.insert(a_coords.end(), A.point(j).begin(), A.point(j).end());
      a_weights.push_back(s);
    } else if (s < 0.0) {
      b_coords.insert(b_coords.end(), B.point(j).begin(), B.point(j).end());
      b_weights.push_back(-s);
    }
  }

  double reduced_cost = 0.0;
  if (!a_weights.empty() && !b_weights.empty()) {
    TransportInstance reduced(
        WeightedPointSet(std::move(a_coords), d, std::move(a_weights)),
        WeightedPointSet(std::move(b_coords), d, std::move(b_weights)),
        inst.reference_mass(), tol);
    reduced_cost = solve_exact(reduced).cost;
  }

  const double slack = tol.solver_cost_rel *
                       std::max(inst.reference_mass(), 1.0) *
                       std::max(inst.max_distance(), 1.0);
  return std::abs(full_cost - reduced_cost) <= slack;
}

}  // namespace emdq
