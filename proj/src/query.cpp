#include "emdq/query.hpp"

#include <chrono>
#include <cmath>

namespace emdq {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double solve_surplus(const SurplusInstance& surplus, const SolverConfig& solver,
                     const Tolerances& tol) {
  TransportInstance inst(
      WeightedPointSet(surplus.a_coords, surplus.dim, surplus.a_weights),
      WeightedPointSet(surplus.b_coords, surplus.dim, surplus.b_weights),
      surplus.total_weight, tol);
  if (solver.kind == SolverConfig::Kind::exact) {
    return solve_exact(inst, {}, tol).cost;
  }
  return solve_sinkhorn(inst, solver.sinkhorn, nullptr, tol).cost;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::above: return "CASE1";
    case Verdict::below: return "CASE2";
    case Verdict::inconclusive: return "CASE3";
  }
  return "CASE?";
}

double SurplusInstance::a_mass() const {
  NeumaierSum s;
  for (const double w : a_weights) s.add(w);
  return s.value();
}

double SurplusInstance::b_mass() const {
  NeumaierSum s;
  for (const double w : b_weights) s.add(w);
  return s.value();
}

SurplusInstance aggregate_level(const CoverLevel& level,
                                const WeightedPointSet& A,
                                const WeightedPointSet& B,
                                const Tolerances& tol) {
  const double wa = A.total_weight();
  const double wb = B.total_weight();
  const double ref = std::max({wa, wb, 1.0});
  if (std::abs(wa - wb) > tol.balance_rel * ref) {
    throw BalanceError("aggregate_level: total weights differ");
  }
  const std::size_t na = A.size();

  SurplusInstance surplus;
  surplus.dim = A.dim();
  surplus.total_weight = wa;

  for (const CoverNode& node : level.nodes) {
    NeumaierSum supply_sum, demand_sum;
    for (const std::uint32_t idx : node.members) {
      if (idx < na) {
        supply_sum.add(A.weight(idx));
      } else {
        demand_sum.add(B.weight(idx - na));
      }
    }
    const double supply = supply_sum.value();
    const double demand = demand_sum.value();
    if (supply == demand) continue;  // balanced balls drop out entirely
    const auto center = node.center < na ? A.point(node.center)
                                         : B.point(node.center - na);
    if (supply > demand) {
      surplus.a_coords.insert(surplus.a_coords.end(), center.begin(), center.end());
      surplus.a_weights.push_back(supply - demand);
    } else {
      surplus.b_coords.insert(surplus.b_coords.end(), center.begin(), center.end());
      surplus.b_weights.push_back(demand - supply);
    }
  }
  return surplus;
}

QueryOutcome emd_query(const WeightedPointSet& A, const WeightedPointSet& B,
                       const QueryParams& params, const Tolerances& tol) {
  if (A.dim() != B.dim()) throw InputError("emd_query: dimension mismatch");
  if (!(params.epsilon > 0.0 && params.epsilon < 1.0)) {
    throw InputError("emd_query: epsilon must lie in (0, 1)");
  }
  if (!(params.threshold >= 0.0)) {
    throw InputError("emd_query: threshold must be >= 0");
  }
  const double W = A.total_weight();
  if (std::abs(A.total_weight() - B.total_weight()) >
      tol.balance_rel * std::max({A.total_weight(), B.total_weight(), 1.0})) {
    throw BalanceError("emd_query: total weights differ");
  }

  QueryOutcome outcome;
  outcome.spread = std::max(approx_radius(A).radius, approx_radius(B).radius);
  outcome.max_levels =
      static_cast<int>(std::ceil(std::log2(1.0 / params.epsilon))) + 5;

  if (outcome.spread == 0.0) {
    // Each set sits on a single support point; the distance between the two
    // supports is the exact answer.
    const auto start = Clock::now();
    const double emd = distance(A.point(0), B.point(0));
    LevelTrace trace;
    trace.level = 0;
    trace.node_count = 2;
    trace.a_size = 1;
    trace.b_size = 1;
    trace.estimate = emd;
    trace.band = 0.0;
    trace.elapsed_seconds = seconds_since(start);
    outcome.levels.push_back(trace);
    if (std::abs(emd - params.threshold) <= tol.tie_abs) {
      outcome.verdict = Verdict::inconclusive;
    } else {
      outcome.verdict = emd > params.threshold ? Verdict::above : Verdict::below;
    }
    return outcome;
  }

  // P = A then B; indices below |A| are supply points.
  std::vector<double> p_coords;
  p_coords.reserve(A.coords().size() + B.coords().size());
  p_coords.insert(p_coords.end(), A.coords().begin(), A.coords().end());
  p_coords.insert(p_coords.end(), B.coords().begin(), B.coords().end());
  const PointView P(p_coords.data(), A.size() + B.size(), A.dim());

  CoverLevel level = root_level(P, 0);
  for (int i = 1; i <= outcome.max_levels; ++i) {
    const auto start = Clock::now();
    const double target = std::ldexp(outcome.spread, 1 - i);
    level = next_level(P, level, target, params.mode);

    const SurplusInstance surplus = aggregate_level(level, A, B, tol);
    double estimate = 0.0;
    const double negligible = 1e-12 * std::max(W, 1.0);
    if (surplus.a_size() > 0 && surplus.b_size() > 0 &&
        std::min(surplus.a_mass(), surplus.b_mass()) > negligible) {
      estimate = solve_surplus(surplus, params.solver, tol) / W;
    }

    LevelTrace trace;
    trace.level = i;
    trace.node_count = level.nodes.size();
    trace.a_size = surplus.a_size();
    trace.b_size = surplus.b_size();
    trace.estimate = estimate;
    trace.band = std::ldexp(outcome.spread, 3 - i);
    trace.elapsed_seconds = seconds_since(start);
    outcome.levels.push_back(trace);

    if (estimate >= params.threshold + trace.band) {
      outcome.verdict = Verdict::above;
      return outcome;
    }
    if (estimate <= params.threshold - trace.band) {
      outcome.verdict = Verdict::below;
      return outcome;
    }
  }
  outcome.verdict = Verdict::inconclusive;
  return outcome;
}

}  // namespace emdq
