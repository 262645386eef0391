#include "emdq/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

namespace emdq {

namespace {

using Clock = std::chrono::steady_clock;

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t k = values.size() / 2;
  return values.size() % 2 == 1 ? values[k]
                                : 0.5 * (values[k - 1] + values[k]);
}

}  // namespace

Verdict truth_case(double emd, double threshold, double epsilon,
                   double spread) {
  if (std::abs(emd - threshold) <= epsilon * spread) {
    return Verdict::inconclusive;
  }
  return emd > threshold ? Verdict::above : Verdict::below;
}

bool verdict_correct(Verdict v, double emd, double threshold, double epsilon,
                     double spread) {
  switch (v) {
    case Verdict::above: return emd >= threshold;
    case Verdict::below: return emd <= threshold;
    case Verdict::inconclusive:
      return std::abs(emd - threshold) <= epsilon * spread;
  }
  return false;
}

BenchReport run_bench(const WeightedPointSet& A, const WeightedPointSet& B,
                      const BenchConfig& config) {
  if (config.theta_lo > config.theta_hi) {
    throw InputError("run_bench: empty theta range");
  }
  if (config.epsilons.empty()) {
    throw InputError("run_bench: need at least one epsilon");
  }
  if (config.repeats < 1) throw InputError("run_bench: repeats must be >= 1");
  if (!config.baseline_exact) {
    throw InputError("run_bench: the exact baseline supplies the ground truth");
  }

  BenchReport report;
  report.spread = std::max(approx_radius(A).radius, approx_radius(B).radius);
  const double W = A.total_weight();

  TransportInstance full(A, B);
  {
    const auto start = Clock::now();
    const TransportPlan plan = solve_exact(full);
    report.time_net_s = std::chrono::duration<double>(Clock::now() - start).count();
    report.emd_exact = plan.cost / W;
  }
  if (config.baseline_sinkhorn) {
    const auto start = Clock::now();
    const TransportPlan plan = solve_sinkhorn(full, config.query_solver.sinkhorn);
    report.time_sin_s = std::chrono::duration<double>(Clock::now() - start).count();
    report.emd_sinkhorn = plan.cost / W;
  } else {
    report.time_sin_s = std::numeric_limits<double>::quiet_NaN();
    report.emd_sinkhorn = std::numeric_limits<double>::quiet_NaN();
  }

  std::size_t correct = 0;
  for (int theta = config.theta_lo; theta <= config.theta_hi; ++theta) {
    const double threshold = std::ldexp(report.emd_exact, theta);
    for (const double eps : config.epsilons) {
      QueryParams params;
      params.threshold = threshold;
      params.epsilon = eps;
      params.solver = config.query_solver;
      params.mode = config.mode;

      QueryOutcome outcome;
      std::vector<double> times;
      times.reserve(static_cast<std::size_t>(config.repeats));
      for (int r = 0; r < config.repeats; ++r) {
        const auto start = Clock::now();
        outcome = emd_query(A, B, params);
        times.push_back(std::chrono::duration<double>(Clock::now() - start).count());
      }

      BenchRow row;
      row.theta = theta;
      row.epsilon = eps;
      row.n = A.size() + B.size();
      row.verdict = outcome.verdict;
      row.truth_case = truth_case(report.emd_exact, threshold, eps, report.spread);
      row.levels = static_cast<int>(outcome.levels.size());
      row.time_our_s = median(times);
      row.time_net_s = report.time_net_s;
      row.time_sin_s = report.time_sin_s;
      row.ratio_net = row.time_our_s / report.time_net_s;
      row.ratio_sin = row.time_our_s / report.time_sin_s;
      row.correct = verdict_correct(outcome.verdict, report.emd_exact,
                                    threshold, eps, report.spread);
      if (row.correct) ++correct;
      report.rows.push_back(row);
    }
  }
  report.precision =
      static_cast<double>(correct) / static_cast<double>(report.rows.size());
  return report;
}

void write_bench_csv(std::ostream& os, const BenchReport& report) {
  os << "theta,eps,n,verdict,truth_case,levels,time_our_s,time_net_s,"
        "time_sin_s,ratio_net,ratio_sin\n";
  for (const BenchRow& row : report.rows) {
    os << row.theta << ',' << row.epsilon << ',' << row.n << ','
       << to_string(row.verdict) << ',' << to_string(row.truth_case) << ','
       << row.levels << ',' << row.time_our_s << ',' << row.time_net_s << ','
       << row.time_sin_s << ',' << row.ratio_net << ',' << row.ratio_sin
       << '\n';
  }
}

}  // namespace emdq
