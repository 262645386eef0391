#pragma once

#include <iosfwd>
#include <vector>

#include "emdq/query.hpp"

namespace emdq {

/// Configuration for the threshold sweep: for every theta in
/// [theta_lo, theta_hi] and every epsilon, the query runs with
/// T = 2^theta * EMD(A,B), where the ground-truth EMD comes from the exact
/// baseline solve of the full instance.
struct BenchConfig {
  int theta_lo = -6;
  int theta_hi = 6;
  std::vector<double> epsilons = {0.05};
  int repeats = 1;  // query timings use the median over repeats
  bool baseline_exact = true;
  bool baseline_sinkhorn = true;
  SolverConfig query_solver;
  CoverMode mode = CoverMode::adaptive();
};

struct BenchRow {
  int theta = 0;
  double epsilon = 0.0;
  std::size_t n = 0;  // |A| + |B|
  Verdict verdict = Verdict::inconclusive;
  Verdict truth_case = Verdict::inconclusive;
  int levels = 0;
  double time_our_s = 0.0;
  double time_net_s = 0.0;
  double time_sin_s = 0.0;
  double ratio_net = 0.0;
  double ratio_sin = 0.0;
  bool correct = false;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  double emd_exact = 0.0;
  double emd_sinkhorn = 0.0;
  double spread = 0.0;
  double time_net_s = 0.0;
  double time_sin_s = 0.0;
  double precision = 0.0;  // fraction of correct verdicts across rows
};

/// A verdict is correct when it matches the side EMD actually falls on, or
/// when it is inconclusive while EMD lies within the epsilon band around T.
bool verdict_correct(Verdict v, double emd, double threshold, double epsilon,
                     double spread);

/// What an ideal answer looks like: above/below by sign when EMD falls
/// outside the epsilon band, inconclusive within it.
Verdict truth_case(double emd, double threshold, double epsilon, double spread);

BenchReport run_bench(const WeightedPointSet& A, const WeightedPointSet& B,
                      const BenchConfig& config);

/// Stable-schema CSV:
/// theta,eps,n,verdict,truth_case,levels,time_our_s,time_net_s,time_sin_s,
/// ratio_net,ratio_sin
void write_bench_csv(std::ostream& os, const BenchReport& report);

}  // namespace emdq
