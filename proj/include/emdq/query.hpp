#pragma once

#include <string>
#include <vector>

#include "emdq/cover.hpp"
#include "emdq/transport.hpp"

namespace emdq {

/// The three possible answers to a threshold query.
/// above: EMD(A,B) > T certified; below: EMD(A,B) < T certified;
/// inconclusive: EMD(A,B) lies within the epsilon band around T.
enum class Verdict { above = 1, below = 2, inconclusive = 3 };

std::string to_string(Verdict v);  // "CASE1" / "CASE2" / "CASE3"

struct SolverConfig {
  enum class Kind { exact, sinkhorn };
  Kind kind = Kind::exact;
  SinkhornOptions sinkhorn;
};

struct QueryParams {
  double threshold = 0.0;  // T >= 0, in distance units
  double epsilon = 0.05;   // in (0, 1)
  SolverConfig solver;
  CoverMode mode = CoverMode::adaptive();
};

/// Per-node surplus mass at one level: for every ball, supply and demand
/// cancel against each other and only the difference survives, placed at the
/// ball's center. Carries the original total mass W since estimates divide
/// by it, not by the (smaller) surplus mass.
struct SurplusInstance {
  std::vector<double> a_coords, a_weights;
  std::vector<double> b_coords, b_weights;
  std::size_t dim = 0;
  double total_weight = 0.0;  // W of the original pair

  std::size_t a_size() const { return a_weights.size(); }
  std::size_t b_size() const { return b_weights.size(); }
  double a_mass() const;
  double b_mass() const;
};

SurplusInstance aggregate_level(const CoverLevel& level,
                                const WeightedPointSet& A,
                                const WeightedPointSet& B,
                                const Tolerances& tol = {});

struct LevelTrace {
  int level = 0;
  std::size_t node_count = 0;
  std::size_t a_size = 0;
  std::size_t b_size = 0;
  double estimate = 0.0;  // surplus cost / W
  double band = 0.0;      // certified deviation, halves each level
  double elapsed_seconds = 0.0;
};

struct QueryOutcome {
  Verdict verdict = Verdict::inconclusive;
  std::vector<LevelTrace> levels;
  double spread = 0.0;  // farthest-point enclosing-radius estimate
  int max_levels = 0;
};

/// Resolves whether EMD(A,B) is above or below params.threshold by refining
/// the decomposition until the certified band around the estimate separates
/// it from the threshold, or max_levels is exhausted.
QueryOutcome emd_query(const WeightedPointSet& A, const WeightedPointSet& B,
                       const QueryParams& params, const Tolerances& tol = {});

}  // namespace emdq
