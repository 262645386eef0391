#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "emdq/common.hpp"

namespace emdq::detail {

// Primal network simplex specialized to the dense uncapacitated
// transportation problem. The bipartite graph is implicit: arc ids below
// n_sources*n_sinks encode (source, sink) pairs row-major; the remaining
// n_sources+n_sinks ids are artificial arcs through a root node that also
// absorbs any residual imbalance of the inputs.
//
// Entering arcs are found by cyclic block search on reduced costs; the
// leaving arc is the last blocking arc in cycle order from the join node,
// which keeps the basis strongly feasible and prevents cycling under
// degeneracy. Potentials of a re-hung subtree are recomputed from arc costs
// rather than shifted, so rounding error does not accumulate across pivots.
class TransportationSimplex {
 public:
  // `cost` is row-major n_sources x n_sinks and must outlive the solver.
  TransportationSimplex(std::size_t n_sources, std::size_t n_sinks,
                        const double* cost, std::span<const double> supply,
                        std::span<const double> demand);

  // Runs pivots to optimality. Throws SolverError if max_pivots is hit.
  void run(std::size_t max_pivots);

  // Objective over real arcs only (artificial dust excluded).
  double objective() const;

  // Largest flow left on an artificial arc; nonzero values beyond roundoff
  // mean the instance was not balanced.
  double max_artificial_flow() const;

  std::size_t pivot_count() const noexcept { return pivots_; }

  // Visits every basic real arc with positive flow as (source, sink, flow).
  template <typename Visitor>
  void for_each_flow(Visitor&& visit) const {
    for (std::int32_t x = 0; x < root_; ++x) {
      const std::int64_t a = pred_arc_[x];
      if (a < n_real_ && flow_[x] > 0.0) {
        visit(static_cast<std::uint32_t>(a / nb_),
              static_cast<std::uint32_t>(a % nb_), flow_[x]);
      }
    }
  }

 private:
  std::int32_t arc_src(std::int64_t a) const;
  std::int32_t arc_dst(std::int64_t a) const;
  double arc_cost(std::int64_t a) const {
    return a < n_real_ ? cost_[a] : artificial_cost_;
  }

  std::int64_t find_entering();
  void pivot(std::int64_t entering);
  void rehang(std::int32_t subtree_root, std::int32_t new_parent,
              std::int64_t entering, std::uint8_t entering_down, double theta,
              std::int32_t leaving_node);
  void refresh_subtree(std::int32_t subtree_root);
  void remove_child(std::int32_t parent, std::int32_t child);

  std::size_t na_, nb_;
  std::int64_t n_real_, n_arcs_;
  std::int32_t root_;
  const double* cost_;
  double artificial_cost_;

  // Per-node spanning tree state; flow_ and pred_* describe the arc that
  // connects a node to its parent.
  std::vector<std::int32_t> parent_;
  std::vector<std::int64_t> pred_arc_;
  std::vector<std::uint8_t> pred_down_;  // 1 when the arc is parent -> node
  std::vector<double> flow_;
  std::vector<double> pi_;
  std::vector<std::int32_t> depth_;
  std::vector<std::vector<std::int32_t>> children_;
  std::vector<std::uint8_t> nonbasic_;  // per arc: 1 outside the tree

  std::int64_t block_size_;
  std::int64_t cursor_ = 0;
  std::size_t pivots_ = 0;

  // scratch buffers reused across pivots
  std::vector<std::int32_t> u_path_, v_path_, dfs_stack_;
};

}  // namespace emdq::detail
