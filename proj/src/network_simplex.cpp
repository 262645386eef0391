#include "network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace emdq::detail {

TransportationSimplex::TransportationSimplex(std::size_t n_sources,
                                             std::size_t n_sinks,
                                             const double* cost,
                                             std::span<const double> supply,
                                             std::span<const double> demand)
    : na_(n_sources),
      nb_(n_sinks),
      n_real_(static_cast<std::int64_t>(n_sources * n_sinks)),
      n_arcs_(n_real_ + static_cast<std::int64_t>(n_sources + n_sinks)),
      root_(static_cast<std::int32_t>(n_sources + n_sinks)),
      cost_(cost) {
  if (na_ == 0 || nb_ == 0) {
    throw SolverError("transportation simplex: empty side");
  }
  double max_cost = 0.0;
  for (std::int64_t a = 0; a < n_real_; ++a) {
    max_cost = std::max(max_cost, cost_[a]);
  }
  artificial_cost_ = (1.0 + max_cost) * static_cast<double>(root_ + 1);

  const std::size_t n_nodes = static_cast<std::size_t>(root_) + 1;
  parent_.assign(n_nodes, -1);
  pred_arc_.assign(n_nodes, -1);
  pred_down_.assign(n_nodes, 0);
  flow_.assign(n_nodes, 0.0);
  pi_.assign(n_nodes, 0.0);
  depth_.assign(n_nodes, 1);
  children_.assign(n_nodes, {});
  nonbasic_.assign(static_cast<std::size_t>(n_arcs_), 1);

  depth_[root_] = 0;
  children_[root_].reserve(n_nodes - 1);
  for (std::int32_t x = 0; x < root_; ++x) {
    parent_[x] = root_;
    pred_arc_[x] = n_real_ + x;
    nonbasic_[static_cast<std::size_t>(n_real_ + x)] = 0;
    children_[root_].push_back(x);
    if (x < static_cast<std::int32_t>(na_)) {
      pred_down_[x] = 0;  // source -> root
      flow_[x] = supply[static_cast<std::size_t>(x)];
      pi_[x] = artificial_cost_;
    } else {
      pred_down_[x] = 1;  // root -> sink
      flow_[x] = demand[static_cast<std::size_t>(x) - na_];
      pi_[x] = -artificial_cost_;
    }
  }

  block_size_ = std::max<std::int64_t>(
      10, static_cast<std::int64_t>(std::sqrt(static_cast<double>(n_arcs_))));
}

std::int32_t TransportationSimplex::arc_src(std::int64_t a) const {
  if (a < n_real_) return static_cast<std::int32_t>(a / static_cast<std::int64_t>(nb_));
  const std::int32_t endpoint = static_cast<std::int32_t>(a - n_real_);
  return endpoint < static_cast<std::int32_t>(na_) ? endpoint : root_;
}

std::int32_t TransportationSimplex::arc_dst(std::int64_t a) const {
  if (a < n_real_) {
    return static_cast<std::int32_t>(na_) +
           static_cast<std::int32_t>(a % static_cast<std::int64_t>(nb_));
  }
  const std::int32_t endpoint = static_cast<std::int32_t>(a - n_real_);
  return endpoint < static_cast<std::int32_t>(na_) ? root_ : endpoint;
}

std::int64_t TransportationSimplex::find_entering() {
  double best = 0.0;
  std::int64_t best_arc = -1;
  std::int64_t countdown = block_size_;
  std::int64_t a = cursor_;
  for (std::int64_t scanned = 0; scanned < n_arcs_; ++scanned, ++a) {
    if (a >= n_arcs_) a = 0;
    if (nonbasic_[static_cast<std::size_t>(a)]) {
      const double reduced = arc_cost(a) - pi_[arc_src(a)] + pi_[arc_dst(a)];
      if (reduced < best) {
        best = reduced;
        best_arc = a;
      }
    }
    if (--countdown == 0) {
      if (best_arc >= 0) break;
      countdown = block_size_;
    }
  }
  if (best_arc >= 0) {
    cursor_ = best_arc + 1 == n_arcs_ ? 0 : best_arc + 1;
  }
  return best_arc;
}

void TransportationSimplex::pivot(std::int64_t entering) {
  const std::int32_t u = arc_src(entering);
  const std::int32_t v = arc_dst(entering);

  // Paths from both endpoints up to their lowest common ancestor.
  u_path_.clear();
  v_path_.clear();
  std::int32_t x = u, y = v;
  while (depth_[x] > depth_[y]) {
    u_path_.push_back(x);
    x = parent_[x];
  }
  while (depth_[y] > depth_[x]) {
    v_path_.push_back(y);
    y = parent_[y];
  }
  while (x != y) {
    u_path_.push_back(x);
    x = parent_[x];
    v_path_.push_back(y);
    y = parent_[y];
  }

  // Pushing theta along the entering arc decreases flow on path arcs that
  // oppose the cycle orientation: on the u side those directed node->parent,
  // on the v side those directed parent->node. The leaving arc is the last
  // blocking arc in cycle order from the join (<= keeps the final minimum).
  double theta = std::numeric_limits<double>::infinity();
  std::int32_t leaving = -1;
  bool leaving_on_u = false;
  for (auto it = u_path_.rbegin(); it != u_path_.rend(); ++it) {
    if (!pred_down_[*it] && flow_[*it] <= theta) {
      theta = flow_[*it];
      leaving = *it;
      leaving_on_u = true;
    }
  }
  for (const std::int32_t n : v_path_) {
    if (pred_down_[n] && flow_[n] <= theta) {
      theta = flow_[n];
      leaving = n;
      leaving_on_u = false;
    }
  }
  if (leaving < 0) {
    throw SolverError("transportation simplex: unbounded pivot cycle");
  }

  for (const std::int32_t n : u_path_) {
    flow_[n] += pred_down_[n] ? theta : -theta;
  }
  for (const std::int32_t n : v_path_) {
    flow_[n] += pred_down_[n] ? -theta : theta;
  }

  if (leaving_on_u) {
    rehang(u, v, entering, /*entering_down=*/0, theta, leaving);
  } else {
    rehang(v, u, entering, /*entering_down=*/1, theta, leaving);
  }
}

void TransportationSimplex::remove_child(std::int32_t parent,
                                         std::int32_t child) {
  auto& list = children_[parent];
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (list[i] == child) {
      list[i] = list.back();
      list.pop_back();
      return;
    }
  }
}

void TransportationSimplex::rehang(std::int32_t subtree_root,
                                   std::int32_t new_parent_start,
                                   std::int64_t entering,
                                   std::uint8_t entering_down, double theta,
                                   std::int32_t leaving_node) {
  nonbasic_[static_cast<std::size_t>(entering)] = 0;
  std::int32_t x = subtree_root;
  std::int32_t new_parent = new_parent_start;
  std::int64_t carry_arc = entering;
  std::uint8_t carry_down = entering_down;
  double carry_flow = theta;
  while (true) {
    const std::int32_t px = parent_[x];
    const std::int64_t old_arc = pred_arc_[x];
    const std::uint8_t old_down = pred_down_[x];
    const double old_flow = flow_[x];
    remove_child(px, x);
    children_[new_parent].push_back(x);
    parent_[x] = new_parent;
    pred_arc_[x] = carry_arc;
    pred_down_[x] = carry_down;
    flow_[x] = carry_flow;
    if (x == leaving_node) {
      nonbasic_[static_cast<std::size_t>(old_arc)] = 1;
      break;
    }
    carry_arc = old_arc;
    carry_down = old_down ^ 1;  // parent/child sense flips along the chain
    carry_flow = old_flow;
    new_parent = x;
    x = px;
  }
  refresh_subtree(subtree_root);
}

void TransportationSimplex::refresh_subtree(std::int32_t subtree_root) {
  dfs_stack_.clear();
  dfs_stack_.push_back(subtree_root);
  while (!dfs_stack_.empty()) {
    const std::int32_t y = dfs_stack_.back();
    dfs_stack_.pop_back();
    const std::int32_t p = parent_[y];
    const double c = arc_cost(pred_arc_[y]);
    pi_[y] = pred_down_[y] ? pi_[p] - c : pi_[p] + c;
    depth_[y] = depth_[p] + 1;
    for (const std::int32_t child : children_[y]) {
      dfs_stack_.push_back(child);
    }
  }
}

void TransportationSimplex::run(std::size_t max_pivots) {
  while (true) {
    const std::int64_t entering = find_entering();
    if (entering < 0) return;
    if (pivots_ >= max_pivots) {
      throw SolverError("transportation simplex: pivot limit reached (" +
                        std::to_string(max_pivots) + ")");
    }
    pivot(entering);
    ++pivots_;
  }
}

double TransportationSimplex::objective() const {
  NeumaierSum total;
  for (std::int32_t x = 0; x < root_; ++x) {
    const std::int64_t a = pred_arc_[x];
    if (a < n_real_) total.add(flow_[x] * cost_[a]);
  }
  return total.value();
}

double TransportationSimplex::max_artificial_flow() const {
  double worst = 0.0;
  for (std::int32_t x = 0; x < root_; ++x) {
    if (pred_arc_[x] >= n_real_) {
      worst = std::max(worst, std::abs(flow_[x]));
    }
  }
  return worst;
}

}  // namespace emdq::detail
