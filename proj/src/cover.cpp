#include "emdq/cover.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace emdq {

namespace {

// Incremental farthest-point traversal over a fixed subset. Each round adds
// the point farthest from the current centers; nearest-center assignment and
// farthest-point selection both break ties toward the lowest index (subsets
// are kept in ascending index order).
class GonzalezRun {
 public:
  GonzalezRun(const PointView& points, std::span<const std::uint32_t> subset,
              std::uint32_t seed_index)
      : points_(points), subset_(subset) {
    if (subset_.empty()) throw InputError("gonzalez: empty subset");
    centers_.push_back(seed_index);
    dist_.resize(subset_.size());
    assignment_.assign(subset_.size(), 0);
    const auto seed = points_.row(seed_index);
    bool seed_seen = false;
    for (std::size_t pos = 0; pos < subset_.size(); ++pos) {
      dist_[pos] = distance(seed, points_.row(subset_[pos]));
      seed_seen = seed_seen || subset_[pos] == seed_index;
    }
    if (!seed_seen) throw InputError("gonzalez: seed not in subset");
    refresh_max();
  }

  // Adds one center; returns false when every remaining distance is zero.
  bool add_round() {
    if (max_dist_ == 0.0) return false;
    const std::uint32_t ordinal = static_cast<std::uint32_t>(centers_.size());
    const std::uint32_t center = subset_[argmax_];
    centers_.push_back(center);
    const auto c = points_.row(center);
    for (std::size_t pos = 0; pos < subset_.size(); ++pos) {
      const double d = distance(c, points_.row(subset_[pos]));
      if (d < dist_[pos]) {
        dist_[pos] = d;
        assignment_[pos] = ordinal;
      }
    }
    refresh_max();
    return true;
  }

  double achieved_radius() const { return max_dist_; }
  std::size_t rounds() const { return centers_.size(); }

  GonzalezResult take_result() {
    return GonzalezResult{std::move(centers_), std::move(assignment_),
                          max_dist_};
  }

  // Children in center-ordinal order; members stay in ascending index order.
  std::vector<CoverNode> make_children(int child_level) const {
    std::vector<CoverNode> children(centers_.size());
    for (std::size_t t = 0; t < centers_.size(); ++t) {
      children[t].center = centers_[t];
      children[t].level = child_level;
    }
    for (std::size_t pos = 0; pos < subset_.size(); ++pos) {
      CoverNode& child = children[assignment_[pos]];
      child.members.push_back(subset_[pos]);
      child.radius_bound = std::max(child.radius_bound, dist_[pos]);
    }
    for (CoverNode& child : children) {
      child.is_leaf = child.members.size() == 1 || child.radius_bound == 0.0;
    }
    return children;
  }

 private:
  void refresh_max() {
    max_dist_ = 0.0;
    argmax_ = 0;
    for (std::size_t pos = 0; pos < subset_.size(); ++pos) {
      if (dist_[pos] > max_dist_) {
        max_dist_ = dist_[pos];
        argmax_ = pos;
      }
    }
  }

  const PointView& points_;
  std::span<const std::uint32_t> subset_;
  std::vector<std::uint32_t> centers_;
  std::vector<std::uint32_t> assignment_;
  std::vector<double> dist_;
  double max_dist_ = 0.0;
  std::size_t argmax_ = 0;
};

}  // namespace

GonzalezResult gonzalez(const PointView& points,
                        std::span<const std::uint32_t> subset, std::size_t k,
                        std::uint32_t seed_index) {
  if (k == 0) throw InputError("gonzalez: k must be >= 1");
  GonzalezRun run(points, subset, seed_index);
  while (run.rounds() < k && run.add_round()) {
  }
  return run.take_result();
}

std::vector<CoverNode> split_adaptive(const PointView& points,
                                      const CoverNode& node, double target) {
  if (node.is_leaf) throw InputError("split_adaptive: node is a leaf");
  if (!(target > 0.0)) throw InputError("split_adaptive: target must be > 0");
  GonzalezRun run(points, node.members, node.center);
  while (run.achieved_radius() > target && run.add_round()) {
  }
  return run.make_children(node.level + 1);
}

std::vector<CoverNode> split_fixed_rho(const PointView& points,
                                       const CoverNode& node, int rho) {
  if (node.is_leaf) throw InputError("split_fixed_rho: node is a leaf");
  if (rho < 1 || rho > 15) {
    throw InputError("split_fixed_rho: rho must lie in [1, 15]");
  }
  const std::size_t k = std::size_t{1} << (2 * rho);
  GonzalezRun run(points, node.members, node.center);
  while (run.rounds() < k && run.add_round()) {
  }
  return run.make_children(node.level + 1);
}

CoverLevel root_level(const PointView& points, std::uint32_t root_index) {
  if (points.size() == 0) throw InputError("root_level: empty point set");
  CoverNode root;
  root.center = root_index;
  root.level = 0;
  root.members.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    root.members[i] = static_cast<std::uint32_t>(i);
  }
  const auto c = points.row(root_index);
  for (std::size_t i = 0; i < points.size(); ++i) {
    root.radius_bound = std::max(
        root.radius_bound, distance(c, points.row(static_cast<std::uint32_t>(i))));
  }
  root.is_leaf = root.members.size() == 1 || root.radius_bound == 0.0;
  CoverLevel level;
  level.level = 0;
  level.target_radius = std::numeric_limits<double>::infinity();
  level.nodes.push_back(std::move(root));
  return level;
}

CoverLevel next_level(const PointView& points, const CoverLevel& current,
                      double target, const CoverMode& mode) {
  if (!(target > 0.0)) throw InputError("next_level: target must be > 0");
  if (!(target < current.target_radius)) {
    throw InputError("next_level: target must shrink");
  }
  CoverLevel next;
  next.level = current.level + 1;
  next.target_radius = target;
  for (const CoverNode& node : current.nodes) {
    if (node.is_leaf) {
      next.nodes.push_back(node);
      continue;
    }
    std::vector<CoverNode> children =
        mode.kind == CoverMode::Kind::adaptive
            ? split_adaptive(points, node, target)
            : split_fixed_rho(points, node, mode.rho);
    for (CoverNode& child : children) {
      next.nodes.push_back(std::move(child));
    }
  }
  return next;
}

void dump_level_csv(std::ostream& os, const CoverLevel& level) {
  os << "level,node_id,center_index,member_count,radius_bound\n";
  for (std::size_t id = 0; id < level.nodes.size(); ++id) {
    const CoverNode& node = level.nodes[id];
    os << level.level << ',' << id << ',' << node.center << ','
       << node.members.size() << ',' << node.radius_bound << '\n';
  }
}

}  // namespace emdq
