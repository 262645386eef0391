#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "emdq/geometry.hpp"

namespace emdq {

/// Non-owning row-major view over a point matrix.
class PointView {
 public:
  PointView(const double* data, std::size_t n, std::size_t d)
      : data_(data), n_(n), d_(d) {}

  std::size_t size() const noexcept { return n_; }
  std::size_t dim() const noexcept { return d_; }
  std::span<const double> row(std::uint32_t i) const {
    return {data_ + static_cast<std::size_t>(i) * d_, d_};
  }

 private:
  const double* data_;
  std::size_t n_;
  std::size_t d_;
};

/// One ball of the decomposition: a center point (always a member) plus the
/// indices it covers. radius_bound is the measured max member-to-center
/// distance, which can be tighter than the level's target.
struct CoverNode {
  std::uint32_t center = 0;            // index into the underlying point view
  std::vector<std::uint32_t> members;  // ascending indices, center included
  int level = 0;
  double radius_bound = 0.0;
  bool is_leaf = false;
};

/// One full level of the decomposition. Nodes partition the index set.
struct CoverLevel {
  int level = 0;
  double target_radius = std::numeric_limits<double>::infinity();
  std::vector<CoverNode> nodes;
};

struct GonzalezResult {
  std::vector<std::uint32_t> centers;     // global indices, centers[0] = seed
  std::vector<std::uint32_t> assignment;  // per subset position: center ordinal
  double achieved_radius = 0.0;
};

/// Farthest-point traversal: k rounds of greedy center selection over the
/// given subset, seeded at seed_index (which must belong to the subset).
/// Selection and assignment ties break toward the lowest index. Stops early
/// once every remaining distance is zero.
GonzalezResult gonzalez(const PointView& points,
                        std::span<const std::uint32_t> subset, std::size_t k,
                        std::uint32_t seed_index);

/// Splits a non-leaf node by running center selection one round at a time,
/// seeded at the node's own center, until the achieved radius drops to the
/// target. Children carry measured radii and are marked leaf when singleton
/// or of zero radius.
std::vector<CoverNode> split_adaptive(const PointView& points,
                                      const CoverNode& node, double target);

/// Splits a non-leaf node with exactly 2^(2*rho) rounds regardless of the
/// radius reached. rho must lie in [1, 15].
std::vector<CoverNode> split_fixed_rho(const PointView& points,
                                       const CoverNode& node, int rho);

struct CoverMode {
  enum class Kind { adaptive, fixed_rho };
  Kind kind = Kind::adaptive;
  int rho = 1;  // only used by fixed_rho

  static CoverMode adaptive() { return {Kind::adaptive, 1}; }
  static CoverMode fixed(int rho) { return {Kind::fixed_rho, rho}; }
};

/// Level 0: a single node covering every point, centered at root_index.
CoverLevel root_level(const PointView& points, std::uint32_t root_index);

/// Builds the next level: leaves are carried forward verbatim, non-leaves are
/// split per the chosen mode. Only the input and output levels need to be
/// resident; the caller may discard the input afterwards.
CoverLevel next_level(const PointView& points, const CoverLevel& current,
                      double target, const CoverMode& mode);

/// Debug dump: `level,node_id,center_index,member_count,radius_bound`.
void dump_level_csv(std::ostream& os, const CoverLevel& level);

}  // namespace emdq
