#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "emdq/common.hpp"

namespace emdq {

/// Euclidean distance between two points of equal dimension.
/// Throws InputError on dimension mismatch.
double distance(std::span<const double> p, std::span<const double> q);

/// An immutable set of points in R^d with nonnegative weights.
/// Coordinates are stored row-major (n rows of d doubles).
class WeightedPointSet {
 public:
  WeightedPointSet(std::vector<double> coords, std::size_t dim,
                   std::vector<double> weights);

  /// Convenience constructor assigning weight 1 to every point.
  static WeightedPointSet with_unit_weights(std::vector<double> coords,
                                            std::size_t dim);

  std::size_t size() const noexcept { return weights_.size(); }
  std::size_t dim() const noexcept { return dim_; }

  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  double weight(std::size_t i) const { return weights_[i]; }

  std::span<const double> coords() const noexcept { return coords_; }
  std::span<const double> weights() const noexcept { return weights_; }
  double total_weight() const noexcept { return total_weight_; }

 private:
  std::vector<double> coords_;
  std::vector<double> weights_;
  std::size_t dim_;
  double total_weight_;
};

/// Linear-time estimate of the minimum enclosing radius: the anchor is the
/// first stored point and the radius is the distance to its farthest point.
/// The result lies within [Delta, 2*Delta] of the exact enclosing radius.
struct RadiusEstimate {
  double radius;
  std::size_t anchor_index;  // always 0
};

RadiusEstimate approx_radius(const WeightedPointSet& s);

}  // namespace emdq
