#include "emdq/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace emdq {

double distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw InputError("distance: dimension mismatch (" +
                     std::to_string(p.size()) + " vs " +
                     std::to_string(q.size()) + ")");
  }
  double sq = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double diff = p[k] - q[k];
    sq += diff * diff;
  }
  return std::sqrt(sq);
}

WeightedPointSet::WeightedPointSet(std::vector<double> coords, std::size_t dim,
                                   std::vector<double> weights)
    : coords_(std::move(coords)), weights_(std::move(weights)), dim_(dim) {
  if (dim_ == 0) throw InputError("WeightedPointSet: dimension must be >= 1");
  if (weights_.empty()) throw InputError("WeightedPointSet: need at least one point");
  if (coords_.size() != weights_.size() * dim_) {
    throw InputError("WeightedPointSet: coordinate buffer has " +
                     std::to_string(coords_.size()) + " values, expected " +
                     std::to_string(weights_.size() * dim_));
  }
  for (double c : coords_) {
    if (!std::isfinite(c)) throw InputError("WeightedPointSet: non-finite coordinate");
  }
  NeumaierSum sum;
  for (double w : weights_) {
    if (!std::isfinite(w)) throw InputError("WeightedPointSet: non-finite weight");
    if (w < 0.0) throw InputError("WeightedPointSet: negative weight");
    sum.add(w);
  }
  total_weight_ = sum.value();
}

WeightedPointSet WeightedPointSet::with_unit_weights(std::vector<double> coords,
                                                     std::size_t dim) {
  if (dim == 0) throw InputError("WeightedPointSet: dimension must be >= 1");
  std::vector<double> weights(coords.size() / dim, 1.0);
  return WeightedPointSet(std::move(coords), dim, std::move(weights));
}

RadiusEstimate approx_radius(const WeightedPointSet& s) {
  const std::span<const double> anchor = s.point(0);
  double radius = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    radius = std::max(radius, distance(anchor, s.point(i)));
  }
  return {radius, 0};
}

}  // namespace emdq
