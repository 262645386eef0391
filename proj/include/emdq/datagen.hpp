#pragma once

#include <cstdint>

#include "emdq/geometry.hpp"

namespace emdq {

/// Recipe for sampling points near a random polynomial manifold embedded in
/// high-dimensional space. The polynomial degree serves as a rough knob for
/// the intrinsic complexity of the data: higher degree, more folded manifold.
struct ManifoldSpec {
  std::size_t ambient_dim = 500;
  std::size_t intrinsic_dim = 2;  // in [1, 5]
  int degree = 1;                 // in [1, 50]
  std::size_t n_points = 0;
  std::uint64_t seed = 0;
  double coefficient_scale = 1.0;
};

/// Draws latent parameters uniformly from [-1,1]^m and maps each through d
/// random sparse polynomials (at most 3*degree monomials per coordinate,
/// Gaussian coefficients). All weights are 1. Bitwise-deterministic for a
/// fixed spec: the generator never goes through platform-dependent
/// distributions.
WeightedPointSet sample_manifold(const ManifoldSpec& spec);

}  // namespace emdq
