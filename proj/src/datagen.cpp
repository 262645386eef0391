#include "emdq/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <unordered_set>
#include <vector>

namespace emdq {

namespace {

// Raw-bit draws keep the output identical across standard libraries;
// std::uniform_real_distribution and friends are implementation-defined.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform_symmetric(std::mt19937_64& rng) {
  return 2.0 * uniform01(rng) - 1.0;
}

double gaussian(std::mt19937_64& rng) {
  // Box-Muller; u1 shifted away from zero so the log stays finite.
  const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

// Number of monomials in m variables with total degree <= g.
std::uint64_t monomial_count(std::size_t m, int g) {
  // C(g + m, m); small for m <= 5, g <= 50.
  std::uint64_t c = 1;
  for (std::size_t k = 1; k <= m; ++k) {
    c = c * (static_cast<std::uint64_t>(g) + k) / k;
  }
  return c;
}

void enumerate_monomials(std::size_t m, int g, std::vector<int>& current,
                         std::vector<std::vector<int>>& out, int used) {
  if (current.size() == m) {
    out.push_back(current);
    return;
  }
  for (int e = 0; e + used <= g; ++e) {
    current.push_back(e);
    enumerate_monomials(m, g, current, out, used + e);
    current.pop_back();
  }
}

std::uint64_t pack_exponents(const std::vector<int>& exps) {
  std::uint64_t key = 0;
  for (const int e : exps) key = key * 64 + static_cast<std::uint64_t>(e);
  return key;
}

// Picks `count` distinct exponent vectors with total degree <= g.
std::vector<std::vector<int>> pick_monomials(std::mt19937_64& rng,
                                             std::size_t m, int g,
                                             std::size_t count) {
  const std::uint64_t total = monomial_count(m, g);
  if (total <= 200'000) {
    std::vector<std::vector<int>> all;
    std::vector<int> current;
    enumerate_monomials(m, g, current, all, 0);
    count = std::min<std::size_t>(count, all.size());
    // Fisher-Yates prefix, then restore a canonical order for evaluation.
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(
                                    uniform01(rng) * static_cast<double>(all.size() - i));
      std::swap(all[i], all[std::min(j, all.size() - 1)]);
    }
    all.resize(count);
    std::sort(all.begin(), all.end());
    return all;
  }
  // Sparse regime: rejection-sample distinct exponent vectors.
  std::vector<std::vector<int>> picked;
  std::unordered_set<std::uint64_t> seen;
  std::vector<int> exps(m);
  while (picked.size() < count) {
    int sum = 0;
    for (std::size_t k = 0; k < m; ++k) {
      exps[k] = static_cast<int>(uniform01(rng) * (g + 1));
      exps[k] = std::min(exps[k], g);
      sum += exps[k];
    }
    if (sum > g) continue;
    if (seen.insert(pack_exponents(exps)).second) picked.push_back(exps);
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

}  // namespace

WeightedPointSet sample_manifold(const ManifoldSpec& spec) {
  if (spec.intrinsic_dim < 1 || spec.intrinsic_dim > 5) {
    throw InputError("sample_manifold: intrinsic_dim must lie in [1, 5]");
  }
  if (spec.degree < 1 || spec.degree > 50) {
    throw InputError("sample_manifold: degree must lie in [1, 50]");
  }
  if (spec.ambient_dim < spec.intrinsic_dim) {
    throw InputError("sample_manifold: ambient_dim must be >= intrinsic_dim");
  }
  if (spec.n_points == 0) {
    throw InputError("sample_manifold: n_points must be >= 1");
  }
  if (!(spec.coefficient_scale > 0.0) || !std::isfinite(spec.coefficient_scale)) {
    throw InputError("sample_manifold: coefficient_scale must be positive");
  }

  const std::size_t n = spec.n_points;
  const std::size_t m = spec.intrinsic_dim;
  const std::size_t d = spec.ambient_dim;
  const int g = spec.degree;

  std::mt19937_64 rng(spec.seed);

  std::vector<double> latent(n * m);
  for (double& t : latent) t = uniform_symmetric(rng);

  const std::size_t monomials_per_coord = static_cast<std::size_t>(3 * g);
  struct Coordinate {
    std::vector<std::vector<int>> exponents;
    std::vector<double> coefficients;
  };
  std::vector<Coordinate> polys(d);
  for (std::size_t c = 0; c < d; ++c) {
    polys[c].exponents = pick_monomials(rng, m, g, monomials_per_coord);
    polys[c].coefficients.resize(polys[c].exponents.size());
    for (double& coeff : polys[c].coefficients) {
      coeff = spec.coefficient_scale * gaussian(rng);
    }
  }

  // Per-point power table t_k^0..g makes each monomial a handful of products.
  std::vector<double> coords(n * d);
  std::vector<double> powers(m * static_cast<std::size_t>(g + 1));
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t k = 0; k < m; ++k) {
      double* row = powers.data() + k * (g + 1);
      row[0] = 1.0;
      const double t = latent[p * m + k];
      for (int e = 1; e <= g; ++e) row[e] = row[e - 1] * t;
    }
    for (std::size_t c = 0; c < d; ++c) {
      const Coordinate& poly = polys[c];
      double value = 0.0;
      for (std::size_t s = 0; s < poly.exponents.size(); ++s) {
        double term = poly.coefficients[s];
        for (std::size_t k = 0; k < m; ++k) {
          term *= powers[k * (g + 1) + poly.exponents[s][k]];
        }
        value += term;
      }
      coords[p * d + c] = value;
    }
  }

  return WeightedPointSet::with_unit_weights(std::move(coords), d);
}

}  // namespace emdq
