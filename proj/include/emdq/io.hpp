#pragma once

#include <string>

#include "emdq/geometry.hpp"

namespace emdq {

/// Reads a point set from disk. Files starting with the magic bytes "EMDQ1"
/// are parsed as binary (u32 n, u32 d, n*d f64 coordinates row-major, n f64
/// weights, all little-endian); everything else is parsed as CSV with one
/// point per row. For CSV, `weighted_csv` makes the first column the weight;
/// otherwise every weight is 1.
WeightedPointSet read_point_set(const std::string& path, bool weighted_csv = false);

/// Writes CSV with full round-trip precision. When `include_weights` is set
/// the weight becomes the first column (readable back with weighted_csv).
void write_csv(const std::string& path, const WeightedPointSet& s,
               bool include_weights = false);

/// Writes the binary format described above.
void write_binary(const std::string& path, const WeightedPointSet& s);

}  // namespace emdq
