#include "emdq/io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace emdq {

namespace {

constexpr std::array<char, 5> kMagic = {'E', 'M', 'D', 'Q', '1'};

std::uint64_t byteswap64(std::uint64_t v) {
  v = ((v & 0x00ff00ff00ff00ffULL) << 8) | ((v >> 8) & 0x00ff00ff00ff00ffULL);
  v = ((v & 0x0000ffff0000ffffULL) << 16) | ((v >> 16) & 0x0000ffff0000ffffULL);
  return (v << 32) | (v >> 32);
}

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  return byteswap64(v);
}

std::uint32_t to_little_endian(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  return static_cast<std::uint32_t>(byteswap64(v) >> 32);
}

void put_u32(std::ostream& os, std::uint32_t v) {
  const std::uint32_t le = to_little_endian(v);
  os.write(reinterpret_cast<const char*>(&le), sizeof(le));
}

void put_f64(std::ostream& os, double v) {
  const std::uint64_t le = to_little_endian(std::bit_cast<std::uint64_t>(v));
  os.write(reinterpret_cast<const char*>(&le), sizeof(le));
}

std::uint32_t get_u32(std::istream& is, const std::string& path) {
  std::uint32_t v = 0;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(v))) {
    throw ParseError(path + ": truncated binary header");
  }
  return to_little_endian(v);
}

double get_f64(std::istream& is, const std::string& path) {
  std::uint64_t v = 0;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(v))) {
    throw ParseError(path + ": truncated binary payload");
  }
  return std::bit_cast<double>(to_little_endian(v));
}

WeightedPointSet read_binary(std::istream& is, const std::string& path) {
  const std::uint64_t n = get_u32(is, path);
  const std::uint64_t d = get_u32(is, path);
  if (n == 0 || d == 0) throw ParseError(path + ": empty binary point set");
  if (n * d > (std::uint64_t{1} << 33)) {
    throw ParseError(path + ": binary header implausibly large");
  }
  std::vector<double> coords(n * d);
  for (double& c : coords) c = get_f64(is, path);
  std::vector<double> weights(n);
  for (double& w : weights) w = get_f64(is, path);
  try {
    return WeightedPointSet(std::move(coords), d, std::move(weights));
  } catch (const InputError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

WeightedPointSet read_csv(std::istream& is, const std::string& path,
                          bool weighted) {
  std::vector<double> coords, weights;
  std::size_t dim = 0, line_no = 0;
  std::string line;
  while (std::getline(is, line)) {
    ++line_no;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;

    std::vector<double> fields;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t comma = line.find(',', pos);
      const std::string cell =
          line.substr(pos, comma == std::string::npos ? std::string::npos
                                                      : comma - pos);
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      // Trailing whitespace is fine, anything else is not.
      while (end && *end != '\0' && (*end == ' ' || *end == '\t' || *end == '\r')) ++end;
      if (end == cell.c_str() || (end && *end != '\0')) {
        throw ParseError(path + ":" + std::to_string(line_no) +
                         ": cannot parse value '" + cell + "'");
      }
      fields.push_back(v);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }

    const std::size_t row_dim = weighted ? fields.size() - 1 : fields.size();
    if (weighted && fields.empty()) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": empty row");
    }
    if (dim == 0) {
      dim = row_dim;
      if (dim == 0) {
        throw ParseError(path + ":" + std::to_string(line_no) +
                         ": row has no coordinates");
      }
    } else if (row_dim != dim) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(dim) + " coordinates, found " +
                       std::to_string(row_dim));
    }
    const std::size_t offset = weighted ? 1 : 0;
    weights.push_back(weighted ? fields[0] : 1.0);
    coords.insert(coords.end(), fields.begin() + offset, fields.end());
  }
  if (weights.empty()) throw ParseError(path + ": no points");
  try {
    return WeightedPointSet(std::move(coords), dim, std::move(weights));
  } catch (const InputError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace

WeightedPointSet read_point_set(const std::string& path, bool weighted_csv) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError(path + ": cannot open file");

  std::array<char, 5> head = {};
  is.read(head.data(), head.size());
  if (is.gcount() == static_cast<std::streamsize>(head.size()) && head == kMagic) {
    return read_binary(is, path);
  }
  is.clear();
  is.seekg(0);
  return read_csv(is, path, weighted_csv);
}

void write_csv(const std::string& path, const WeightedPointSet& s,
               bool include_weights) {
  std::ofstream os(path);
  if (!os) throw ParseError(path + ": cannot open file for writing");
  char buf[64];
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (include_weights) {
      std::snprintf(buf, sizeof(buf), "%.17g", s.weight(i));
      os << buf << ',';
    }
    const auto p = s.point(i);
    for (std::size_t k = 0; k < p.size(); ++k) {
      std::snprintf(buf, sizeof(buf), "%.17g", p[k]);
      os << buf;
      os << (k + 1 < p.size() ? ',' : '\n');
    }
  }
  if (!os) throw ParseError(path + ": write failed");
}

void write_binary(const std::string& path, const WeightedPointSet& s) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ParseError(path + ": cannot open file for writing");
  os.write(kMagic.data(), kMagic.size());
  put_u32(os, static_cast<std::uint32_t>(s.size()));
  put_u32(os, static_cast<std::uint32_t>(s.dim()));
  for (const double c : s.coords()) put_f64(os, c);
  for (const double w : s.weights()) put_f64(os, w);
  if (!os) throw ParseError(path + ": write failed");
}

}  // namespace emdq
