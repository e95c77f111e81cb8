#pragma once

#include "c2plus/core_types.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace c2plus::io {

// Points with nonnegative values, as read from CSV (header x,y,f) or a JSON array of triples.
struct Dataset {
  std::vector<Point2> points;
  std::vector<double> values;

  // FNV-1a over the little-endian bytes of every (x, y, f); independent of the input format.
  std::uint64_t content_hash() const;
  std::string id() const;
};

// Throws std::invalid_argument with a line or element number on malformed input, negative or
// non-finite values and duplicate points.
Dataset parse_csv(std::istream& is);
Dataset parse_json(std::istream& is);
// Picks the parser from the first non-blank character ('[' means JSON).
Dataset load_dataset(const std::string& path);

// Values reordered to match `points`; every point must appear in the dataset exactly.
std::vector<double> values_for(const Dataset& d, const std::vector<Point2>& points);

}  // namespace c2plus::io
