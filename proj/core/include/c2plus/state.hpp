#pragma once

#include "c2plus/config.hpp"
#include "c2plus/cz_decomp.hpp"
#include "c2plus/geometry_index.hpp"
#include "c2plus/sigma_palp.hpp"

#include <array>
#include <iosfwd>
#include <vector>

namespace c2plus {

// S_l = {x', x''} with S(x') and S(x'') for every WSPD pair (x', x''). Pairs with equal member
// sets share one entry of `sets`.
struct FinitenessFamily {
  std::vector<std::array<int, 2>> pairs;  // representatives, one per ordered WSPD pair
  std::vector<int> set_of_pair;
  std::vector<std::vector<int>> sets;     // ascending indices into E
  std::vector<std::vector<int>> point_sets;  // S(x) for every x in E

  std::size_t size() const { return pairs.size(); }
  const std::vector<int>& members(std::size_t l) const { return sets[static_cast<std::size_t>(set_of_pair[l])]; }
};

// Everything computed from E alone. Immutable after preprocess(); all queries are const.
struct State {
  Config cfg;
  PointIndex index;  // weights hold the PALP diameters
  std::vector<PALP> palps;
  CZDecomposition cz;
  FinitenessFamily family;

  int size() const { return index.size(); }
  const std::vector<Point2>& points() const { return index.points(); }
  const Point2& point(int i) const { return index.point(i); }

  void write(std::ostream& os) const;
  static State read(std::istream& is);
};

// Builds the index, PALPs, decomposition and finiteness family. Throws std::invalid_argument on
// empty, duplicate or non-finite points and on an invalid configuration.
State preprocess(std::vector<Point2> points, const Config& cfg = {});

}  // namespace c2plus
