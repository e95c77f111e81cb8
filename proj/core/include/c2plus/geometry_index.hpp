#pragma once

#include "c2plus/core_types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace c2plus {

// Half-open axis-aligned box [lo.x, hi.x) x [lo.y, hi.y).
struct Box {
  Point2 lo;
  Point2 hi;

  bool contains(const Point2& p) const { return p.x >= lo.x && p.x < hi.x && p.y >= lo.y && p.y < hi.y; }
  bool intersects(const Box& b) const { return lo.x < b.hi.x && b.lo.x < hi.x && lo.y < b.hi.y && b.lo.y < hi.y; }
};

// [2^k i, 2^k (i+1)) x [2^k j, 2^k (j+1))
struct DyadicSquare {
  int k = 0;
  std::int64_t i = 0;
  std::int64_t j = 0;

  double side() const { return std::ldexp(1.0, k); }
  Point2 lower() const { return {std::ldexp(static_cast<double>(i), k), std::ldexp(static_cast<double>(j), k)}; }
  Point2 center() const {
    return {std::ldexp(static_cast<double>(2 * i + 1), k - 1), std::ldexp(static_cast<double>(2 * j + 1), k - 1)};
  }
  Box box() const { return dilated(1.0); }
  // Concentric dilation; exact for dyadic factors such as 5, 25 and 1 + 1/32.
  Box dilated(double lambda) const {
    const double s = side();
    const Point2 lo = lower();
    const double pad = 0.5 * (lambda - 1.0) * s;
    return {{lo.x - pad, lo.y - pad}, {lo.x + s + pad, lo.y + s + pad}};
  }
  bool contains(const Point2& p) const { return box().contains(p); }
  DyadicSquare parent() const { return {k + 1, floor_div2(i), floor_div2(j)}; }
  DyadicSquare child(int q) const { return {k - 1, 2 * i + (q & 1), 2 * j + ((q >> 1) & 1)}; }
  static DyadicSquare containing(const Point2& p, int k) {
    return {k, static_cast<std::int64_t>(std::floor(std::ldexp(p.x, -k))),
            static_cast<std::int64_t>(std::floor(std::ldexp(p.y, -k)))};
  }

  friend bool operator==(const DyadicSquare& a, const DyadicSquare& b) { return a.k == b.k && a.i == b.i && a.j == b.j; }
  friend bool operator<(const DyadicSquare& a, const DyadicSquare& b) {
    if (a.k != b.k) return a.k < b.k;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  }

 private:
  static std::int64_t floor_div2(std::int64_t v) { return v >= 0 ? v / 2 : -((-v + 1) / 2); }
};

struct DyadicSquareHash {
  std::size_t operator()(const DyadicSquare& q) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(q.k) * 0x9E3779B97F4A7C15ull;
    h ^= static_cast<std::uint64_t>(q.i) + 0x7F4A7C159E3779B9ull + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(q.j) + 0x94D049BB133111EBull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

struct BoxStats {
  int count = 0;
  double min_weight = kInf;
};

// Compressed quadtree over a fixed point set. Immutable after construction except for the
// per-point weights used by min-aggregate queries.
class PointIndex {
 public:
  struct Node {
    double minx, miny, maxx, maxy;  // tight bounding box of the node's points
    int begin, end;                 // range in the permuted order
    int child[4];
    DyadicSquare cell;
    double wmin;
  };

  PointIndex() = default;
  // Throws std::invalid_argument on duplicate or non-finite points.
  explicit PointIndex(std::vector<Point2> points);

  int size() const { return static_cast<int>(points_.size()); }
  const std::vector<Point2>& points() const { return points_; }
  const Point2& point(int i) const { return points_[static_cast<std::size_t>(i)]; }
  const std::vector<Node>& nodes() const { return nodes_; }

  void set_weights(std::vector<double> w);
  const std::vector<double>& weights() const { return weights_; }

  bool empty_in(const Box& b) const;
  BoxStats stats_in(const Box& b) const;
  // original indices, ascending
  std::vector<int> points_in(const Box& b) const;
  // Point of `b` nearest to `target`; ties broken lexicographically.
  std::optional<int> nearest_in(const Point2& target, const Box& b) const;
  // k nearest points ordered by distance, then lexicographically.
  std::vector<int> k_nearest(const Point2& x, int k) const;
  std::optional<int> locate(const Point2& p) const;
  // Smallest distance between two distinct points (infinity when N < 2).
  double min_separation() const;
  Box bounding_box() const;

  void write(std::ostream& os) const;
  static PointIndex read(std::istream& is);

 private:
  int build(int begin, int end, DyadicSquare cell);
  void refresh_weights(int node);

  std::vector<Point2> points_;  // original order
  std::vector<int> perm_;       // permuted order -> original index
  std::vector<Node> nodes_;     // nodes_[0] is a virtual root over the sign quadrants
  std::vector<double> weights_;
};

bool empty_query(const PointIndex& idx, const DyadicSquare& q);  // E meets 25Q?
struct RepResult {
  int index = -1;
  bool in_5q = false;
};
// Point of E nearest to center(Q) among E in 5Q, else among E in 25Q.
std::optional<RepResult> rep_query(const PointIndex& idx, const DyadicSquare& q);
std::vector<int> points_in_dilated(const PointIndex& idx, const DyadicSquare& q, double lambda);
std::vector<int> k_nearest(const PointIndex& idx, const Point2& x, int k);

// Fair-split tree and well-separated pair decomposition.
class SplitTree {
 public:
  struct Node {
    double minx, miny, maxx, maxy;
    int begin, end;
    int left = -1, right = -1, parent = -1;
    int lexmin;  // original index of the lexicographically least point
    double diam() const { return std::hypot(maxx - minx, maxy - miny); }
    bool leaf() const { return left < 0; }
  };

  explicit SplitTree(const std::vector<Point2>& points);
  const std::vector<Node>& nodes() const { return nodes_; }
  std::span<const int> members(int node) const;
  int leaf_of(int point) const { return leaf_[static_cast<std::size_t>(point)]; }
  const std::vector<Point2>& points() const { return points_; }

 private:
  int build(int begin, int end, int parent);

  std::vector<Point2> points_;
  std::vector<int> perm_;
  std::vector<int> leaf_;
  std::vector<Node> nodes_;
};

struct WSPDPair {
  int left;       // split-tree node
  int right;
  int rep_left;   // original point index
  int rep_right;
};

// Ordered pairs (both orientations) partitioning E x E minus the diagonal, each satisfying
// max(diam left, diam right) <= kappa * dist(left, right). Every point is rep_left of some pair.
std::vector<WSPDPair> build_wspd(const SplitTree& tree, double kappa);

}  // namespace c2plus
