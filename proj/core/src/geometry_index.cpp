#include "c2plus/geometry_index.hpp"

#include "binary_io.hpp"

#include <algorithm>
#include <cstring>
#include <istream>
#include <ostream>
#include <queue>
#include <stdexcept>

namespace c2plus {

namespace {

bool less_dist_then_lex(double da, const Point2& a, double db, const Point2& b) {
  if (da != db) return da < db;
  return a < b;
}

double box_dist_sq(const PointIndex::Node& n, const Point2& p) {
  const double dx = std::max({n.minx - p.x, 0.0, p.x - n.maxx});
  const double dy = std::max({n.miny - p.y, 0.0, p.y - n.maxy});
  return dx * dx + dy * dy;
}

// tight closed bbox vs half-open box
bool node_meets(const PointIndex::Node& n, const Box& b) {
  return n.minx < b.hi.x && n.maxx >= b.lo.x && n.miny < b.hi.y && n.maxy >= b.lo.y;
}
bool node_inside(const PointIndex::Node& n, const Box& b) {
  return n.minx >= b.lo.x && n.maxx < b.hi.x && n.miny >= b.lo.y && n.maxy < b.hi.y;
}

constexpr char kMagic[8] = {'C', '2', 'P', 'I', 'D', 'X', '\0', '\1'};
constexpr std::uint32_t kFormatVersion = 1;

using bin::get;
using bin::put;

}  // namespace

PointIndex::PointIndex(std::vector<Point2> points) : points_(std::move(points)) {
  for (const auto& p : points_)
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw std::invalid_argument("PointIndex: non-finite point");
  {
    std::vector<Point2> s = points_;
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw std::invalid_argument("PointIndex: duplicate points");
  }
  const int n = size();
  perm_.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm_[static_cast<std::size_t>(i)] = i;
  weights_.assign(static_cast<std::size_t>(n), kInf);
  nodes_.push_back(Node{kInf, kInf, -kInf, -kInf, 0, n, {-1, -1, -1, -1}, {}, kInf});
  if (n == 0) return;
  // split by sign quadrant: no dyadic square straddles an axis
  auto quadrant = [&](int idx) {
    const Point2& p = points_[static_cast<std::size_t>(idx)];
    return (p.x >= 0.0 ? 1 : 0) | (p.y >= 0.0 ? 2 : 0);
  };
  std::stable_sort(perm_.begin(), perm_.end(), [&](int a, int b) { return quadrant(a) < quadrant(b); });
  int begin = 0;
  for (int q = 0; q < 4; ++q) {
    int end = begin;
    while (end < n && quadrant(perm_[static_cast<std::size_t>(end)]) == q) ++end;
    if (end > begin) {
      double hi = 0.0;
      for (int t = begin; t < end; ++t) {
        const Point2& p = points_[static_cast<std::size_t>(perm_[static_cast<std::size_t>(t)])];
        hi = std::max({hi, std::abs(p.x), std::abs(p.y)});
      }
      const int k = hi > 0.0 ? std::ilogb(hi) + 1 : -1000;
      const Point2 anchor = points_[static_cast<std::size_t>(perm_[static_cast<std::size_t>(begin)])];
      DyadicSquare cell = DyadicSquare::containing(anchor, k);
      for (;;) {
        bool all = true;
        for (int t = begin; t < end && all; ++t)
          all = cell.contains(points_[static_cast<std::size_t>(perm_[static_cast<std::size_t>(t)])]);
        if (all) break;
        cell = cell.parent();
      }
      const int c = build(begin, end, cell);
      nodes_[0].child[q] = c;
      Node& root = nodes_[0];
      const Node& ch = nodes_[static_cast<std::size_t>(c)];
      root.minx = std::min(root.minx, ch.minx);
      root.miny = std::min(root.miny, ch.miny);
      root.maxx = std::max(root.maxx, ch.maxx);
      root.maxy = std::max(root.maxy, ch.maxy);
    }
    begin = end;
  }
}

int PointIndex::build(int begin, int end, DyadicSquare cell) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{kInf, kInf, -kInf, -kInf, begin, end, {-1, -1, -1, -1}, cell, kInf});
  double minx = kInf, miny = kInf, maxx = -kInf, maxy = -kInf;
  for (int t = begin; t < end; ++t) {
    const Point2& p = points_[static_cast<std::size_t>(perm_[static_cast<std::size_t>(t)])];
    minx = std::min(minx, p.x);
    miny = std::min(miny, p.y);
    maxx = std::max(maxx, p.x);
    maxy = std::max(maxy, p.y);
  }
  if (end - begin > 1) {
    // compress: descend while every point falls in one child
    for (;;) {
      const Point2 c = cell.center();
      const int qa = (minx >= c.x ? 1 : 0) | (miny >= c.y ? 2 : 0);
      const int qb = (maxx >= c.x ? 1 : 0) | (maxy >= c.y ? 2 : 0);
      if (qa != qb) break;
      cell = cell.child(qa);
    }
    const Point2 c = cell.center();
    auto quad = [&](int idx) {
      const Point2& p = points_[static_cast<std::size_t>(idx)];
      return (p.x >= c.x ? 1 : 0) | (p.y >= c.y ? 2 : 0);
    };
    auto first = perm_.begin() + begin, last = perm_.begin() + end;
    std::stable_sort(first, last, [&](int a, int b) { return quad(a) < quad(b); });
    int b = begin;
    int kids[4] = {-1, -1, -1, -1};
    for (int q = 0; q < 4; ++q) {
      int e = b;
      while (e < end && quad(perm_[static_cast<std::size_t>(e)]) == q) ++e;
      if (e > b) kids[q] = build(b, e, cell.child(q));
      b = e;
    }
    for (int q = 0; q < 4; ++q) nodes_[static_cast<std::size_t>(id)].child[q] = kids[q];
  }
  Node& nd = nodes_[static_cast<std::size_t>(id)];
  nd.cell = cell;
  nd.minx = minx;
  nd.miny = miny;
  nd.maxx = maxx;
  nd.maxy = maxy;
  return id;
}

void PointIndex::set_weights(std::vector<double> w) {
  if (static_cast<int>(w.size()) != size()) throw std::invalid_argument("PointIndex::set_weights: size mismatch");
  weights_ = std::move(w);
  if (!nodes_.empty()) refresh_weights(0);
}

void PointIndex::refresh_weights(int id) {
  Node& nd = nodes_[static_cast<std::size_t>(id)];
  double m = kInf;
  bool leafy = true;
  for (int q = 0; q < 4; ++q)
    if (nd.child[q] >= 0) {
      leafy = false;
      refresh_weights(nd.child[q]);
      m = std::min(m, nodes_[static_cast<std::size_t>(nd.child[q])].wmin);
    }
  if (leafy)
    for (int t = nd.begin; t < nd.end; ++t) m = std::min(m, weights_[static_cast<std::size_t>(perm_[static_cast<std::size_t>(t)])]);
  nodes_[static_cast<std::size_t>(id)].wmin = m;
}

bool PointIndex::empty_in(const Box& b) const {
  if (size() == 0) return true;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const Node& nd = nodes_[static_cast<std::size_t>(stack.back())];
    stack.pop_back();
    if (!node_meets(nd, b)) continue;
    if (node_inside(nd, b)) return false;
    bool leafy = true;
    for (int q = 0; q < 4; ++q)
      if (nd.child[q] >= 0) {
        leafy = false;
        stack.push_back(nd.child[q]);
      }
    if (leafy)
      for (int t = nd.begin; t < nd.end; ++t)
        if (b.contains(points_[static_cast<std::size_t>(perm_[static_cast<std::size_t>(t)])])) return false;
  }
  return true;
}

BoxStats PointIndex::stats_in(const Box& b) const {
  BoxStats s;
  if (size() == 0) return s;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const Node& nd = nodes_[static_cast<std::size_t>(stack.back())];
    stack.pop_back();
    if (!node_meets(nd, b)) continue;
    if (node_inside(nd, b)) {
      s.count += nd.end - nd.begin;
      s.min_weight = std::min(s.min_weight, nd.wmin);
      continue;
    }
    bool leafy = true;
    for (int q = 0; q < 4; ++q)
      if (nd.child[q] >= 0) {
        leafy = false;
        stack.push_back(nd.child[q]);
      }
    if (leafy)
      for (int t = nd.begin; t < nd.end; ++t) {
        const int o = perm_[static_cast<std::size_t>(t)];
        if (b.contains(points_[static_cast<std::size_t>(o)])) {
          ++s.count;
          s.min_weight = std::min(s.min_weight, weights_[static_cast<std::size_t>(o)]);
        }
      }
  }
  return s;
}

std::vector<int> PointIndex::points_in(const Box& b) const {
  std::vector<int> out;
  if (size() == 0) return out;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const Node& nd = nodes_[static_cast<std::size_t>(stack.back())];
    stack.pop_back();
    if (!node_meets(nd, b)) continue;
    if (node_inside(nd, b)) {
      for (int t = nd.begin; t < nd.end; ++t) out.push_back(perm_[static_cast<std::size_t>(t)]);
      continue;
    }
    bool leafy = true;
    for (int q = 0; q < 4; ++q)
      if (nd.child[q] >= 0) {
        leafy = false;
        stack.push_back(nd.child[q]);
      }
    if (leafy)
      for (int t = nd.begin; t < nd.end; ++t) {
        const int o = perm_[static_cast<std::size_t>(t)];
        if (b.contains(points_[static_cast<std::size_t>(o)])) out.push_back(o);
      }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<int> PointIndex::nearest_in(const Point2& target, const Box& b) const {
  if (size() == 0) return std::nullopt;
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
  pq.emplace(box_dist_sq(nodes_[0], target), 0);
  int best = -1;
  double best_d = kInf;
  while (!pq.empty()) {
    const auto [d, id] = pq.top();
    pq.pop();
    if (d > best_d) break;
    const Node& nd = nodes_[static_cast<std::size_t>(id)];
    bool leafy = true;
    for (int q = 0; q < 4; ++q) {
      const int c = nd.child[q];
      if (c < 0) continue;
      leafy = false;
      const Node& ch = nodes_[static_cast<std::size_t>(c)];
      if (node_meets(ch, b)) pq.emplace(box_dist_sq(ch, target), c);
    }
    if (leafy)
      for (int t = nd.begin; t < nd.end; ++t) {
        const int o = perm_[static_cast<std::size_t>(t)];
        const Point2& p = points_[static_cast<std::size_t>(o)];
        if (!b.contains(p)) continue;
        const double dd = distance_sq(p, target);
        if (best < 0 || less_dist_then_lex(dd, p, best_d, points_[static_cast<std::size_t>(best)])) {
          best = o;
          best_d = dd;
        }
      }
  }
  if (best < 0) return std::nullopt;
  return best;
}

std::vector<int> PointIndex::k_nearest(const Point2& x, int k) const {
  std::vector<int> out;
  if (size() == 0 || k <= 0) return out;
  k = std::min(k, size());
  auto worse = [&](int a, int b) {  // heap order: worst candidate on top
    return less_dist_then_lex(distance_sq(points_[static_cast<std::size_t>(a)], x), points_[static_cast<std::size_t>(a)],
                              distance_sq(points_[static_cast<std::size_t>(b)], x), points_[static_cast<std::size_t>(b)]);
  };
  std::vector<int> heap;
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
  pq.emplace(box_dist_sq(nodes_[0], x), 0);
  while (!pq.empty()) {
    const auto [d, id] = pq.top();
    pq.pop();
    if (static_cast<int>(heap.size()) == k && d > distance_sq(points_[static_cast<std::size_t>(heap.front())], x)) break;
    const Node& nd = nodes_[static_cast<std::size_t>(id)];
    bool leafy = true;
    for (int q = 0; q < 4; ++q) {
      const int c = nd.child[q];
      if (c < 0) continue;
      leafy = false;
      pq.emplace(box_dist_sq(nodes_[static_cast<std::size_t>(c)], x), c);
    }
    if (leafy)
      for (int t = nd.begin; t < nd.end; ++t) {
        const int o = perm_[static_cast<std::size_t>(t)];
        if (static_cast<int>(heap.size()) < k) {
          heap.push_back(o);
          std::push_heap(heap.begin(), heap.end(), worse);
        } else if (worse(o, heap.front())) {
          std::pop_heap(heap.begin(), heap.end(), worse);
          heap.back() = o;
          std::push_heap(heap.begin(), heap.end(), worse);
        }
      }
  }
  std::sort_heap(heap.begin(), heap.end(), worse);
  return heap;
}

std::optional<int> PointIndex::locate(const Point2& p) const {
  const Box b{p, {std::nextafter(p.x, kInf), std::nextafter(p.y, kInf)}};
  return nearest_in(p, b);
}

double PointIndex::min_separation() const {
  double best = kInf;
  for (int i = 0; i < size(); ++i) {
    const auto nn = k_nearest(points_[static_cast<std::size_t>(i)], 2);
    if (nn.size() == 2) best = std::min(best, distance(points_[static_cast<std::size_t>(nn[0])], points_[static_cast<std::size_t>(nn[1])]));
  }
  return best;
}

Box PointIndex::bounding_box() const {
  if (size() == 0) return {{0, 0}, {0, 0}};
  const Node& r = nodes_[0];
  return {{r.minx, r.miny}, {r.maxx, r.maxy}};
}

void PointIndex::write(std::ostream& os) const {
  os.write(kMagic, sizeof(kMagic));
  put(os, kFormatVersion);
  put(os, static_cast<std::uint64_t>(points_.size()));
  for (const auto& p : points_) {
    put(os, p.x);
    put(os, p.y);
  }
  for (int v : perm_) put(os, static_cast<std::int32_t>(v));
  for (double w : weights_) put(os, w);
  put(os, static_cast<std::uint64_t>(nodes_.size()));
  for (const auto& n : nodes_) {
    put(os, n.minx);
    put(os, n.miny);
    put(os, n.maxx);
    put(os, n.maxy);
    put(os, static_cast<std::int32_t>(n.begin));
    put(os, static_cast<std::int32_t>(n.end));
    for (int c : n.child) put(os, static_cast<std::int32_t>(c));
    put(os, static_cast<std::int32_t>(n.cell.k));
    put(os, n.cell.i);
    put(os, n.cell.j);
    put(os, n.wmin);
  }
}

PointIndex PointIndex::read(std::istream& is) {
  char magic[sizeof(kMagic)];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw std::runtime_error("not an index file");
  if (get<std::uint32_t>(is) != kFormatVersion) throw std::runtime_error("unsupported index format version");
  PointIndex idx;
  const auto n = get<std::uint64_t>(is);
  idx.points_.resize(n);
  for (auto& p : idx.points_) {
    p.x = get<double>(is);
    p.y = get<double>(is);
  }
  idx.perm_.resize(n);
  for (auto& v : idx.perm_) v = get<std::int32_t>(is);
  idx.weights_.resize(n);
  for (auto& w : idx.weights_) w = get<double>(is);
  const auto m = get<std::uint64_t>(is);
  idx.nodes_.resize(m);
  for (auto& nd : idx.nodes_) {
    nd.minx = get<double>(is);
    nd.miny = get<double>(is);
    nd.maxx = get<double>(is);
    nd.maxy = get<double>(is);
    nd.begin = get<std::int32_t>(is);
    nd.end = get<std::int32_t>(is);
    for (int& c : nd.child) c = get<std::int32_t>(is);
    nd.cell.k = get<std::int32_t>(is);
    nd.cell.i = get<std::int64_t>(is);
    nd.cell.j = get<std::int64_t>(is);
    nd.wmin = get<double>(is);
  }
  return idx;
}

bool empty_query(const PointIndex& idx, const DyadicSquare& q) { return idx.empty_in(q.dilated(25.0)); }

std::optional<RepResult> rep_query(const PointIndex& idx, const DyadicSquare& q) {
  const Point2 c = q.center();
  if (auto r = idx.nearest_in(c, q.dilated(5.0))) return RepResult{*r, true};
  if (auto r = idx.nearest_in(c, q.dilated(25.0))) return RepResult{*r, false};
  return std::nullopt;
}

std::vector<int> points_in_dilated(const PointIndex& idx, const DyadicSquare& q, double lambda) {
  return idx.points_in(q.dilated(lambda));
}

std::vector<int> k_nearest(const PointIndex& idx, const Point2& x, int k) { return idx.k_nearest(x, k); }

SplitTree::SplitTree(const std::vector<Point2>& points) : points_(points) {
  const int n = static_cast<int>(points_.size());
  perm_.resize(static_cast<std::size_t>(n));
  leaf_.assign(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) perm_[static_cast<std::size_t>(i)] = i;
  if (n > 0) build(0, n, -1);
}

std::span<const int> SplitTree::members(int node) const {
  const Node& nd = nodes_[static_cast<std::size_t>(node)];
  return {perm_.data() + nd.begin, static_cast<std::size_t>(nd.end - nd.begin)};
}

int SplitTree::build(int begin, int end, int parent) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{kInf, kInf, -kInf, -kInf, begin, end, -1, -1, parent, -1});
  Node nd = nodes_.back();
  for (int t = begin; t < end; ++t) {
    const int o = perm_[static_cast<std::size_t>(t)];
    const Point2& p = points_[static_cast<std::size_t>(o)];
    nd.minx = std::min(nd.minx, p.x);
    nd.miny = std::min(nd.miny, p.y);
    nd.maxx = std::max(nd.maxx, p.x);
    nd.maxy = std::max(nd.maxy, p.y);
    if (nd.lexmin < 0 || p < points_[static_cast<std::size_t>(nd.lexmin)]) nd.lexmin = o;
  }
  if (end - begin == 1) {
    leaf_[static_cast<std::size_t>(perm_[static_cast<std::size_t>(begin)])] = id;
  } else {
    // fair split: halve the longer side of the bounding box
    const bool along_x = (nd.maxx - nd.minx) >= (nd.maxy - nd.miny);
    const double mid = along_x ? 0.5 * (nd.minx + nd.maxx) : 0.5 * (nd.miny + nd.maxy);
    auto first = perm_.begin() + begin, last = perm_.begin() + end;
    auto it = std::stable_partition(first, last, [&](int o) {
      const Point2& p = points_[static_cast<std::size_t>(o)];
      return (along_x ? p.x : p.y) < mid;
    });
    int split = static_cast<int>(it - perm_.begin());
    if (split == begin || split == end) split = begin + (end - begin) / 2;  // coincident coordinates
    nd.left = build(begin, split, id);
    nd.right = build(split, end, id);
  }
  nodes_[static_cast<std::size_t>(id)] = nd;
  return id;
}

namespace {

double node_dist(const SplitTree::Node& a, const SplitTree::Node& b) {
  const double dx = std::max({a.minx - b.maxx, b.minx - a.maxx, 0.0});
  const double dy = std::max({a.miny - b.maxy, b.miny - a.maxy, 0.0});
  return std::hypot(dx, dy);
}

}  // namespace

std::vector<WSPDPair> build_wspd(const SplitTree& tree, double kappa) {
  if (!(kappa > 0.0)) throw std::invalid_argument("build_wspd: kappa must be positive");
  const auto& nodes = tree.nodes();
  std::vector<std::pair<int, int>> unordered;
  std::vector<std::pair<int, int>> work;
  for (std::size_t u = 0; u < nodes.size(); ++u)
    if (!nodes[u].leaf()) work.emplace_back(nodes[u].left, nodes[u].right);
  while (!work.empty()) {
    auto [a, b] = work.back();
    work.pop_back();
    const auto& na = nodes[static_cast<std::size_t>(a)];
    const auto& nb = nodes[static_cast<std::size_t>(b)];
    if (std::max(na.diam(), nb.diam()) <= kappa * node_dist(na, nb)) {
      unordered.emplace_back(a, b);
      continue;
    }
    // split the larger side
    if (nb.leaf() || (!na.leaf() && na.diam() >= nb.diam())) {
      work.emplace_back(na.left, b);
      work.emplace_back(na.right, b);
    } else {
      work.emplace_back(a, nb.left);
      work.emplace_back(a, nb.right);
    }
  }

  std::vector<std::pair<int, int>> ordered;
  ordered.reserve(2 * unordered.size());
  for (auto [a, b] : unordered) {
    ordered.emplace_back(a, b);
    ordered.emplace_back(b, a);
  }

  // Refine left sides until every point is the representative of some left side. Splitting a
  // left side keeps separation since diameters shrink and distances grow.
  const int n = static_cast<int>(tree.points().size());
  std::vector<char> arises(static_cast<std::size_t>(n), 0);
  std::vector<std::vector<int>> by_left(nodes.size());
  for (std::size_t p = 0; p < ordered.size(); ++p) {
    by_left[static_cast<std::size_t>(ordered[p].first)].push_back(static_cast<int>(p));
    arises[static_cast<std::size_t>(nodes[static_cast<std::size_t>(ordered[p].first)].lexmin)] = 1;
  }
  for (int x = 0; x < n; ++x) {
    if (arises[static_cast<std::size_t>(x)]) continue;
    // smallest ancestor of x's leaf that is a left side
    int a = tree.leaf_of(x);
    while (a >= 0 && by_left[static_cast<std::size_t>(a)].empty()) a = nodes[static_cast<std::size_t>(a)].parent;
    if (a < 0) continue;
    const int p = by_left[static_cast<std::size_t>(a)].back();
    by_left[static_cast<std::size_t>(a)].pop_back();
    const int b = ordered[static_cast<std::size_t>(p)].second;
    int cur = a;
    int slot = p;
    while (nodes[static_cast<std::size_t>(cur)].lexmin != x) {
      const auto& nc = nodes[static_cast<std::size_t>(cur)];
      const int leafx = tree.leaf_of(x);
      auto contains_x = [&](int node) {
        const auto& m = nodes[static_cast<std::size_t>(node)];
        const auto& l = nodes[static_cast<std::size_t>(leafx)];
        return m.begin <= l.begin && l.end <= m.end;
      };
      const int with = contains_x(nc.left) ? nc.left : nc.right;
      const int without = with == nc.left ? nc.right : nc.left;
      ordered[static_cast<std::size_t>(slot)] = {without, b};
      by_left[static_cast<std::size_t>(without)].push_back(slot);
      arises[static_cast<std::size_t>(nodes[static_cast<std::size_t>(without)].lexmin)] = 1;
      ordered.emplace_back(with, b);
      slot = static_cast<int>(ordered.size()) - 1;
      cur = with;
    }
    by_left[static_cast<std::size_t>(cur)].push_back(slot);
    arises[static_cast<std::size_t>(x)] = 1;
  }

  std::vector<WSPDPair> out;
  out.reserve(ordered.size());
  for (auto [a, b] : ordered)
    out.push_back(WSPDPair{a, b, nodes[static_cast<std::size_t>(a)].lexmin, nodes[static_cast<std::size_t>(b)].lexmin});
  return out;
}

}  // namespace c2plus
