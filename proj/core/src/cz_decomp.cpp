#include "c2plus/cz_decomp.hpp"

#include "binary_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace c2plus {

std::string to_string(CZClass c) {
  switch (c) {
    case CZClass::sharpsharp: return "sharpsharp";
    case CZClass::sharp_only: return "sharp_only";
    case CZClass::empty_small: return "empty_small";
    case CZClass::other: return "other";
  }
  return "unknown";
}

std::vector<double> diameter_weights(const std::vector<PALP>& palps) {
  std::vector<double> w;
  w.reserve(palps.size());
  for (const auto& p : palps) w.push_back(p.diameter);
  return w;
}

bool is_ok(const PointIndex& idx, const DyadicSquare& q, const Config& cfg) {
  if (q.side() > 1.0 / cfg.A2) return false;
  if (static_cast<int>(idx.weights().size()) != idx.size())
    throw std::invalid_argument("is_ok: index carries no diameter weights");
  const BoxStats st = idx.stats_in(q.dilated(5.0));
  return st.count <= 1 || st.min_weight >= cfg.A1 * q.side();
}

double distance_to_cone(const Point2& p, const Point2& x0, const Vec2& u, double s) {
  const Vec2 v = p - x0;
  const double r = v.norm();
  if (r == 0.0) return 0.0;
  const double phi = std::asin(std::min(1.0, std::abs(v.dot(u)) / r));
  const double alpha = std::asin(std::min(1.0, s));
  return phi <= alpha ? 0.0 : r * std::sin(phi - alpha);
}

std::pair<Vec2, Vec2> compute_uq(const PALP& rep_palp) {
  const Vec2 u = rep_palp.u_max.normalized();
  return {u, Vec2(u.y(), -u.x())};
}

Point2 compute_xqs(const DyadicSquare& q, const std::optional<RepResult>& rep, const Point2& rep_point,
                   const Vec2& u_q, double cone_slope) {
  const Point2 c = q.center();
  if (!rep || !rep->in_5q) return c;
  if (distance_to_cone(c, rep_point, u_q, cone_slope) >= q.side() / 1024.0) return c;
  return c + (q.side() / 4.0) * u_q;
}

namespace {

// Opening of the data cone around the u_q-perpendicular line through Rep(Q).
double cone_slope(const Config& cfg) { return 1.0 / cfg.A1; }

double dist_to_data(const PointIndex& idx, const DyadicSquare& q, const Point2& p) {
  const auto n = idx.nearest_in(p, q.dilated(25.0));
  return n ? distance(p, idx.point(*n)) : kInf;
}

}  // namespace

SquareRef CZDecomposition::locate(const Point2& x) const {
  DyadicSquare q = DyadicSquare::containing(x, k0_);
  for (;;) {
    const auto it = nodes_.find(q);
    if (it == nodes_.end()) {
      if (q.k != k0_) throw std::logic_error("CZDecomposition: broken square tree");
      return {q, -1};
    }
    if (it->second >= 0) return {q, it->second};
    q = DyadicSquare::containing(x, q.k - 1);
  }
}

std::vector<SquareRef> CZDecomposition::lambda_of(const Point2& x) const {
  std::vector<SquareRef> out;
  const double lam = 1.0 + c_G_;
  std::vector<DyadicSquare> stack;
  const DyadicSquare base = DyadicSquare::containing(x, k0_);
  for (int di = 1; di >= -1; --di)
    for (int dj = 1; dj >= -1; --dj) stack.push_back({k0_, base.i + di, base.j + dj});
  while (!stack.empty()) {
    const DyadicSquare q = stack.back();
    stack.pop_back();
    if (!q.dilated(lam).contains(x)) continue;
    const auto it = nodes_.find(q);
    if (it == nodes_.end()) {
      if (q.k == k0_) out.push_back({q, -1});
      continue;
    }
    if (it->second >= 0) {
      out.push_back({q, it->second});
      continue;
    }
    for (int c = 3; c >= 0; --c) stack.push_back(q.child(c));
  }
  return out;
}

CZSquare CZDecomposition::square_of(const SquareRef& r) const {
  if (r.id >= 0) return at(r.id);
  CZSquare s;
  s.square = r.square;
  s.cls = CZClass::other;
  s.x_sharp = r.square.center();
  return s;
}

CZDecomposition build_cz(const PointIndex& idx, const std::vector<PALP>& palps, const Config& cfg) {
  cfg.validate();
  const int n = idx.size();
  if (static_cast<int>(palps.size()) != n) throw std::invalid_argument("build_cz: one PALP per point required");
  if (static_cast<int>(idx.weights().size()) != n) throw std::invalid_argument("build_cz: index carries no weights");

  CZDecomposition cz;
  cz.k0_ = cfg.cutoff_level();
  cz.c_G_ = cfg.c_G;
  cz.c0_ = cfg.c0;

  std::vector<DyadicSquare> tiles;
  tiles.reserve(static_cast<std::size_t>(n) * 25);
  for (const auto& p : idx.points()) {
    const DyadicSquare t = DyadicSquare::containing(p, cz.k0_);
    for (int di = -2; di <= 2; ++di)
      for (int dj = -2; dj <= 2; ++dj) tiles.push_back({cz.k0_, t.i + di, t.j + dj});
  }
  std::sort(tiles.begin(), tiles.end());
  tiles.erase(std::unique(tiles.begin(), tiles.end()), tiles.end());

  const double guard = n >= 2 ? idx.min_separation() / 1024.0 : 0.0;
  std::vector<DyadicSquare> stack;
  for (auto it = tiles.rbegin(); it != tiles.rend(); ++it) stack.push_back(*it);
  while (!stack.empty()) {
    const DyadicSquare q = stack.back();
    stack.pop_back();
    if (is_ok(idx, q, cfg)) {
      cz.nodes_.emplace(q, static_cast<int>(cz.squares_.size()));
      CZSquare s;
      s.square = q;
      cz.squares_.push_back(std::move(s));
      continue;
    }
    if (q.side() < guard) {
      std::ostringstream msg;
      msg << "build_cz: refinement passed the guard scale " << guard << " near (" << q.center().x << ", "
          << q.center().y << "); the data may contain near-coincident points";
      throw std::runtime_error(msg.str());
    }
    cz.nodes_.emplace(q, -1);
    ++cz.internal_;
    for (int c = 3; c >= 0; --c) stack.push_back(q.child(c));
  }

  const double cutoff_side = 1.0 / cfg.A2;
  const double slope = cone_slope(cfg);
  for (auto& s : cz.squares_) {
    const DyadicSquare& q = s.square;
    const double side = q.side();
    const bool near = !idx.empty_in(q.dilated(1.0 + cfg.c_G));
    const bool in5 = !idx.empty_in(q.dilated(5.0));
    if (near) s.cls = CZClass::sharpsharp;
    else if (in5) s.cls = CZClass::sharp_only;
    else if (side < cutoff_side) s.cls = CZClass::empty_small;
    else s.cls = CZClass::other;

    const auto rep = rep_query(idx, q);
    Point2 rep_point = q.center();
    if (rep) {
      s.rep = rep->index;
      s.rep_in_5q = rep->in_5q;
      rep_point = idx.point(rep->index);
    }
    Vec2 u = Vec2::UnitY();
    if (s.sharp()) {
      const auto [uq, up] = compute_uq(palps[static_cast<std::size_t>(rep->index)]);
      s.u_q = uq;
      s.u_q_perp = up;
      u = uq;
    }
    s.x_sharp = compute_xqs(q, rep, rep_point, u, slope);

    const double need = cfg.c0 * side;
    if (dist_to_data(idx, q, s.x_sharp) < need) {
      // the slab rule left x_sharp too close to the data; search a fixed candidate list in Q
      ++cz.fallbacks_;
      std::vector<Point2> cands;
      const Point2 c = q.center();
      cands.push_back(c - (side / 4.0) * u);
      cands.push_back(c + (side / 4.0) * Vec2(u.y(), -u.x()));
      cands.push_back(c - (side / 4.0) * Vec2(u.y(), -u.x()));
      const Point2 lo = q.lower();
      for (int a = 0; a < 8; ++a)
        for (int b = 0; b < 8; ++b) cands.push_back({lo.x + (a + 0.5) * side / 8.0, lo.y + (b + 0.5) * side / 8.0});
      double best = -1.0;
      for (const auto& p : cands) {
        const double d = dist_to_data(idx, q, p);
        if (d > best) {
          best = d;
          s.x_sharp = p;
        }
        if (d >= need) break;
      }
      if (best < need) throw std::runtime_error("build_cz: no point of a square keeps distance c0*side from the data");
    }

    if (s.cls == CZClass::sharpsharp) {
      const Vec2 up = *s.u_q_perp;
      std::vector<int> pts = points_in_dilated(idx, q, 1.0 + cfg.c_G);
      std::vector<std::pair<double, int>> pr;
      pr.reserve(pts.size());
      for (int i : pts) pr.emplace_back((idx.point(i) - rep_point).dot(up), i);
      std::sort(pr.begin(), pr.end());
      for (std::size_t t = 1; t < pr.size(); ++t)
        if (pr[t].first == pr[t - 1].first)
          throw std::runtime_error("build_cz: two data points of one square share an abscissa; raise A1");
      for (const auto& [t, i] : pr) {
        s.sorted_proj.push_back(t);
        s.proj_points.push_back(i);
      }
    }
  }

  for (auto& s : cz.squares_) {
    if (s.cls != CZClass::empty_small) continue;
    if (!s.rep) throw std::logic_error("build_cz: small empty square without data in 25Q");
    const SquareRef r = cz.locate(idx.point(*s.rep));
    if (r.id < 0 || !cz.at(r.id).sharp()) throw std::logic_error("build_cz: relay target is not sharp");
    s.mu_target = r.id;
  }
  return cz;
}

namespace {

constexpr char kMagic[8] = {'C', '2', 'P', 'C', 'Z', 'D', '\0', '\1'};
constexpr std::uint32_t kVersion = 1;

using bin::get;
using bin::put;

void put_square(std::ostream& os, const DyadicSquare& q) {
  put(os, static_cast<std::int32_t>(q.k));
  put(os, q.i);
  put(os, q.j);
}

DyadicSquare get_square(std::istream& is) {
  DyadicSquare q;
  q.k = get<std::int32_t>(is);
  q.i = get<std::int64_t>(is);
  q.j = get<std::int64_t>(is);
  return q;
}

void put_opt_vec(std::ostream& os, const std::optional<Vec2>& v) {
  put(os, static_cast<std::uint8_t>(v.has_value()));
  if (v) {
    put(os, v->x());
    put(os, v->y());
  }
}

std::optional<Vec2> get_opt_vec(std::istream& is) {
  if (!get<std::uint8_t>(is)) return std::nullopt;
  const double x = get<double>(is);
  const double y = get<double>(is);
  return Vec2(x, y);
}

}  // namespace

void CZDecomposition::write(std::ostream& os) const {
  os.write(kMagic, sizeof(kMagic));
  put(os, kVersion);
  put(os, static_cast<std::int32_t>(k0_));
  put(os, c_G_);
  put(os, c0_);
  put(os, static_cast<std::uint64_t>(internal_));
  put(os, static_cast<std::int32_t>(fallbacks_));
  put(os, static_cast<std::uint64_t>(squares_.size()));
  for (const auto& s : squares_) {
    put_square(os, s.square);
    put(os, static_cast<std::uint8_t>(s.cls));
    put(os, static_cast<std::int32_t>(s.rep.value_or(-1)));
    put(os, static_cast<std::uint8_t>(s.rep_in_5q));
    put_opt_vec(os, s.u_q);
    put_opt_vec(os, s.u_q_perp);
    put(os, s.x_sharp.x);
    put(os, s.x_sharp.y);
    bin::put_vec(os, s.sorted_proj);
    bin::put_vec(os, s.proj_points);
    put(os, static_cast<std::int32_t>(s.mu_target.value_or(-1)));
  }
  // subdivided squares, in sorted order for byte-stable output
  std::vector<DyadicSquare> inner;
  for (const auto& [q, id] : nodes_)
    if (id < 0) inner.push_back(q);
  std::sort(inner.begin(), inner.end());
  put(os, static_cast<std::uint64_t>(inner.size()));
  for (const auto& q : inner) put_square(os, q);
}

CZDecomposition CZDecomposition::read(std::istream& is) {
  char magic[sizeof(kMagic)];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw std::runtime_error("not a decomposition record");
  if (get<std::uint32_t>(is) != kVersion) throw std::runtime_error("unsupported decomposition format version");
  CZDecomposition cz;
  cz.k0_ = get<std::int32_t>(is);
  cz.c_G_ = get<double>(is);
  cz.c0_ = get<double>(is);
  cz.internal_ = get<std::uint64_t>(is);
  cz.fallbacks_ = get<std::int32_t>(is);
  const auto n = get<std::uint64_t>(is);
  cz.squares_.resize(n);
  for (std::size_t id = 0; id < n; ++id) {
    auto& s = cz.squares_[id];
    s.square = get_square(is);
    const auto cls = get<std::uint8_t>(is);
    if (cls > 3) throw std::runtime_error("decomposition record corrupt");
    s.cls = static_cast<CZClass>(cls);
    if (const int r = get<std::int32_t>(is); r >= 0) s.rep = r;
    s.rep_in_5q = get<std::uint8_t>(is) != 0;
    s.u_q = get_opt_vec(is);
    s.u_q_perp = get_opt_vec(is);
    s.x_sharp.x = get<double>(is);
    s.x_sharp.y = get<double>(is);
    s.sorted_proj = bin::get_vec<double>(is);
    s.proj_points = bin::get_vec<int>(is);
    if (const int m = get<std::int32_t>(is); m >= 0) s.mu_target = m;
    cz.nodes_.emplace(s.square, static_cast<int>(id));
  }
  const auto m = get<std::uint64_t>(is);
  for (std::uint64_t t = 0; t < m; ++t) cz.nodes_.emplace(get_square(is), -1);
  return cz;
}

}  // namespace c2plus
