#include "c2plus/sigma_palp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace c2plus {

namespace {

SparseIneq normalized(std::vector<int> idx, std::vector<double> val, double rhs) {
  double m = 0.0;
  for (double v : val) m = std::max(m, std::abs(v));
  if (m > 0.0)
    for (double& v : val) v /= m;
  return SparseIneq{std::move(idx), std::move(val), m > 0.0 ? rhs / m : rhs};
}

}  // namespace

std::vector<SparseIneq> sigma_constraints(const std::vector<Point2>& s) {
  const int m = static_cast<int>(s.size());
  const int a = 2 * m, b = 2 * m + 1;
  std::vector<SparseIneq> rows;
  rows.reserve(static_cast<std::size_t>(4 * m + 4 * m * (m - 1) + 3));
  // single terms |g_{y,i}| <= a; the first 2m rows are tight at the origin
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < 2; ++i) rows.push_back({{2 * k + i, a}, {1.0, -1.0}, 0.0});
  rows.push_back({{a}, {-1.0}, 0.0});
  rows.push_back({{b}, {-1.0}, 0.0});
  rows.push_back({{a, b}, {1.0, 1.0}, 1.0});
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < 2; ++i) rows.push_back({{2 * k + i, a}, {-1.0, -1.0}, 0.0});
  for (int y = 0; y < m; ++y) {
    for (int z = y + 1; z < m; ++z) {
      const Vec2 d = s[static_cast<std::size_t>(y)] - s[static_cast<std::size_t>(z)];
      const double d2 = d.squaredNorm(), dn = std::sqrt(d2);
      for (double sg : {1.0, -1.0}) {
        // |P^z(y)| / |y-z|^2 = |g_z . (y - z)| / |y-z|^2 and the symmetric term
        rows.push_back(normalized({2 * z, 2 * z + 1, b}, {sg * d.x() / d2, sg * d.y() / d2, -1.0}, 0.0));
        rows.push_back(normalized({2 * y, 2 * y + 1, b}, {-sg * d.x() / d2, -sg * d.y() / d2, -1.0}, 0.0));
        for (int i = 0; i < 2; ++i)
          rows.push_back(normalized({2 * y + i, 2 * z + i, b}, {sg / dn, -sg / dn, -1.0}, 0.0));
      }
    }
  }
  return rows;
}

namespace {

std::vector<Point2> with_anchor_first(const Point2& x, const std::vector<Point2>& s) {
  std::vector<Point2> out{x};
  for (const auto& p : s)
    if (p != x) out.push_back(p);
  return out;
}

}  // namespace

double sigma_gauge(const Point2& x, const std::vector<Point2>& s, const Vec2& u) {
  const std::vector<Point2> pts = with_anchor_first(x, s);
  const auto rows = sigma_constraints(pts);
  const int nv = 2 * static_cast<int>(pts.size()) + 2;
  const int r = nv;  // extra variable
  MatX G = MatX::Zero(static_cast<Eigen::Index>(rows.size()), nv + 1);
  VecX h(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t t = 0; t < rows[i].idx.size(); ++t) G(static_cast<Eigen::Index>(i), rows[i].idx[t]) = rows[i].val[t];
    h(static_cast<Eigen::Index>(i)) = rows[i].rhs;
  }
  MatX A = MatX::Zero(2, nv + 1);
  A(0, 0) = 1.0;
  A(0, r) = -u.x();
  A(1, 1) = 1.0;
  A(1, r) = -u.y();
  VecX c = VecX::Zero(nv + 1);
  c(r) = 1.0;
  const LPResult res = solve_lp(c, G, h, A, VecX::Zero(2));
  if (res.status != LPStatus::optimal) throw std::runtime_error("sigma_gauge: LP " + to_string(res.status));
  return std::max(res.objective, 0.0);
}

double SigmaBody::gauge(const Vec2& u) const {
  double g = kInf;
  const std::size_t nv = vertices.size();
  for (std::size_t i = 0; i < nv; ++i) {
    const Vec2& p = vertices[i];
    const Vec2& q = vertices[(i + 1) % nv];
    const Vec2 e = q - p;
    const Vec2 n(e.y(), -e.x());  // outward for counter-clockwise order
    const double nu = n.dot(u);
    if (nu <= 0.0) continue;
    g = std::min(g, n.dot(p) / nu);
  }
  return std::max(g, 0.0);
}

SigmaBody build_sigma_body(const Point2& x, const std::vector<Point2>& s, int m_dir) {
  if (m_dir < 1) throw std::invalid_argument("build_sigma_body: m_dir must be positive");
  const std::vector<Point2> pts = with_anchor_first(x, s);
  const int nv = 2 * static_cast<int>(pts.size()) + 2;
  VertexSimplex lp(nv, sigma_constraints(pts));
  {
    std::vector<int> active(static_cast<std::size_t>(nv));
    for (int i = 0; i < nv - 2; ++i) active[static_cast<std::size_t>(i)] = i;
    active[static_cast<std::size_t>(nv - 2)] = nv - 2;  // -a <= 0
    active[static_cast<std::size_t>(nv - 1)] = nv - 1;  // -b <= 0
    lp.start(VecX::Zero(nv), active);
  }
  VecX c = VecX::Zero(nv);
  auto support = [&](const Vec2& n) {
    c(0) = n.x();
    c(1) = n.y();
    const LPStatus st = lp.maximize(c);
    if (st != LPStatus::optimal) throw std::runtime_error("build_sigma_body: support LP " + to_string(st));
    return Vec2(lp.point()(0), lp.point()(1));
  };

  // upper half chain from the e1 support vertex to its mirror image, refined edge by edge
  const Vec2 v0 = support(Vec2::UnitX());
  const Vec2 vt = support(Vec2::UnitY());
  std::vector<Vec2> chain{v0, vt, -v0};
  std::size_t i = 0;
  int guard = 0;
  while (i + 1 < chain.size() && guard++ < 4096) {
    const Vec2 p = chain[i], q = chain[i + 1];
    const Vec2 e = q - p;
    const double scale = std::max(p.norm(), q.norm());
    if (e.norm() <= 1e-12 * scale) {
      chain.erase(chain.begin() + static_cast<std::ptrdiff_t>(i) + 1);
      continue;
    }
    const Vec2 n = Vec2(e.y(), -e.x()).normalized();
    const Vec2 w = support(n);
    if (n.dot(w) > n.dot(p) + 1e-10 * scale) {
      chain.insert(chain.begin() + static_cast<std::ptrdiff_t>(i) + 1, w);
    } else {
      ++i;
    }
  }
  SigmaBody body;
  body.anchor = x;
  // chain runs v0 -> -v0 through the upper half; complete by symmetry
  body.vertices.assign(chain.begin(), chain.end() - 1);
  for (std::size_t k = 0; k + 1 < chain.size(); ++k) body.vertices.push_back(-chain[k]);
  // drop collinear points so edges are proper
  std::vector<Vec2> clean;
  const std::size_t nvx = body.vertices.size();
  for (std::size_t k = 0; k < nvx; ++k) {
    const Vec2& a = body.vertices[(k + nvx - 1) % nvx];
    const Vec2& b = body.vertices[k];
    const Vec2& d = body.vertices[(k + 1) % nvx];
    const Vec2 e1 = b - a, e2 = d - b;
    const double cross = e1.x() * e2.y() - e1.y() * e2.x();
    if (cross > 1e-14 * std::max(1e-300, e1.norm() * e2.norm())) clean.push_back(b);
  }
  if (clean.size() >= 3) body.vertices = std::move(clean);

  body.directions.reserve(static_cast<std::size_t>(m_dir));
  body.gauges.reserve(static_cast<std::size_t>(m_dir));
  double best = -1.0;
  for (int k = 0; k < m_dir; ++k) {
    const double th = std::numbers::pi * k / m_dir;
    const Vec2 u(std::cos(th), std::sin(th));
    const double g = body.gauge(u);
    body.directions.push_back(u);
    body.gauges.push_back(g);
    if (g > best) {  // strict: ties keep the smallest angle
      best = g;
      body.u_max = u;
    }
  }
  body.diameter = 2.0 * best;
  return body;
}

double PALP::gauge(const Vec2& u) const {
  const double a = std::abs(u_max.dot(u)), b = std::abs(u_perp.dot(u));
  double g = kInf;
  if (a > 0.0) g = std::min(g, eps1 / a);
  if (b > 0.0) g = std::min(g, eps2 / b);
  return g;
}

PALP build_palp(const PointIndex& idx, int x, int k_depth, int m_dir) {
  PALP palp;
  palp.anchor_index = x;
  palp.anchor = idx.point(x);
  palp.depth_set = idx.k_nearest(palp.anchor, k_depth);
  std::vector<Point2> s;
  s.reserve(palp.depth_set.size());
  for (int i : palp.depth_set) s.push_back(idx.point(i));
  const SigmaBody body = build_sigma_body(palp.anchor, s, m_dir);
  palp.u_max = body.u_max;
  palp.u_perp = Vec2(body.u_max.y(), -body.u_max.x());
  palp.eps1 = body.gauge(palp.u_max);
  palp.eps2 = body.gauge(palp.u_perp);
  palp.diameter = body.diameter;
  return palp;
}

bool palp_contains(const PALP& palp, const Jet1& p, double m) {
  const Jet1 at = jet1_rebase(p, palp.anchor);
  if (std::abs(at.value) > 1e-12) return false;
  return std::abs(palp.u_max.dot(at.grad)) <= m * palp.eps1 && std::abs(palp.u_perp.dot(at.grad)) <= m * palp.eps2;
}

}  // namespace c2plus
