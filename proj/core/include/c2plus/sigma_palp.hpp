#pragma once

#include "c2plus/core_types.hpp"
#include "c2plus/geometry_index.hpp"
#include "c2plus/lp.hpp"

#include <vector>

namespace c2plus {

inline constexpr int kDefaultDirections = 64;
inline constexpr int kDefaultDepth = 16;

// Inequalities describing Whitney fields on S that vanish on S and have whitney_norm <= 1.
// Variables: gradient at S[k] in slots 2k, 2k+1, then the single-term bound a and the cross-term
// bound b. S[0] is the anchor.
std::vector<SparseIneq> sigma_constraints(const std::vector<Point2>& s);

// max r such that r u is the anchor gradient of such a field; solved directly with solve_lp.
// The anchor x is added to S when absent.
double sigma_gauge(const Point2& x, const std::vector<Point2>& s, const Vec2& u);

struct SigmaBody {
  Point2 anchor;
  std::vector<Vec2> vertices;   // exact symmetric polygon of anchor gradients, counter-clockwise
  std::vector<Vec2> directions; // sampled unit directions over the half circle
  std::vector<double> gauges;
  Vec2 u_max = Vec2::UnitX();
  double diameter = 0.0;

  // Radial gauge of the polygon in direction u (not necessarily unit).
  double gauge(const Vec2& u) const;
};

SigmaBody build_sigma_body(const Point2& x, const std::vector<Point2>& s, int m_dir = kDefaultDirections);

struct PALP {
  Point2 anchor;
  int anchor_index = -1;
  std::vector<int> depth_set;  // indices into E, anchor first
  Vec2 u_max = Vec2::UnitX();
  Vec2 u_perp = Vec2::UnitY();
  double eps1 = 0.0;  // tolerance on the u_max gradient component
  double eps2 = 0.0;  // tolerance on the perpendicular component
  double diameter = 0.0;

  // Gauge of the parallelogram {|u_max . g| <= eps1, |u_perp . g| <= eps2} in direction u.
  double gauge(const Vec2& u) const;
};

PALP build_palp(const PointIndex& idx, int x, int k_depth = kDefaultDepth, int m_dir = kDefaultDirections);

// |lambda_i(P)| <= M eps_i for the two gradient functionals and |P(anchor)| <= 1e-12.
bool palp_contains(const PALP& palp, const Jet1& p, double m);

}  // namespace c2plus
