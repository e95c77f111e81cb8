#pragma once

#include "c2plus/config.hpp"
#include "c2plus/geometry_index.hpp"
#include "c2plus/sigma_palp.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace c2plus {

enum class CZClass : unsigned char { sharpsharp, sharp_only, empty_small, other };
std::string to_string(CZClass c);

struct CZSquare {
  DyadicSquare square;
  CZClass cls = CZClass::other;
  std::optional<int> rep;          // index into E
  bool rep_in_5q = false;
  std::optional<Vec2> u_q;         // sharp squares only
  std::optional<Vec2> u_q_perp;    // det[u_q_perp, u_q] = +1
  Point2 x_sharp;
  std::vector<double> sorted_proj; // sharpsharp only: abscissas of E in (1+c_G)Q relative to rep
  std::vector<int> proj_points;    // the matching indices into E
  std::optional<int> mu_target;    // empty_small only: id of a sharp square

  double side() const { return square.side(); }
  bool sharp() const { return cls == CZClass::sharpsharp || cls == CZClass::sharp_only; }
};

// A member of Lambda(x): a materialized square (id >= 0) or an implicit coarsest-scale tile
// whose 5-dilation holds no data (id < 0).
struct SquareRef {
  DyadicSquare square;
  int id = -1;
};

// PALP diameters in point order, used as the weights of the OK test.
std::vector<double> diameter_weights(const std::vector<PALP>& palps);

// The OK test: (#(E in 5Q) <= 1 or every such point has weight >= A1 side) and side <= 1/A2.
// `idx` must carry diameter_weights as its weights.
bool is_ok(const PointIndex& idx, const DyadicSquare& q, const Config& cfg);

// Straight-line cone {y : |(y - x0) . u| <= s |y - x0|}; returns the distance from p to it.
double distance_to_cone(const Point2& p, const Point2& x0, const Vec2& u, double s);

class CZDecomposition {
 public:
  CZDecomposition() = default;

  const std::vector<CZSquare>& squares() const { return squares_; }
  const CZSquare& at(int id) const { return squares_[static_cast<std::size_t>(id)]; }
  int cutoff_level() const { return k0_; }

  // Square of the family containing x.
  SquareRef locate(const Point2& x) const;
  // Every member whose (1 + c_G)-dilation contains x.
  std::vector<SquareRef> lambda_of(const Point2& x) const;
  // Materialized or implicit tile as a square record (implicit tiles are class other).
  CZSquare square_of(const SquareRef& r) const;

  // Total subdivided (non-OK) squares visited during the build.
  std::size_t internal_count() const { return internal_; }
  double c_G() const { return c_G_; }
  double c0() const { return c0_; }
  // Squares whose x_sharp needed the fallback search.
  int xsharp_fallbacks() const { return fallbacks_; }

  void write(std::ostream& os) const;
  static CZDecomposition read(std::istream& is);

 private:
  friend CZDecomposition build_cz(const PointIndex&, const std::vector<PALP>&, const Config&);

  int k0_ = 0;
  double c_G_ = 1.0 / 32.0;
  double c0_ = 1.0 / 1024.0;
  std::vector<CZSquare> squares_;
  // every visited square: leaf id, or -1 for a subdivided square
  std::unordered_map<DyadicSquare, int, DyadicSquareHash> nodes_;
  std::size_t internal_ = 0;
  int fallbacks_ = 0;
};

// Maximal OK squares, refined top-down from the coarsest tiles whose 5-dilation meets E.
// `idx` must carry diameter_weights(palps). Throws std::runtime_error when refinement passes the
// guard scale min_separation / 2^10, or when two points of a sharpsharp square share an abscissa.
CZDecomposition build_cz(const PointIndex& idx, const std::vector<PALP>& palps, const Config& cfg);

std::pair<Vec2, Vec2> compute_uq(const PALP& rep_palp);
// x_sharp per the slab rule, before the distance postcondition is enforced.
Point2 compute_xqs(const DyadicSquare& q, const std::optional<RepResult>& rep, const Point2& rep_point,
                   const Vec2& u_q, double cone_slope);

}  // namespace c2plus
