#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace c2plus {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2& a, const Point2& b) { return a.x == b.x && a.y == b.y; }
  friend bool operator!=(const Point2& a, const Point2& b) { return !(a == b); }
  // lexicographic: x first, then y
  friend bool operator<(const Point2& a, const Point2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }
};

inline Vec2 operator-(const Point2& a, const Point2& b) { return Vec2(a.x - b.x, a.y - b.y); }
inline Point2 operator+(const Point2& a, const Vec2& v) { return {a.x + v.x(), a.y + v.y()}; }
inline Point2 operator-(const Point2& a, const Vec2& v) { return {a.x - v.x(), a.y - v.y()}; }
inline double distance(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }
inline double distance_sq(const Point2& a, const Point2& b) {
  const double dx = a.x - b.x, dy = a.y - b.y;
  return dx * dx + dy * dy;
}

// Affine polynomial P(y) = value + grad . (y - base).
struct Jet1 {
  Point2 base;
  double value = 0.0;
  Vec2 grad = Vec2::Zero();
};

// Quadratic Taylor form; hess(i,j) holds the mixed partial d_i d_j.
struct Jet2 {
  Point2 base;
  double value = 0.0;
  Vec2 grad = Vec2::Zero();
  Mat2 hess = Mat2::Zero();

  static Jet2 constant(const Point2& base, double v) {
    Jet2 j;
    j.base = base;
    j.value = v;
    return j;
  }
  static Jet2 from_jet1(const Jet1& p) {
    Jet2 j;
    j.base = p.base;
    j.value = p.value;
    j.grad = p.grad;
    return j;
  }
  Jet1 truncate() const { return Jet1{base, value, grad}; }
};

// Second-order jet of a function of one variable at t.
struct Jet1D2 {
  double t = 0.0;
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

double jet1_eval(const Jet1& p, const Point2& y);
double jet2_eval(const Jet2& p, const Point2& y);
Jet1 jet1_rebase(const Jet1& p, const Point2& b);

// Re-expands the quadratic polynomial at a new anchor.
Jet2 jet2_rebase(const Jet2& p, const Point2& b);

// Truncated product at the common base. Throws std::invalid_argument on mismatched bases.
Jet2 jet2_multiply(const Jet2& p, const Jet2& r);
Jet2 jet2_add(const Jet2& p, const Jet2& r);
Jet2 jet2_scale(const Jet2& p, double s);
// Jet of 1/P; requires P(base) != 0.
Jet2 jet2_reciprocal(const Jet2& p);

// Jet of y -> g(h1(y)); g must be anchored at h1.value.
Jet2 jet2_compose_1d(const Jet1D2& g, const Jet2& h1);

class WhitneyField {
 public:
  WhitneyField() = default;
  // Throws std::invalid_argument on duplicate anchors.
  explicit WhitneyField(std::vector<Jet1> entries);

  void add(const Jet1& jet);
  const std::vector<Jet1>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const Jet1& operator[](std::size_t i) const { return entries_[i]; }

 private:
  std::vector<Jet1> entries_;
};

double whitney_norm(const WhitneyField& f);
// inf{K >= 0 : P(y) + K|y - base|^2 >= 0 for all y}
double wplus_excess(const Jet1& p);
double wplus_norm(const WhitneyField& f);
double q_functional(const WhitneyField& f);
double m_functional(const WhitneyField& f);

// Two-jet at the query point of y -> P(y) + K|y - base|^2 with K = wplus_excess(P).
// Throws std::domain_error when the excess is infinite.
Jet2 singleton_extension_jet(const Jet1& p, const Point2& query);

}  // namespace c2plus
