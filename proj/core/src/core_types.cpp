#include "c2plus/core_types.hpp"

#include <algorithm>

namespace c2plus {

double jet1_eval(const Jet1& p, const Point2& y) { return p.value + p.grad.dot(y - p.base); }

double jet2_eval(const Jet2& p, const Point2& y) {
  const Vec2 d = y - p.base;
  return p.value + p.grad.dot(d) + 0.5 * d.dot(p.hess * d);
}

Jet1 jet1_rebase(const Jet1& p, const Point2& b) { return Jet1{b, jet1_eval(p, b), p.grad}; }

Jet2 jet2_rebase(const Jet2& p, const Point2& b) {
  const Vec2 d = b - p.base;
  Jet2 out;
  out.base = b;
  out.value = p.value + p.grad.dot(d) + 0.5 * d.dot(p.hess * d);
  out.grad = p.grad + p.hess * d;
  out.hess = p.hess;
  return out;
}

Jet2 jet2_multiply(const Jet2& p, const Jet2& r) {
  if (p.base != r.base) throw std::invalid_argument("jet2_multiply: jets anchored at different points");
  Jet2 out;
  out.base = p.base;
  out.value = p.value * r.value;
  out.grad = p.value * r.grad + r.value * p.grad;
  const Mat2 cross = p.grad * r.grad.transpose();
  out.hess = p.value * r.hess + r.value * p.hess + cross + cross.transpose();
  return out;
}

Jet2 jet2_add(const Jet2& p, const Jet2& r) {
  if (p.base != r.base) throw std::invalid_argument("jet2_add: jets anchored at different points");
  Jet2 out;
  out.base = p.base;
  out.value = p.value + r.value;
  out.grad = p.grad + r.grad;
  out.hess = p.hess + r.hess;
  return out;
}

Jet2 jet2_scale(const Jet2& p, double s) {
  Jet2 out = p;
  out.value *= s;
  out.grad *= s;
  out.hess *= s;
  return out;
}

Jet2 jet2_reciprocal(const Jet2& p) {
  if (p.value == 0.0) throw std::domain_error("jet2_reciprocal: zero value");
  const double v = p.value;
  Jet2 out;
  out.base = p.base;
  out.value = 1.0 / v;
  out.grad = -p.grad / (v * v);
  out.hess = -p.hess / (v * v) + 2.0 * (p.grad * p.grad.transpose()) / (v * v * v);
  return out;
}

Jet2 jet2_compose_1d(const Jet1D2& g, const Jet2& h1) {
  if (std::abs(g.t - h1.value) > 1e-9 * (1.0 + std::abs(g.t)))
    throw std::invalid_argument("jet2_compose_1d: outer jet not anchored at inner value");
  Jet2 out;
  out.base = h1.base;
  out.value = g.value;
  out.grad = g.d1 * h1.grad;
  out.hess = g.d2 * (h1.grad * h1.grad.transpose()) + g.d1 * h1.hess;
  return out;
}

WhitneyField::WhitneyField(std::vector<Jet1> entries) : entries_(std::move(entries)) {
  std::vector<Point2> pts;
  pts.reserve(entries_.size());
  for (const auto& e : entries_) pts.push_back(e.base);
  std::sort(pts.begin(), pts.end());
  if (std::adjacent_find(pts.begin(), pts.end()) != pts.end())
    throw std::invalid_argument("WhitneyField: duplicate anchor point");
}

void WhitneyField::add(const Jet1& jet) {
  for (const auto& e : entries_)
    if (e.base == jet.base) throw std::invalid_argument("WhitneyField: duplicate anchor point");
  entries_.push_back(jet);
}

namespace {

template <typename Fn>
void for_each_cross_term(const WhitneyField& f, Fn&& fn) {
  const auto& e = f.entries();
  for (std::size_t a = 0; a < e.size(); ++a) {
    for (std::size_t b = 0; b < e.size(); ++b) {
      if (a == b) continue;
      const Point2 x = e[a].base;
      const double d = distance(x, e[b].base);
      fn(std::abs(e[a].value - jet1_eval(e[b], x)) / (d * d));
      fn(std::abs(e[a].grad.x() - e[b].grad.x()) / d);
      fn(std::abs(e[a].grad.y() - e[b].grad.y()) / d);
    }
  }
}

}  // namespace

double whitney_norm(const WhitneyField& f) {
  if (f.empty()) throw std::invalid_argument("whitney_norm: empty field");
  double single = 0.0;
  for (const auto& p : f.entries())
    single = std::max({single, std::abs(p.value), std::abs(p.grad.x()), std::abs(p.grad.y())});
  double cross = 0.0;
  for_each_cross_term(f, [&](double t) { cross = std::max(cross, t); });
  return single + cross;
}

double wplus_excess(const Jet1& p) {
  const double g2 = p.grad.squaredNorm();
  if (p.value > 0.0) return g2 / (4.0 * p.value);
  if (p.value == 0.0 && g2 == 0.0) return 0.0;
  return kInf;
}

double wplus_norm(const WhitneyField& f) {
  double excess = 0.0;
  for (const auto& p : f.entries()) excess = std::max(excess, wplus_excess(p));
  if (excess == kInf) return kInf;
  return whitney_norm(f) + excess;
}

double q_functional(const WhitneyField& f) {
  double sum = 0.0;
  for (const auto& p : f.entries()) sum += std::abs(p.value) + std::abs(p.grad.x()) + std::abs(p.grad.y());
  for_each_cross_term(f, [&](double t) { sum += t; });
  return sum;
}

double m_functional(const WhitneyField& f) {
  double sum = 0.0;
  for (const auto& p : f.entries()) {
    if (p.value < 0.0) return kInf;
    const double g2 = p.grad.squaredNorm();
    if (g2 == 0.0) continue;
    if (p.value == 0.0) return kInf;
    sum += g2 / p.value;
  }
  return sum;
}

Jet2 singleton_extension_jet(const Jet1& p, const Point2& query) {
  const double k = wplus_excess(p);
  if (k == kInf) throw std::domain_error("singleton_extension_jet: jet admits no nonnegative extension");
  const Vec2 d = query - p.base;
  Jet2 out;
  out.base = query;
  out.value = p.value + p.grad.dot(d) + k * d.squaredNorm();
  out.grad = p.grad + 2.0 * k * d;
  out.hess = 2.0 * k * Mat2::Identity();
  return out;
}

}  // namespace c2plus
