#include "c2plus/one_dim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace c2plus {

void SortedSamples::validate(bool nonneg) const {
  if (t.size() != v.size()) throw std::invalid_argument("SortedSamples: size mismatch");
  if (t.empty()) throw std::invalid_argument("SortedSamples: no samples");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i]) || !std::isfinite(v[i])) throw std::invalid_argument("SortedSamples: non-finite entry");
    if (i > 0 && !(t[i - 1] < t[i])) throw std::invalid_argument("SortedSamples: abscissas not strictly increasing");
    if (nonneg && v[i] < 0.0) throw std::invalid_argument("SortedSamples: negative value");
  }
}

Ramp smooth_ramp(double x) {
  if (x <= 0.0) return {0.0, 0.0, 0.0};
  if (x >= 1.0) return {1.0, 0.0, 0.0};
  const double x2 = x * x, x3 = x2 * x;
  return {x3 * (10.0 - 15.0 * x + 6.0 * x2), 30.0 * x2 * (1.0 - x) * (1.0 - x), 60.0 * x * (1.0 - x) * (1.0 - 2.0 * x)};
}

std::vector<int> depth_set_1d(const std::vector<double>& t, double x) {
  const int n = static_cast<int>(t.size());
  std::vector<int> out;
  if (n <= 3) {
    for (int i = 0; i < n; ++i) out.push_back(i);
    return out;
  }
  if (x <= t[1]) return {0, 1, 2};
  if (x >= t[static_cast<std::size_t>(n - 2)]) return {n - 3, n - 2, n - 1};
  // t[i] <= x < t[i+1] with 1 <= i <= n-3
  const int i = static_cast<int>(std::upper_bound(t.begin(), t.end(), x) - t.begin()) - 1;
  return {i - 1, i, i + 1, i + 2};
}

namespace {

// q(s) = v + d (s - t0) + k (s - t0)^2
struct NodeQuad {
  double t0, v, d, k;
  Jet1D2 at(double s) const {
    const double h = s - t0;
    return {s, v + d * h + k * h * h, d + 2.0 * k * h, 2.0 * k};
  }
};

// (1 - w) a + w b with w a ramp whose derivatives are given in s
Jet1D2 mix(const Jet1D2& a, const Jet1D2& b, double w, double w1, double w2) {
  const double dv = b.value - a.value, dd = b.d1 - a.d1;
  return {a.t, a.value + w * dv, a.d1 + w * dd + w1 * dv, a.d2 + w * (b.d2 - a.d2) + 2.0 * w1 * dd + w2 * dv};
}

// Node quadratics blended with plateaus of a quarter interval at each node; constant beyond the
// ends.
Jet1D2 blend_nodes(const std::vector<NodeQuad>& q, double s) {
  const std::size_t n = q.size();
  if (s <= q.front().t0) return q.front().at(s);
  if (s >= q.back().t0) return q.back().at(s);
  std::size_t i = 0;
  while (i + 2 < n && s >= q[i + 1].t0) ++i;
  const double h = q[i + 1].t0 - q[i].t0;
  const double x = (s - q[i].t0) / h;
  const Ramp r = smooth_ramp(2.0 * x - 0.5);
  if (r.w == 0.0 && r.d1 == 0.0 && r.d2 == 0.0) return q[i].at(s);
  if (r.w == 1.0 && r.d1 == 0.0 && r.d2 == 0.0) return q[i + 1].at(s);
  return mix(q[i].at(s), q[i + 1].at(s), r.w, r.d1 * 2.0 / h, r.d2 * 4.0 / (h * h));
}

SortedSamples window(const SortedSamples& s, int first, int count) {
  SortedSamples w;
  w.t.assign(s.t.begin() + first, s.t.begin() + first + count);
  w.v.assign(s.v.begin() + first, s.v.begin() + first + count);
  return w;
}

template <typename Base>
Jet1D2 windowed(const SortedSamples& s, double x, Base&& base) {
  const int n = s.size();
  if (n <= 3) return base(s, x);
  const auto& t = s.t;
  if (x < t[1]) return base(window(s, 0, 3), x);
  if (x >= t[static_cast<std::size_t>(n - 2)]) return base(window(s, n - 3, 3), x);
  const int j = static_cast<int>(std::upper_bound(t.begin(), t.end(), x) - t.begin()) - 1;
  const double h = t[static_cast<std::size_t>(j + 1)] - t[static_cast<std::size_t>(j)];
  const Ramp r = smooth_ramp((x - t[static_cast<std::size_t>(j)]) / h);
  const Jet1D2 left = base(window(s, j - 1, 3), x);
  if (r.w == 0.0 && r.d1 == 0.0 && r.d2 == 0.0) return left;
  const Jet1D2 right = base(window(s, j, 3), x);
  return mix(left, right, r.w, r.d1 / h, r.d2 / (h * h));
}

}  // namespace

std::vector<double> nonneg_slopes(const SortedSamples& s, const QPOptions& qp) {
  s.validate(true);
  const int n = s.size();
  std::vector<int> var(static_cast<std::size_t>(n), -1);
  int dim = 0;
  for (int i = 0; i < n; ++i)
    if (s.v[static_cast<std::size_t>(i)] > 0.0) var[static_cast<std::size_t>(i)] = dim++;
  std::vector<double> d(static_cast<std::size_t>(n), 0.0);
  if (dim == 0) return d;

  // rows: coefficients on the slope variables plus a constant
  struct Row {
    std::vector<std::pair<int, double>> a;
    double c;
  };
  std::vector<Row> rows;
  for (int i = 0; i < n; ++i)
    if (var[static_cast<std::size_t>(i)] >= 0) rows.push_back({{{var[static_cast<std::size_t>(i)], 1.0}}, 0.0});
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double h = s.t[static_cast<std::size_t>(i)] - s.t[static_cast<std::size_t>(j)];
      const double vi = s.v[static_cast<std::size_t>(i)], vj = s.v[static_cast<std::size_t>(j)];
      // |v_i - v_j - d_j h| / h^2
      Row r{{}, (vi - vj) / (h * h)};
      if (var[static_cast<std::size_t>(j)] >= 0) r.a.push_back({var[static_cast<std::size_t>(j)], -h / (h * h)});
      if (!r.a.empty()) rows.push_back(r);
      // |d_i - d_j| / |h|
      Row g{{}, 0.0};
      if (var[static_cast<std::size_t>(i)] >= 0) g.a.push_back({var[static_cast<std::size_t>(i)], 1.0 / std::abs(h)});
      if (var[static_cast<std::size_t>(j)] >= 0) g.a.push_back({var[static_cast<std::size_t>(j)], -1.0 / std::abs(h)});
      if (!g.a.empty()) rows.push_back(g);
    }
  }
  MatX L = MatX::Zero(static_cast<Eigen::Index>(rows.size()), dim);
  VecX c(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (const auto& [k, a] : rows[r].a) L(static_cast<Eigen::Index>(r), k) += a;
    c(static_cast<Eigen::Index>(r)) = rows[r].c;
  }
  MatX Q = MatX::Zero(dim, dim);
  for (int i = 0; i < n; ++i)
    if (var[static_cast<std::size_t>(i)] >= 0) Q(var[static_cast<std::size_t>(i)], var[static_cast<std::size_t>(i)]) = 1.0 / s.v[static_cast<std::size_t>(i)];
  const QPSolution sol = solve_quad_l1(QuadL1Problem::unconstrained(Q, VecX::Zero(dim), L, c), qp);
  for (int i = 0; i < n; ++i)
    if (var[static_cast<std::size_t>(i)] >= 0) d[static_cast<std::size_t>(i)] = sol.beta(var[static_cast<std::size_t>(i)]);
  return d;
}

std::vector<double> linear_slopes(const SortedSamples& s) {
  s.validate(false);
  const int n = s.size();
  std::vector<double> d(static_cast<std::size_t>(n), 0.0);
  if (n == 1) return d;
  const int rows = 2 * n * (n - 1);
  MatX A = MatX::Zero(rows, n);
  VecX b = VecX::Zero(rows);
  int r = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double h = s.t[static_cast<std::size_t>(i)] - s.t[static_cast<std::size_t>(j)];
      A(r, j) = h / (h * h);
      b(r) = (s.v[static_cast<std::size_t>(i)] - s.v[static_cast<std::size_t>(j)]) / (h * h);
      ++r;
      A(r, i) = 1.0 / std::abs(h);
      A(r, j) = -1.0 / std::abs(h);
      ++r;
    }
  }
  const VecX sol = A.colPivHouseholderQr().solve(b);
  for (int i = 0; i < n; ++i) d[static_cast<std::size_t>(i)] = sol(i);
  return d;
}

Jet1D2 oned_base_nonneg(const SortedSamples& s, double t, const QPOptions& qp) {
  if (s.size() > 3) throw std::invalid_argument("oned_base_nonneg: at most three samples");
  const std::vector<double> d = nonneg_slopes(s, qp);
  std::vector<NodeQuad> q;
  for (int i = 0; i < s.size(); ++i) {
    const double v = s.v[static_cast<std::size_t>(i)], di = d[static_cast<std::size_t>(i)];
    q.push_back({s.t[static_cast<std::size_t>(i)], v, di, v > 0.0 ? di * di / (4.0 * v) : 0.0});
  }
  return blend_nodes(q, t);
}

Jet1D2 oned_base_linear(const SortedSamples& s, double t) {
  if (s.size() > 3) throw std::invalid_argument("oned_base_linear: at most three samples");
  const std::vector<double> d = linear_slopes(s);
  std::vector<NodeQuad> q;
  for (int i = 0; i < s.size(); ++i)
    q.push_back({s.t[static_cast<std::size_t>(i)], s.v[static_cast<std::size_t>(i)], d[static_cast<std::size_t>(i)], 0.0});
  return blend_nodes(q, t);
}

Jet1D2 oned_nonneg_jet(const SortedSamples& s, double t, const QPOptions& qp) {
  s.validate(true);
  return windowed(s, t, [&](const SortedSamples& w, double x) { return oned_base_nonneg(w, x, qp); });
}

Jet1D2 oned_linear_jet(const SortedSamples& s, double t) {
  s.validate(false);
  return windowed(s, t, [](const SortedSamples& w, double x) { return oned_base_linear(w, x); });
}

}  // namespace c2plus
