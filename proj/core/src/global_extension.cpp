#include "c2plus/global_extension.hpp"

#include "c2plus/one_dim.hpp"
#include "c2plus/small_trace.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace c2plus {

namespace {

struct Profile {
  double h, d1, d2;  // derivatives in the scaled coordinate
};

// One for |s| <= 1/2 - c/4, zero for |s| >= 1/2 + c/4.
Profile profile(double s, double c) {
  const double a0 = 0.5 - 0.25 * c, w = 0.5 * c;
  const double a = std::abs(s);
  if (a <= a0) return {1.0, 0.0, 0.0};
  if (a >= a0 + w) return {0.0, 0.0, 0.0};
  const Ramp r = smooth_ramp((a - a0) / w);
  const double sgn = s < 0 ? -1.0 : 1.0;
  return {1.0 - r.w, -sgn * r.d1 / w, -r.d2 / (w * w)};
}

// Sum of the pair terms of q_functional with the first jet from xs and the second from ys.
double cross_terms(const std::vector<Jet1>& xs, const std::vector<Jet1>& ys) {
  double sum = 0.0;
  for (const Jet1& p : xs)
    for (const Jet1& q : ys) {
      const Vec2 v = p.base - q.base;
      const double d2 = v.squaredNorm(), d = std::sqrt(d2);
      sum += std::abs(p.value - q.value - q.grad.dot(v)) / d2 + (std::abs(p.grad.x() - q.grad.x()) + std::abs(p.grad.y() - q.grad.y())) / d;
    }
  return sum;
}

std::vector<int> case_depth_set(const State& st, const SquareRef& r, const Point2& x) {
  if (r.id < 0) return {};
  const CZSquare& q = st.cz.at(r.id);
  switch (q.cls) {
    case CZClass::sharpsharp: return local_depth_set(st, r.id, x);
    case CZClass::sharp_only: return ssq(st, r.id).data;
    case CZClass::empty_small: return ssq(st, *q.mu_target).data;
    case CZClass::other: return {};
  }
  return {};
}

Jet2 case_jet(const State& st, const SquareRef& r, const Point2& x, std::span<const double> f, double m,
              TransitionCache* cache) {
  if (r.id < 0) return Jet2::constant(x, 0.0);
  const CZSquare& q = st.cz.at(r.id);
  switch (q.cls) {
    case CZClass::sharpsharp: return local_jet(st, r.id, x, f, m, cache);
    case CZClass::sharp_only: return relay_jet(transition_jet(st, r.id, f, m, cache), x);
    case CZClass::empty_small: return relay_jet(transition_jet(st, *q.mu_target, f, m, cache), x);
    case CZClass::other: break;
  }
  return Jet2::constant(x, 0.0);
}

void sort_unique(std::vector<int>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

QPOptions qp_options(const Config& cfg) { return QPOptions{cfg.qp_tol, cfg.qp_max_iter}; }

SmallTraceInstance instance_of(const State& st, const std::vector<int>& members, std::span<const double> f) {
  SmallTraceInstance inst;
  for (int i : members) {
    inst.points.push_back(st.point(i));
    inst.values.push_back(f[static_cast<std::size_t>(i)]);
  }
  return inst;
}

}  // namespace

Jet2 bump_jet(const DyadicSquare& q, double c_G, const Point2& x) {
  const double d = q.side();
  const Point2 c = q.center();
  const Profile px = profile((x.x - c.x) / d, c_G), py = profile((x.y - c.y) / d, c_G);
  Jet2 j;
  j.base = x;
  j.value = px.h * py.h;
  j.grad = Vec2(px.d1 * py.h, px.h * py.d1) / d;
  j.hess << px.d2 * py.h, px.d1 * py.d1, px.d1 * py.d1, px.h * py.d2;
  j.hess /= d * d;
  return j;
}

std::vector<PouTerm> pou_jets(const State& st, const Point2& x) {
  std::vector<PouTerm> terms;
  Jet2 total = Jet2::constant(x, 0.0);
  for (const SquareRef& r : st.cz.lambda_of(x)) {
    const Jet2 eta = bump_jet(r.square, st.cfg.c_G, x);
    if (eta.value == 0.0) continue;  // outside the support, so the whole jet vanishes
    total = jet2_add(total, eta);
    terms.push_back({r, eta});
  }
  if (terms.empty()) throw std::logic_error("pou_jets: no square carries weight at x");
  const Jet2 inv = jet2_reciprocal(total);
  for (PouTerm& t : terms) t.theta = jet2_multiply(t.theta, inv);
  return terms;
}

Jet2 pou_jet(const State& st, const SquareRef& q, const Point2& x) {
  for (const PouTerm& t : pou_jets(st, x))
    if (t.square.square == q.square) return t.theta;
  return Jet2::constant(x, 0.0);
}

Jet2 global_jet(const State& st, const Point2& x, std::span<const double> f, double m, TransitionCache* cache) {
  if (!(m >= 0.0) || !std::isfinite(m)) throw std::invalid_argument("global_jet: M must be finite and nonnegative");
  if (static_cast<int>(f.size()) != st.size()) throw std::invalid_argument("global_jet: one value per point required");
  if (!std::isfinite(x.x) || !std::isfinite(x.y)) throw std::invalid_argument("global_jet: query point must be finite");
  Jet2 out = Jet2::constant(x, 0.0);
  for (const PouTerm& t : pou_jets(st, x)) {
    if (t.square.id < 0 || st.cz.at(t.square.id).cls == CZClass::other) continue;
    out = jet2_add(out, jet2_multiply(t.theta, case_jet(st, t.square, x, f, m, cache)));
  }
  return out;
}

std::vector<int> representative_set(const State& st, const Point2& x) {
  std::vector<int> out;
  for (const SquareRef& r : st.cz.lambda_of(x)) {
    if (bump_jet(r.square, st.cfg.c_G, x).value == 0.0) continue;
    const std::vector<int> s = case_depth_set(st, r, x);
    out.insert(out.end(), s.begin(), s.end());
  }
  sort_unique(out);
  return out;
}

FinitenessFamily sfp_sets(const State& st, double kappa, const std::vector<std::vector<int>>& rep_sets) {
  if (!(kappa > 0.0)) throw std::invalid_argument("sfp_sets: kappa must be positive");
  if (static_cast<int>(rep_sets.size()) != st.size()) throw std::invalid_argument("sfp_sets: one set per point required");
  FinitenessFamily fam;
  fam.point_sets = rep_sets;
  if (st.size() < 2) return fam;
  const SplitTree tree(st.points());
  const std::vector<WSPDPair> wspd = build_wspd(tree, kappa);
  std::map<std::vector<int>, int> seen;
  std::map<std::pair<int, int>, int> by_pair;
  fam.pairs.reserve(wspd.size());
  fam.set_of_pair.reserve(wspd.size());
  for (const WSPDPair& p : wspd) {
    const int a = p.rep_left, b = p.rep_right;
    fam.pairs.push_back({a, b});
    const auto key = std::minmax(a, b);
    if (auto it = by_pair.find(key); it != by_pair.end()) {
      fam.set_of_pair.push_back(it->second);
      continue;
    }
    std::vector<int> s{a, b};
    s.insert(s.end(), rep_sets[static_cast<std::size_t>(a)].begin(), rep_sets[static_cast<std::size_t>(a)].end());
    s.insert(s.end(), rep_sets[static_cast<std::size_t>(b)].begin(), rep_sets[static_cast<std::size_t>(b)].end());
    sort_unique(s);
    auto [it, fresh] = seen.emplace(std::move(s), static_cast<int>(fam.sets.size()));
    if (fresh) fam.sets.push_back(it->first);
    by_pair.emplace(key, it->second);
    fam.set_of_pair.push_back(it->second);
  }
  return fam;
}

FinitenessFamily sfp_sets(const State& st, double kappa) {
  std::vector<std::vector<int>> rep_sets;
  rep_sets.reserve(static_cast<std::size_t>(st.size()));
  for (int i = 0; i < st.size(); ++i) rep_sets.push_back(representative_set(st, st.point(i)));
  return sfp_sets(st, kappa, rep_sets);
}

void validate_values(const State& st, std::span<const double> f) {
  if (static_cast<int>(f.size()) != st.size()) throw std::invalid_argument("expected one value per data point");
  for (double v : f)
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("data values must be finite and nonnegative");
}

NormReport trace_norm_report(const State& st, std::span<const double> f) {
  validate_values(st, f);
  const FinitenessFamily& fam = st.family;
  NormReport rep;
  rep.sets = static_cast<int>(fam.sets.size());
  for (const auto& s : fam.sets) rep.largest_set = std::max(rep.largest_set, static_cast<int>(s.size()));
  for (const auto& s : fam.point_sets) rep.largest_set = std::max(rep.largest_set, static_cast<int>(s.size()));

  SmallTraceOptions opt;
  opt.limit = std::max(rep.largest_set, 1);
  opt.qp = qp_options(st.cfg);

  if (fam.sets.empty()) {  // a single point
    const TraceEstimate e = small_trace_norm(instance_of(st, {0}, f), opt);
    rep.value = e.value;
    rep.solved = 1;
    return rep;
  }

  // Minimizers on S(x) give a lower bound (every S(x) lies in the set of a pair led by x) and,
  // glued together, a feasible field on each S_l whose functional bounds M_l from above.
  const int n = st.size();
  std::vector<TraceEstimate> local(static_cast<std::size_t>(n));
  double lower = 0.0;
  for (int i = 0; i < n; ++i) {
    std::vector<int> s = fam.point_sets[static_cast<std::size_t>(i)];
    if (std::find(s.begin(), s.end(), i) == s.end()) {
      s.push_back(i);
      sort_unique(s);
    }
    local[static_cast<std::size_t>(i)] = small_trace_norm(instance_of(st, s, f), opt);
    lower = std::max(lower, local[static_cast<std::size_t>(i)].value);
  }
  // Jets of each local minimizer, aligned with its sorted member list.
  std::vector<std::vector<int>> members(static_cast<std::size_t>(n));
  std::vector<std::vector<Jet1>> jets(static_cast<std::size_t>(n));
  std::vector<double> self_terms(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const WhitneyField& w = local[static_cast<std::size_t>(i)].minimizer;
    auto& idx = members[static_cast<std::size_t>(i)];
    idx = fam.point_sets[static_cast<std::size_t>(i)];
    idx.push_back(i);
    sort_unique(idx);
    for (int y : idx) {
      const auto it = std::find_if(w.entries().begin(), w.entries().end(), [&](const Jet1& j) { return j.base == st.point(y); });
      if (it == w.entries().end()) throw std::logic_error("trace_norm: local minimizer misses a member");
      jets[static_cast<std::size_t>(i)].push_back(*it);
    }
    self_terms[static_cast<std::size_t>(i)] = q_functional(w) + m_functional(w);
  }

  std::vector<std::pair<int, int>> leader(fam.sets.size(), {-1, -1});
  for (std::size_t l = 0; l < fam.pairs.size(); ++l) {
    auto& ld = leader[static_cast<std::size_t>(fam.set_of_pair[l])];
    if (ld.first < 0) ld = {fam.pairs[l][0], fam.pairs[l][1]};
  }
  // The set of pair (a, b) is A u B with A = S(a) u {a}, B = S(b) u {b}. Its field takes a's jets on A
  // and b's on B \ A, so its functional is that of A, plus that of B \ A, plus the terms across.
  std::vector<int> mark(static_cast<std::size_t>(n), -1);
  std::vector<Jet1> rest;
  std::vector<std::pair<double, int>> order;
  order.reserve(fam.sets.size());
  for (std::size_t k = 0; k < fam.sets.size(); ++k) {
    const auto [a, b] = leader[k];
    const auto& ja = jets[static_cast<std::size_t>(a)];
    for (int y : members[static_cast<std::size_t>(a)]) mark[static_cast<std::size_t>(y)] = static_cast<int>(k);
    rest.clear();
    const auto& mb = members[static_cast<std::size_t>(b)];
    for (std::size_t t = 0; t < mb.size(); ++t)
      if (mark[static_cast<std::size_t>(mb[t])] != static_cast<int>(k)) rest.push_back(jets[static_cast<std::size_t>(b)][t]);
    double upper = self_terms[static_cast<std::size_t>(a)];
    if (rest.size() == mb.size()) {
      upper += self_terms[static_cast<std::size_t>(b)];
    } else if (!rest.empty()) {
      const WhitneyField w(rest);
      upper += q_functional(w) + m_functional(w);
    }
    upper += cross_terms(ja, rest) + cross_terms(rest, ja);
    order.emplace_back(upper, static_cast<int>(k));
  }
  std::sort(order.begin(), order.end(), [](const auto& x, const auto& y) { return x.first > y.first; });

  // Every unsolved set has M_l <= upper <= norm_slack * value, so the result is within that factor.
  rep.value = lower;
  for (const auto& [upper, k] : order) {
    if (upper <= st.cfg.norm_slack * rep.value) break;
    const TraceEstimate e = small_trace_norm(instance_of(st, fam.sets[static_cast<std::size_t>(k)], f), opt);
    ++rep.solved;
    if (e.value > rep.value) {
      rep.value = e.value;
      rep.argmax_set = k;
    }
  }
  return rep;
}

double trace_norm(const State& st, std::span<const double> f) { return trace_norm_report(st, f).value; }

}  // namespace c2plus
