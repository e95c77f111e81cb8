#include "c2plus/local_extension.hpp"

#include "c2plus/one_dim.hpp"
#include "c2plus/small_trace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace c2plus {

namespace {

QPOptions qp_options(const Config& cfg) { return QPOptions{cfg.qp_tol, cfg.qp_max_iter}; }

const CZSquare& sharp_square(const State& st, int id) {
  if (id < 0 || id >= static_cast<int>(st.cz.squares().size())) throw std::out_of_range("square id out of range");
  const CZSquare& q = st.cz.at(id);
  if (!q.sharp() || !q.rep) throw std::invalid_argument("square carries no data in its 5-dilation");
  return q;
}

double checked_value(std::span<const double> f, int i) {
  const double v = f[static_cast<std::size_t>(i)];
  if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("data values must be finite and nonnegative");
  return v;
}

// 1-jet at x_sharp of the nonnegative quadratic P + K|y - base|^2, K the excess of P. Written
// as K|y - y0|^2 so the value stays nonnegative in floating point.
Jet1 push_to(const Jet1& p, const Point2& target) {
  Jet1 out;
  out.base = target;
  if (p.value <= 0.0) return out;  // P vanishes with its gradient: the zero polynomial
  const double g2 = p.grad.squaredNorm();
  if (g2 == 0.0) {
    out.value = p.value;
    return out;
  }
  const double k = g2 / (4.0 * p.value);
  const Vec2 w = (target - p.base) + (2.0 * p.value / g2) * p.grad;
  out.value = k * w.squaredNorm();
  out.grad = 2.0 * k * w;
  return out;
}

}  // namespace

SharpSet ssq(const State& st, int square_id) {
  const CZSquare& q = sharp_square(st, square_id);
  SharpSet s;
  s.data = st.palps[static_cast<std::size_t>(*q.rep)].depth_set;
  s.x_sharp = q.x_sharp;
  return s;
}

TransitionJet transition_jet(const State& st, int square_id, std::span<const double> f, double m,
                             TransitionCache* cache) {
  if (cache) {
    if (auto it = cache->by_square.find(square_id); it != cache->by_square.end()) return it->second;
  }
  if (!(m >= 0.0)) throw std::invalid_argument("transition_jet: M must be nonnegative");
  if (static_cast<int>(f.size()) != st.size()) throw std::invalid_argument("transition_jet: one value per point required");
  const CZSquare& q = sharp_square(st, square_id);
  const SharpSet s = ssq(st, square_id);
  const Point2 xs = s.x_sharp;
  const double thr = st.cfg.C_T * m;

  std::vector<Point2> pts;
  std::vector<double> vals;
  for (int i : s.data) {
    pts.push_back(st.point(i));
    vals.push_back(checked_value(f, i));
  }

  // Every field pinned to zero at x_sharp pays f(y) + f(y)/r^2 for the pin's jet evaluated at y,
  // and at least 3 f(y) / (4 r^2) for y's jet evaluated at the pin once the M term is counted.
  double lower = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const double r2 = distance_sq(pts[k], xs);
    lower += vals[k] * (1.0 + 1.75 / r2);
  }
  TQRule rule;
  if (lower > thr) {
    rule = TQRule::TQ1;
  } else {
    std::vector<Jet1> flat;
    for (std::size_t k = 0; k < pts.size(); ++k) flat.push_back(Jet1{pts[k], vals[k], Vec2::Zero()});
    flat.push_back(Jet1{xs, 0.0, Vec2::Zero()});
    const double upper = q_functional(WhitneyField(std::move(flat)));
    if (upper <= thr) {
      rule = TQRule::TQ0;
    } else {
      SmallTraceInstance inst{pts, vals, xs};
      SmallTraceOptions opt;
      opt.qp = qp_options(st.cfg);
      const TraceEstimate m0 = m0_minimize(inst, opt);
      if (cache) ++cache->m0_solves;
      rule = m0.value <= thr ? TQRule::TQ0 : TQRule::TQ1;
    }
  }

  TransitionJet out;
  out.rule = rule;
  out.jet.base = xs;
  if (rule == TQRule::TQ1) {
    const int rep = *q.rep;
    Jet1 p1;
    bool have = false;
    if (cache) {
      if (auto it = cache->m1_by_rep.find(rep); it != cache->m1_by_rep.end()) {
        p1 = it->second;
        have = true;
      }
    }
    if (!have) {
      SmallTraceInstance inst{pts, vals, std::nullopt};
      SmallTraceOptions opt;
      opt.qp = qp_options(st.cfg);
      p1 = m1_minimize(inst, opt).minimizer[0];
      if (cache) {
        cache->m1_by_rep.emplace(rep, p1);
        ++cache->m1_solves;
      }
    }
    out.jet = push_to(p1, xs);
  }
  if (cache) cache->by_square.emplace(square_id, out);
  return out;
}

Jet2 relay_jet(const TransitionJet& t, const Point2& x) {
  if (t.zero_polynomial()) return Jet2::constant(x, 0.0);
  return singleton_extension_jet(t.jet, x);
}

Jet2 compose_jets(const Jet2& outer, const Jet2 (&inner)[2]) {
  const Point2 at{inner[0].value, inner[1].value};
  const double scale = 1.0 + std::abs(at.x) + std::abs(at.y);
  if (distance(outer.base, at) > 1e-9 * scale) throw std::invalid_argument("compose_jets: outer jet anchored elsewhere");
  if (inner[0].base != inner[1].base) throw std::invalid_argument("compose_jets: inner components anchored apart");
  Mat2 J;
  J.row(0) = inner[0].grad.transpose();
  J.row(1) = inner[1].grad.transpose();
  Jet2 out;
  out.base = inner[0].base;
  out.value = outer.value;
  out.grad = J.transpose() * outer.grad;
  out.hess = J.transpose() * outer.hess * J + outer.grad(0) * inner[0].hess + outer.grad(1) * inner[1].hess;
  out.hess = 0.5 * (out.hess + out.hess.transpose()).eval();
  return out;
}

Straightening straighten(const State& st, int square_id, const Point2& x) {
  const CZSquare& q = sharp_square(st, square_id);
  if (q.cls != CZClass::sharpsharp) throw std::invalid_argument("straighten: square has no data in its dilation");
  if (!q.square.dilated(1.0 + st.cfg.c_G).contains(x)) throw std::invalid_argument("straighten: point outside the dilated square");
  const Point2 rep = st.point(*q.rep);
  const Vec2 u = *q.u_q, up = *q.u_q_perp;

  SortedSamples phi_samples;
  phi_samples.t = q.sorted_proj;
  for (int i : q.proj_points) phi_samples.v.push_back((st.point(i) - rep).dot(u));

  Straightening s;
  s.t_x = (x - rep).dot(up);
  s.phi = oned_linear_jet(phi_samples, s.t_x);

  Jet2& f1 = s.forward[0];
  f1.base = x;
  f1.value = s.t_x;
  f1.grad = up;
  Jet2& f2 = s.forward[1];
  f2.base = x;
  f2.value = (x - rep).dot(u) - s.phi.value;
  f2.grad = u - s.phi.d1 * up;
  f2.hess = -s.phi.d2 * (up * up.transpose());

  const Point2 y{f1.value, f2.value};
  for (int i = 0; i < 2; ++i) {
    Jet2& g = s.inverse[i];
    g.base = y;
    g.value = (i == 0 ? rep.x : rep.y) + y.x * up(i) + (y.y + s.phi.value) * u(i);
    g.grad = Vec2(up(i) + s.phi.d1 * u(i), u(i));
    g.hess = Mat2::Zero();
    g.hess(0, 0) = s.phi.d2 * u(i);
  }
  return s;
}

Jet2 psi_jet(const CZSquare& q, double c0, const Point2& x) {
  const double a = c0 * q.side() / 4.0, b = c0 * q.side() / 2.0;
  const Vec2 d = x - q.x_sharp;
  const double r = d.norm();
  if (r <= a) return Jet2::constant(x, 1.0);
  if (r >= b) return Jet2::constant(x, 0.0);
  const Ramp R = smooth_ramp((r - a) / (b - a));
  const double p1 = -R.d1 / (b - a), p2 = -R.d2 / ((b - a) * (b - a));
  const Vec2 n = d / r;
  const Mat2 nn = n * n.transpose();
  Jet2 out;
  out.base = x;
  out.value = 1.0 - R.w;
  out.grad = p1 * n;
  out.hess = p2 * nn + (p1 / r) * (Mat2::Identity() - nn);
  return out;
}

Jet2 local_jet(const State& st, int square_id, const Point2& x, std::span<const double> f, double m,
               TransitionCache* cache) {
  const CZSquare& q = sharp_square(st, square_id);
  if (q.cls != CZClass::sharpsharp) throw std::invalid_argument("local_jet: square has no data in its dilation");
  if (!q.square.dilated(1.0 + st.cfg.c_G).contains(x)) throw std::invalid_argument("local_jet: point outside the dilated square");
  const TransitionJet T = transition_jet(st, square_id, f, m, cache);
  const bool linear = !T.zero_polynomial();

  SortedSamples smp;
  smp.t = q.sorted_proj;
  for (int i : q.proj_points) {
    const double v = checked_value(f, i);
    smp.v.push_back(linear ? v - jet1_eval(T.jet, st.point(i)) : v);
  }
  const Straightening S = straighten(st, square_id, x);
  const Jet1D2 g = linear ? oned_linear_jet(smp, S.t_x) : oned_nonneg_jet(smp, S.t_x, qp_options(st.cfg));

  // vertical extension: constant in the second straightened coordinate
  Jet2 V;
  V.base = {S.forward[0].value, S.forward[1].value};
  V.value = g.value;
  V.grad = Vec2(g.d1, 0.0);
  V.hess(0, 0) = g.d2;
  const Jet2 tilde = compose_jets(V, S.forward);

  const Jet2 cut = jet2_add(Jet2::constant(x, 1.0), jet2_scale(psi_jet(q, st.cfg.c0, x), -1.0));
  return jet2_add(Jet2::from_jet1(jet1_rebase(T.jet, x)), jet2_multiply(cut, tilde));
}

std::vector<int> local_depth_set(const State& st, int square_id, const Point2& x) {
  const CZSquare& q = sharp_square(st, square_id);
  std::vector<int> out = ssq(st, square_id).data;
  if (q.cls == CZClass::sharpsharp) {
    const double t = (x - st.point(*q.rep)).dot(*q.u_q_perp);
    for (int k : depth_set_1d(q.sorted_proj, t)) out.push_back(q.proj_points[static_cast<std::size_t>(k)]);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace c2plus
