#include "c2plus/small_trace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace c2plus {

void SmallTraceInstance::validate(int limit) const {
  if (points.size() != values.size()) throw std::invalid_argument("small trace: points/values size mismatch");
  if (static_cast<int>(points.size()) > limit)
    throw std::invalid_argument("small trace: " + std::to_string(points.size()) + " points exceed limit " +
                                std::to_string(limit));
  for (double v : values)
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("small trace: values must be finite and >= 0");
  std::vector<Point2> sorted = points;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("small trace: duplicate points");
  if (pin && std::binary_search(sorted.begin(), sorted.end(), *pin))
    throw std::invalid_argument("small trace: pin coincides with a data point");
}

int VariableMap::dim() const {
  int d = 0;
  for (int o : offset)
    if (o >= 0) d += 2;
  return d;
}

namespace {

// Row builder: a linear functional of the gradient variables plus a constant.
struct Row {
  std::vector<std::pair<int, double>> terms;
  double constant = 0.0;
};

}  // namespace

AssembledTrace assemble_quad_l1(const SmallTraceInstance& inst) {
  const int n = static_cast<int>(inst.points.size());
  AssembledTrace out;
  out.vars.offset.assign(static_cast<std::size_t>(n), -1);
  int d = 0;
  for (int i = 0; i < n; ++i)
    if (inst.values[static_cast<std::size_t>(i)] > 0.0) {
      out.vars.offset[static_cast<std::size_t>(i)] = d;
      d += 2;
    }

  // all anchors, the pin last with value 0 and no variables
  std::vector<Point2> pts = inst.points;
  std::vector<double> val = inst.values;
  std::vector<int> off = out.vars.offset;
  if (inst.pin) {
    pts.push_back(*inst.pin);
    val.push_back(0.0);
    off.push_back(-1);
  }
  const int na = static_cast<int>(pts.size());

  std::vector<Row> rows;
  rows.reserve(static_cast<std::size_t>(3 * na + 3 * na * (na - 1)));
  for (int a = 0; a < na; ++a) {
    rows.push_back(Row{{}, val[static_cast<std::size_t>(a)]});
    for (int k = 0; k < 2; ++k) {
      Row r;
      if (off[static_cast<std::size_t>(a)] >= 0) r.terms.emplace_back(off[static_cast<std::size_t>(a)] + k, 1.0);
      rows.push_back(r);
    }
  }
  for (int a = 0; a < na; ++a) {
    for (int b = 0; b < na; ++b) {
      if (a == b) continue;
      const Vec2 diff = pts[static_cast<std::size_t>(a)] - pts[static_cast<std::size_t>(b)];
      const double dist2 = diff.squaredNorm();
      const double dist = std::sqrt(dist2);
      const int ob = off[static_cast<std::size_t>(b)];
      const int oa = off[static_cast<std::size_t>(a)];
      // |P^a(a) - P^b(a)| / |a-b|^2 with P^b(a) = f(b) + g_b . (a - b)
      Row v;
      v.constant = (val[static_cast<std::size_t>(a)] - val[static_cast<std::size_t>(b)]) / dist2;
      if (ob >= 0) {
        v.terms.emplace_back(ob, -diff.x() / dist2);
        v.terms.emplace_back(ob + 1, -diff.y() / dist2);
      }
      rows.push_back(v);
      for (int k = 0; k < 2; ++k) {
        Row g;
        if (oa >= 0) g.terms.emplace_back(oa + k, 1.0 / dist);
        if (ob >= 0) g.terms.emplace_back(ob + k, -1.0 / dist);
        rows.push_back(g);
      }
    }
  }

  QuadL1Problem& p = out.problem;
  p.Q = MatX::Zero(d, d);
  p.q = VecX::Zero(d);
  for (int i = 0; i < n; ++i) {
    const int o = out.vars.offset[static_cast<std::size_t>(i)];
    if (o < 0) continue;
    const double w = 1.0 / inst.values[static_cast<std::size_t>(i)];
    p.Q(o, o) = w;
    p.Q(o + 1, o + 1) = w;
  }
  std::vector<Eigen::Triplet<double>> trip;
  p.c.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    p.c(static_cast<Eigen::Index>(r)) = rows[r].constant;
    for (const auto& [col, v] : rows[r].terms) trip.emplace_back(static_cast<int>(r), col, v);
  }
  p.L.resize(static_cast<Eigen::Index>(rows.size()), d);
  p.L.setFromTriplets(trip.begin(), trip.end());
  p.B = MatX(0, d);
  p.rhs = VecX(0);
  return out;
}

WhitneyField field_from_variables(const SmallTraceInstance& inst, const VariableMap& vars, const VecX& beta) {
  std::vector<Jet1> e;
  e.reserve(inst.points.size() + 1);
  for (std::size_t i = 0; i < inst.points.size(); ++i) {
    Jet1 j{inst.points[i], inst.values[i], Vec2::Zero()};
    if (vars.offset[i] >= 0) j.grad = Vec2(beta(vars.offset[i]), beta(vars.offset[i] + 1));
    e.push_back(j);
  }
  if (inst.pin) e.push_back(Jet1{*inst.pin, 0.0, Vec2::Zero()});
  return WhitneyField(std::move(e));
}

namespace {

TraceEstimate minimize(const SmallTraceInstance& inst, const SmallTraceOptions& opt) {
  inst.validate(opt.limit);
  TraceEstimate est;
  if (inst.points.empty() && !inst.pin) return est;
  const AssembledTrace a = assemble_quad_l1(inst);
  VecX beta = VecX::Zero(a.vars.dim());
  if (beta.size() > 0) {
    const QPSolution s = solve_quad_l1(a.problem, opt.qp);
    est.status = s.status;
    if (s.beta.allFinite()) beta = s.beta;
  }
  est.minimizer = field_from_variables(inst, a.vars, beta);
  est.value = q_functional(est.minimizer) + m_functional(est.minimizer);
  return est;
}

}  // namespace

TraceEstimate small_trace_norm(const SmallTraceInstance& inst, const SmallTraceOptions& opt) {
  if (inst.pin) throw std::invalid_argument("small_trace_norm: instance must not carry a pin");
  return minimize(inst, opt);
}

TraceEstimate m0_minimize(const SmallTraceInstance& inst, const SmallTraceOptions& opt) {
  if (!inst.pin) throw std::invalid_argument("m0_minimize: instance needs a pin");
  return minimize(inst, opt);
}

TraceEstimate m1_minimize(const SmallTraceInstance& inst, const SmallTraceOptions& opt) {
  if (inst.pin) throw std::invalid_argument("m1_minimize: instance must not carry a pin");
  return minimize(inst, opt);
}

}  // namespace c2plus
