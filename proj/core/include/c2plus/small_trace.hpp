#pragma once

#include "c2plus/core_types.hpp"
#include "c2plus/qp_solver.hpp"

#include <optional>
#include <vector>

namespace c2plus {

inline constexpr int kDefaultSmallSetLimit = 24;

struct SmallTraceInstance {
  std::vector<Point2> points;
  std::vector<double> values;     // f >= 0 on points
  std::optional<Point2> pin;      // carries the zero jet; must not be one of the points

  // Throws std::invalid_argument on size mismatch, negative or non-finite values, duplicate
  // points, a pin that coincides with a data point, or more than `limit` points.
  void validate(int limit = kDefaultSmallSetLimit) const;
};

// Gradient variables exist only where f > 0; elsewhere the jet is pinned to zero.
struct VariableMap {
  std::vector<int> offset;  // per point: first variable index, or -1 when pinned

  int dim() const;
};

struct AssembledTrace {
  QuadL1Problem problem;
  VariableMap vars;
};

// Quadratic part sum |g_x|^2 / f(x); l1 part lists every single-point and cross term of the
// Q functional, so |L beta + c|_1 equals it exactly. The pin, when present, enters as a fixed
// zero jet in the cross terms.
AssembledTrace assemble_quad_l1(const SmallTraceInstance& inst);

// Whitney field on the points (followed by the pin when present) for a given variable vector.
WhitneyField field_from_variables(const SmallTraceInstance& inst, const VariableMap& vars, const VecX& beta);

struct TraceEstimate {
  double value = 0.0;        // (Q + M) of `minimizer`
  WhitneyField minimizer;    // entries in instance order, pin last
  QPStatus status = QPStatus::optimal;
};

struct SmallTraceOptions {
  int limit = kDefaultSmallSetLimit;
  QPOptions qp;
};

TraceEstimate small_trace_norm(const SmallTraceInstance& inst, const SmallTraceOptions& opt = {});
// Minimizes over fields whose jet at the pin is zero.
TraceEstimate m0_minimize(const SmallTraceInstance& inst, const SmallTraceOptions& opt = {});
TraceEstimate m1_minimize(const SmallTraceInstance& inst, const SmallTraceOptions& opt = {});

}  // namespace c2plus
