#pragma once

#include "c2plus/core_types.hpp"
#include "c2plus/qp_solver.hpp"

#include <vector>

namespace c2plus {

struct SortedSamples {
  std::vector<double> t;  // strictly increasing
  std::vector<double> v;

  // Throws std::invalid_argument on size mismatch, unsorted or non-finite abscissas, non-finite
  // values, or (when `nonneg`) negative values.
  void validate(bool nonneg) const;
  int size() const { return static_cast<int>(t.size()); }
};

// Indices of the samples a jet at t may depend on (at most four).
std::vector<int> depth_set_1d(const std::vector<double>& t, double x);

// Slopes of the Whitney field minimizing the 1-D (Q + M) functional; zero where v = 0.
std::vector<double> nonneg_slopes(const SortedSamples& s, const QPOptions& qp = {});
// Slopes minimizing the cross terms of the W^2 quadratic form; linear in v.
std::vector<double> linear_slopes(const SortedSamples& s);

// Nonnegative C^2 extension of at most three samples: node quadratics P_i + K_i (t - t_i)^2
// blended between consecutive nodes.
Jet1D2 oned_base_nonneg(const SortedSamples& s, double t, const QPOptions& qp = {});
Jet1D2 oned_base_linear(const SortedSamples& s, double t);

// Windowed operators over three-point windows, at most two windows active at any t.
Jet1D2 oned_nonneg_jet(const SortedSamples& s, double t, const QPOptions& qp = {});
Jet1D2 oned_linear_jet(const SortedSamples& s, double t);

// C^2 quintic ramp on [0, 1]: value, first and second derivative.
struct Ramp {
  double w, d1, d2;
};
Ramp smooth_ramp(double x);

}  // namespace c2plus
