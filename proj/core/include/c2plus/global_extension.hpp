#pragma once

#include "c2plus/local_extension.hpp"
#include "c2plus/state.hpp"

#include <span>
#include <vector>

namespace c2plus {

// C^2 tensor-product bump: one on Q shrunk by c_G/4 per side, zero outside (1 + c_G/2)Q.
Jet2 bump_jet(const DyadicSquare& q, double c_G, const Point2& x);

struct PouTerm {
  SquareRef square;
  Jet2 theta;
};
// theta_Q = eta_Q / sum of eta over Lambda(x), listed for the squares with eta_Q(x) != 0.
std::vector<PouTerm> pou_jets(const State& st, const Point2& x);
// Zero jet when Q does not carry weight at x.
Jet2 pou_jet(const State& st, const SquareRef& q, const Point2& x);

// Two-jet at x of the interpolant built for (f, M). f holds one value per point of E; only the
// values in representative_set(x) are read.
Jet2 global_jet(const State& st, const Point2& x, std::span<const double> f, double m,
                TransitionCache* cache = nullptr);

// Indices of E that global_jet(x, ., .) depends on, ascending.
std::vector<int> representative_set(const State& st, const Point2& x);

// Finiteness sets from a WSPD at separation kappa. `rep_sets[i]` must be representative_set of
// point i.
FinitenessFamily sfp_sets(const State& st, double kappa, const std::vector<std::vector<int>>& rep_sets);
FinitenessFamily sfp_sets(const State& st, double kappa);

struct NormReport {
  double value = 0.0;       // max over sets of the small-set estimate
  int argmax_set = -1;
  int sets = 0;             // distinct member sets
  int solved = 0;           // sets needing a QP solve
  int largest_set = 0;
};

// Order-of-magnitude trace norm. The result M satisfies M* / cfg.norm_slack <= M <= M*, where M* is the maximum of the
// small-set estimates over the family. Throws std::invalid_argument on negative or non-finite values.
NormReport trace_norm_report(const State& st, std::span<const double> f);
double trace_norm(const State& st, std::span<const double> f);

// Throws std::invalid_argument unless f has one finite nonnegative value per point.
void validate_values(const State& st, std::span<const double> f);

}  // namespace c2plus
