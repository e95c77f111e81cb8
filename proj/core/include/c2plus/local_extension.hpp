#pragma once

#include "c2plus/state.hpp"

#include <span>
#include <unordered_map>
#include <vector>

namespace c2plus {

// S(A(Rep)) with Rep, plus x_sharp, which is never a data point.
struct SharpSet {
  std::vector<int> data;  // Rep first
  Point2 x_sharp;
};
SharpSet ssq(const State& st, int square_id);

enum class TQRule : unsigned char { TQ0, TQ1 };

struct TransitionJet {
  Jet1 jet;  // anchored at x_sharp
  TQRule rule = TQRule::TQ0;
  bool zero_polynomial() const { return jet.value == 0.0 && jet.grad.isZero(0.0); }
};

// Memo for one (f, M) pair. Not shared between threads.
struct TransitionCache {
  std::unordered_map<int, TransitionJet> by_square;
  std::unordered_map<int, Jet1> m1_by_rep;
  int m0_solves = 0;
  int m1_solves = 0;
};

// Gate: the M0 minimum over S_sharp(Q) with a zero jet pinned at x_sharp is compared with
// C_T M. Exact lower and upper bounds settle most squares without solving the QP.
TransitionJet transition_jet(const State& st, int square_id, std::span<const double> f, double m,
                             TransitionCache* cache = nullptr);

// Two-jets of the straightening map at x, for x in (1 + c_G)Q, Q sharpsharp.
struct Straightening {
  double t_x = 0.0;
  Jet1D2 phi;           // jet of the graph function at t_x
  Jet2 forward[2];      // components of x -> (t1, t2 - phi(t1)), anchored at x
  Jet2 inverse[2];      // components of (t1', t2') -> x, anchored at forward(x)
};
Straightening straighten(const State& st, int square_id, const Point2& x);

// Chain rule for two-jets: outer is anchored at (inner[0].value, inner[1].value).
Jet2 compose_jets(const Jet2& outer, const Jet2 (&inner)[2]);

// Radial cutoff around x_sharp: one on radius c0 side / 4, zero beyond c0 side / 2.
Jet2 psi_jet(const CZSquare& q, double c0, const Point2& x);

// Jet at x of T_Q + (1 - psi) (V g) o Phi, with g the 1-D extension of the straightened data.
Jet2 local_jet(const State& st, int square_id, const Point2& x, std::span<const double> f, double m,
               TransitionCache* cache = nullptr);

// Data the local jet at x may read: S_sharp(Q) data and the 1-D depth set of t_x.
std::vector<int> local_depth_set(const State& st, int square_id, const Point2& x);

// Nonnegative quadratic y -> T(y) + K|y - x_sharp|^2 extending a transition jet, as a two-jet at x.
Jet2 relay_jet(const TransitionJet& t, const Point2& x);

}  // namespace c2plus
