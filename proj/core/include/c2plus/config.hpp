#pragma once

#include <iosfwd>
#include <string>

namespace c2plus {

// Tunable constants of the construction. Inputs are never rescaled: C^2 norms are not dilation
// invariant, so A2 fixes an absolute length scale (the coarsest square has side 1/A2).
struct Config {
  double A1 = 32.0;             // OK test: diameter >= A1 * side
  double A2 = 1.0;              // coarsest side 1/A2
  double c_G = 1.0 / 32.0;      // dilation margin of the partition of unity
  double c0 = 1.0 / 1024.0;     // x_sharp keeps distance c0 * side from the data
  double C_T = 1000.0;          // transition-jet gate
  double kappa0 = 1.0 / 16.0;   // WSPD separation
  int k_depth = 16;             // PALP depth set size
  int m_dir = 64;               // sampled sigma directions
  double qp_tol = 1e-8;
  int qp_max_iter = 200;
  int D_config = 200;           // reported bound on #S(x)
  double bound_factor = 3.0;    // bounding region = bound_factor x bounding square of E
  double norm_slack = 2.0;      // trace_norm may stop within this factor below the exact maximum

  int cutoff_level() const;     // log2(1/A2)

  // Throws std::invalid_argument when a constant is out of range or not dyadic where required.
  void validate() const;

  // key=value lines; '#' starts a comment. Unknown keys throw.
  void set(const std::string& key, const std::string& value);
  static Config parse(std::istream& is);
  static Config load(const std::string& path);
  void write(std::ostream& os) const;
};

}  // namespace c2plus
