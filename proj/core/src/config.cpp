#include "c2plus/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace c2plus {

namespace {

bool is_dyadic(double v) {
  if (!(v > 0.0) || !std::isfinite(v)) return false;
  int e = 0;
  return std::frexp(v, &e) == 0.5;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw std::invalid_argument("config: bad number for " + key + ": '" + v + "'");
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw std::invalid_argument("config: bad integer for " + key + ": '" + v + "'");
  return out;
}

}  // namespace

int Config::cutoff_level() const {
  int e = 0;
  std::frexp(A2, &e);
  return -(e - 1);
}

void Config::validate() const {
  if (!(A1 >= 8.0) || !is_dyadic(A1)) throw std::invalid_argument("config: A1 must be a power of two >= 8");
  if (!is_dyadic(A2)) throw std::invalid_argument("config: A2 must be a positive power of two");
  if (!(c_G > 0.0 && c_G < 0.25)) throw std::invalid_argument("config: c_G must lie in (0, 1/4)");
  if (!(c0 > 0.0 && c0 < 0.25)) throw std::invalid_argument("config: c0 must lie in (0, 1/4)");
  if (!(C_T > 0.0)) throw std::invalid_argument("config: C_T must be positive");
  if (!(kappa0 > 0.0 && kappa0 < 1.0)) throw std::invalid_argument("config: kappa0 must lie in (0, 1)");
  if (k_depth < 1) throw std::invalid_argument("config: k_depth must be positive");
  if (m_dir < 4) throw std::invalid_argument("config: m_dir must be at least 4");
  if (!(qp_tol > 0.0)) throw std::invalid_argument("config: qp_tol must be positive");
  if (qp_max_iter < 1) throw std::invalid_argument("config: qp_max_iter must be positive");
  if (D_config < 1) throw std::invalid_argument("config: D_config must be positive");
  if (!(bound_factor >= 1.0)) throw std::invalid_argument("config: bound_factor must be >= 1");
  if (!(norm_slack >= 1.0) || !std::isfinite(norm_slack)) throw std::invalid_argument("config: norm_slack must be finite and >= 1");
}

void Config::set(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "A1") A1 = to_double(key, v);
  else if (key == "A2") A2 = to_double(key, v);
  else if (key == "c_G") c_G = to_double(key, v);
  else if (key == "c0") c0 = to_double(key, v);
  else if (key == "C_T") C_T = to_double(key, v);
  else if (key == "kappa0") kappa0 = to_double(key, v);
  else if (key == "k_depth") k_depth = to_int(key, v);
  else if (key == "m_dir") m_dir = to_int(key, v);
  else if (key == "qp_tol") qp_tol = to_double(key, v);
  else if (key == "qp_max_iter") qp_max_iter = to_int(key, v);
  else if (key == "D_config") D_config = to_int(key, v);
  else if (key == "bound_factor") bound_factor = to_double(key, v);
  else if (key == "norm_slack") norm_slack = to_double(key, v);
  else throw std::invalid_argument("config: unknown key '" + key + "'");
}

Config Config::parse(std::istream& is) {
  Config c;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) + " is not key=value");
    c.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  c.validate();
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("config: cannot open " + path);
  return parse(f);
}

void Config::write(std::ostream& os) const {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(17);
  os << "A1=" << A1 << "\nA2=" << A2 << "\nc_G=" << c_G << "\nc0=" << c0 << "\nC_T=" << C_T
     << "\nkappa0=" << kappa0 << "\nk_depth=" << k_depth << "\nm_dir=" << m_dir << "\nqp_tol=" << qp_tol
     << "\nqp_max_iter=" << qp_max_iter << "\nD_config=" << D_config << "\nbound_factor=" << bound_factor
     << "\nnorm_slack=" << norm_slack << '\n';
  os.flags(flags);
  os.precision(prec);
}

}  // namespace c2plus
