#include "c2plus/state.hpp"

#include "binary_io.hpp"
#include "c2plus/global_extension.hpp"

#include <array>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace c2plus {

namespace {

using bin::get;
using bin::get_vec;
using bin::put;
using bin::put_vec;

constexpr std::array<char, 8> kMagic{'C', '2', 'P', 'S', 'T', 'A', 'T', 'E'};
constexpr std::uint32_t kMajor = 1, kMinor = 0, kPatch = 0;

void put_string(std::ostream& os, const std::string& s) {
  put(os, static_cast<std::uint64_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& is) {
  const auto n = get<std::uint64_t>(is);
  if (n > (1u << 20)) throw std::runtime_error("state file corrupt: implausible string length");
  std::string s(static_cast<std::size_t>(n), '\0');
  is.read(s.data(), static_cast<std::streamsize>(n));
  if (!is) throw std::runtime_error("binary stream truncated");
  return s;
}

void put_vec2(std::ostream& os, const Vec2& v) {
  put(os, v.x());
  put(os, v.y());
}

Vec2 get_vec2(std::istream& is) {
  const double x = get<double>(is);
  const double y = get<double>(is);
  return Vec2(x, y);
}

void put_sets(std::ostream& os, const std::vector<std::vector<int>>& sets) {
  put(os, static_cast<std::uint64_t>(sets.size()));
  for (const auto& s : sets) put_vec(os, s);
}

std::vector<std::vector<int>> get_sets(std::istream& is) {
  const auto n = get<std::uint64_t>(is);
  if (n > (std::uint64_t{1} << 32)) throw std::runtime_error("state file corrupt: implausible set count");
  std::vector<std::vector<int>> out(static_cast<std::size_t>(n));
  for (auto& s : out) s = get_vec<int>(is);
  return out;
}

}  // namespace

void State::write(std::ostream& os) const {
  os.write(kMagic.data(), kMagic.size());
  put(os, kMajor);
  put(os, kMinor);
  put(os, kPatch);
  std::ostringstream c;
  cfg.write(c);
  put_string(os, c.str());
  index.write(os);
  put(os, static_cast<std::uint64_t>(palps.size()));
  for (const PALP& p : palps) {
    put(os, p.anchor);
    put(os, p.anchor_index);
    put_vec(os, p.depth_set);
    put_vec2(os, p.u_max);
    put_vec2(os, p.u_perp);
    put(os, p.eps1);
    put(os, p.eps2);
    put(os, p.diameter);
  }
  cz.write(os);
  put_vec(os, family.pairs);
  put_vec(os, family.set_of_pair);
  put_sets(os, family.sets);
  put_sets(os, family.point_sets);
  if (!os) throw std::runtime_error("failed to write state");
}

State State::read(std::istream& is) {
  std::array<char, 8> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) throw std::runtime_error("not a preprocessed state file");
  const auto major = get<std::uint32_t>(is);
  get<std::uint32_t>(is);
  get<std::uint32_t>(is);
  if (major != kMajor) throw std::runtime_error("unsupported state file version");
  State st;
  std::istringstream c(get_string(is));
  st.cfg = Config::parse(c);
  st.index = PointIndex::read(is);
  const auto n = get<std::uint64_t>(is);
  if (n != static_cast<std::uint64_t>(st.index.size())) throw std::runtime_error("state file corrupt: PALP count");
  st.palps.resize(static_cast<std::size_t>(n));
  for (PALP& p : st.palps) {
    p.anchor = get<Point2>(is);
    p.anchor_index = get<int>(is);
    p.depth_set = get_vec<int>(is);
    p.u_max = get_vec2(is);
    p.u_perp = get_vec2(is);
    p.eps1 = get<double>(is);
    p.eps2 = get<double>(is);
    p.diameter = get<double>(is);
  }
  st.cz = CZDecomposition::read(is);
  st.family.pairs = get_vec<std::array<int, 2>>(is);
  st.family.set_of_pair = get_vec<int>(is);
  st.family.sets = get_sets(is);
  st.family.point_sets = get_sets(is);
  if (st.family.set_of_pair.size() != st.family.pairs.size() ||
      st.family.point_sets.size() != static_cast<std::size_t>(st.size()))
    throw std::runtime_error("state file corrupt: finiteness family");
  return st;
}

State preprocess(std::vector<Point2> points, const Config& cfg) {
  cfg.validate();
  if (points.empty()) throw std::invalid_argument("preprocess: the point set is empty");
  State st;
  st.cfg = cfg;
  st.index = PointIndex(std::move(points));
  st.palps.reserve(static_cast<std::size_t>(st.size()));
  for (int i = 0; i < st.size(); ++i) st.palps.push_back(build_palp(st.index, i, cfg.k_depth, cfg.m_dir));
  st.index.set_weights(diameter_weights(st.palps));
  st.cz = build_cz(st.index, st.palps, cfg);
  st.family = sfp_sets(st, cfg.kappa0);
  return st;
}

}  // namespace c2plus
