#include "dataset.hpp"

#include <json.hpp>

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace c2plus::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

double parse_number(const std::string& field, int line) {
  const std::string t = trim(field);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || end != t.data() + t.size())
    throw std::invalid_argument("line " + std::to_string(line) + ": not a number: '" + t + "'");
  return v;
}

void check(const Dataset& d) {
  if (d.points.empty()) throw std::invalid_argument("dataset has no points");
  std::map<Point2, std::size_t> seen;
  for (std::size_t i = 0; i < d.points.size(); ++i) {
    const Point2& p = d.points[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw std::invalid_argument("point " + std::to_string(i) + " is not finite");
    if (!(d.values[i] >= 0.0) || !std::isfinite(d.values[i]))
      throw std::invalid_argument("value " + std::to_string(i) + " must be finite and nonnegative");
    if (!seen.emplace(p, i).second) throw std::invalid_argument("point " + std::to_string(i) + " is a duplicate");
  }
}

}  // namespace

std::uint64_t Dataset::content_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffu;
      h *= 0x100000001b3ull;
    }
  };
  for (std::size_t i = 0; i < points.size(); ++i) {
    mix(points[i].x);
    mix(points[i].y);
    mix(values[i]);
  }
  return h;
}

std::string Dataset::id() const {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << content_hash();
  return os.str();
}

Dataset parse_csv(std::istream& is) {
  Dataset d;
  std::string line;
  int n = 0;
  bool header = false;
  while (std::getline(is, line)) {
    ++n;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(t);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(trim(f));
    if (!header) {
      if (fields != std::vector<std::string>{"x", "y", "f"}) throw std::invalid_argument("line " + std::to_string(n) + ": expected header x,y,f");
      header = true;
      continue;
    }
    if (fields.size() != 3) throw std::invalid_argument("line " + std::to_string(n) + ": expected three fields");
    d.points.push_back({parse_number(fields[0], n), parse_number(fields[1], n)});
    d.values.push_back(parse_number(fields[2], n));
  }
  if (!header) throw std::invalid_argument("missing header x,y,f");
  check(d);
  return d;
}

Dataset parse_json(std::istream& is) {
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_array()) throw std::invalid_argument("expected a JSON array of [x, y, f] triples");
  Dataset d;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    if (!e.is_array() || e.size() != 3 || !e[0].is_number() || !e[1].is_number() || !e[2].is_number())
      throw std::invalid_argument("element " + std::to_string(i) + " is not a numeric triple");
    d.points.push_back({e[0].get<double>(), e[1].get<double>()});
    d.values.push_back(e[2].get<double>());
  }
  check(d);
  return d;
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  char c = 0;
  while (in.get(c) && std::isspace(static_cast<unsigned char>(c))) {
  }
  in.clear();
  in.seekg(0);
  return c == '[' ? parse_json(in) : parse_csv(in);
}

std::vector<double> values_for(const Dataset& d, const std::vector<Point2>& points) {
  std::map<Point2, double> by_point;
  for (std::size_t i = 0; i < d.points.size(); ++i) by_point.emplace(d.points[i], d.values[i]);
  if (by_point.size() != points.size()) throw std::invalid_argument("values file lists a different number of points than the index");
  std::vector<double> out;
  out.reserve(points.size());
  for (const Point2& p : points) {
    const auto it = by_point.find(p);
    if (it == by_point.end()) throw std::invalid_argument("values file misses an indexed point");
    out.push_back(it->second);
  }
  return out;
}

}  // namespace c2plus::io
