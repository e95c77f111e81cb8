#include "dataset.hpp"

#include "c2plus/global_extension.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

using namespace c2plus;
using nlohmann::json;

namespace {

// Thrown for bad input files or arguments; mapped to exit status 1.
struct UserError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

State load_state(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UserError("cannot open index " + path);
  try {
    return State::read(in);
  } catch (const std::runtime_error& e) {
    throw UserError(path + ": " + e.what());
  }
}

json jet_json(const Jet2& j) {
  return json{{"value", j.value},
              {"grad", {j.grad(0), j.grad(1)}},
              {"hess", {{j.hess(0, 0), j.hess(0, 1)}, {j.hess(1, 0), j.hess(1, 1)}}}};
}

double parse_m(const std::string& s) {
  double m = 0.0;
  try {
    std::size_t used = 0;
    m = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
  } catch (const std::exception&) {
    throw UserError("M must be a number, got '" + s + "'");
  }
  if (!(m >= 0.0) || !std::isfinite(m)) throw UserError("M must be finite and nonnegative");
  return m;
}

Config make_config(const std::string& file, const std::vector<std::string>& overrides) {
  Config cfg = file.empty() ? Config{} : Config::load(file);
  for (const std::string& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UserError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

// Invariant checks on a fixed random dataset; returns the number of failed checks.
int selftest(std::ostream& out) {
  out << "# defaults\n";
  Config{}.write(out);
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Point2> pts;
  for (int i = 0; i < 150; ++i) pts.push_back({u(rng), u(rng)});
  const State st = preprocess(pts);
  std::vector<double> f;
  for (const Point2& p : st.points()) f.push_back((1 + p.x * p.y) * (1 + p.x * p.y) * (0.5 + 0.5 * std::sin(3 * p.x)));
  const double m = trace_norm(st, f);
  TransitionCache cache;
  int failures = 0;
  auto report = [&](const std::string& name, bool ok, const std::string& detail) {
    out << (ok ? "PASS " : "FAIL ") << name << "  " << detail << '\n';
    failures += ok ? 0 : 1;
  };

  double interp = 0.0;
  for (int i = 0; i < st.size(); ++i)
    interp = std::max(interp, std::abs(global_jet(st, st.point(i), f, m, &cache).value - f[static_cast<std::size_t>(i)]));
  report("interpolation", interp <= 1e-9 * (1 + m), "max error " + std::to_string(interp));

  double lowest = 0.0;
  for (int a = 0; a < 60; ++a)
    for (int b = 0; b < 60; ++b)
      lowest = std::min(lowest, global_jet(st, {-1.5 + 3.0 * a / 59, -1.5 + 3.0 * b / 59}, f, m, &cache).value);
  report("nonnegativity", lowest >= -1e-8 * m, "grid minimum " + std::to_string(lowest));

  bool stable = true;
  std::size_t largest = 0;
  for (int k = 0; k < 100; ++k) {
    const Point2 x{1.2 * u(rng), 1.2 * u(rng)};
    const auto s = representative_set(st, x);
    largest = std::max(largest, s.size());
    auto g = f;
    for (int i = 0; i < st.size(); ++i)
      if (!std::binary_search(s.begin(), s.end(), i)) g[static_cast<std::size_t>(i)] *= 1.000001;
    const Jet2 a = global_jet(st, x, f, m), b = global_jet(st, x, g, m);
    stable = stable && a.value == b.value && a.grad == b.grad && a.hess == b.hess;
  }
  report("depth", stable && largest <= static_cast<std::size_t>(st.cfg.D_config), "largest S(x) " + std::to_string(largest));

  std::stringstream ss;
  st.write(ss);
  const State back = State::read(ss);
  const Point2 probe{0.123, -0.456};
  const Jet2 a = global_jet(st, probe, f, m), b = global_jet(back, probe, f, m);
  report("round trip", a.value == b.value && a.grad == b.grad && a.hess == b.hess, "index bytes " + std::to_string(ss.str().size()));

  double pou = 0.0;
  for (int k = 0; k < 1000; ++k) {
    double sum = 0.0;
    for (const PouTerm& t : pou_jets(st, {1.5 * u(rng), 1.5 * u(rng)})) sum += t.theta.value;
    pou = std::max(pou, std::abs(sum - 1.0));
  }
  report("partition of unity", pou <= 1e-10, "max deviation " + std::to_string(pou));
  out << "M " << m << '\n';
  return failures;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonnegative C^2 interpolation of planar data"};
  app.require_subcommand(1);
  std::cout << std::setprecision(17);

  std::string data, index_path, values_path, m_str, out_path, config_file;
  std::vector<std::string> overrides;
  double qx = 0.0, qy = 0.0;
  int res = 100;
  std::vector<double> bounds;

  auto* pre = app.add_subcommand("preprocess", "Build and save the index for a point set");
  pre->add_option("data", data, "CSV (x,y,f) or JSON triples; values are ignored")->required();
  pre->add_option("-o,--output", out_path, "index file")->required();
  pre->add_option("--config", config_file, "key=value configuration file");
  pre->add_option("--set", overrides, "override one configuration key, key=value");

  auto* norm = app.add_subcommand("norm", "Estimate the order of magnitude of the trace norm");
  norm->add_option("index", index_path)->required();
  norm->add_option("values", values_path)->required();

  auto* query = app.add_subcommand("query", "Two-jet of the interpolant at a point, with its depth set");
  query->add_option("index", index_path)->required();
  query->add_option("values", values_path)->required();
  query->add_option("M", m_str)->required();
  query->add_option("x", qx)->required();
  query->add_option("y", qy)->required();

  auto* grid = app.add_subcommand("grid", "Values and jets on a regular grid");
  grid->add_option("index", index_path)->required();
  grid->add_option("values", values_path)->required();
  grid->add_option("M", m_str)->required();
  grid->add_option("--res", res, "samples per axis")->check(CLI::Range(2, 4096));
  grid->add_option("--bounds", bounds, "xmin ymin xmax ymax (default: 1.5 x bounding box)")->expected(4);
  grid->add_option("-o,--output", out_path, "CSV output (default stdout)");

  auto* sets = app.add_subcommand("sets", "Dump the finiteness sets");
  sets->add_option("index", index_path)->required();

  auto* dump = app.add_subcommand("dump-cz", "Dump the decomposition squares");
  dump->add_option("index", index_path)->required();

  auto* self = app.add_subcommand("selftest", "Print defaults and run invariant checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (pre->parsed()) {
      const Config cfg = make_config(config_file, overrides);
      const io::Dataset d = io::load_dataset(data);
      const State st = preprocess(d.points, cfg);
      std::ofstream os(out_path, std::ios::binary);
      if (!os) throw UserError("cannot write " + out_path);
      st.write(os);
      std::cerr << "points " << st.size() << " squares " << st.cz.squares().size() << " sets " << st.family.sets.size()
                << " dataset " << d.id() << '\n';
    } else if (norm->parsed()) {
      const State st = load_state(index_path);
      const auto f = io::values_for(io::load_dataset(values_path), st.points());
      std::cout << trace_norm(st, f) << '\n';
    } else if (query->parsed()) {
      const State st = load_state(index_path);
      const auto f = io::values_for(io::load_dataset(values_path), st.points());
      const double m = parse_m(m_str);
      const Point2 x{qx, qy};
      json j = jet_json(global_jet(st, x, f, m));
      j["depth_set"] = representative_set(st, x);
      std::cout << j.dump() << '\n';
    } else if (grid->parsed()) {
      const State st = load_state(index_path);
      const auto f = io::values_for(io::load_dataset(values_path), st.points());
      const double m = parse_m(m_str);
      Box b = st.index.bounding_box();
      if (bounds.empty()) {
        const Point2 c{(b.lo.x + b.hi.x) / 2, (b.lo.y + b.hi.y) / 2};
        const double hx = 0.75 * std::max(b.hi.x - b.lo.x, 1e-3), hy = 0.75 * std::max(b.hi.y - b.lo.y, 1e-3);
        b = {{c.x - hx, c.y - hy}, {c.x + hx, c.y + hy}};
      } else {
        b = {{bounds[0], bounds[1]}, {bounds[2], bounds[3]}};
        if (!(b.lo.x < b.hi.x && b.lo.y < b.hi.y)) throw UserError("--bounds must satisfy xmin < xmax and ymin < ymax");
      }
      std::ofstream file;
      if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw UserError("cannot write " + out_path);
        file << std::setprecision(17);
      }
      std::ostream& os = out_path.empty() ? std::cout : file;
      os << "x,y,value,gx,gy,hxx,hxy,hyy\n";
      TransitionCache cache;
      for (int a = 0; a < res; ++a)
        for (int c = 0; c < res; ++c) {
          const Point2 x{b.lo.x + (b.hi.x - b.lo.x) * c / (res - 1), b.lo.y + (b.hi.y - b.lo.y) * a / (res - 1)};
          const Jet2 j = global_jet(st, x, f, m, &cache);
          os << x.x << ',' << x.y << ',' << j.value << ',' << j.grad(0) << ',' << j.grad(1) << ',' << j.hess(0, 0) << ','
             << j.hess(0, 1) << ',' << j.hess(1, 1) << '\n';
        }
    } else if (sets->parsed()) {
      const State st = load_state(index_path);
      json out = json::array();
      for (std::size_t l = 0; l < st.family.size(); ++l)
        out.push_back({{"pair", st.family.pairs[l]}, {"members", st.family.members(l)}});
      std::cout << out.dump() << '\n';
    } else if (dump->parsed()) {
      const State st = load_state(index_path);
      json out = json::array();
      for (const CZSquare& q : st.cz.squares()) {
        json s{{"k", q.square.k}, {"i", q.square.i}, {"j", q.square.j}, {"class", to_string(q.cls)},
               {"x_sharp", {q.x_sharp.x, q.x_sharp.y}}};
        if (q.rep) s["rep"] = *q.rep;
        if (q.mu_target) s["mu"] = *q.mu_target;
        out.push_back(s);
      }
      std::cout << out.dump() << '\n';
    } else if (self->parsed()) {
      return selftest(std::cout) == 0 ? 0 : 2;
    }
  } catch (const UserError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
