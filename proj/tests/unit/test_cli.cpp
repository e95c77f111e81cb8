#include "dataset.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace c2plus;
namespace fs = std::filesystem;

namespace {

struct CmdResult {
  int status;
  std::string out;
};

CmdResult run(const std::string& args) {
  const std::string cmd = std::string(C2PLUS_CLI) + " " + args + " 2>/dev/null";
  CmdResult r{0, ""};
  FILE* p = popen(cmd.c_str(), "r");
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("c2plus_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                                       ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir);
    std::mt19937_64 g(5);
    std::uniform_real_distribution<double> u(-1, 1);
    std::ofstream data(dir / "d.csv"), zero(dir / "z.json");
    data.precision(17);
    zero.precision(17);
    data << "x,y,f\n";
    zero << "[";
    for (int i = 0; i < 40; ++i) {
      const double x = u(g), y = u(g);
      xs.push_back(x);
      ys.push_back(y);
      fs_.push_back((1 + x * y) * (1 + x * y));
      data << x << ',' << y << ',' << fs_.back() << '\n';
      zero << (i ? "," : "") << '[' << x << ',' << y << ",0]";
    }
    zero << "]";
  }
  void TearDown() override { fs::remove_all(dir); }

  std::string path(const char* name) const { return (dir / name).string(); }

  fs::path dir;
  std::vector<double> xs, ys, fs_;
};

}  // namespace

TEST(Dataset, CsvAndJsonAgree) {
  std::istringstream csv("x,y,f\n# comment\n0.5,-1,2\n\n1e-3, 4 ,0\n");
  std::istringstream js("[[0.5,-1,2],[0.001,4,0]]");
  const io::Dataset a = io::parse_csv(csv), b = io::parse_json(js);
  ASSERT_EQ(a.points.size(), 2u);
  EXPECT_EQ(a.points, b.points);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.content_hash(), b.content_hash());
  EXPECT_EQ(a.id().size(), 16u);
}

TEST(Dataset, HashIsFixed) {
  io::Dataset d;
  d.points = {{0.0, 0.0}};
  d.values = {0.0};
  // FNV-1a of 24 zero bytes
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (int i = 0; i < 24; ++i) h *= 0x100000001b3ull;
  EXPECT_EQ(d.content_hash(), h);
}

TEST(Dataset, RejectsMalformedInput) {
  auto csv = [](const char* s) {
    std::istringstream in(s);
    return io::parse_csv(in);
  };
  auto js = [](const char* s) {
    std::istringstream in(s);
    return io::parse_json(in);
  };
  EXPECT_THROW(csv("a,b,c\n1,2,3\n"), std::invalid_argument);
  EXPECT_THROW(csv("x,y,f\n1,2\n"), std::invalid_argument);
  EXPECT_THROW(csv("x,y,f\n1,2,-3\n"), std::invalid_argument);
  EXPECT_THROW(csv("x,y,f\n1,2,3\n1,2,4\n"), std::invalid_argument);
  EXPECT_THROW(csv("x,y,f\n1,2,abc\n"), std::invalid_argument);
  EXPECT_THROW(csv("x,y,f\n1,2,nan\n"), std::invalid_argument);
  EXPECT_THROW(csv(""), std::invalid_argument);
  EXPECT_THROW(js("{}"), std::invalid_argument);
  EXPECT_THROW(js("[[1,2]]"), std::invalid_argument);
  EXPECT_THROW(js("[[1,2,"), std::invalid_argument);
}

TEST(Dataset, ValuesFollowIndexOrder) {
  io::Dataset d;
  d.points = {{0, 0}, {1, 0}};
  d.values = {3, 4};
  EXPECT_EQ(io::values_for(d, {{1, 0}, {0, 0}}), (std::vector<double>{4, 3}));
  EXPECT_THROW(io::values_for(d, {{1, 0}, {0, 1}}), std::invalid_argument);
  EXPECT_THROW(io::values_for(d, {{1, 0}}), std::invalid_argument);
}

TEST_F(CliTest, NormOfZeroDataIsZero) {
  ASSERT_EQ(run("preprocess " + path("d.csv") + " -o " + path("d.idx")).status, 0);
  const CmdResult r = run("norm " + path("d.idx") + " " + path("z.json"));
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "0\n");
}

TEST_F(CliTest, QueryAtDataPointReturnsItsValue) {
  ASSERT_EQ(run("preprocess " + path("d.csv") + " -o " + path("d.idx")).status, 0);
  const CmdResult m = run("norm " + path("d.idx") + " " + path("d.csv"));
  ASSERT_EQ(m.status, 0);
  const std::string M = m.out.substr(0, m.out.size() - 1);
  for (int i : {0, 7, 39}) {
    std::ostringstream args;
    args.precision(17);
    args << "query " << path("d.idx") << ' ' << path("d.csv") << ' ' << M << ' ' << xs[i] << ' ' << ys[i];
    const CmdResult r = run(args.str());
    ASSERT_EQ(r.status, 0);
    const double v = std::stod(r.out.substr(r.out.find("\"value\":") + 8));
    EXPECT_NEAR(v, fs_[i], 1e-9 * (1 + std::stod(M)));
    EXPECT_NE(r.out.find("\"depth_set\":["), std::string::npos);
  }
}

TEST_F(CliTest, DeterministicAcrossRuns) {
  ASSERT_EQ(run("preprocess " + path("d.csv") + " -o " + path("a.idx")).status, 0);
  ASSERT_EQ(run("preprocess " + path("d.csv") + " -o " + path("b.idx")).status, 0);
  EXPECT_EQ(slurp(dir / "a.idx"), slurp(dir / "b.idx"));
  const std::string q = " " + path("d.csv") + " 5 0.1 -0.2";
  const CmdResult a = run("query " + path("a.idx") + q), b = run("query " + path("b.idx") + q);
  EXPECT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);
  const CmdResult g = run("grid " + path("a.idx") + " " + path("d.csv") + " 5 --res 4");
  EXPECT_EQ(g.status, 0);
  EXPECT_EQ(std::count(g.out.begin(), g.out.end(), '\n'), 17);
  EXPECT_EQ(run("sets " + path("a.idx")).status, 0);
  EXPECT_EQ(run("dump-cz " + path("a.idx")).status, 0);
}

TEST_F(CliTest, UserErrorsExitWithOne) {
  ASSERT_EQ(run("preprocess " + path("d.csv") + " -o " + path("d.idx")).status, 0);
  EXPECT_EQ(run("query " + path("d.idx") + " " + path("d.csv") + " -1 0 0").status, 1);
  EXPECT_EQ(run("norm " + path("missing.idx") + " " + path("d.csv")).status, 1);
  EXPECT_EQ(run("norm " + path("d.csv") + " " + path("d.csv")).status, 1);
  EXPECT_EQ(run("preprocess " + path("d.csv") + " -o " + path("x.idx") + " --set A1=3").status, 1);
  EXPECT_EQ(run("frobnicate").status, 1);
  {
    std::ofstream bad(dir / "neg.csv");
    bad << "x,y,f\n0,0,-1\n";
  }
  EXPECT_EQ(run("preprocess " + path("neg.csv") + " -o " + path("n.idx")).status, 1);
}
