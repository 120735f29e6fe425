#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cli.hpp"
#include "implicitreg/generators.hpp"
#include "implicitreg/graph.hpp"

namespace fs = std::filesystem;
namespace ir = implicitreg;
namespace cli = implicitreg::cli;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("implicitreg_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "implicitreg");
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }

  static std::string slurp(const std::string& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }

  static std::vector<std::string> lines(const std::string& p) {
    std::vector<std::string> out;
    std::ifstream f(p);
    for (std::string l; std::getline(f, l);) out.push_back(l);
    return out;
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

}  // namespace

TEST_F(Cli, GenDumbbellWritesSevenEdges) {
  ASSERT_EQ(run({"gen", "--family", "dumbbell", "--k", "3", "--b", "1", "--out", path("g.el")}), cli::kExitOk)
      << err_.str();
  EXPECT_EQ(lines(path("g.el")).size(), 7u);
  const std::string manifest = slurp(path("g.el.manifest.json"));
  EXPECT_NE(manifest.find("\"command\": \"gen\""), std::string::npos);
  EXPECT_NE(manifest.find("\"version\": \"0.3.0\""), std::string::npos);
  EXPECT_NE(manifest.find("\"fingerprint\""), std::string::npos);
}

TEST_F(Cli, EigenThenSweepFindsTheBridge) {
  ASSERT_EQ(run({"gen", "--family", "dumbbell", "--k", "3", "--b", "1", "--out", path("g.el")}), cli::kExitOk);
  ASSERT_EQ(run({"eigen", "--graph", path("g.el"), "--solver", "dense", "--out", path("e.csv"), "--vector-out",
                 path("v2.vec")}),
            cli::kExitOk)
      << err_.str();
  const auto e = lines(path("e.csv"));
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e[0], "solver,lambda2,iterations,converged");
  const double lambda2 = std::stod(e[1].substr(e[1].find(',') + 1));
  EXPECT_NEAR(lambda2, 0.20466635455687221, 1e-12);

  ASSERT_EQ(run({"sweep", "--graph", path("g.el"), "--vector", path("v2.vec"), "--out", path("s.csv")}),
            cli::kExitOk)
      << err_.str();
  double best = 1.0;
  const auto rows = lines(path("s.csv"));
  for (std::size_t i = 1; i < rows.size(); ++i) best = std::min(best, std::stod(rows[i].substr(rows[i].rfind(',') + 1)));
  EXPECT_NEAR(best, 1.0 / 7.0, 1e-15);
}

TEST_F(Cli, PowerEigenMatchesDense) {
  ASSERT_EQ(run({"eigen", "--graph", "gen:cycle:n=7", "--solver", "power", "--iters", "5000", "--out", path("e.csv")}),
            cli::kExitOk)
      << err_.str();
  const auto e = lines(path("e.csv"));
  EXPECT_NEAR(std::stod(e[1].substr(e[1].find(',') + 1)), 1.0 - std::cos(2.0 * std::numbers::pi / 7.0), 1e-6);
}

TEST_F(Cli, VerifyRegSingleEdge) {
  std::ofstream(path("edge.el")) << "0 1\n";
  ASSERT_EQ(run({"verify-reg", "--graph", path("edge.el"), "--out", path("vr.csv")}), cli::kExitOk) << err_.str();
  const auto rows = lines(path("vr.csv"));
  ASSERT_EQ(rows.size(), 10u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::stringstream ss(rows[i]);
    std::vector<std::string> f;
    for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
    ASSERT_EQ(f.size(), 11u);
    EXPECT_LE(std::stod(f[5]), 1e-12) << rows[i];
  }
  EXPECT_NE(out_.str().find("status=pass"), std::string::npos);
}

TEST_F(Cli, VerifyRegRandomRegularHeatGrid) {
  ASSERT_EQ(run({"verify-reg", "--graph", "gen:regular:n=20,degree=3:1", "--t", "0.1,1,10", "--out", path("vr.csv")}),
            cli::kExitOk)
      << err_.str();
  int heat = 0, lazy = 0;
  for (const auto& row : lines(path("vr.csv"))) {
    if (row.find(",heat,") != std::string::npos) {
      ++heat;
      std::stringstream ss(row);
      std::vector<std::string> f;
      for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
      EXPECT_LE(std::stod(f[5]), 1e-6) << row;
    }
    if (row.find("best_fit_p=") != std::string::npos) ++lazy;
  }
  EXPECT_EQ(heat, 3);
  EXPECT_EQ(lazy, 3);
}

TEST_F(Cli, ScatterZeroTrialsIsHeaderOnly) {
  ASSERT_EQ(run({"scatter", "--graph", "gen:ring:count=4,size=4", "--trials", "0", "--out", path("sc.csv")}),
            cli::kExitOk)
      << err_.str();
  EXPECT_EQ(slurp(path("sc.csv")),
            "method,seed_node,param,cluster_size,volume,cut,conductance,avg_internal_spl,connected,ext_int_ratio\n");
}

TEST_F(Cli, RerunsAreByteIdentical) {
  const std::vector<std::string> args{"scatter", "--graph", "gen:whiskered:core=30,degree=3,whiskers=5,length=4:2",
                                      "--trials", "6", "--seed", "9", "--out"};
  auto a = args, b = args;
  a.push_back(path("a.csv"));
  b.push_back(path("b.csv"));
  ASSERT_EQ(run(a), cli::kExitOk) << err_.str();
  ASSERT_EQ(run(b), cli::kExitOk) << err_.str();
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  // Manifests differ only in the output path they name.
  std::string ma = slurp(path("a.csv.manifest.json")), mb = slurp(path("b.csv.manifest.json"));
  ma.replace(ma.find("a.csv"), 5, "x.csv");
  mb.replace(mb.find("b.csv"), 5, "x.csv");
  EXPECT_EQ(ma, mb);
}

TEST_F(Cli, MqiAndLocal) {
  ASSERT_EQ(run({"gen", "--family", "dumbbell", "--k", "3", "--b", "1", "--out", path("g.el")}), cli::kExitOk);
  ASSERT_EQ(run({"mqi", "--graph", path("g.el"), "--nodes", "0,1,2,3", "--out", path("m.csv"), "--history",
                 path("h.csv")}),
            cli::kExitOk)
      << err_.str();
  const auto m = lines(path("m.csv"));
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[1].rfind("mqi,-1,nan,3,7,1,", 0), 0u) << m[1];
  EXPECT_EQ(lines(path("h.csv")).size(), 3u);

  ASSERT_EQ(run({"local", "--graph", path("g.el"), "--node", "0", "--budget", "7", "--out", path("l.csv")}),
            cli::kExitOk)
      << err_.str();
  EXPECT_EQ(lines(path("l.csv"))[1].find("push,0,"), 0u);
  EXPECT_NE(lines(path("l.csv"))[1].find(",3,7,1,"), std::string::npos);
}

TEST_F(Cli, DiffuseModes) {
  std::ofstream(path("edge.el")) << "0 1\n";
  ASSERT_EQ(run({"diffuse", "--graph", path("edge.el"), "--dynamics", "pagerank", "--gamma", "0.5", "--seed-nodes",
                 "0", "--out", path("p.vec")}),
            cli::kExitOk)
      << err_.str();
  const auto p = ir::read_vector_file(path("p.vec"));
  EXPECT_NEAR(p[0], 2.0 / 3.0, 1e-15);
  ASSERT_EQ(run({"diffuse", "--graph", path("edge.el"), "--dynamics", "heat", "--mode", "series", "--t", "1",
                 "--seed-nodes", "0", "--out", path("h.vec")}),
            cli::kExitOk);
  EXPECT_EQ(run({"diffuse", "--graph", path("edge.el"), "--dynamics", "heat", "--mode", "richardson",
                 "--seed-nodes", "0", "--out", path("x.vec")}),
            cli::kExitInvalid);
}

TEST_F(Cli, IdMapWhenIdsChange) {
  std::ofstream(path("g.el")) << "10 11\n11 12\n20 21\n";
  ASSERT_EQ(run({"eigen", "--graph", path("g.el"), "--out", path("e.csv")}), cli::kExitOk) << err_.str();
  EXPECT_EQ(slurp(path("e.csv.idmap.csv")), "old_id,new_id\n10,0\n11,1\n12,2\n");
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run({"eigen", "--out", path("x")}), cli::kExitInvalid);
  EXPECT_EQ(run({"eigen", "--graph", path("missing.el"), "--out", path("x")}), cli::kExitInvalid);
  EXPECT_NE(err_.str().find("graph-io:"), std::string::npos) << err_.str();
  EXPECT_EQ(run({"gen", "--family", "moebius", "--n", "4", "--out", path("x")}), cli::kExitInvalid);
  EXPECT_EQ(run({"bogus"}), cli::kExitInvalid);
  EXPECT_EQ(run({"--help"}), cli::kExitOk);
  // Weights this large overflow the exact integer flow capacities.
  std::ofstream(path("heavy.el")) << "0 1 1e18\n1 2 1e18\n2 3 1\n";
  EXPECT_EQ(run({"mqi", "--graph", path("heavy.el"), "--nodes", "0,1,2", "--out", path("m.csv")}),
            cli::kExitNumerical)
      << err_.str();
}
