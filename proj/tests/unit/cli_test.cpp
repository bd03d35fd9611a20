#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fasc_tools/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "fasc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = fasc::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fasc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    // Two orthogonal bundles, ids 0..5, label = bundle.
    std::ofstream csv(dir_ / "two.csv");
    csv << "id,f0,f1,f2,f3,label\n"
        << "0,1.0,0.5,0,0,0\n1,1.02,0.49,0,0,0\n2,0.98,0.51,0,0,0\n"
        << "3,0,0,1.0,0.3,1\n4,0,0,0.97,0.31,1\n5,0,0,1.01,0.29,1\n";
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, ClusterTwoBundles) {
  const auto out = dir_ / "run";
  const auto r = invoke({"cluster", "--input", (dir_ / "two.csv").string(), "--tau-intra", "0.7",
                         "--tau-inter", "0.7", "--k-max", "4", "--workers", "1", "--out-dir",
                         out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto summary = nlohmann::json::parse(slurp(out / "summary.json"));
  EXPECT_EQ(summary["K_active"], 2);
  EXPECT_EQ(summary["outliers"], 0);
  EXPECT_EQ(summary["N"], 6);
  // Cluster sizes in centroids.csv plus outliers account for every sample.
  std::istringstream centroids(slurp(out / "centroids.csv"));
  std::string line;
  std::getline(centroids, line);
  int total = summary["outliers"].get<int>();
  int rows = 0;
  while (std::getline(centroids, line)) {
    const auto a = line.find(',');
    const auto b = line.find(',', a + 1);
    total += std::stoi(line.substr(a + 1, b - a - 1));
    ++rows;
  }
  EXPECT_EQ(total, 6);
  EXPECT_LE(rows, 4);
  EXPECT_EQ(summary["termination"], "converged");
  for (const char* f : {"trace.jsonl", "assignments.csv", "centroids.csv", "labels.csv",
                        "state.ckpt", "manifest.json"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  EXPECT_EQ(manifest["kernel"], "cosine");
  EXPECT_EQ(manifest["input"]["sha256"].size(), 1u);

  const auto eval = invoke({"evaluate", "--assignments", (out / "assignments.csv").string(),
                            "--labels", (out / "labels.csv").string(), "--state",
                            (out / "state.ckpt").string(), "--blending-threshold", "0.5"});
  ASSERT_EQ(eval.code, 0) << eval.err;
  const auto report = nlohmann::json::parse(eval.out);
  EXPECT_DOUBLE_EQ(report["ari"].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(report["core_purity"].get<double>(), 1.0);
  EXPECT_TRUE(report["blending_pairs"].empty());
}

TEST_F(CliTest, RerunIsByteIdentical) {
  std::vector<std::string> files{"trace.jsonl", "assignments.csv", "centroids.csv",
                                 "summary.json", "state.ckpt"};
  std::vector<std::string> first;
  for (const char* sub : {"a", "b"}) {
    const auto out = dir_ / sub;
    const auto r = invoke({"cluster", "--input", (dir_ / "two.csv").string(), "--tau-intra",
                           "0.9", "--tau-inter", "0.9", "--out-dir", out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    for (std::size_t i = 0; i < files.size(); ++i) {
      const auto content = slurp(out / files[i]);
      if (first.size() < files.size()) {
        first.push_back(content);
      } else {
        EXPECT_EQ(content, first[i]) << files[i];
      }
    }
  }
}

TEST_F(CliTest, OutOfRangeThresholdNamesTheFlag) {
  const auto r = invoke({"cluster", "--input", (dir_ / "two.csv").string(), "--tau-intra", "1.5",
                         "--out-dir", (dir_ / "bad").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--tau-intra"), std::string::npos) << r.err;
}

TEST_F(CliTest, UnknownAlgorithmIsUsageError) {
  const auto r = invoke({"baseline", "--algo", "dbscan", "--input", (dir_ / "two.csv").string()});
  EXPECT_EQ(r.code, 2);
}

TEST_F(CliTest, MissingInputIsIoError) {
  const auto r = invoke({"cluster", "--input", (dir_ / "absent.csv").string(), "--out-dir",
                         (dir_ / "x").string()});
  EXPECT_EQ(r.code, 3);
}

TEST_F(CliTest, MalformedInputReportsLine) {
  {
    std::ofstream bad(dir_ / "bad.csv");
    bad << "id,f0,f1\n0,1,2\n1,1\n";
  }
  const auto r = invoke({"cluster", "--input", (dir_ / "bad.csv").string(), "--out-dir",
                         (dir_ / "x").string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST_F(CliTest, KMeansBaselineBundle) {
  const auto out = dir_ / "km";
  const auto r = invoke({"baseline", "--algo", "kmeans", "--k", "2", "--input",
                         (dir_ / "two.csv").string(), "--out-dir", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto eval = invoke({"evaluate", "--assignments", (out / "assignments.csv").string(),
                            "--labels", (out / "labels.csv").string()});
  ASSERT_EQ(eval.code, 0) << eval.err;
  EXPECT_DOUBLE_EQ(nlohmann::json::parse(eval.out)["ari"].get<double>(), 1.0);

  const auto too_many = invoke({"baseline", "--algo", "kmeans", "--k", "9", "--input",
                                (dir_ / "two.csv").string(), "--out-dir", out.string()});
  EXPECT_EQ(too_many.code, 2);
}

TEST_F(CliTest, Art2aBaselineRuns) {
  const auto out = dir_ / "art";
  const auto r = invoke({"baseline", "--algo", "art2a", "--vigilance", "0.9", "--input",
                         (dir_ / "two.csv").string(), "--out-dir", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(slurp(out / "summary.json"))["K_active"], 2);
}

TEST_F(CliTest, Art2aOrderSeedsChangeAssignments) {
  // (1,1) ties between the two axis prototypes; the first one created wins.
  {
    std::ofstream csv(dir_ / "boundary.csv");
    csv << "id,f0,f1\n0,1,0\n1,0,1\n2,1,1\n";
  }
  std::set<std::string> outcomes;
  for (int seed = 0; seed < 8; ++seed) {
    const auto out = dir_ / ("order" + std::to_string(seed));
    const auto r = invoke({"baseline", "--algo", "art2a", "--vigilance", "0.7", "--order-seed",
                           std::to_string(seed), "--input", (dir_ / "boundary.csv").string(),
                           "--out-dir", out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    // Partition as a string of pair co-memberships.
    std::istringstream in(slurp(out / "assignments.csv"));
    std::string line;
    std::getline(in, line);
    std::vector<int> ids;
    while (std::getline(in, line)) ids.push_back(std::stoi(line.substr(line.find(',') + 1)));
    outcomes.insert(std::string{ids[0] == ids[2] ? 'a' : '-', ids[1] == ids[2] ? 'b' : '-'});
  }
  EXPECT_GE(outcomes.size(), 2u);
}

TEST_F(CliTest, GenerateThenClusterSparse) {
  const auto data = dir_ / "gen.triplets";
  const auto labels = dir_ / "gen_labels.csv";
  auto r = invoke({"generate", "--n", "60", "--dim", "30", "--k-true", "3", "--noise", "0.05",
                   "--peaks", "6", "--format", "sparse", "--out", data.string(), "--labels-out",
                   labels.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto out = dir_ / "sparse_run";
  r = invoke({"cluster", "--input", data.string(), "--format", "sparse", "--labels",
              labels.string(), "--tau-intra", "0.8", "--tau-inter", "0.8", "--out-dir",
              out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto eval = invoke({"evaluate", "--assignments", (out / "assignments.csv").string(),
                            "--labels", labels.string()});
  ASSERT_EQ(eval.code, 0) << eval.err;
  EXPECT_DOUBLE_EQ(nlohmann::json::parse(eval.out)["ari"].get<double>(), 1.0);
}

TEST_F(CliTest, EvaluateRejectsMismatchedIds) {
  {
    std::ofstream a(dir_ / "a.csv");
    a << "id,cluster_id\n0,0\n1,0\n";
    std::ofstream l(dir_ / "l.csv");
    l << "id,label\n0,1\n7,1\n";
  }
  const auto r = invoke({"evaluate", "--assignments", (dir_ / "a.csv").string(), "--labels",
                         (dir_ / "l.csv").string()});
  EXPECT_EQ(r.code, 2);
}

TEST_F(CliTest, SweepWritesCsvAndJson) {
  const auto out = dir_ / "sweep";
  const auto r = invoke({"sweep", "--sizes", "60,120", "--reps", "1", "--dim", "20", "--k-true",
                         "2", "--peaks", "4", "--k-max", "4", "--out-dir", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = slurp(out / "scaling.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "N,iters,total_s,s_per_iter");
  EXPECT_TRUE(nlohmann::json::parse(slurp(out / "scaling.json"))["fit_valid"].get<bool>());
}

TEST_F(CliTest, HelpExitsCleanly) {
  EXPECT_EQ(invoke({"--help"}).code, 0);
  EXPECT_EQ(invoke({"cluster"}).code, 2);  // missing --input
}
