#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "json.hpp"

#include "stablemix/data.hpp"

using stablemix::cli::run;
using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

class CliFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("stablemix_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

double param(const json& doc, const std::string& name, const char* field) {
  for (const auto& p : doc.at("parameters"))
    if (p.at("name") == name) return p.at(field).get<double>();
  ADD_FAILURE() << "no parameter " << name;
  return NAN;
}

}  // namespace

TEST(Cli, Help) {
  const auto r = call({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("simulate"), std::string::npos);
  EXPECT_NE(r.out.find("risk"), std::string::npos);
  EXPECT_EQ(call({"risk", "--help"}).code, 0);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(call({}).code, 1);
  EXPECT_EQ(call({"bogus"}).code, 1);
  // simulate without a seed
  const auto noseed = call({"simulate", "--model", "re", "--alpha", "0.5", "--n", "3"});
  EXPECT_EQ(noseed.code, 1);
  EXPECT_EQ(call({"risk", "--m", "0", "--n", "11", "--threshold", "1100", "--mu", "0", "--sigma", "1", "--alpha",
                  "0.5"}).code,
            1);
  EXPECT_EQ(call({"simulate", "--model", "re", "--alpha", "1.5", "--n", "3", "--seed", "1"}).code, 1);
  EXPECT_EQ(call({"fit", "--model", "gev", "--input", "x.csv"}).code, 1);
}

TEST(Cli, ErrorsAreJsonOnStderr) {
  const auto r = call({"simulate", "--model", "re", "--alpha", "0.5", "--n", "3"});
  ASSERT_EQ(r.code, 1);
  EXPECT_TRUE(r.out.empty());
  const auto e = json::parse(r.err);
  EXPECT_EQ(e.at("error").at("exit_code"), 1);
  EXPECT_FALSE(e.at("error").at("message").get<std::string>().empty());
  EXPECT_TRUE(e.at("error").contains("kind"));
}

TEST(Cli, RiskNumbers) {
  const auto grouped = call({"risk", "--m", "6", "--n", "11", "--threshold", "1100", "--mu", "140.9", "--sigma",
                             "54.1", "--alpha", "0.716"});
  ASSERT_EQ(grouped.code, 0) << grouped.err;
  const auto g = json::parse(grouped.out);
  EXPECT_NEAR(g.at("return_period").get<double>(), 9748.2979, 1e-3);
  EXPECT_FALSE(g.at("infinite_return_period").get<bool>());

  const auto pooled = call({"risk", "--m", "1", "--n", "66", "--threshold", "1100", "--mu", "145.6", "--sigma",
                            "69.4", "--alpha", "1"});
  ASSERT_EQ(pooled.code, 0) << pooled.err;
  EXPECT_NEAR(json::parse(pooled.out).at("return_period").get<double>(), 14221.9496, 1e-3);

  // Parameters missing entirely.
  EXPECT_EQ(call({"risk", "--m", "6", "--n", "11", "--threshold", "1100"}).code, 1);
}

TEST_F(CliFiles, SimulateThenFitRecoversTruth) {
  const auto csv = path("re.csv");
  ASSERT_EQ(call({"simulate", "--model", "re", "--alpha", "0.5", "--mu", "3", "--sigma", "2", "--n", "10",
                  "--replicates", "50", "--seed", "11", "--output", csv})
                .code,
            0);
  const auto data = stablemix::read_grouped_csv(csv);
  EXPECT_EQ(data.groups.size(), 50u);
  EXPECT_EQ(data.groups[0].values.size(), 10u);

  const auto out = path("fit.json");
  const auto r = call({"fit", "--model", "re", "--input", csv, "--output", out});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  const auto doc = json::parse(slurp(out));
  EXPECT_EQ(doc.at("command"), "fit");
  EXPECT_EQ(doc.at("model"), "random_effects");
  EXPECT_EQ(doc.at("n_groups"), 50);
  const std::vector<std::pair<std::string, double>> truth{{"mu", 3.0}, {"sigma", 2.0}, {"alpha", 0.5}};
  for (const auto& [name, value] : truth)
    EXPECT_LT(std::abs(param(doc, name, "estimate") - value), 3.0 * param(doc, name, "std_error")) << name;
}

TEST_F(CliFiles, Ma1SimulateThenFit) {
  const auto csv = path("ma.csv");
  ASSERT_EQ(call({"simulate", "--model", "ma1", "--alpha", "0.6", "--b", "0.5", "--n", "60", "--replicates", "3",
                  "--seed", "4", "--output", csv})
                .code,
            0);
  const auto r = call({"fit", "--model", "ma1", "--input", csv, "--starts", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.out);
  EXPECT_EQ(doc.at("model"), "ma1");
  EXPECT_EQ(doc.at("n_series"), 3);
  EXPECT_EQ(doc.at("options").at("starts"), 3);
  EXPECT_EQ(doc.at("n_starts_used"), 3);
  EXPECT_GT(param(doc, "b", "estimate"), 0.0);
}

TEST_F(CliFiles, ByteIdenticalRepeats) {
  const std::vector<std::string> sim{"simulate", "--model", "ar1", "--alpha", "0.7", "--rho", "0.4",
                                     "--n",      "25",      "--replicates", "4", "--seed", "99"};
  const auto a = call(sim);
  const auto b = call(sim);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_FALSE(a.out.empty());
  auto other = sim;
  other.back() = "100";
  EXPECT_NE(call(other).out, a.out);

  const auto csv = path("re.csv");
  ASSERT_EQ(call({"simulate", "--model", "re", "--alpha", "0.6", "--n", "6", "--replicates", "12", "--seed", "2",
                  "--output", csv})
                .code,
            0);
  const auto f1 = call({"fit", "--model", "re", "--input", csv});
  const auto f2 = call({"fit", "--model", "re", "--input", csv});
  EXPECT_EQ(f1.out, f2.out);
}

TEST_F(CliFiles, OtherFamiliesSimulate) {
  EXPECT_EQ(call({"simulate", "--model", "spatial", "--alpha", "0.5", "--delta", "2", "--n", "3", "--seed", "1"}).code,
            0);
  const auto h = call({"simulate", "--model", "hierarchical", "--alpha", "0.5", "--beta", "0.7", "--m", "2", "--n",
                       "3", "--r", "4", "--seed", "1"});
  EXPECT_EQ(h.code, 0) << h.err;
  const auto gev = call({"simulate", "--model", "re", "--alpha", "0.5", "--gamma", "0.2", "--n", "3", "--seed", "1"});
  EXPECT_EQ(gev.code, 0) << gev.err;
}

TEST_F(CliFiles, DataErrors) {
  const auto bad = path("bad.csv");
  std::ofstream(bad) << "group,value\na,1.0\nb,not-a-number\n";
  EXPECT_EQ(call({"fit", "--model", "re", "--input", bad}).code, 2);
  EXPECT_EQ(call({"fit", "--model", "re", "--input", path("missing.csv")}).code, 2);

  const auto one = path("one.csv");
  std::ofstream(one) << "group,value\na,1.0\na,2.0\na,3.5\n";
  const auto r = call({"fit", "--model", "re", "--input", one});
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(json::parse(r.err).at("error").at("exit_code"), 3);
}

TEST_F(CliFiles, DiagnoseWritesPlots) {
  const auto csv = path("re.csv");
  ASSERT_EQ(call({"simulate", "--model", "re", "--alpha", "0.7", "--n", "8", "--replicates", "20", "--seed", "8",
                  "--output", csv})
                .code,
            0);
  const auto fit = path("fit.json");
  ASSERT_EQ(call({"fit", "--model", "re", "--input", csv, "--output", fit}).code, 0);
  const auto rep = path("report.json");
  const auto r = call({"diagnose", "--fit", fit, "--input", csv, "--output", rep});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(slurp(rep));
  EXPECT_EQ(doc.at("command"), "diagnose");
  EXPECT_TRUE(doc.contains("implied_correlation"));
  EXPECT_TRUE(doc.contains("conditional_models"));
  ASSERT_TRUE(fs::exists(path("report_gumbel.csv")));
  ASSERT_TRUE(fs::exists(path("report_qq.csv")));
  const auto gumbel = slurp(path("report_gumbel.csv"));
  EXPECT_EQ(gumbel.rfind("group,x,y\n", 0), 0u);
  EXPECT_EQ(std::count(gumbel.begin(), gumbel.end(), '\n'), 1 + 20 * 8);
  const auto qq = slurp(path("report_qq.csv"));
  EXPECT_EQ(std::count(qq.begin(), qq.end(), '\n'), 1 + 20);
}

TEST_F(CliFiles, RiskWithFitGivesInterval) {
  stablemix::FitResult fit;
  fit.model = "random_effects";
  fit.names = {"mu", "sigma", "alpha"};
  fit.estimates = {140.9, 54.1, 0.716};
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  cov.diagonal() << 21.75 * 21.75, 5.71 * 5.71, 0.118 * 0.118;
  fit.covariance = cov;
  fit.std_errors = {21.75, 5.71, 0.118};
  fit.converged = true;
  const auto doc = stablemix::cli::fit_to_json(fit);
  const auto file = path("fit.json");
  std::ofstream(file) << doc.dump(2);

  const auto r = call({"risk", "--m", "6", "--n", "11", "--threshold", "1100", "--fit", file, "--level", "0.9"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto out = json::parse(r.out);
  EXPECT_NEAR(out.at("return_period").get<double>(), 9748.2979, 1e-3);
  const auto& ci = out.at("interval");
  EXPECT_EQ(ci.at("level"), 0.9);
  EXPECT_LT(ci.at("lower").get<double>(), 9748.0);
  EXPECT_GT(ci.at("upper").get<double>(), 9749.0);

  std::ofstream(path("junk.json")) << "{\"model\": 1}";
  EXPECT_EQ(call({"risk", "--m", "6", "--n", "11", "--threshold", "1100", "--fit", path("junk.json")}).code, 2);
}

TEST(Cli, FitJsonRoundTrip) {
  stablemix::FitResult fit;
  fit.model = "ma1";
  fit.names = {"mu_a", "b", "sigma", "alpha"};
  fit.estimates = {1.5, 0.25, 2.0, 0.6};
  fit.std_errors = {0.1, 0.05, 0.2, std::numeric_limits<double>::infinity()};
  Eigen::Matrix4d cov = Eigen::Matrix4d::Identity() * 0.01;
  cov(3, 3) = std::numeric_limits<double>::infinity();
  fit.covariance = cov;
  fit.loglik = -123.456789012345;
  fit.converged = false;
  const auto back = stablemix::cli::fit_from_json(json::parse(stablemix::cli::fit_to_json(fit).dump()));
  EXPECT_EQ(back.model, fit.model);
  EXPECT_EQ(back.names, fit.names);
  EXPECT_EQ(back.estimates, fit.estimates);
  EXPECT_EQ(back.std_errors, fit.std_errors);
  EXPECT_EQ(back.loglik, fit.loglik);
  EXPECT_FALSE(back.converged);
  ASSERT_TRUE(back.covariance.has_value());
  EXPECT_TRUE(*back.covariance == cov);

  fit.covariance.reset();
  fit.std_errors.clear();
  const auto bare = stablemix::cli::fit_from_json(stablemix::cli::fit_to_json(fit));
  EXPECT_FALSE(bare.covariance.has_value());
  EXPECT_TRUE(bare.std_errors.empty());
}
