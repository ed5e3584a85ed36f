#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ergopt/cli.hpp"

namespace fs = std::filesystem;
using ergopt::cli::Json;

namespace {

const std::string kExamples = ERGOPT_EXAMPLES_DIR;

struct Outcome {
  int code;
  std::string out;
  std::string err;
  Json json() const { return Json::parse(out); }
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = ergopt::cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

std::string example(const std::string& name) { return kExamples + "/" + name; }

fs::path scratch_dir() {
  auto dir = fs::temp_directory_path() / ("ergopt_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

std::string write_spec(const std::string& name, const std::string& body) {
  auto path = scratch_dir() / name;
  std::ofstream(path) << body;
  return path.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, Info) {
  auto r = run({"info", example("golden_mean.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = r.json();
  EXPECT_EQ(j["alphabet"], 2);
  EXPECT_EQ(j["edge_count"], 3);
  EXPECT_EQ(j["mixing_time"], 2);
  EXPECT_EQ(j["simple_cycles"], 2);
}

TEST(Cli, BetaAndEtaExact) {
  auto b = run({"beta", example("golden_mean.json")});
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(b.json()["beta"], "1/2");
  EXPECT_EQ(b.json()["witness_cycle"], Json::parse("[0,1]"));
  auto e = run({"eta", example("golden_mean.json")});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_EQ(e.json()["eta"], "0");
  auto pair = run({"beta", example("golden_mean.json"), "-f", "pair"});
  ASSERT_EQ(pair.code, 0) << pair.err;
  // Blocks 00 -> 1/2, 01 -> -1, 10 -> 1/4: the fixed point 0 wins.
  EXPECT_EQ(pair.json()["beta"], "1/2");
}

TEST(Cli, DoubleModePrintsNumbers) {
  auto b = run({"beta", example("golden_mean.json"), "--mode", "double"});
  ASSERT_EQ(b.code, 0);
  EXPECT_TRUE(b.json()["beta"].is_number());
  EXPECT_DOUBLE_EQ(b.json()["beta"].get<double>(), 0.5);
}

TEST(Cli, CocycleIntervals) {
  auto b = run({"beta", example("golden_mean.json"), "-f", "A"});
  ASSERT_EQ(b.code, 0) << b.err;
  auto j = b.json();
  EXPECT_LE(j["beta_lower"].get<double>(), j["beta_upper"].get<double>());
  auto h = run({"horizon", example("golden_mean.json"), "-f", "A", "--n", "30"});
  EXPECT_EQ(h.code, 4);
  EXPECT_NE(h.err.find("HorizonTooLarge"), std::string::npos);
}

TEST(Cli, LambdaAndInfeasibleLevel) {
  auto l = run({"lambda", example("golden_mean.json"), "--alpha", "3/4"});
  ASSERT_EQ(l.code, 0) << l.err;
  EXPECT_EQ(l.json()["lambda"], "1/4");
  auto bad = run({"lambda", example("golden_mean.json"), "--alpha", "1/4"});
  EXPECT_EQ(bad.code, 3);
  EXPECT_NE(bad.err.find("Infeasible"), std::string::npos);
}

TEST(Cli, SpectrumWritesCsv) {
  auto dir = scratch_dir() / "spectrum";
  auto r = run({"spectrum", example("golden_mean.json"), "--grid", "5", "--csv", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = r.json();
  EXPECT_EQ(j["alpha1"], "1/2");
  EXPECT_EQ(j["alpha2"], "1/2");
  EXPECT_EQ(slurp(dir / "spectrum.csv"),
            "alpha,lambda_lo,lambda_hi\n0.5,0.5,0.5\n0.625,0.375,0.375\n0.75,0.25,0.25\n0.875,0.125,0.125\n1,0,0\n");
}

TEST(Cli, TrivialObjectiveSpectrumIsZero) {
  auto r = run({"spectrum", example("trivial_f0.json"), "--grid", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.json()["beta_f"], "0");
}

TEST(Cli, Ratio) {
  // Phi = x_0 at level 3/4 forces half the mass on the fixed point 0.
  auto r = run({"ratio", example("golden_mean.json"), "-g", "tau", "--psi", "g"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.json()["ratio"], "1/7");
  auto free = run({"ratio", example("full_shift_2.json")});
  ASSERT_EQ(free.code, 0) << free.err;
  EXPECT_EQ(free.json()["ratio"], "1");
  auto sigma = run({"ratio", example("golden_mean.json"), "-g", "tau", "--psi", "g", "--sigma", "3/2"});
  EXPECT_EQ(sigma.code, 2);
}

TEST(Cli, IrregularWritesOscillationCsv) {
  auto dir = scratch_dir() / "irregular";
  auto r = run({"irregular", example("full_shift_2.json"), "--csv", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = r.json();
  EXPECT_EQ(j["ratio_max"], "1");
  EXPECT_EQ(j["witness"]["word_valid"], true);
  EXPECT_EQ(j["witness"]["schedule"].size(), 8u);
  auto csv = slurp(dir / "oscillation.csv");
  EXPECT_EQ(csv.rfind("k,t_k,ratio\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 9);
  auto trivial = run({"irregular", example("full_shift_2.json"), "--phi", "g"});
  EXPECT_EQ(trivial.code, 3);
}

TEST(Cli, Suspension) {
  auto avg = run({"suspension", "average", example("golden_mean.json"), "--cycle", "0,1"});
  ASSERT_EQ(avg.code, 0) << avg.err;
  EXPECT_EQ(avg.json()["flow_average"], "1/3");
  auto lvl = run({"suspension", "level-set", example("golden_mean.json"), "--alpha", "2/5"});
  ASSERT_EQ(lvl.code, 0) << lvl.err;
  EXPECT_EQ(lvl.json()["value"], "1/5");
  auto irr = run({"suspension", "irregular", example("golden_mean.json"), "--depth", "4"});
  ASSERT_EQ(irr.code, 0) << irr.err;
  EXPECT_EQ(irr.json()["value"], "1/3");
  auto bad = run({"suspension", "average", example("golden_mean.json"), "--cycle", "1,1"});
  EXPECT_EQ(bad.code, 2);
}

TEST(Cli, Horizon) {
  auto r = run({"horizon", example("golden_mean.json"), "--n", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.json()["value"], "2/3");
  EXPECT_EQ(r.json()["gap"], "1/6");
}

TEST(Cli, ParseErrors) {
  EXPECT_EQ(run({"beta", "/nonexistent/spec.json"}).code, 2);
  EXPECT_EQ(run({"nosuchcommand"}).code, 2);
  EXPECT_EQ(run({"beta", write_spec("bad.json", "{ not json")}).code, 2);
  EXPECT_EQ(run({"beta", write_spec("format.json", R"({"format": "other", "sft": {"alphabet": 2}})")}).code, 2);
  auto stranded = run({"info", write_spec("stranded.json",
                                          R"({"format": "ergopt-spec/1", "sft": {"alphabet": 2, "allowed": [[0, 0]]}})")});
  EXPECT_EQ(stranded.code, 2);
  EXPECT_NE(stranded.err.find("StrandedSymbol"), std::string::npos);
  auto table = write_spec("table.json", R"({"format": "ergopt-spec/1", "sft": {"alphabet": 2},
    "potentials": {"f": {"type": "block", "range": 2, "weights": [{"block": [0, 0], "value": 1}]}}})");
  EXPECT_EQ(run({"beta", table}).code, 2);
  EXPECT_EQ(run({"beta", example("golden_mean.json"), "-f", "missing"}).code, 2);
}

TEST(Cli, NotMixingIsInfeasibleClass) {
  auto swap = write_spec("swap.json", R"({"format": "ergopt-spec/1", "sft": {"alphabet": 2, "allowed": [[0, 1], [1, 0]]},
    "potentials": {"f": {"type": "indicator", "symbol": 1}, "g": {"type": "constant", "value": 1},
                   "phi": {"type": "indicator", "symbol": 0}}})");
  EXPECT_EQ(run({"beta", swap}).code, 0);
  EXPECT_EQ(run({"irregular", swap}).code, 3);
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
  const std::vector<std::vector<std::string>> commands = {
      {"info", example("golden_mean.json")},
      {"beta", example("golden_mean.json")},
      {"eta", example("golden_mean.json"), "-f", "A"},
      {"spectrum", example("golden_mean.json")},
      {"ratio", example("golden_mean.json")},
      {"irregular", example("full_shift_2.json")},
      {"suspension", "irregular", example("golden_mean.json")},
      {"horizon", example("golden_mean.json"), "-f", "A", "--n", "8"},
  };
  for (const auto& c : commands) {
    auto a = run(c);
    auto b = run(c);
    EXPECT_EQ(a.code, b.code);
    EXPECT_EQ(a.out, b.out) << c.front();
  }
}
