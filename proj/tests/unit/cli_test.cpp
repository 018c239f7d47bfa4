#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "vvkrr/cli/commands.hpp"
#include "vvkrr/textio.hpp"

namespace vvkrr::cli {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("vvkrr_cli_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  return dir;
}

ExperimentConfig small_config(const fs::path& out) {
  return parse_config(
      "id = small\n[spectral]\nsize = 128\n[target]\nd_y = 2\n[experiment]\nns = 32, 64, 128, 256\nn_seeds = 3\n",
      {{"experiment.output_dir", out.string()}});
}

TEST(ParseConfigTest, DefaultsFromEmptyText) {
  const auto c = parse_config("");
  EXPECT_EQ(c.spectral_size, 512u);
  EXPECT_EQ(c.d_y, 4u);
  EXPECT_EQ(c.n_seeds, 20u);
  EXPECT_EQ(c.p, 0.5);
  EXPECT_EQ(c.beta, 1.0);
  EXPECT_EQ(c.tolerance_or_default(), 0.12);
  EXPECT_EQ(c.alpha_or_default(), 0.5);
}

TEST(ParseConfigTest, RejectsBetaOutsideRange) {
  try {
    parse_config("[target]\nbeta = 3\n");
    FAIL();
  } catch (const ConfigError& e) {
    ASSERT_EQ(e.diagnostics().size(), 1u);
    EXPECT_NE(e.diagnostics()[0].find("(0, 2]"), std::string::npos);
  }
}

TEST(ParseConfigTest, NamesUnknownKeysWithLines) {
  try {
    parse_config("id = x\n[target]\nbetta = 1\n[noise]\nsigma = 2\n");
    FAIL();
  } catch (const ConfigError& e) {
    ASSERT_EQ(e.diagnostics().size(), 2u);
    EXPECT_NE(e.diagnostics()[0].find("'target.betta'"), std::string::npos);
    EXPECT_NE(e.diagnostics()[0].find("line 3"), std::string::npos);
    EXPECT_NE(e.diagnostics()[1].find("'noise.sigma'"), std::string::npos);
  }
}

TEST(ParseConfigTest, AggregatesEveryProblem) {
  try {
    parse_config("[target]\nbeta = 0\nd_y = zero\n[schedule]\ntheta = 0.5\n[experiment]\nns = 10, 20\nfoo = 1\n");
    FAIL();
  } catch (const ConfigError& e) {
    const std::string all = e.what();
    for (const char* needle : {"target.beta", "target.d_y", "schedule.theta", "experiment.ns", "experiment.foo"}) {
      EXPECT_NE(all.find(needle), std::string::npos) << needle;
    }
  }
}

TEST(ParseConfigTest, SyntaxErrorCitesLine) {
  try {
    parse_config("id = a\n[target]\nbeta 1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(ParseConfigTest, DuplicateKeysRejected) {
  EXPECT_THROW(parse_config("[target]\nbeta = 1\nbeta = 2\n"), ConfigError);
}

TEST(ParseConfigTest, OverridesWinAndEchoRoundTrips) {
  const auto c = parse_config("[target]\nbeta = 1\n", {parse_override("target.beta=2"), {"schedule.lambda", "0.01"}});
  EXPECT_EQ(c.beta, 2.0);
  ASSERT_TRUE(c.fixed_lambda.has_value());
  const auto again = parse_config(echo_config(c));
  EXPECT_EQ(echo_config(again), echo_config(c));
  EXPECT_EQ(again.fixed_lambda, c.fixed_lambda);
  EXPECT_THROW(parse_override("nothing"), std::invalid_argument);
}

TEST(ParseConfigTest, ToleranceDefaults) {
  EXPECT_EQ(parse_config("[target]\nbeta = 0.5\nkind = boundary\n").tolerance_or_default(), 0.15);
  EXPECT_EQ(parse_config("[schedule]\ngamma = 0.25\n").tolerance_or_default(), 0.15);
  EXPECT_EQ(parse_config("[kernel]\nfamily = matern\n").tolerance_or_default(), 0.15);
  EXPECT_EQ(parse_config("[experiment]\ntolerance = 0.2\n").tolerance_or_default(), 0.2);
}

TEST(ParseConfigTest, ShippedConfigsAreValid) {
  for (const auto& entry : fs::directory_iterator(VVKRR_EXAMPLE_CONFIG_DIR)) {
    EXPECT_NO_THROW(parse_config(slurp(entry.path()))) << entry.path();
  }
}

TEST(Sha256Test, KnownVectors) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(RunRatesTest, WritesArtifactsDeterministically) {
  const auto dir_a = scratch("rates_a"), dir_b = scratch("rates_b");
  RunOptions opts;
  opts.workers = 1;
  cmd_run_rates(small_config(dir_a), opts);
  opts.workers = 3;
  cmd_run_rates(small_config(dir_b), opts);
  for (const char* f : {"cells.csv", "summary.txt", "plot.dat"}) {
    ASSERT_TRUE(fs::exists(dir_a / f)) << f;
    EXPECT_EQ(slurp(dir_a / f), slurp(dir_b / f)) << f;
  }
  const std::string manifest = slurp(dir_a / "manifest.txt");
  EXPECT_NE(manifest.find("master_seed = 0"), std::string::npos);
  const auto entries = text::parse_key_values(manifest);
  int checked = 0;
  for (const auto& kv : entries) {
    if (kv.key.starts_with("sha256.")) {
      EXPECT_EQ(kv.value, sha256_hex(slurp(dir_a / kv.key.substr(7)))) << kv.key;
      ++checked;
    }
  }
  EXPECT_EQ(checked, 4);
  // The echoed config reproduces the run.
  const auto replay = parse_config(slurp(dir_a / "config.txt"));
  EXPECT_EQ(echo_config(replay), slurp(dir_a / "config.txt"));
}

TEST(RunRatesTest, WrongTheoryExponentFails) {
  auto c = small_config(scratch("wrong"));
  c.theory_exponent = 2.0;
  EXPECT_EQ(cmd_run_rates(c, RunOptions{}), kFail);
}

TEST(RunRatesTest, DefaultConfigPasses) {
  auto c = parse_config("", {{"experiment.output_dir", scratch("default").string()}});
  EXPECT_EQ(cmd_run_rates(c, RunOptions{}), kPass);
}

TEST(RunRatesTest, BlackBoxKernelRuns) {
  auto c = parse_config("[kernel]\nfamily = gaussian\nlengthscale = 0.2\nnodes = 50\n[target]\nd_y = 2\n"
                        "[experiment]\nns = 32, 64, 128, 256\nn_seeds = 2\nn_test = 500\n",
                        {{"experiment.output_dir", scratch("gauss").string()}});
  const int code = cmd_run_rates(c, RunOptions{});
  EXPECT_TRUE(code == kPass || code == kFail);
  EXPECT_TRUE(fs::exists(fs::path(c.output_dir) / "cells.csv"));
}

TEST(BiasCheckTest, PassesAndWritesTable) {
  auto c = parse_config("[target]\nbeta = 1.5\nbound = 2\n[schedule]\ngamma = 0.5\n",
                        {{"experiment.output_dir", scratch("bias").string()}});
  EXPECT_EQ(cmd_bias_check(c, RunOptions{}), kPass);
  const std::string table = slurp(fs::path(c.output_dir) / "bias.csv");
  EXPECT_EQ(table.substr(0, table.find('\n')), "lambda,bias,bound");
}

TEST(EdimTest, PassesForPowerLawAndFailsForLogDecay) {
  auto c = parse_config("[spectral]\np = 0.5\n", {{"experiment.output_dir", scratch("edim").string()}});
  EXPECT_EQ(cmd_edim(c, RunOptions{}), kPass);
  std::string mu;
  for (int i = 1; i <= 512; ++i) mu += text::format_double(1.0 / std::log(i + 2.0)) + " ";
  auto bad = parse_config("[spectral]\np = 0.9\neigenvalues = " + mu + "\n",
                          {{"experiment.output_dir", scratch("edim_bad").string()}});
  EXPECT_EQ(cmd_edim(bad, RunOptions{}), kFail);
}

TEST(LowerBoundDemoTest, Passes) {
  auto c = parse_config("[spectral]\nsize = 32\n[lowerbound]\ntrials = 200\npairs = 3\nmc_draws = 100000\n",
                        {{"experiment.output_dir", scratch("lb").string()}});
  EXPECT_EQ(cmd_lower_bound_demo(c, RunOptions{}), kPass);
  EXPECT_TRUE(fs::exists(fs::path(c.output_dir) / "kl.csv"));
}

TEST(SobolevDemoTest, WritesPhatSummary) {
  auto c = parse_config("[kernel]\nfamily = matern\nnodes = 100\n[target]\nd_y = 2\n"
                        "[experiment]\nns = 32, 64, 128, 256\nn_seeds = 2\nn_test = 1000\n[nystrom]\npoints = 500\n",
                        {{"experiment.output_dir", scratch("sobolev").string()}});
  cmd_sobolev_demo(c, RunOptions{});
  const std::string summary = slurp(fs::path(c.output_dir) / "summary.txt");
  EXPECT_NE(summary.find("p_hat = "), std::string::npos);
  EXPECT_NE(summary.find("error_path = monte-carlo-l2"), std::string::npos);
}

TEST(ArtifactsTest, UnwritableDirectoryReportsPath) {
  auto c = small_config("/proc/vvkrr-denied");
  try {
    cmd_run_rates(c, RunOptions{});
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("/proc/vvkrr-denied"), std::string::npos);
  }
}

}  // namespace
}  // namespace vvkrr::cli
