#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli/commands.hpp"
#include "exvocab/io.hpp"

namespace exvocab {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("exvocab_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    unsetenv(cli::kConfigEnv);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // Stationary base words plus novel markers injected into a fraction f of
  // the 2024 documents.
  std::string write_spec(double f, std::uint64_t docs_per_year = 2000) const {
    nlohmann::json j = {
        {"years", {2021, 2024}},
        {"docs_per_year", docs_per_year},
        {"base_vocab",
         {{{"word", "patients"}, {"p", 0.3}},
          {{"word", "results"}, {"p", 0.2}},
          {{"word", "within"}, {"p", 0.05}},
          {{"word", "rising"}, {"trajectory", {{"2021", 0.01}, {"2022", 0.01}, {"2023", 0.05}, {"2024", 0.2}}}}}},
        {"doc_length", {{"min", 3}, {"max", 8}}},
        {"filler_lexicon", 200},
        {"injection",
         {{"target_year", 2024}, {"fraction", f}, {"marker_pool", {"delves", "showcasing", "underscores"}}}}};
    const std::string p = path("spec.json");
    write_file(p, j.dump(2));
    return p;
  }

  fs::path dir_;
};

TEST_F(CliTest, SynthCountGapRecoversInjectedFraction) {
  const std::string out = path("run");
  const std::string spec = write_spec(0.2);
  ASSERT_EQ(run({"synth", "--spec", spec, "--out", out, "--seed", "5"}).code, 0);
  const CliRun c = run({"count", "--out", out});
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_TRUE(fs::exists(fs::path(out) / "matrix.csv.gz"));
  const CliRun g = run({"gap", "--out", out, "--year", "2024", "--markers", out + "/marker_pool.txt"});
  ASSERT_EQ(g.code, 0) << g.err;
  const auto summary = nlohmann::json::parse(read_file(fs::path(out) / "gap.json"));
  EXPECT_NEAR(summary["rare"]["delta"].get<double>(), 0.2, 0.01);
  EXPECT_NEAR(summary["common"]["delta"].get<double>(), 0.0, 0.01);  // only "within" is present
  EXPECT_TRUE(summary["combined"].is_number());
  const std::string csv = read_file(fs::path(out) / "gap.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "set,year,P,Q,delta,n_docs");
}

TEST_F(CliTest, ExcessAndReportTables) {
  const std::string out = path("run");
  ASSERT_EQ(run({"synth", "--spec", write_spec(0.2), "--out", out}).code, 0);
  ASSERT_EQ(run({"count", "--out", out}).code, 0);
  const CliRun e = run({"excess", "--out", out, "--year", "2024"});
  ASSERT_EQ(e.code, 0) << e.err;
  const std::string stats = read_file(fs::path(out) / "excess_2024.csv");
  EXPECT_EQ(stats.substr(0, stats.find('\n')), "word,year,p,q,delta,ratio,excess,excess_via,label,pos,lemma");
  EXPECT_NE(stats.find("\ndelves,2024,"), std::string::npos);
  EXPECT_NE(stats.find("\nrising,2024,"), std::string::npos);

  const CliRun r = run({"report", "--out", out, "--year", "2024"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string per_year = read_file(fs::path(out) / "report" / "excess_per_year.csv");
  EXPECT_EQ(per_year.substr(0, per_year.find('\n')),
            "year,eligible,excess,content,style,ambiguous,unannotated,lemmas,lemmas_content,lemmas_style,"
            "representative");
  const std::string ts = read_file(fs::path(out) / "report" / "timeseries.csv");
  EXPECT_EQ(ts.substr(0, ts.find('\n')), "word,year,p,q");
  EXPECT_TRUE(fs::exists(fs::path(out) / "report" / "manifest.json"));
}

TEST_F(CliTest, CountOnEmptyInputIsDataError) {
  const std::string out = path("run");
  fs::create_directories(out);
  write_file(fs::path(out) / "documents.jsonl", "");
  const CliRun r = run({"count", "--out", out});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("no documents"), std::string::npos) << r.err;
}

TEST_F(CliTest, MissingArtifactNamesFileAndProducer) {
  const std::string out = path("empty");
  const CliRun r = run({"excess", "--out", out, "--year", "2024"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("matrix.csv.gz"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("exvocab count"), std::string::npos) << r.err;

  const CliRun g = run({"gap", "--out", out});
  EXPECT_EQ(g.code, 2);
  EXPECT_NE(g.err.find("documents.jsonl"), std::string::npos) << g.err;
  EXPECT_NE(g.err.find("exvocab synth"), std::string::npos) << g.err;
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"count", "--no-such-flag"}).code, 1);
  EXPECT_EQ(run({"count", "--workers", "0"}).code, 1);
  EXPECT_EQ(run({"synth", "--out", path("x")}).code, 1);  // no spec
  EXPECT_EQ(run({"count", "--config", path("missing.json")}).code, 1);
  write_file(path("bad.json"), R"({"unknown_key": 1})");
  const CliRun r = run({"count", "--config", path("bad.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("unknown_key"), std::string::npos) << r.err;
}

TEST_F(CliTest, DumpedConfigReloadsIdentically) {
  const CliRun a = run({"--dump-config", "--year", "2021", "--workers", "3", "--seed", "9", "--out", path("o"),
                     "--k", "7", "--lenient"});
  ASSERT_EQ(a.code, 0) << a.err;
  write_file(path("cfg.json"), a.out);
  const CliRun b = run({"--dump-config", "--config", path("cfg.json")});
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(a.out, b.out);
  const auto j = nlohmann::json::parse(a.out);
  EXPECT_EQ(j["target_year"], 2021);
  EXPECT_EQ(j["workers"], 3);
  EXPECT_EQ(j["mode"], "lenient");

  // Same file through the environment variable.
  setenv(cli::kConfigEnv, path("cfg.json").c_str(), 1);
  const CliRun c = run({"--dump-config"});
  unsetenv(cli::kConfigEnv);
  EXPECT_EQ(c.out, a.out);
}

TEST_F(CliTest, RerunsAreByteIdentical) {
  const std::string spec = write_spec(0.05, 500);
  for (const char* d : {"a", "b"}) {
    const std::string out = path(d);
    ASSERT_EQ(run({"synth", "--spec", spec, "--out", out, "--seed", "3"}).code, 0);
    ASSERT_EQ(run({"count", "--out", out, "--workers", d[0] == 'a' ? "1" : "3"}).code, 0);
    ASSERT_EQ(run({"excess", "--out", out, "--year", "2024"}).code, 0);
    ASSERT_EQ(run({"gap", "--out", out, "--markers", out + "/marker_pool.txt"}).code, 0);
  }
  for (const char* f : {"documents.jsonl", "truth.csv", "marker_pool.txt", "synth_summary.json", "matrix.csv.gz",
                        "excess_2024.csv", "excess_2024.json", "gap.csv", "gap.json"}) {
    EXPECT_EQ(read_file(fs::path(path("a")) / f), read_file(fs::path(path("b")) / f)) << f;
  }
}

}  // namespace
}  // namespace exvocab
