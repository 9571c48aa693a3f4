#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "avcert/pipeline.hpp"
#include "avcert/scenarios.hpp"
#include "avcert/simulator.hpp"
#include "cli.hpp"
#include "json.hpp"
#include "support.hpp"

namespace avcert {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result cli_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

const std::string kModel = std::string(AVCERT_FIXTURE_DIR) + "/av-model.json";
const std::string kIncomplete = std::string(AVCERT_FIXTURE_DIR) + "/incomplete-model.json";

TEST(CliDistance, HandValue) {
  const Result r = cli_run({"distance", "--vr", "30", "--vf", "30", "--p", "1", "--amax", "2",
                            "--bmin", "4", "--bmax", "8"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("longitudinal safe distance: 102.75 m"), std::string::npos) << r.out;
}

TEST(CliDistance, Stationary) {
  const Result r = cli_run({"distance", "--vr", "0", "--vf", "0", "--p", "0"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("longitudinal safe distance: 0 m"), std::string::npos) << r.out;
}

TEST(CliDistance, ZeroBrakeNamesInvariant) {
  const Result r = cli_run({"distance", "--bmin", "0"});
  EXPECT_EQ(r.code, cli::kInvalid);
  EXPECT_NE(r.err.find("brake_min"), std::string::npos) << r.err;
}

TEST(CliDistance, SweepWritesCsvAndSvg) {
  const auto dir = test::scratch_dir("cli-sweep");
  const Result r = cli_run({"distance", "--sweep", "vr=0..40", "--points", "5", "--mu-adh", "0.3",
                            "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(dir / "distance_sweep.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "vr,d_min,two_second_gap,d_min_adhesion");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
  const std::string svg = slurp(dir / "distance_sweep.svg");
  EXPECT_NE(svg.find("two-second gap"), std::string::npos);
}

TEST(CliDistance, BadSweepIsUsageError) {
  EXPECT_EQ(cli_run({"distance", "--sweep", "speed=1..2"}).code, cli::kUsage);
  EXPECT_EQ(cli_run({"distance", "--sweep", "vr=5..1"}).code, cli::kUsage);
}

TEST(CliDistance, OutputDirFromEnvironment) {
  const auto dir = test::scratch_dir("cli-env");
  ::setenv(cli::kOutEnv, dir.string().c_str(), 1);
  const Result r = cli_run({"distance", "--sweep", "vr=0..10", "--points", "3"});
  ::unsetenv(cli::kOutEnv);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "distance_sweep.csv"));
}

TEST(CliSimulate, SafeCatalogRunExitsZero) {
  const auto dir = test::scratch_dir("cli-sim-safe");
  const Result r = cli_run({"simulate", "--catalog", "follow-lead/front-stops", "--ego", "rss",
                            "--out", dir.string()});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  for (const char* f : {"follow-lead_front-stops.trace.json", "follow-lead_front-stops.trace.csv",
                        "follow-lead_front-stops.gap.svg", "follow-lead_front-stops.lateral.svg"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
}

TEST(CliSimulate, UnsafeCutInBlamesCutter) {
  const auto dir = test::scratch_dir("cli-sim-unsafe");
  const Result r = cli_run({"simulate", "--catalog", "lane-change/unsafe", "--ego", "scripted",
                            "--blame", "--out", dir.string()});
  EXPECT_EQ(r.code, cli::kSafetyViolation);
  EXPECT_NE(r.out.find("blame: cutter"), std::string::npos) << r.out;
  // The written trace is re-readable and yields the same blame.
  const Result again = cli_run({"blame", (dir / "lane-change_unsafe.trace.json").string()});
  EXPECT_EQ(again.code, 0);
  EXPECT_NE(again.out.find("blame: cutter"), std::string::npos);
}

TEST(CliSimulate, MissingFileIsIoError) {
  EXPECT_EQ(cli_run({"simulate", "--file", "/nonexistent/missing.json"}).code, cli::kIoOrParse);
}

TEST(CliSimulate, MalformedFileReportsLocation) {
  const auto dir = test::scratch_dir("cli-sim-bad");
  auto j = nlohmann::ordered_json::parse(scenarios::to_json(*scenarios::find_in_catalog("drift/safe")));
  j["agents"][0]["width"] = "wide";
  std::ofstream(dir / "bad.json") << j.dump();
  const Result r = cli_run({"simulate", "--file", (dir / "bad.json").string()});
  EXPECT_EQ(r.code, cli::kIoOrParse);
  EXPECT_NE(r.err.find("/agents/0/width"), std::string::npos) << r.err;
}

TEST(CliSimulate, UnknownCatalogIdIsUsageError) {
  EXPECT_EQ(cli_run({"simulate", "--catalog", "nope"}).code, cli::kUsage);
}

TEST(CliSimulate, OverridesAndFormatSelection) {
  const auto dir = test::scratch_dir("cli-sim-fmt");
  const Result r = cli_run({"simulate", "--catalog", "drift/safe", "--format", "json", "--horizon",
                            "1", "--dt", "0.05", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_FALSE(fs::exists(dir / "drift_safe.trace.csv"));
  const auto t = simulator::trace_from_json(slurp(dir / "drift_safe.trace.json"));
  EXPECT_EQ(t.frames.size(), 21u);
  EXPECT_DOUBLE_EQ(t.dt, 0.05);
}

TEST(CliCatalog, ExportedScenarioRunsFromFile) {
  const auto dir = test::scratch_dir("cli-export");
  ASSERT_EQ(cli_run({"catalog", "export", "--all", "--out", dir.string()}).code, 0);
  const auto file = dir / "wrong-lane-turn_safe.scenario.json";
  ASSERT_TRUE(fs::exists(file));
  EXPECT_EQ(scenarios::to_json(scenarios::load_file(file.string())),
            scenarios::to_json(*scenarios::find_in_catalog("wrong-lane-turn/safe")));
  EXPECT_EQ(cli_run({"simulate", "--file", file.string(), "--out", dir.string()}).code, 0);
}

TEST(CliCatalog, ListsEveryId) {
  const Result r = cli_run({"catalog", "list"});
  for (const auto& id : scenarios::catalog_ids()) EXPECT_NE(r.out.find(id), std::string::npos);
}

TEST(CliClassify, UnsafeAndSafe) {
  const Result bad = cli_run({"classify", "--follower-speed", "30", "--cutter-speed", "30", "--gap",
                              "50", "--p", "1", "--amax", "2", "--bmin", "4", "--bmax", "8"});
  EXPECT_EQ(bad.code, cli::kSafetyViolation);
  EXPECT_NE(bad.out.find("UnsafeChange"), std::string::npos);
  EXPECT_NE(bad.out.find("intrusion: 52.75"), std::string::npos) << bad.out;
  const Result good = cli_run({"classify", "--follower-speed", "30", "--cutter-speed", "30",
                               "--gap", "110", "--p", "1", "--amax", "2", "--bmin", "4", "--bmax", "8"});
  EXPECT_EQ(good.code, 0);
  EXPECT_NE(good.out.find("SafeChange"), std::string::npos);
}

TEST(CliSweep, SmallSoundnessAndOracleRuns) {
  const Result s = cli_run({"sweep", "soundness", "--runs", "10", "--seed", "3"});
  EXPECT_EQ(s.code, 0) << s.out;
  EXPECT_NE(s.out.find("collisions: 0"), std::string::npos);
  const Result o = cli_run({"sweep", "oracle", "--tuples", "4", "--lateral-tuples", "4", "--serial"});
  EXPECT_EQ(o.code, 0) << o.out;
}

TEST(CliStpa, ValidateHaraConcept) {
  const Result v = cli_run({"stpa", "validate", kModel});
  EXPECT_EQ(v.code, 0);
  EXPECT_EQ(v.out.rfind("OK", 0), 0u) << v.out;

  const Result h = cli_run({"stpa", "hara", kModel});
  ASSERT_EQ(h.code, 0);
  EXPECT_EQ(nlohmann::json::parse(h.out)["hazardous_events"].size(), 2u);

  const Result g = cli_run({"stpa", "uca-grid", kModel});
  ASSERT_EQ(g.code, 0);
  EXPECT_EQ(nlohmann::json::parse(g.out)["candidates"].size(), 12u);

  const auto dir = test::scratch_dir("cli-concept");
  const Result c = cli_run({"stpa", "concept", kModel, "--out", dir.string()});
  ASSERT_EQ(c.code, 0) << c.err;
  const auto doc = nlohmann::json::parse(slurp(dir / "safety-concept.json"));
  EXPECT_EQ(doc["requirements"].size(), 1u);
}

TEST(CliStpa, IncompleteConceptListsUca) {
  const Result r = cli_run({"stpa", "concept", kIncomplete});
  EXPECT_EQ(r.code, cli::kInvalid);
  EXPECT_NE(r.err.find("UCA2"), std::string::npos) << r.err;
}

TEST(CliStpa, ValidationErrorsNameIds) {
  const auto dir = test::scratch_dir("cli-stpa-bad");
  auto j = nlohmann::ordered_json::parse(slurp(kModel));
  j["hazards"][0]["linked_accidents"] = {"A7"};
  std::ofstream(dir / "m.json") << j.dump();
  const Result r = cli_run({"stpa", "validate", (dir / "m.json").string()});
  EXPECT_EQ(r.code, cli::kInvalid);
  EXPECT_NE(r.err.find("A7"), std::string::npos) << r.err;
}

TEST(CliPipeline, CreateAndStatus) {
  const auto dir = test::scratch_dir("cli-pipe");
  ASSERT_EQ(cli_run({"pipeline", "--dir", dir.string(), "create", "demo"}).code, 0);
  const Result s = cli_run({"pipeline", "--dir", dir.string(), "status", "demo"});
  EXPECT_EQ(s.code, 0);
  EXPECT_NE(s.out.find("stage 1"), std::string::npos);
  EXPECT_NE(s.out.find("11 stages pending"), std::string::npos);
  EXPECT_NE(s.out.find("STPA"), std::string::npos);
  EXPECT_NE(s.out.find("RiskAssessmentBody"), std::string::npos);
  EXPECT_EQ(cli_run({"pipeline", "--dir", dir.string(), "create", "demo"}).code, cli::kInvalid);
  EXPECT_EQ(cli_run({"pipeline", "--dir", dir.string(), "status", "ghost"}).code, cli::kIoOrParse);
}

TEST(CliPipeline, RefusedWithoutCertificates) {
  const auto dir = test::scratch_dir("cli-pipe-gate");
  const std::string d = dir.string();
  ASSERT_EQ(cli_run({"pipeline", "--dir", d, "create", "demo"}).code, 0);
  for (int s = 1; s < 8; ++s) {
    std::vector<std::string> args{"pipeline", "--dir", d, "advance", "demo"};
    for (const auto& k : pipeline::stage(s).required_evidence) {
      args.push_back("--evidence");
      args.push_back(k + "=doc/" + k);
    }
    ASSERT_EQ(cli_run(args).code, 0) << s;
  }
  const Result r = cli_run({"pipeline", "--dir", d, "advance", "demo"});
  EXPECT_EQ(r.code, cli::kGateRefused);
  EXPECT_NE(r.out.find("conformity-certificate"), std::string::npos) << r.out;
  // The saved project is re-readable and consistent with what was printed.
  const auto p = pipeline::load_file((dir / "demo.project.json").string());
  EXPECT_EQ(p.current_stage, 8);
  EXPECT_TRUE(pipeline::no_skip_violations(p).empty());
}

TEST(CliPipeline, PegasusStep20Refused) {
  const auto dir = test::scratch_dir("cli-pegasus");
  const std::string d = dir.string();
  ASSERT_EQ(cli_run({"pipeline", "--dir", d, "create", "demo"}).code, 0);
  EXPECT_EQ(cli_run({"pipeline", "--dir", d, "pegasus", "step-done", "20", "--project", "demo"}).code,
            cli::kGateRefused);
  EXPECT_EQ(cli_run({"pipeline", "--dir", d, "pegasus", "step-done", "21", "--project", "demo"}).code,
            cli::kInvalid);
  for (int s = 1; s <= 19; ++s)
    ASSERT_EQ(cli_run({"pipeline", "--dir", d, "pegasus", "step-done", std::to_string(s), "--project",
                       "demo"}).code, 0);
  const Result l = cli_run({"pipeline", "--dir", d, "pegasus", "layers", "--project", "demo", "--mark",
                            "structure", "--mark", "formalization", "--mark", "consistency", "--mark",
                            "completeness", "--mark", "conformity"});
  EXPECT_EQ(l.code, 0);
  EXPECT_NE(l.out.find("step 20: complete"), std::string::npos) << l.out;
}

TEST(CliPipeline, EvidenceMustBeKindEqualsRef) {
  const auto dir = test::scratch_dir("cli-pipe-ev");
  ASSERT_EQ(cli_run({"pipeline", "--dir", dir.string(), "create", "demo"}).code, 0);
  EXPECT_EQ(cli_run({"pipeline", "--dir", dir.string(), "advance", "demo", "--evidence", "oops"}).code,
            cli::kUsage);
}

TEST(CliUsage, ErrorsExitTwo) {
  EXPECT_EQ(cli_run({}).code, cli::kUsage);
  EXPECT_EQ(cli_run({"bogus"}).code, cli::kUsage);
  EXPECT_EQ(cli_run({"distance", "--no-such-flag"}).code, cli::kUsage);
  EXPECT_EQ(cli_run({"simulate", "--ego", "reckless"}).code, cli::kUsage);
}

TEST(CliHelp, NoUndocumentedOptions) {
  const auto missing = cli::undocumented_options();
  EXPECT_TRUE(missing.empty()) << missing.front();
}

TEST(CliHelp, HelpEnumeratesEveryFlag) {
  for (const auto& e : cli::help_entries()) {
    std::vector<std::string> args;
    std::istringstream words(e.command);
    std::string w;
    words >> w;  // program name
    while (words >> w) args.push_back(w);
    args.push_back("--help");
    const Result r = cli_run(args);
    ASSERT_EQ(r.code, 0) << e.command;
    EXPECT_NE(r.out.find(e.option), std::string::npos) << e.command << " " << e.option;
    EXPECT_NE(r.out.find(e.help.substr(0, 30)), std::string::npos) << e.command << " " << e.option;
  }
}

}  // namespace
}  // namespace avcert
