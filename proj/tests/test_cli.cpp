#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome run(const std::string& args) {
  const std::string command = std::string(CAPLOC_CLI) + " " + args + " 2>/dev/null";
  Outcome result;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return result;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) result.out.append(buf.data(), got);
  const int status = pclose(pipe);
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string write_instance(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / ("caploc_cli_" + name + ".json");
  std::ofstream(path) << body;
  return path.string();
}

}  // namespace

TEST(Cli, RunInnerPoint) {
  const auto f = write_instance("f", R"({"agents":["0","0","0","1"],"capacities":[2,2]})");
  const auto r = run("run --mech innerpoint --instance " + f);
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("y=(0,0)"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("assignment=(1,1,2,2)"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("total 1\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("max 1\n"), std::string::npos) << r.out;
}

TEST(Cli, AuditCapSDAnonymity) {
  const auto g = write_instance("g", R"({"agents":["0","1/2","1","1"],"capacities":[2,2]})");
  const auto strict = run("audit --mech capsd:1,2,3,4 --axiom anonymity --instance " + g + " --expect-pass");
  EXPECT_EQ(strict.code, 1);
  EXPECT_NE(strict.out.find("counterexample"), std::string::npos) << strict.out;
  const auto lenient = run("audit --mech capsd:1,2,3,4 --axiom anonymity --instance " + g);
  EXPECT_EQ(lenient.code, 0);
  const auto structured = run("audit --mech capsd:1,2,3,4 --axiom anonymity --format structured --instance " + g);
  const auto doc = nlohmann::json::parse(structured.out);
  EXPECT_EQ(doc["verdict"], "counterexample");
  EXPECT_EQ(doc["witness"]["kind"], "permutation");
}

TEST(Cli, AuditHoldsExitsZeroWithExpectPass) {
  const auto r = run("audit --mech innerpoint --axiom sp --agents 0,0,0,1 --capacities 2,2 --grid-resolution 1/16 --expect-pass");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("holds-on-search-space"), std::string::npos) << r.out;
}

TEST(Cli, ScenarioThm4GridPasses) {
  const auto r = run("scenario thm4-grid");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
}

TEST(Cli, ScenarioListAndUnknown) {
  const auto list = run("scenario --list");
  EXPECT_EQ(list.code, 0);
  EXPECT_NE(list.out.find("thm5-3fac"), std::string::npos);
  EXPECT_EQ(run("scenario no-such-scenario").code, 2);
}

TEST(Cli, OptAndRatio) {
  const auto opt = run("opt --agents 0,1/2,1/2,1 --capacities 2,2 --objective max");
  EXPECT_EQ(opt.code, 0);
  EXPECT_NE(opt.out.find("opt max 1/4"), std::string::npos) << opt.out;

  const auto ratio = run("ratio --mech innerpoint --agents 0,1/2,1/2,1 --capacities 2,2 --format csv");
  EXPECT_EQ(ratio.code, 0);
  EXPECT_EQ(ratio.out,
            "mechanism,instance,objective,mech_welfare,opt_welfare,ratio\n"
            "innerpoint,\"(0,1/2,1/2,1) c=(2,2)\",total,1/1,1/1,1/1\n"
            "innerpoint,\"(0,1/2,1/2,1) c=(2,2)\",max,1/2,1/4,2/1\n");

  const auto inf = run("ratio --mech percentile:uncap:0,0 --agents 0,1 --capacities 2,2 --objective max --format csv");
  EXPECT_NE(inf.out.find(",inf\n"), std::string::npos) << inf.out;
}

TEST(Cli, RatioSweepOverFamily) {
  const auto r = run("ratio --mech innerpoint --family ratio-total-k --sizes 2,3,4 --objective total --format csv");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("ratio-total-k:k=4,total,3/1,1/1,3/1"), std::string::npos) << r.out;
}

TEST(Cli, GenIsDeterministic) {
  const std::string args = "gen --family uniform --n 5 --capacities 3,3 --count 4 --seed 11 --format structured";
  const auto a = run(args);
  const auto b = run(args);
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 4);
  EXPECT_NE(a.out, run("gen --family uniform --n 5 --capacities 3,3 --count 4 --seed 12 --format structured").out);
  const auto spare = run("gen --family thm6-spare --c 3");
  EXPECT_NE(spare.out.find("(0,0,0,1,1) c=(3,3)"), std::string::npos) << spare.out;
}

TEST(Cli, InlineInstanceWinsOverFile) {
  const auto f = write_instance("conflict", R"({"agents":["0","0","1","1"],"capacities":[2,2]})");
  const auto r = run("run --mech innerpoint --instance " + f + " --agents 0,0,0,1 --capacities 2,2");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("y=(0,0)"), std::string::npos) << r.out;
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("run --instance /nonexistent.json --mech innerpoint").code, 2);
  EXPECT_EQ(run("run --mech nonsense --agents 0,1 --capacities 1,1").code, 2);
  EXPECT_EQ(run("run --mech innerpoint --agents 0,x --capacities 1,1").code, 2);
  EXPECT_EQ(run("run --mech innerpoint --agents 0,1,2 --capacities 2,2").code, 2);
  EXPECT_EQ(run("opt --agents 0,1 --capacities 1,1 --objective median").code, 2);
  EXPECT_EQ(run("audit --mech innerpoint --axiom sp --agents 0,1 --capacities 1,1 --grid-resolution 0").code, 2);
  EXPECT_EQ(run("run --mech innerpoint --agents 0,1 --capacities 1,1 --format xml").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}
