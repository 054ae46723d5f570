#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <symmetra/cli.hpp>
#include <symmetra/construct.hpp>
#include <symmetra/errors.hpp>
#include <symmetra/io.hpp>

#include <json.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "support/helpers.hpp"

using namespace symmetra;
using nlohmann::json;
using symtest::writeTempFile;

namespace {

struct CliRun {
  int exitCode = -1;
  std::string out;
  std::string err;
};

CliRun dispatch(const std::vector<std::string>& args) {
  CliRun r;
  std::ostringstream out, err;
  r.exitCode = commandDispatch(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// Runs the installed binary through the shell (for pipelines and exit-code
// checks across process boundaries).
CliRun shell(const std::string& pipeline) {
  CliRun r;
  const std::string outFile = writeTempFile("", ".out");
  const std::string errFile = writeTempFile("", ".err");
  const std::string cmd =
      pipeline + " > " + outFile + " 2> " + errFile;
  const int status = std::system(cmd.c_str());
  r.exitCode = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = symtest::readAllFile(outFile);
  r.err = symtest::readAllFile(errFile);
  std::remove(outFile.c_str());
  std::remove(errFile.c_str());
  return r;
}

const std::string kCli = SYMMETRA_CLI_PATH;

std::string mub3File() {
  static const std::string path = [] {
    const CliRun r = dispatch({"mub", "--dimension", "3"});
    REQUIRE(r.exitCode == 0);
    return writeTempFile(r.out);
  }();
  return path;
}

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(dispatch({"--help"}).exitCode == 0);
  CHECK(dispatch({"--help"}).out.find("construct") != std::string::npos);
  CHECK(dispatch({}).exitCode == 2);               // a subcommand is required
  CHECK(dispatch({"frobnicate"}).exitCode == 2);   // unknown subcommand
  CHECK(dispatch({"analyze", "--no-such-flag"}).exitCode == 2);
  CHECK(dispatch({"table"}).exitCode == 2);        // --name is required
  CHECK(dispatch({"table", "--name", "table9"}).exitCode == 2);
}

TEST_CASE("mub emits a valid assemblage document") {
  const CliRun r = dispatch({"mub", "--dimension", "4"});
  REQUIRE(r.exitCode == 0);
  const ImportedAssemblage a = importAssemblage(r.out);
  CHECK(a.assemblage.dim == 4);
  CHECK(a.assemblage.bundle.measurements() == 5);
  CHECK(a.name == "mub-d4");
  // Non-prime-power dimensions are usage errors, not crashes.
  CHECK(dispatch({"mub", "--dimension", "6"}).exitCode == 2);
  CHECK(dispatch({"mub", "--dimension", "1"}).exitCode == 2);
}

TEST_CASE("analyze reports the d = 3 MUB closed forms") {
  const CliRun r =
      dispatch({"analyze", "--assemblage", mub3File(), "--exhaustive",
                "--json"});
  REQUIRE(r.exitCode == 0);
  const json doc = json::parse(r.out);
  CHECK(doc.at("schema") == "symmetra-report/1");
  CHECK(std::abs(doc.at("alpha_star").get<double>() -
                 (1.0 + 3.0 * std::sqrt(5.0)) / 16.0) <= 1e-9);
  CHECK(doc.at("beta_star").get<double>() == doctest::Approx(1.0));
  CHECK(doc.at("Z").get<double>() == doctest::Approx(8.0));
  CHECK(doc.at("alpha_bound") == "exact");
  CHECK(doc.at("lambda").at("method") == "exhaustive");
  CHECK(std::abs(doc.at("lambda").at("value").get<double>() -
                 (3.0 + std::sqrt(5.0)) / 2.0) <= 1e-9);
  CHECK_FALSE(doc.at("certified").get<bool>());
  CHECK(doc.at("rank_one_projective").get<bool>());
}

TEST_CASE("analyze greedy path marks one-sided bounds") {
  const CliRun r = dispatch(
      {"analyze", "--assemblage", mub3File(), "--greedy", "--json"});
  REQUIRE(r.exitCode == 0);
  const json doc = json::parse(r.out);
  CHECK(doc.at("lambda").at("method") == "greedy");
  CHECK(doc.at("alpha_bound") == "lower");
  // mu = 0 found by the greedy is promoted to exact.
  CHECK(doc.at("mu").at("value").get<double>() == 0.0);
  CHECK(doc.at("beta_bound") == "exact");
}

TEST_CASE("analyze runs the oracle when asked") {
  const CliRun r = dispatch({"analyze", "--assemblage", mub3File(),
                             "--exhaustive", "--oracle", "0.45", "--json"});
  REQUIRE(r.exitCode == 0);
  const json doc = json::parse(r.out);
  REQUIRE(doc.contains("oracle"));
  CHECK(doc.at("oracle").at("verdict") == "compatible");
  CHECK(doc.at("oracle").at("iterations").get<int>() <= 2000);
  CHECK(std::abs(doc.at("oracle").at("certified_bound").get<double>() -
                 (1.0 + 3.0 * std::sqrt(5.0)) / 16.0) <= 1e-9);

  const CliRun hi = dispatch({"analyze", "--assemblage", mub3File(),
                              "--exhaustive", "--oracle", "0.6", "--json"});
  REQUIRE(hi.exitCode == 0);
  CHECK(json::parse(hi.out).at("oracle").at("verdict") == "incompatible");
}

TEST_CASE("analyze complement noise flows through the oracle") {
  const CliRun r =
      dispatch({"analyze", "--assemblage", mub3File(), "--exhaustive",
                "--oracle", "0.6", "--noise", "complement", "--json"});
  REQUIRE(r.exitCode == 0);
  CHECK(json::parse(r.out).at("oracle").at("verdict") == "compatible");
  CHECK(dispatch({"analyze", "--assemblage", mub3File(), "--noise",
                  "purple"})
            .exitCode == 2);
}

TEST_CASE("steer emits thresholds with dichotomic comparisons") {
  const CliRun r = dispatch(
      {"steer", "--assemblage", mub3File(), "--exhaustive", "--json"});
  REQUIRE(r.exitCode == 0);
  const json doc = json::parse(r.out);
  CHECK(doc.at("schema") == "symmetra-steering/1");
  CHECK(std::abs(doc.at("isotropic_threshold").get<double>() -
                 (1.0 + 3.0 * std::sqrt(5.0)) / 16.0) <= 1e-9);
  CHECK(doc.at("werner_threshold").get<double>() == doctest::Approx(1.0));
  CHECK(std::abs(doc.at("dichotomic_werner").get<double>() - 0.7340136762890959) <=
        1e-7);
  CHECK_FALSE(doc.at("beats_dichotomic_werner").get<bool>());
  CHECK(doc.at("dagger_werner") == "none");
}

TEST_CASE("construct lists the ST25 family with symmetry provenance") {
  const CliRun r = dispatch({"construct", "--group", "st25", "--json"});
  REQUIRE(r.exitCode == 0);
  const json doc = json::parse(r.out);
  CHECK(doc.at("order").get<int>() == 648);
  REQUIRE(doc.at("assemblages").size() == 1);
  const json& entry = doc.at("assemblages")[0];
  CHECK(entry.at("stabilizer_order").get<int>() == 54);
  CHECK(entry.at("dim").get<int>() == 3);
  CHECK(entry.at("measurements").size() == 4);
  // The embedded document is itself importable.
  CHECK_NOTHROW(importAssemblage(entry.dump()));
}

TEST_CASE("construct resolves group files by name or path") {
  const CliRun byName = dispatch({"construct", "--group", "binary_octahedral"});
  CHECK(byName.exitCode == 0);
  const CliRun byPath = dispatch(
      {"construct", "--group", dataFile("groups/binary_octahedral.json")});
  CHECK(byPath.exitCode == 0);
  CHECK(byName.out == byPath.out);
  CHECK(dispatch({"construct", "--group", "no_such_group"}).exitCode == 2);
}

TEST_CASE("verify accepts valid input and flags broken documents") {
  CHECK(dispatch({"verify", "--assemblage", mub3File()}).exitCode == 0);
  // Fibre sums off: the importer rejects the document as an invariant
  // violation, which the CLI maps to a failed check.
  const std::string broken = writeTempFile(R"({
    "schema": "symmetra-assemblage/1",
    "name": "broken",
    "dim": 2,
    "measurements": [
      [
        {"re": [[1.0, 0.0], [0.0, 0.25]], "im": [[0.0, 0.0], [0.0, 0.0]]},
        {"re": [[0.0, 0.0], [0.0, 0.25]], "im": [[0.0, 0.0], [0.0, 0.0]]}
      ]
    ]
  })");
  const CliRun r = dispatch({"verify", "--assemblage", broken});
  CHECK(r.exitCode == 1);
  CHECK(r.err.find("InvariantViolation") != std::string::npos);
  std::remove(broken.c_str());
  // Unparseable input is a usage/input error instead.
  const std::string garbage = writeTempFile("not json");
  CHECK(dispatch({"analyze", "--assemblage", garbage}).exitCode == 2);
  std::remove(garbage.c_str());
}

TEST_CASE("export re-emits a document under a new name") {
  const CliRun r = dispatch(
      {"export", "--assemblage", mub3File(), "--name", "renamed"});
  REQUIRE(r.exitCode == 0);
  const ImportedAssemblage back = importAssemblage(r.out);
  CHECK(back.name == "renamed");
  CHECK(back.assemblage.bundle.outcomes() == 12);
}

TEST_CASE("table command mirrors the runner verdicts") {
  const CliRun r = dispatch({"table", "--name", "table3"});
  CHECK(r.exitCode == 0);
  CHECK(r.out.find("ok") != std::string::npos);
  const CliRun slice =
      dispatch({"table", "--name", "table1", "--dimension", "2"});
  CHECK(slice.exitCode == 0);
  CHECK(slice.out.find("mismatch") != std::string::npos);
}

TEST_CASE("binary: stdin pipelines compose") {
  const CliRun r = shell(kCli + " mub --dimension 3 | " + kCli +
                         " analyze --exhaustive --json");
  REQUIRE(r.exitCode == 0);
  const json doc = json::parse(r.out);
  CHECK(std::abs(doc.at("alpha_star").get<double>() -
                 (1.0 + 3.0 * std::sqrt(5.0)) / 16.0) <= 1e-9);
}

TEST_CASE("binary: usage and input errors set exit code 2") {
  CHECK(shell("echo 'garbage' | " + kCli + " analyze").exitCode == 2);
  CHECK(shell(kCli + " analyze --bogus-flag < /dev/null").exitCode == 2);
  CHECK(shell(kCli + " table --name nonsense").exitCode == 2);
}

TEST_CASE("binary: construct-to-analyze round trip") {
  // The constructed octahedron document analyzed through the pipe gives
  // alpha* = 1/sqrt(3).
  const CliRun r = shell(
      kCli +
      " construct --group binary_octahedral --json | python3 -c \"import "
      "json,sys; d=json.load(sys.stdin); print(json.dumps("
      "[a for a in d['assemblages'] if len(a['measurements'])==3][0]))\" | " +
      kCli + " analyze --exhaustive --json");
  REQUIRE(r.exitCode == 0);
  CHECK(std::abs(json::parse(r.out).at("alpha_star").get<double>() -
                 1.0 / std::sqrt(3.0)) <= 1e-9);
}
