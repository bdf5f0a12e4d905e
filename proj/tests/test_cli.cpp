#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "circlab/cli/cli.hpp"
#include "circlab/cli/report_io.hpp"
#include "circlab/cli/run_config.hpp"
#include "circlab/errors.hpp"

using namespace circlab;
using namespace circlab::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "circlab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("circlab_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Cli, TheoryPrintsLimit) {
    const auto r = invoke({"theory", "--kind", "rc", "--p", "1", "--q", "1", "--t1", "1", "--t2", "1", "--mode",
                        "reconciled"});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_EQ(r.out, "2.0\n");
    EXPECT_EQ(invoke({"theory", "--kind", "rc", "--p", "1", "--q", "1", "--t1", "1", "--mode", "paper-literal"}).out,
              "0.0\n");
}

TEST(Cli, TheoryWithOracleSequence) {
    const auto r = invoke({"theory", "--kind", "sc", "--p", "2", "--q", "2", "--t1", "1", "--with-oracle"});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_NE(r.out.find("oracle,5,3.6000000000000001"), std::string::npos);
    EXPECT_NE(r.out.find("extrapolated,,"), std::string::npos);
}

TEST(Cli, EnumerateCountsAndLists) {
    EXPECT_EQ(invoke({"enumerate", "--family", "a2ps", "--n", "4", "--p", "2", "--s", "0"}).out, "44\n");
    const auto r = invoke({"enumerate", "--family", "a2ps", "--n", "4", "--p", "2", "--s", "1", "--list"});
    EXPECT_EQ(r.code, kExitOk);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "i1,i2,i3,i4");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 10);
}

TEST(Cli, OracleSingleAndSequence) {
    EXPECT_EQ(invoke({"oracle", "--kind", "sc", "--p", "2", "--q", "2", "--t1", "1", "--n", "5"}).out,
              "3.6000000000000001\n");
    const auto r = invoke({"oracle", "--kind", "rc", "--p", "1", "--q", "1", "--t1", "0.5", "--t2", "1", "--n", "3,5,7"});
    EXPECT_NE(r.out.find("extrapolated,,0.5"), std::string::npos);
}

TEST(Cli, CapacityErrorsNameTheCap) {
    const auto r = invoke({"oracle", "--kind", "rc", "--p", "3", "--q", "3", "--t1", "1", "--n", "5"});
    EXPECT_EQ(r.code, kExitConfigError);
    EXPECT_NE(r.err.find("cap:"), std::string::npos);
    const auto e = invoke({"enumerate", "--family", "a2p", "--n", "100", "--p", "4", "--max-cost", "1000"});
    EXPECT_EQ(e.code, kExitConfigError);
    EXPECT_NE(e.err.find("cap:"), std::string::npos);
}

TEST(Cli, ParseErrorsExitTwo) {
    EXPECT_EQ(invoke({}).code, kExitConfigError);
    EXPECT_EQ(invoke({"theory", "--kind", "rc"}).code, kExitConfigError);
    EXPECT_EQ(invoke({"frobnicate"}).code, kExitConfigError);
    EXPECT_EQ(invoke({"theory", "--kind", "xx", "--p", "1", "--q", "1", "--t1", "1"}).code, kExitConfigError);
    EXPECT_EQ(invoke({"--help"}).code, kExitOk);
}

TEST(Cli, SimulateMissingKeyWritesNothing) {
    const fs::path dir = scratch("missing");
    const auto r = invoke({"simulate", "--kind", "rc", "--orders", "1,1", "--out", dir.string()});
    EXPECT_EQ(r.code, kExitConfigError);
    EXPECT_NE(r.err.find("experiment"), std::string::npos);
    EXPECT_TRUE(fs::is_empty(dir));
    fs::remove_all(dir);
}

TEST(Cli, SimulateRejectsUnknownKeyWithLine) {
    const fs::path dir = scratch("unknown");
    std::ofstream(dir / "run.cfg") << "# demo\nexperiment = covariance\nkind = rc\ncolour = blue\n";
    const auto r = invoke({"simulate", "--config", (dir / "run.cfg").string()});
    EXPECT_EQ(r.code, kExitConfigError);
    EXPECT_NE(r.err.find("line 4"), std::string::npos);
    EXPECT_NE(r.err.find("colour"), std::string::npos);
    fs::remove_all(dir);
}

TEST(Cli, SimulateWritesReportsWithSchema) {
    const fs::path dir = scratch("simulate");
    std::ofstream(dir / "run.cfg") << "experiment = covariance\nid = demo\nkind = rc\norders = 1, 1\n"
                                      "times = 0.5, 1\nn = 16\nreplicas = 400\nseed = 9\n";
    const auto r = invoke({"simulate", "--config", (dir / "run.cfg").string(), "--out", dir.string(), "--n", "8"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const std::string csv = slurp(dir / "demo.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')),
              "experiment_id,kind,p,q,t1,t2,n,R,seed,empirical,se,theory_paper,theory_reconciled,oracle,verdict,"
              "config_hash");
    EXPECT_NE(csv.find("demo,rc,1,1,0.5,1.0,8,400,9,"), std::string::npos);
    const auto json = nlohmann::json::parse(slurp(dir / "demo.json"));
    EXPECT_EQ(json["n"], 8);
    EXPECT_EQ(json["oracle"].get<double>(), 0.5);
    EXPECT_FALSE(fs::exists(dir / "demo.csv.tmp"));

    const std::string first = slurp(dir / "demo.json");
    ASSERT_EQ(invoke({"simulate", "--config", (dir / "run.cfg").string(), "--out", dir.string(), "--n", "8"}).code,
              kExitOk);
    EXPECT_EQ(first, slurp(dir / "demo.json"));
    fs::remove_all(dir);
}

TEST(Cli, SimulateRangeErrorsNameTheFlag) {
    const auto r = invoke({"simulate", "--experiment", "covariance", "--kind", "rc", "--orders", "1,1", "--times",
                        "1,1", "--replicas", "abc"});
    EXPECT_EQ(r.code, kExitConfigError);
    EXPECT_NE(r.err.find("flag --replicas"), std::string::npos);
}

TEST(Cli, VerifyIsIdempotentAndWritesLedger) {
    const fs::path dir = scratch("verify");
    const auto a = invoke({"verify", "--only", "1,12", "--out", dir.string()});
    EXPECT_EQ(a.code, kExitOk);
    EXPECT_NE(a.out.find("[PASS] criterion 1:"), std::string::npos);
    EXPECT_NE(a.out.find("[PASS] criterion 12:"), std::string::npos);
    const std::string ledger = slurp(dir / "verify_ledger.json");
    const auto b = invoke({"verify", "--only", "1,12", "--out", dir.string()});
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(ledger, slurp(dir / "verify_ledger.json"));
    EXPECT_TRUE(fs::exists(dir / "verify_criteria.csv"));
    EXPECT_EQ(invoke({"verify", "--only", "14"}).code, kExitConfigError);
    fs::remove_all(dir);
}

TEST(Cli, VerifyFailureExitsOne) {
    const fs::path dir = scratch("verify_fail");
    const auto r = invoke({"verify", "--only", "2", "--out", dir.string()});
    EXPECT_EQ(r.code, kExitVerdictFailure);
    EXPECT_NE(r.out.find("[FAIL] criterion 2:"), std::string::npos);
    fs::remove_all(dir);
}

TEST(Cli, OutputDirectoryFromEnvironment) {
    const fs::path dir = scratch("env");
    ::setenv("CIRCLAB_OUT", dir.c_str(), 1);
    EXPECT_EQ(default_output_dir(), dir);
    ::unsetenv("CIRCLAB_OUT");
    EXPECT_EQ(default_output_dir(), fs::current_path());
    fs::remove_all(dir);
}

TEST(RunConfig, ParsingRules) {
    EXPECT_THROW(parse_settings("a = 1\na = 2\n"), ConfigError);
    EXPECT_THROW(parse_settings("just words\n"), ConfigError);
    const auto s = parse_settings("  # comment\n\nkind = sc # trailing\n");
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s.at("kind").value, "sc");
    EXPECT_EQ(s.at("kind").line, 3u);
    EXPECT_EQ(parse_unsigned_list("1, 2,3"), (std::vector<unsigned>{1, 2, 3}));
    EXPECT_THROW(parse_double_list("1,,2"), ConfigError);
}

TEST(RunConfig, BuildsExperimentTypes) {
    auto s = parse_settings("experiment = tightness\nkind = sc\norders = 2\ngaps = 0.05,0.1,0.2,0.4\n");
    const auto rc = build_run_config(s, "/tmp");
    EXPECT_EQ(rc.type, ExperimentType::Tightness);
    EXPECT_EQ(rc.gaps.size(), 4u);
    EXPECT_EQ(rc.experiment.kind, Kind::SC);
    s = parse_settings("experiment = odd\nkind = sc\norders = 1\ntimes = 1\nreplicas = 10000\n");
    EXPECT_THROW(build_run_config(s, "/tmp"), ConfigError);
    s = parse_settings("experiment = covariance\nkind = rc\norders = 1,1\ntimes = 1,1\nn = 512\ncentering = exact\n");
    EXPECT_THROW(build_run_config(s, "/tmp"), CapacityError);
}

TEST(ReportIo, CsvQuotingAndNan) {
    nlohmann::ordered_json row{{"a", "x,y"}, {"b", nullptr}, {"c", 0.25}};
    EXPECT_EQ(json_to_csv(row), "a,b,c\n\"x,y\",nan,0.25\n");
}
