#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "smartground/cli.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using smartground::cli::run;

namespace {

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("smartground_cli_" + std::to_string(::getpid()) + "_" +
                                            ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string file(const std::string& name, const std::string& text) {
        const fs::path p = dir_ / name;
        std::ofstream(p) << text;
        return p.string();
    }

    int call(std::vector<std::string> args) {
        out_.str("");
        err_.str("");
        return run(args, out_, err_);
    }

    fs::path dir_;
    std::ostringstream out_, err_;
};

std::string running() { return std::string(smartground::fixtures::kRunningRule) + smartground::fixtures::kRunningFacts; }

}  // namespace

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(call({}), 1);
    EXPECT_EQ(call({"ground"}), 1);
    EXPECT_EQ(call({"ground", (dir_ / "missing.lp").string()}), 1);
    EXPECT_EQ(call({"ground", file("a.lp", "a."), "--decomposition", "maybe"}), 1);
    EXPECT_EQ(call({"ground", file("a.lp", "a."), "--ratio-threshold", "0"}), 1);
    EXPECT_EQ(call({"--help"}), 0);
}

TEST_F(Cli, InputErrors) {
    EXPECT_EQ(call({"ground", file("bad.lp", "p(X :- q.")}), 2);
    EXPECT_NE(err_.str().find("1:"), std::string::npos);
    EXPECT_EQ(call({"ground", file("unsafe.lp", "p(X) :- q(Y).")}), 2);
    EXPECT_NE(err_.str().find("unsafe"), std::string::npos);
}

TEST_F(Cli, BudgetExceeded) {
    EXPECT_EQ(call({"ground", file("r1.lp", running()), "--max-ground-rules", "5"}), 3);
}

TEST_F(Cli, GroundWritesProgramAndReport) {
    const std::string in = file("r1.lp", running());
    const std::string report = (dir_ / "report.json").string();
    const std::string log = (dir_ / "decisions.jsonl").string();
    ASSERT_EQ(call({"ground", in, "--decomposition", "smart", "--report", report, "--decision-log", log}), 0);
    EXPECT_NE(out_.str().find("p(1,1,1,2)."), std::string::npos);
    std::ifstream rf(report);
    const auto j = nlohmann::json::parse(rf);
    for (const char* key : {"rules_in", "rules_out", "ground_rules", "counters", "per_rule_decisions", "wall_time_ms",
                            "arithmetic_errors", "warnings"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_EQ(j["per_rule_decisions"].size(), 1u);
    std::ifstream lf(log);
    std::string line;
    ASSERT_TRUE(std::getline(lf, line));
    EXPECT_TRUE(nlohmann::json::parse(line).contains("e_r"));
}

TEST_F(Cli, ConcatenatesInputs) {
    ASSERT_EQ(call({"ground", file("enc.lp", "p(X) :- q(X)."), file("inst.lp", "q(3).")}), 0);
    EXPECT_NE(out_.str().find("p(3)."), std::string::npos);
}

TEST_F(Cli, Rewrite) {
    const std::string in = file("r1.lp", running());
    ASSERT_EQ(call({"rewrite", in, "--decomposition", "off"}), 0);
    EXPECT_EQ(out_.str().substr(0, 10), "p(X,Y,Z,S)");
    ASSERT_EQ(call({"rewrite", in, "--decomposition", "always"}), 0);
    EXPECT_NE(out_.str().find("fresh_pred_1(P,Y,Z) :- c(D,Y,Z), P>=D, fresh_pred_2(P)."), std::string::npos);
}

TEST_F(Cli, Check) {
    EXPECT_EQ(call({"check", file("loop.lp", "a :- not b.\nb :- not a.\nc(X) :- a, d(X), e(X,Y).\nd(1). e(1,2).")}), 0);
    EXPECT_NE(out_.str().find("\nPASS\n"), std::string::npos);
}

TEST_F(Cli, BenchCsv) {
    ASSERT_EQ(call({"bench", "--family", "chain-join", "--k", "3", "--tuples", "10", "--domain", "5", "--members", "2"}), 0);
    std::istringstream in(out_.str());
    std::string header, row;
    std::getline(in, header);
    EXPECT_EQ(header, "problem,instance,mode,grounded,time_ms,ground_rules,substitution_attempts");
    std::size_t rows = 0;
    while (std::getline(in, row)) ++rows;
    EXPECT_EQ(rows, 6u);
}

TEST_F(Cli, BenchRecordsTimeouts) {
    const std::string enc = file("enc.lp", smartground::fixtures::kRunningRule);
    const std::string inst = file("inst.lp", smartground::fixtures::kRunningFacts);
    ASSERT_EQ(call({"bench", "--program", enc, "--instance", inst, "--modes", "off", "--timeout-ms", "0"}), 0);
    EXPECT_NE(out_.str().find("enc,inst,off,false"), std::string::npos);
}
