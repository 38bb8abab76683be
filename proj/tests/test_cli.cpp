#include "acsan/cli.hpp"

#include "json_checks.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace acsan;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "acsan");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string cro() { return test::source_path("scenarios/cro.acs"); }

std::string temp_file(const std::string& name, const std::string& text) {
    std::string path = ::testing::TempDir() + name;
    std::ofstream(path) << text;
    return path;
}

} // namespace

TEST(Cli, CheckPartialOrder) {
    auto r = invoke({"check", "--mode", "partial-order", cro()});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("reachable"), std::string::npos);
    EXPECT_NE(r.out.find("layer 2: SEC2 SHC2 SPC2"), std::string::npos);
}

TEST(Cli, CheckJsonConformsAndAgreesWithText) {
    for (std::string mode : {"interleaving", "partial-order"}) {
        for (std::string q : {"", "knows(CRep, a2i(Helen,cans))"}) {
            std::vector<std::string> base{"check", "--mode", mode, cro()};
            if (!q.empty()) {
                base.push_back("--query");
                base.push_back(q);
            }
            auto text = invoke(base);
            base.push_back("--format");
            base.push_back("json");
            auto js = invoke(base);
            EXPECT_EQ(text.code, js.code);
            auto j = nlohmann::json::parse(js.out);
            EXPECT_EQ(test::check_verdict(j), "");
            bool reachable = j["result"] == "reachable";
            EXPECT_EQ(reachable, text.code == 0);
            EXPECT_EQ(text.out.find(reachable ? ": reachable" : ": unreachable") != std::string::npos, true);
        }
    }
}

TEST(Cli, NegativeControlsExitOne) {
    EXPECT_EQ(invoke({"check", "--mode", "interleaving", cro(), "--query", "knows(CRep, a2i(Helen,cans))"}).code, 1);
    EXPECT_EQ(invoke({"check", "--mode", "interleaving", test::source_path("tests/data/cro_no_p4.acs")}).code, 1);
    EXPECT_EQ(invoke({"check", test::source_path("tests/data/cro_no_p4.acs")}).code, 1);
}

TEST(Cli, InputErrorsExitTwo) {
    EXPECT_EQ(invoke({"check", "missing.acs"}).code, 2);
    EXPECT_EQ(invoke({"check", "--mode", "sideways", cro()}).code, 2);
    EXPECT_EQ(invoke({}).code, 2);
    auto bad = temp_file("bad.acs", "scenario \"b\" { principals A; event E: send A -> Bob : a2i(A, x); }");
    auto r = invoke({"check", bad});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("E-UNDECLARED"), std::string::npos);
    EXPECT_EQ(invoke({"check", cro(), "--query", "knows(Nobody, a2i(Ed, ise))"}).code, 2);
    auto noquery = temp_file("noquery.acs", "scenario \"n\" { principals A; attributes x; }");
    EXPECT_EQ(invoke({"check", noquery}).code, 2);
}

TEST(Cli, LimitsExitThree) {
    EXPECT_EQ(invoke({"check", "--max-iters", "1", cro()}).code, 3);
    EXPECT_EQ(invoke({"extensions", "--count", "--cap", "5", cro()}).code, 3);
    ::setenv("ACSAN_MAX_ITERS", "1", 1);
    EXPECT_EQ(invoke({"check", cro()}).code, 3);
    EXPECT_EQ(invoke({"check", "--max-iters", "100", cro()}).code, 0);
    ::setenv("ACSAN_MAX_ITERS", "bogus", 1);
    EXPECT_EQ(invoke({"check", cro()}).code, 2);
    ::unsetenv("ACSAN_MAX_ITERS");
}

TEST(Cli, Validate) {
    auto r = invoke({"validate", cro()});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("COMP1: pass"), std::string::npos);
    EXPECT_NE(r.out.find("COMP2: pass"), std::string::npos);
    auto j = invoke({"validate", "--format", "json", cro()});
    auto doc = nlohmann::json::parse(j.out);
    EXPECT_EQ(test::check_validation(doc), "");
    EXPECT_EQ(doc["result"], "pass");

    auto conc = temp_file("conc.acs", R"(scenario "conc" {
  principals Ed, CA, CRep;
  attributes ise;
  event l1: send CA -> Ed : a2i(Ed, ise);
  event l2: send Ed -> CRep : s2i(CA, said(a2i(Ed, ise)));
  query knows(CRep, s2i(Ed, said(s2i(CA, said(a2i(Ed, ise))))));
})");
    auto v = invoke({"validate", conc});
    EXPECT_EQ(v.code, 1);
    EXPECT_NE(v.out.find("COMP1: fail"), std::string::npos);
    auto c = invoke({"check", conc});
    EXPECT_EQ(c.code, 1);
    EXPECT_NE(c.err.find("E-COMPAT"), std::string::npos);
    EXPECT_EQ(invoke({"check", "--compat", "skip", conc}).code, 0);
    EXPECT_EQ(invoke({"check", "--mode", "interleaving", conc}).code, 0);

    auto c2 = temp_file("c2.acs", R"(scenario "c2" {
  principals A;
  attributes x;
  policy R: knows(p, y) <- knows(p, a2i(p, x));
})");
    auto w = invoke({"validate", "--format", "json", c2});
    EXPECT_EQ(w.code, 1);
    auto wd = nlohmann::json::parse(w.out);
    EXPECT_EQ(test::check_validation(wd), "");
    EXPECT_EQ(wd["c2"]["pass"], false);
}

TEST(Cli, Extensions) {
    auto r = invoke({"extensions", "--count", cro()});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "90\n");
    auto l = invoke({"extensions", "--list", "--format", "json", cro()});
    auto j = nlohmann::json::parse(l.out);
    EXPECT_EQ(test::check_extensions(j), "");
    EXPECT_EQ(j["count"], 90);
    EXPECT_EQ(j["extensions"][0], (nlohmann::json{"SEC", "SHC", "SPC", "SEC2", "SHC2", "SPC2"}));
    auto t = invoke({"extensions", "--list", cro()});
    EXPECT_EQ(std::count(t.out.begin(), t.out.end(), '\n'), 90);
    EXPECT_EQ(invoke({"extensions", "--count", "--list", cro()}).code, 2);
}

TEST(Cli, Explain) {
    auto r = invoke({"explain", cro()});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("knows(CRep, a2i(Ed, cans))  [P1]"), std::string::npos);
    EXPECT_NE(r.out.find("guard of SPC2"), std::string::npos);
    auto j = nlohmann::json::parse(invoke({"explain", "--format", "json", cro()}).out);
    EXPECT_EQ(test::check_explain(j), "");
    EXPECT_EQ(j["guards"].size(), 6u);
    auto neg = invoke({"explain", cro(), "--query", "knows(CRep, a2i(Helen,cans))"});
    EXPECT_EQ(neg.code, 1);
}

TEST(Cli, StdinInput) {
    // Exercise the binary end to end, reading the scenario from stdin.
    std::string cmd = std::string(ACSAN_CLI_PATH) + " check - < " + cro() + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    ASSERT_TRUE(WIFEXITED(status));
    EXPECT_EQ(WEXITSTATUS(status), 0);
}
