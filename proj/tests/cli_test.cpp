#include <json.hpp>

#include "run.hpp"
#include "support.hpp"

using clott::test::corpus_arg;
using clott::test::run_clott;
using nlohmann::json;

namespace {

const char* kNegatives[] = {"cirr_free_clock", "clock_not_in_universe", "dfix_unguarded",
                            "diamond_escape",  "double_tick",           "syntax",
                            "tick_wrong_clock", "unbound",              "universe_code"};

// The line carrying the `-- ERROR` marker.
int marked_line(const std::string& text) {
    int line = 1;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        std::string l = text.substr(start, end == std::string::npos ? std::string::npos : end - start);
        if (l.find("-- ERROR") != std::string::npos) return line;
        if (end == std::string::npos) break;
        start = end + 1;
        ++line;
    }
    return -1;
}

}  // namespace

TEST(Cli, CheckCorpus) {
    for (const auto& f : clott::test::corpus_files()) {
        auto r = run_clott("check " + corpus_arg(f));
        EXPECT_EQ(r.rc, 0) << f << "\n" << r.err;
        EXPECT_NE(r.out.find(": ok ("), std::string::npos) << r.out;
    }
}

TEST(Cli, NegativesFailAtTheirMarkedLine) {
    for (const char* n : kNegatives) {
        std::string f = std::string("negative/") + n + ".clott";
        int line = marked_line(clott::test::read_text(clott::test::corpus_path(f)));
        ASSERT_GT(line, 0) << f;
        auto r = run_clott("check --plain " + corpus_arg(f));
        EXPECT_EQ(r.rc, std::string(n) == "syntax" ? 2 : 1) << f;
        EXPECT_NE(r.err.find(".clott:" + std::to_string(line) + ":"), std::string::npos) << f << ": " << r.err;
        EXPECT_NE(r.err.find("error:"), std::string::npos);
        EXPECT_EQ(r.err.find("\033["), std::string::npos);   // not a tty: no colour
    }
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run_clott("check /nonexistent/file.clott").rc, 3);
    EXPECT_EQ(run_clott("frobnicate").rc, 2);
    EXPECT_EQ(run_clott("eval " + corpus_arg("streams.clott")).rc, 2);
    EXPECT_EQ(run_clott("eval " + corpus_arg("streams.clott") + " nosuch --stage k=1,k0=1").rc, 1);
    auto r = run_clott("eval " + corpus_arg("streams.clott") + " zeros --stage k=-1");
    EXPECT_EQ(r.rc, 2);
    EXPECT_NE(r.err.find("budget must be nonnegative"), std::string::npos);
    r = run_clott("eval " + corpus_arg("streams.clott") + " zeros --stage k=1,k=2");
    EXPECT_EQ(r.rc, 2);
    EXPECT_NE(r.err.find("duplicate clock in stage"), std::string::npos);
    r = run_clott("eval " + corpus_arg("streams.clott") + " hd --stage k=1");
    EXPECT_EQ(r.rc, 2);
    EXPECT_NE(r.err.find("no budget for clock k0"), std::string::npos);
}

TEST(Cli, EvalZeros) {
    std::string want = "(0,⋆)";
    for (int n = 0; n <= 5; ++n) {
        auto r = run_clott("eval " + corpus_arg("streams.clott") + " zeros --stage k=" + std::to_string(n));
        EXPECT_EQ(r.rc, 0) << r.err;
        EXPECT_EQ(r.out, want + "\n");
        want = "(0," + want + ")";
    }
    auto r = run_clott("eval --plain " + corpus_arg("streams.clott") + " zeros --stage k=1");
    EXPECT_EQ(r.out, "(0,(0,*))\n");
}

TEST(Cli, EvalExpressions) {
    auto r = run_clott("eval " + corpus_arg("streams.clott") + " --expr 'hd (tl (tl czeros))' --stage k=1,k0=2");
    EXPECT_EQ(r.rc, 0) << r.err;
    EXPECT_EQ(r.out, "0\n");
    r = run_clott("eval " + corpus_arg("streams.clott") + " --expr 'from 3' --stage k=2,k0=0");
    EXPECT_EQ(r.out, "(3,(4,(5,⋆)))\n");
    r = run_clott("eval " + corpus_arg("streams.clott") + " --expr 'suc missing' --stage k=0,k0=0");
    EXPECT_EQ(r.rc, 1);
    EXPECT_NE(r.err.find("<expr>:1:5"), std::string::npos) << r.err;
    r = run_clott("eval " + corpus_arg("streams.clott") + " --expr 'suc (' --stage k=0,k0=0");
    EXPECT_EQ(r.rc, 2);
}

TEST(Cli, Normalize) {
    auto r = run_clott("normalize " + corpus_arg("universe.clott") + " --expr 'in{k}{k}(LaterNat)'");
    EXPECT_EQ(r.rc, 0) << r.err;
    EXPECT_EQ(r.out, "#▷k #Nat\n");
    r = run_clott("normalize --plain " + corpus_arg("streams.clott") + " --expr '(/\\j. \\(a : j). 0 : forall j. |>j Nat) [k]'");
    EXPECT_EQ(r.rc, 0) << r.err;
    EXPECT_EQ(r.out, "\\(a : k). 0\n");
    r = run_clott("normalize " + corpus_arg("streams.clott") + " str_fold");
    EXPECT_EQ(r.out, "λp. p\n");
}

TEST(Cli, CheckJson) {
    auto r = run_clott("check --json " + corpus_arg("streams.clott") + " " + corpus_arg("negative/unbound.clott"));
    EXPECT_EQ(r.rc, 1);
    json j = json::parse(r.out);
    EXPECT_EQ(j["command"], "check");
    EXPECT_FALSE(j["ok"].get<bool>());
    ASSERT_EQ(j["files"].size(), 2u);
    EXPECT_TRUE(j["files"][0]["ok"].get<bool>());
    const json& bad = j["files"][1]["declarations"];
    bool found = false;
    for (const auto& d : bad)
        if (d["name"] == "bad") {
            found = true;
            EXPECT_FALSE(d["ok"].get<bool>());
            EXPECT_EQ(d["error"]["span"]["line"], 5);
        }
    EXPECT_TRUE(found);
}

TEST(Cli, VerifyJsonIsDeterministic) {
    std::string cmd = "verify --json --suite equations --suite substitution --max-budget 1 " +
                      corpus_arg("streams.clott") + " " + corpus_arg("lifting.clott") + " " +
                      corpus_arg("universe.clott");
    auto a = run_clott(cmd);
    auto b = run_clott(cmd);
    EXPECT_EQ(a.rc, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    json j = json::parse(a.out);
    EXPECT_TRUE(j["ok"].get<bool>());
    EXPECT_TRUE(j["missing"].empty());
    EXPECT_GE(j["substitution_instances"].get<int>(), 50);
    EXPECT_FALSE(j.contains("seconds"));
    for (const auto& f : j["files"])
        for (const auto& s : f["suites"]) EXPECT_EQ(s["failures"], 0) << s["name"];
}

TEST(Cli, VerifyTextAndTimings) {
    auto r = run_clott("verify --suite diamond --max-budget 1 --timings " + corpus_arg("streams.clott"));
    EXPECT_EQ(r.rc, 0) << r.err;
    EXPECT_NE(r.out.find("diamond: ok"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("all properties hold"), std::string::npos);
    r = run_clott("verify --json --timings --suite diamond --max-budget 1 " + corpus_arg("streams.clott"));
    EXPECT_TRUE(json::parse(r.out).contains("seconds"));
    EXPECT_EQ(run_clott("verify --suite nonsense " + corpus_arg("streams.clott")).rc, 2);
}

TEST(Cli, VerifyReportsMissingCoverage) {
    auto r = run_clott("verify --suite fixed-point --max-budget 1 " + corpus_arg("universe.clott"));
    EXPECT_EQ(r.rc, 1);
    EXPECT_NE(r.out.find("never exercised"), std::string::npos) << r.out;
}

// The mutated evaluator must be caught with a counterexample.
TEST(Cli, MutatedTickFailsVerification) {
    auto r = run_clott("verify --json --mutate-tick --suite naturality --max-budget 2 " + corpus_arg("streams.clott"));
    EXPECT_EQ(r.rc, 1);
    json j = json::parse(r.out);
    EXPECT_FALSE(j["ok"].get<bool>());
    EXPECT_TRUE(j["config"]["mutate_tick"].get<bool>());
    const json& s = j["files"][0]["suites"][0];
    EXPECT_GT(s["failures"].get<int>(), 0);
    ASSERT_FALSE(s["counterexamples"].empty());
    EXPECT_FALSE(s["counterexamples"][0]["morphism"].get<std::string>().empty());
}

TEST(Cli, WithK0) {
    char path[] = "/tmp/clott-k0XXXXXX";
    int fd = mkstemp(path);
    ASSERT_GE(fd, 0);
    std::string src = "z : |>k0 Nat := \\(a : k0). 0\n";
    ASSERT_EQ(write(fd, src.data(), src.size()), static_cast<ssize_t>(src.size()));
    close(fd);
    EXPECT_EQ(run_clott(std::string("check ") + path).rc, 1);
    EXPECT_EQ(run_clott(std::string("check --with-k0 ") + path).rc, 0);
    auto r = run_clott(std::string("eval --with-k0 ") + path + " z --stage k0=1");
    EXPECT_EQ(r.out, "0\n");
    std::remove(path);
}
