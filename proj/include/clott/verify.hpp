#pragma once

#include <map>
#include <string>
#include <vector>

#include "clott/program.hpp"

namespace clott {

struct VerifyConfig {
    int fuel = 8;
    int depth = 4;          // naturals sampled as function arguments
    int max_clocks = 2;     // stages have 1..max_clocks clocks
    int max_budget = 3;
    int samples = 20;       // sampled values per stage for the invariance suite
    int min_subst = 50;     // substitution instances the suite must reach
    bool mutate_tick = false;   // evaluate with a deliberately broken tick application
};

struct Counterexample {
    std::string term;
    std::string stage;
    std::string morphism;
    std::string lhs;
    std::string rhs;
    std::string note;
};

struct SuiteResult {
    std::string name;
    int checks = 0;
    int failures = 0;
    int skipped = 0;        // generated instances rejected before evaluation
    std::vector<Counterexample> counterexamples;   // the first few failures
    std::map<std::string, int> coverage;           // checks per family
    double seconds = 0;

    bool ok() const { return failures == 0; }
};

struct VerifyReport {
    std::string file;
    std::vector<SuiteResult> suites;
    bool ok() const {
        for (const auto& s : suites)
            if (!s.ok()) return false;
        return true;
    }
};

// Several files verified together. Coverage is judged over the whole run: every
// required family of every selected suite must have been exercised by some file.
struct CorpusReport {
    std::vector<VerifyReport> files;
    std::vector<std::pair<std::string, std::string>> missing;   // (suite, family)
    int subst_instances = 0;

    bool ok() const {
        if (!missing.empty()) return false;
        for (const auto& f : files)
            if (!f.ok()) return false;
        return true;
    }
};

// Suite names, in run order.
const std::vector<std::string>& suite_names();
// Families a run must exercise for a suite to count as covered.
const std::vector<std::string>& required_families(const std::string& suite);

// Runs every suite over one checked program. `only` restricts to the named suites.
VerifyReport verify_program(const Program& prog, const std::string& file, const VerifyConfig& cfg,
                            const std::vector<std::string>& only = {});
CorpusReport verify_corpus(const std::vector<std::pair<std::string, const Program*>>& files, const VerifyConfig& cfg,
                           const std::vector<std::string>& only = {});

}  // namespace clott
