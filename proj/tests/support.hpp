#pragma once

#include <gtest/gtest.h>

#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "clott/elab.hpp"

namespace clott::test {

inline std::string corpus_path(const std::string& name) { return std::string(CLOTT_CORPUS_DIR) + "/" + name; }

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline FileResult load_corpus(const std::string& name) {
    FileResult r = check_source(read_text(corpus_path(name)));
    EXPECT_TRUE(r.ok()) << name << " does not check";
    return r;
}

inline const std::vector<std::string>& corpus_files() {
    static const std::vector<std::string> files{"streams.clott", "lifting.clott", "universe.clott"};
    return files;
}

// Elaborates a surface expression in the full ambient context of `prog`.
inline std::pair<Term, Term> infer_in(Program& prog, const std::string& src, const Context* ctx = nullptr) {
    Elaborator el(prog);
    Context base = prog.ambient_context(static_cast<int>(prog.ambient.size()));
    return el.infer(ctx ? *ctx : base, parse_expr(src));
}

inline Term type_in(Program& prog, const std::string& src, const Context* ctx = nullptr) {
    Elaborator el(prog);
    Context base = prog.ambient_context(static_cast<int>(prog.ambient.size()));
    return el.type(ctx ? *ctx : base, parse_expr(src));
}

// Every subterm of t, outermost first.
inline void each_subterm(const Term& t, const std::function<void(const Term&)>& f) {
    f(t);
    for (const auto& k : t->kids) each_subterm(k, f);
}

}  // namespace clott::test
