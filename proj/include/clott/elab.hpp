#pragma once

#include <string>
#include <utility>
#include <vector>

#include "clott/check.hpp"
#include "clott/parse.hpp"
#include "clott/program.hpp"

namespace clott {

// Builds annotated core terms from surface syntax. Checking-mode positions take their
// annotations from the expected type; inferring positions from the inferred type.
class Elaborator {
public:
    Elaborator(Program& prog, int fuel = 8) : prog_(prog), ch_(prog, fuel) {}

    Term check(const Context& ctx, const SExprP& e, const Term& ty);
    std::pair<Term, Term> infer(const Context& ctx, const SExprP& e);
    Term type(const Context& ctx, const SExprP& e);

    // Elaborates one declaration and adds it to the program. Throws TypeError.
    void add_decl(const SurfaceDecl& d);
    // The ambient clock added by --with-k0; a file may redeclare it.
    void add_k0();

    const Checker& checker() const { return ch_; }

private:
    struct Hidden {
        std::vector<std::string> names;
        std::string tick;
        Span at;   // the application that hides the names
    };

    int lookup(const Context& ctx, const std::string& name) const;
    int resolve_clock(const Context& ctx, const std::string& name, Span sp) const;
    ClockSet clock_set(const Context& ctx, const std::vector<std::string>& names, Span sp) const;
    [[noreturn]] void unbound(const std::string& name, Span sp) const;
    bool is_builtin(const Context& ctx, const SExprP& e, const char* name) const;

    std::pair<Term, Term> infer_app(const Context& ctx, const SExprP& e);
    std::pair<Term, Term> apply(const Context& ctx, Term f, Term fty, const SExprP& arg, Span sp);
    std::pair<Term, Term> infer_bracket(const Context& ctx, const SExprP& e);
    std::pair<Term, Term> infer_diamond(const Context& ctx, const SExprP& e);
    Term check_code(const Context& ctx, const SExprP& e, const ClockSet& d);
    Term expand_alias(const Context& ctx, const TypeAlias& a, const std::vector<SExprP>& args, Span sp);
    std::pair<Term, Term> fixlike(const Context& ctx, const SExprP& e, const Term* expected);
    Term require_conv(const Context& ctx, Term t, const Term& got, const Term& want, Span sp);

    std::string show(const Context& ctx, const Term& t) const;
    Term whnf(const Term& t) const { return ch_.whnf(t); }

    Program& prog_;
    Checker ch_;
    std::vector<Hidden> hidden_;
    bool k0_implicit_ = false;
};

struct DeclReport {
    std::string name;
    std::string kind;   // "clock", "def", "type"
    Span span;
    bool ok = true;
    std::string message;
    Span error_span;
};

struct FileResult {
    Program prog;
    std::vector<DeclReport> decls;
    bool parse_ok = true;
    std::string parse_message;
    Span parse_span;

    bool ok() const {
        if (!parse_ok) return false;
        for (const auto& d : decls)
            if (!d.ok) return false;
        return true;
    }
};

struct CheckOptions {
    int fuel = 8;
    bool with_k0 = false;
};

// Parses and elaborates a whole file. Failing declarations are reported and skipped;
// later declarations still see the successful ones.
FileResult check_source(const std::string& src, const CheckOptions& opts = {});

}  // namespace clott
