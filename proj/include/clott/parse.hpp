#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "clott/program.hpp"

namespace clott {

enum class Tok {
    Ident, Num,
    KwClock, KwTick, KwDfix, KwFix, KwForall, KwU, KwEl, KwIn, KwDef, KwType, KwCirr, KwTirr, KwPfix,
    LParen, RParen, LBrack, RBrack, LBrace, RBrace,
    Colon, Dot, Comma, Arrow, Star, Cons, Lambda, BigLambda, Later, Diamond, Caret, Hash, Assign, Eq,
    End,
};

const char* tok_name(Tok t);

struct Token {
    Tok kind;
    std::string text;
    Span span;
};

struct ParseError : std::runtime_error {
    Span span;
    ParseError(const std::string& msg, Span s) : std::runtime_error(msg), span(s) {}
};

// Lexical errors are reported as ParseError.
std::vector<Token> tokenize(const std::string& src);

// Surface syntax. Names are resolved during elaboration.
enum class SK {
    Ident,      // text; explicit clock args in `names` when `braces` is set (g{k1,k2})
    Num,        // num
    Univ,       // names = clock set
    El,         // names when braces; kids[0]
    Incl,       // names / names2 when braces; kids[0]
    Lam,        // names[0], kids[0] body, kids[1] optional binder type, tick_binder
    BigLam,     // names[0], kids[0]
    Forall,     // names[0], kids[0]; code when `code`
    Later,      // names[0] tick ("" when non-dependent), text clock, kids[0]; code when `code`
    Pi,         // names[0] ("" when non-dependent), kids dom, cod; code when `code`
    Sigma,      // as Pi
    CodeNat,
    App,        // kids f, arg
    Bracket,    // kids[0], text = clock or tick name
    DiaImplicit,   // kids[0]
    DiaExplicit,   // kids[0] under binder names[0]; text = target clock
    Pair,       // kids a, b
    Ann,        // kids t, type
    Binder,     // (x y. body): names, kids[0]; only valid as argument of natrec / J
    Dfix,       // text clock, kids arg [, annotation]
    Fix,
    Tirr,
    Pfix,
    Cirr,       // kids arg [, annotation]
};

struct SExpr;
using SExprP = std::shared_ptr<const SExpr>;

struct SExpr {
    SK kind;
    Span span;
    std::string text;
    unsigned long num = 0;
    std::vector<std::string> names, names2;
    bool braces = false;
    bool code = false;
    bool tick_binder = false;   // `\(a : tick k)`
    Span op_span;               // Bracket: the `[x]` itself
    std::vector<SExprP> kids;
};

struct SParam {
    std::vector<std::string> names;
    bool is_clock = false;
    SExprP type;
    Span span;
};

struct SurfaceDecl {
    enum Kind { Clock, Def, Type } kind = Def;
    std::string name;
    std::vector<std::string> clocks;   // Kind::Clock
    std::vector<SParam> params;
    SExprP type;   // Def: declared type; Type: the aliased type
    SExprP body;   // Def only
    Span span;
};

std::vector<SurfaceDecl> parse_file(const std::string& src);
// A single expression, used by tests and by the normalize command.
SExprP parse_expr(const std::string& src);

}  // namespace clott
