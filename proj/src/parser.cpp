#include <set>

#include "clott/parse.hpp"

namespace clott {

namespace {

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

    std::vector<SurfaceDecl> file() {
        std::vector<SurfaceDecl> out;
        layout_ = true;
        while (p_ < t_.size() - 1) {
            decl_start_ = p_;
            out.push_back(decl());
            decl_start_ = p_;
            if (p_ < t_.size() - 1 && t_[p_].span.col != 1)
                throw ParseError("unexpected '" + t_[p_].text + "', expected a new declaration", t_[p_].span);
        }
        return out;
    }

    SExprP whole_expr() {
        SExprP e = expr();
        expect(Tok::End);
        return e;
    }

private:
    std::vector<Token> t_;
    std::size_t p_ = 0;
    std::size_t decl_start_ = 0;
    bool layout_ = false;

    // Declarations start in column 1, so a column-1 token ends the current declaration.
    const Token& at_pos(std::size_t i) const {
        i = std::min(i, t_.size() - 1);
        if (layout_ && i > decl_start_ && t_[i].span.col == 1) return t_.back();
        return t_[i];
    }
    const Token& cur() const { return at_pos(p_); }
    const Token& ahead(std::size_t k) const { return at_pos(p_ + k); }
    bool at(Tok k) const { return cur().kind == k; }
    bool at_ident(const char* s) const { return at(Tok::Ident) && cur().text == s; }
    Token next() {
        Token t = cur();
        if (t.kind != Tok::End) ++p_;
        return t;
    }

    [[noreturn]] void fail(std::initializer_list<Tok> expected) const {
        std::string msg = "unexpected " + found() + ", expected ";
        std::size_t i = 0;
        for (Tok k : expected) {
            if (i) msg += i + 1 == expected.size() ? " or " : ", ";
            msg += tok_name(k);
            ++i;
        }
        throw ParseError(msg, here());
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("unexpected " + found() + ", expected " + what, here());
    }
    // Where an error is reported: the current token, or just after the last token of
    // the declaration when the declaration has run out.
    Span here() const {
        if (cur().kind != Tok::End || p_ == 0) return cur().span;
        const Span& prev = t_[p_ - 1].span;
        return {prev.end_line, prev.end_col, prev.end_line, prev.end_col};
    }
    std::string found() const {
        if (cur().kind == Tok::End && p_ < t_.size() - 1) return "end of declaration";
        return describe(cur());
    }
    static std::string describe(const Token& t) {
        if (t.kind == Tok::End) return "end of input";
        return "'" + t.text + "'";
    }

    Token expect(Tok k) {
        if (!at(k)) fail({k});
        return next();
    }
    bool accept(Tok k) {
        if (!at(k)) return false;
        next();
        return true;
    }

    static Span join(Span a, Span b) { return {a.line, a.col, b.end_line, b.end_col}; }
    Span last_span() const { return t_[p_ == 0 ? 0 : p_ - 1].span; }

    SExprP node(SK k, Span s) {
        auto e = std::make_shared<SExpr>();
        e->kind = k;
        e->span = s;
        return e;
    }
    std::shared_ptr<SExpr> mut(SK k, Span s) {
        auto e = std::make_shared<SExpr>();
        e->kind = k;
        e->span = s;
        return e;
    }

    // Declarations

    SurfaceDecl decl() {
        SurfaceDecl d;
        Span start = cur().span;
        if (accept(Tok::KwClock)) {
            d.kind = SurfaceDecl::Clock;
            d.clocks.push_back(expect(Tok::Ident).text);
            d.name = d.clocks.front();
            d.span = join(start, last_span());
            return d;
        }
        if (accept(Tok::KwType)) {
            d.kind = SurfaceDecl::Type;
            d.name = expect(Tok::Ident).text;
            d.params = params();
            expect(Tok::Assign);
            d.type = expr();
            d.span = join(start, last_span());
            return d;
        }
        accept(Tok::KwDef);
        d.kind = SurfaceDecl::Def;
        if (!at(Tok::Ident)) fail({Tok::Ident});
        d.name = next().text;
        d.params = params();
        expect(Tok::Colon);
        d.type = expr();
        expect(Tok::Assign);
        d.body = expr();
        d.span = join(start, last_span());
        return d;
    }

    std::vector<SParam> params() {
        std::vector<SParam> ps;
        while (at(Tok::LParen)) {
            SParam p;
            Span s = next().span;
            p.names.push_back(expect(Tok::Ident).text);
            while (at(Tok::Ident)) p.names.push_back(next().text);
            expect(Tok::Colon);
            if (accept(Tok::KwClock)) {
                p.is_clock = true;
            } else {
                p.type = expr();
            }
            expect(Tok::RParen);
            p.span = join(s, last_span());
            ps.push_back(std::move(p));
        }
        return ps;
    }

    // Expressions

    SExprP expr() {
        Span s = cur().span;
        switch (cur().kind) {
        case Tok::Lambda: return lambda();
        case Tok::BigLambda: {
            next();
            std::vector<std::string> ks = ident_list();
            expect(Tok::Dot);
            SExprP body = expr();
            for (auto it = ks.rbegin(); it != ks.rend(); ++it) {
                auto e = mut(SK::BigLam, join(s, body->span));
                e->names = {*it};
                e->kids = {body};
                body = e;
            }
            return body;
        }
        case Tok::KwForall: {
            next();
            return forall_rest(s, false);
        }
        case Tok::Later:
            if (ahead(1).kind == Tok::LParen) {
                next();
                return later_binder(s, false);
            }
            break;
        case Tok::Hash:
            if (ahead(1).kind == Tok::KwForall) {
                next();
                next();
                return forall_rest(s, true);
            }
            if (ahead(1).kind == Tok::Later && ahead(2).kind == Tok::LParen) {
                next();
                next();
                return later_binder(s, true);
            }
            break;
        default:
            break;
        }
        return arrow();
    }

    std::vector<std::string> ident_list() {
        std::vector<std::string> xs;
        xs.push_back(expect(Tok::Ident).text);
        while (at(Tok::Ident)) xs.push_back(next().text);
        return xs;
    }

    SExprP forall_rest(Span s, bool code) {
        std::vector<std::string> ks = ident_list();
        expect(Tok::Dot);
        SExprP body = expr();
        for (auto it = ks.rbegin(); it != ks.rend(); ++it) {
            auto e = mut(SK::Forall, join(s, body->span));
            e->names = {*it};
            e->code = code;
            e->kids = {body};
            body = e;
        }
        return body;
    }

    SExprP later_binder(Span s, bool code) {
        expect(Tok::LParen);
        std::string a = expect(Tok::Ident).text;
        expect(Tok::Colon);
        accept(Tok::KwTick);
        std::string k = expect(Tok::Ident).text;
        expect(Tok::RParen);
        expect(Tok::Dot);
        SExprP body = expr();
        auto e = mut(SK::Later, join(s, body->span));
        e->names = {a};
        e->text = k;
        e->code = code;
        e->kids = {body};
        return e;
    }

    SExprP lambda() {
        Span s = next().span;
        struct B {
            std::string name;
            SExprP type;
            bool tick;
        };
        std::vector<B> bs;
        while (!at(Tok::Dot)) {
            if (at(Tok::Ident)) {
                bs.push_back({next().text, nullptr, false});
            } else if (at(Tok::LParen)) {
                next();
                std::vector<std::string> xs = ident_list();
                expect(Tok::Colon);
                bool tick = accept(Tok::KwTick);
                SExprP ty = expr();
                expect(Tok::RParen);
                for (auto& x : xs) bs.push_back({x, ty, tick});
            } else {
                fail({Tok::Ident, Tok::LParen, Tok::Dot});
            }
        }
        if (bs.empty()) fail({Tok::Ident, Tok::LParen});
        expect(Tok::Dot);
        SExprP body = expr();
        for (auto it = bs.rbegin(); it != bs.rend(); ++it) {
            auto e = mut(SK::Lam, join(s, body->span));
            e->names = {it->name};
            e->kids = {body};
            if (it->type) e->kids.push_back(it->type);
            e->tick_binder = it->tick;
            body = e;
        }
        return body;
    }

    // A telescope `(x : A) (y z : B)` parsed as applications of ascriptions.
    static bool telescope(const SExprP& e, std::vector<std::pair<std::string, SExprP>>& out) {
        if (e->kind == SK::App) {
            return telescope(e->kids[0], out) && telescope(e->kids[1], out);
        }
        if (e->kind != SK::Ann) return false;
        std::vector<std::string> xs;
        if (!ident_spine(e->kids[0], xs)) return false;
        for (auto& x : xs) out.push_back({x, e->kids[1]});
        return true;
    }
    static bool ident_spine(const SExprP& e, std::vector<std::string>& xs) {
        if (e->kind == SK::Ident && !e->braces) {
            xs.push_back(e->text);
            return true;
        }
        if (e->kind == SK::App) return ident_spine(e->kids[0], xs) && ident_spine(e->kids[1], xs);
        return false;
    }

    SExprP binder_chain(SK k, bool code, const std::vector<std::pair<std::string, SExprP>>& tel, SExprP cod, Span s) {
        for (auto it = tel.rbegin(); it != tel.rend(); ++it) {
            auto e = mut(k, join(s, cod->span));
            e->names = {it->first};
            e->code = code;
            e->kids = {it->second, cod};
            cod = e;
        }
        return cod;
    }

    bool at_arrow(bool& code) const {
        if (at(Tok::Arrow)) {
            code = false;
            return true;
        }
        if (at(Tok::Hash) && ahead(1).kind == Tok::Arrow) {
            code = true;
            return true;
        }
        return false;
    }
    bool at_star(bool& code) const {
        if (at(Tok::Star)) {
            code = false;
            return true;
        }
        if (at(Tok::Hash) && ahead(1).kind == Tok::Star) {
            code = true;
            return true;
        }
        return false;
    }

    SExprP arrow() {
        Span s = cur().span;
        SExprP lhs = cons();
        bool code = false;
        if (at_arrow(code)) {
            if (code) next();
            next();
            SExprP rhs = expr();
            std::vector<std::pair<std::string, SExprP>> tel;
            if (telescope(lhs, tel)) return binder_chain(SK::Pi, code, tel, rhs, s);
            return binder_chain(SK::Pi, code, {{"", lhs}}, rhs, s);
        }
        return lhs;
    }

    SExprP cons() {
        Span s = cur().span;
        SExprP lhs = prod();
        if (accept(Tok::Cons)) {
            SExprP rhs = binder_start() ? expr() : cons();
            auto e = mut(SK::Pair, join(s, rhs->span));
            e->kids = {lhs, rhs};
            return e;
        }
        return lhs;
    }

    SExprP prod() {
        Span s = cur().span;
        SExprP lhs = prefix();
        bool code = false;
        if (at_star(code)) {
            if (code) next();
            next();
            SExprP rhs = star_rhs();
            std::vector<std::pair<std::string, SExprP>> tel;
            if (telescope(lhs, tel)) return binder_chain(SK::Sigma, code, tel, rhs, s);
            return binder_chain(SK::Sigma, code, {{"", lhs}}, rhs, s);
        }
        return lhs;
    }

    // Binder forms extend as far right as possible and may end an infix chain
    // (`A * |>(a:k). B`, `x :: \(a:k). t`).
    bool binder_start() const {
        switch (cur().kind) {
        case Tok::Lambda: case Tok::BigLambda: case Tok::KwForall:
            return true;
        case Tok::Later:
            return ahead(1).kind == Tok::LParen;
        case Tok::Hash:
            return ahead(1).kind == Tok::KwForall || (ahead(1).kind == Tok::Later && ahead(2).kind == Tok::LParen);
        default:
            return false;
        }
    }

    SExprP star_rhs() { return binder_start() ? expr() : prod(); }

    SExprP prefix() {
        Span s = cur().span;
        bool code = false;
        if (at(Tok::Later) && ahead(1).kind == Tok::Ident) {
            code = false;
        } else if (at(Tok::Hash) && ahead(1).kind == Tok::Later && ahead(2).kind == Tok::Ident) {
            code = true;
            next();
        } else {
            return app();
        }
        next();
        std::string k = expect(Tok::Ident).text;
        SExprP body = prefix();
        auto e = mut(SK::Later, join(s, body->span));
        e->names = {""};
        e->text = k;
        e->code = code;
        e->kids = {body};
        return e;
    }

    bool starts_atom() const {
        switch (cur().kind) {
        case Tok::Ident: case Tok::Num: case Tok::LParen: case Tok::KwU: case Tok::KwEl: case Tok::KwIn:
        case Tok::KwDfix: case Tok::KwFix: case Tok::KwCirr: case Tok::KwTirr: case Tok::KwPfix:
            return true;
        case Tok::Hash:
            return ahead(1).kind == Tok::Ident;
        default:
            return false;
        }
    }

    SExprP app() {
        Span s = cur().span;
        if (!starts_atom()) fail("an expression");
        SExprP f = postfix();
        while (starts_atom()) {
            SExprP a = postfix();
            auto e = mut(SK::App, join(s, a->span));
            e->kids = {f, a};
            f = e;
        }
        return f;
    }

    SExprP postfix() {
        Span s = cur().span;
        SExprP e = atom();
        while (at(Tok::LBrack)) {
            Span lb = next().span;
            if (accept(Tok::Diamond)) {
                expect(Tok::RBrack);
                auto d = mut(SK::DiaImplicit, join(s, last_span()));
                d->kids = {e};
                e = d;
                continue;
            }
            std::string x = expect(Tok::Ident).text;
            if (accept(Tok::Dot)) {
                expect(Tok::RBrack);
                expect(Tok::LBrack);
                expect(Tok::Diamond);
                std::string target = expect(Tok::Ident).text;
                expect(Tok::RBrack);
                auto d = mut(SK::DiaExplicit, join(s, last_span()));
                d->names = {x};
                d->text = target;
                d->kids = {e};
                e = d;
                continue;
            }
            expect(Tok::RBrack);
            auto b = mut(SK::Bracket, join(s, last_span()));
            b->op_span = join(lb, last_span());
            b->text = x;
            b->kids = {e};
            e = b;
        }
        return e;
    }

    std::vector<std::string> brace_names() {
        expect(Tok::LBrace);
        std::vector<std::string> xs;
        if (!at(Tok::RBrace)) {
            xs.push_back(expect(Tok::Ident).text);
            while (accept(Tok::Comma)) xs.push_back(expect(Tok::Ident).text);
        }
        expect(Tok::RBrace);
        return xs;
    }

    SExprP atom() {
        Span s = cur().span;
        switch (cur().kind) {
        case Tok::Ident: {
            auto e = mut(SK::Ident, s);
            e->text = next().text;
            if (at(Tok::LBrace)) {
                e->braces = true;
                e->names = brace_names();
                e->span = join(s, last_span());
            }
            return e;
        }
        case Tok::Num: {
            auto e = mut(SK::Num, s);
            const std::string& txt = cur().text;
            if (txt.size() > 9) throw ParseError("numeral too large", s);
            e->num = std::stoul(txt);
            next();
            return e;
        }
        case Tok::Hash: {
            next();
            Token n = expect(Tok::Ident);
            if (n.text != "Nat") throw ParseError("unknown code '#" + n.text + "'", n.span);
            return node(SK::CodeNat, join(s, n.span));
        }
        case Tok::KwU: {
            next();
            auto e = mut(SK::Univ, s);
            if (at(Tok::LBrace)) e->names = brace_names();
            e->span = join(s, last_span());
            return e;
        }
        case Tok::KwEl: {
            next();
            auto e = mut(SK::El, s);
            if (at(Tok::LBrace)) {
                e->braces = true;
                e->names = brace_names();
            }
            SExprP a = atom_arg();
            e->kids = {a};
            e->span = join(s, a->span);
            return e;
        }
        case Tok::KwIn: {
            next();
            auto e = mut(SK::Incl, s);
            if (at(Tok::LBrace)) {
                e->braces = true;
                e->names = brace_names();
                e->names2 = brace_names();
            }
            SExprP a = atom_arg();
            e->kids = {a};
            e->span = join(s, a->span);
            return e;
        }
        case Tok::KwDfix: case Tok::KwFix: case Tok::KwTirr: case Tok::KwPfix: case Tok::KwCirr: {
            Tok k = next().kind;
            SK sk = k == Tok::KwDfix ? SK::Dfix : k == Tok::KwFix ? SK::Fix : k == Tok::KwTirr ? SK::Tirr
                  : k == Tok::KwPfix ? SK::Pfix : SK::Cirr;
            auto e = mut(sk, s);
            if (sk != SK::Cirr) {
                expect(Tok::Caret);
                e->text = expect(Tok::Ident).text;
            }
            SExprP ann;
            if (accept(Tok::LBrack)) {
                ann = expr();
                expect(Tok::RBrack);
            }
            SExprP a = atom_arg();
            e->kids = {a};
            if (ann) e->kids.push_back(ann);
            e->span = join(s, a->span);
            return e;
        }
        case Tok::LParen:
            return paren();
        default:
            fail("an expression");
        }
    }

    // Argument of a keyword form: an atom with its postfix brackets.
    SExprP atom_arg() {
        if (!starts_atom()) fail("an expression");
        return postfix();
    }

    SExprP paren() {
        Span s = next().span;
        // Binder argument `(x y. body)`.
        {
            std::size_t k = 0;
            while (ahead(k).kind == Tok::Ident) ++k;
            if (k > 0 && ahead(k).kind == Tok::Dot) {
                auto e = mut(SK::Binder, s);
                for (std::size_t i = 0; i < k; ++i) e->names.push_back(next().text);
                expect(Tok::Dot);
                e->kids = {expr()};
                expect(Tok::RParen);
                e->span = join(s, last_span());
                return e;
            }
        }
        SExprP a = expr();
        if (accept(Tok::RParen)) return a;
        if (accept(Tok::Comma)) {
            SExprP b = expr();
            expect(Tok::RParen);
            auto e = mut(SK::Pair, join(s, last_span()));
            e->kids = {a, b};
            return e;
        }
        if (accept(Tok::Colon)) {
            SExprP ty = expr();
            expect(Tok::RParen);
            auto e = mut(SK::Ann, join(s, last_span()));
            e->kids = {a, ty};
            return e;
        }
        fail({Tok::RParen, Tok::Comma, Tok::Colon});
    }
};

}  // namespace

std::vector<SurfaceDecl> parse_file(const std::string& src) {
    Parser p(tokenize(src));
    return p.file();
}

SExprP parse_expr(const std::string& src) {
    Parser p(tokenize(src));
    return p.whole_expr();
}

}  // namespace clott
