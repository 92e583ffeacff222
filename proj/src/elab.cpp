#include "clott/elab.hpp"

#include <set>

#include "clott/pretty.hpp"
#include "clott/subst.hpp"

namespace clott {

namespace {

const std::set<std::string>& builtins() {
    static const std::set<std::string> b = {"Nat", "fst", "snd", "suc", "natrec", "J", "Id", "refl"};
    return b;
}

bool no_span(const TypeError& e) { return e.span.line == 0; }

// Runs f, attaching `sp` to checker errors that carry no location yet.
template <class F>
auto located(Span sp, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const TypeError& e) {
        if (no_span(e)) throw TypeError(e.what(), sp);
        throw;
    } catch (const ScopeError& e) {
        throw TypeError(e.what(), sp);
    }
}

void spine(const SExprP& e, SExprP& head, std::vector<SExprP>& args) {
    if (e->kind == SK::App) {
        spine(e->kids[0], head, args);
        args.push_back(e->kids[1]);
        return;
    }
    head = e;
}

}  // namespace

std::string Elaborator::show(const Context& ctx, const Term& t) const {
    std::set<std::string> reserved;
    for (const auto& kv : prog_.defs) reserved.insert(kv.first);
    PrettyOptions o;
    o.reserved = &reserved;
    try {
        return pretty(t, ctx.names(), o);
    } catch (const std::exception&) {
        return std::string("<") + kind_name(t->kind) + ">";
    }
}

int Elaborator::lookup(const Context& ctx, const std::string& name) const {
    int n = static_cast<int>(ctx.size());
    for (int i = n - 1; i >= 0; --i)
        if (ctx.entries[static_cast<std::size_t>(i)].name == name) return n - 1 - i;
    return -1;
}

void Elaborator::unbound(const std::string& name, Span sp) const {
    for (auto it = hidden_.rbegin(); it != hidden_.rend(); ++it) {
        if (name == it->tick)
            throw TypeError("tick '" + name + "' is already used by the enclosing application [" + name + "] at " +
                                std::to_string(it->at.line) + ":" + std::to_string(it->at.col),
                            sp);
        for (const auto& h : it->names)
            if (h == name)
                throw TypeError("'" + name + "' is bound after tick '" + it->tick + "'; the operand of [" + it->tick +
                                    "] may only use entries before the tick",
                                sp);
    }
    throw TypeError("unbound name '" + name + "'", sp);
}

int Elaborator::resolve_clock(const Context& ctx, const std::string& name, Span sp) const {
    int ix = lookup(ctx, name);
    if (ix < 0) unbound(name, sp);
    if (ctx.at_index(ix).kind != EntryKind::Clock) throw TypeError("'" + name + "' is not a clock", sp);
    return ix;
}

ClockSet Elaborator::clock_set(const Context& ctx, const std::vector<std::string>& names, Span sp) const {
    std::vector<int> out;
    for (const auto& n : names) out.push_back(resolve_clock(ctx, n, sp));
    return make_clock_set(std::move(out));
}

bool Elaborator::is_builtin(const Context& ctx, const SExprP& e, const char* name) const {
    return e->kind == SK::Ident && !e->braces && e->text == name && lookup(ctx, name) < 0;
}

Term Elaborator::require_conv(const Context& ctx, Term t, const Term& got, const Term& want, Span sp) {
    bool ok = located(sp, [&] { return ch_.conv(got, want); });
    if (ok) return t;
    Term g = whnf(got), w = whnf(want);
    if (g->kind == K::Univ && w->kind == K::Univ && clock_subset(g->d1, w->d1)) return incl(g->d1, w->d1, t);
    throw TypeError("type mismatch: expected " + show(ctx, want) + ", found " + show(ctx, got) +
                        " (not convertible within fuel " + std::to_string(ch_.fuel()) + ")",
                    sp);
}

// Types

Term Elaborator::expand_alias(const Context& ctx, const TypeAlias& a, const std::vector<SExprP>& args, Span sp) {
    std::size_t want = a.params.size();
    if (args.size() != want)
        throw TypeError("type '" + a.name + "' expects " + std::to_string(want) + " argument" + (want == 1 ? "" : "s") +
                            ", got " + std::to_string(args.size()),
                        sp);
    int n = static_cast<int>(ctx.size());
    Subst s = empty_subst(n);
    for (int i = 0; i < a.ambient; ++i) s = s.ext_clock(n - 1 - i);
    for (std::size_t i = 0; i < want; ++i) {
        const AliasParam& p = a.params[i];
        const SExprP& arg = args[i];
        if (p.is_clock) {
            if (arg->kind != SK::Ident || arg->braces)
                throw TypeError("argument " + std::to_string(i + 1) + " of '" + a.name + "' must be a clock", arg->span);
            s = s.ext_clock(resolve_clock(ctx, arg->text, arg->span));
        } else {
            Term ty = subst(p.type, s);
            s = s.ext_var(check(ctx, arg, ty));
        }
    }
    return located(sp, [&] { return subst(a.body, s); });
}

Term Elaborator::type(const Context& ctx, const SExprP& e) {
    switch (e->kind) {
    case SK::Ident:
        if (lookup(ctx, e->text) < 0 && !e->braces) {
            if (e->text == "Nat") return nat_ty();
            if (const TypeAlias* a = prog_.find_alias(e->text)) return expand_alias(ctx, *a, {}, e->span);
        }
        break;
    case SK::App: {
        SExprP head;
        std::vector<SExprP> args;
        spine(e, head, args);
        if (head->kind == SK::Ident && !head->braces && lookup(ctx, head->text) < 0) {
            if (const TypeAlias* a = prog_.find_alias(head->text)) return expand_alias(ctx, *a, args, e->span);
            if (head->text == "Id") {
                if (args.size() != 3) throw TypeError("Id expects a type and two terms", e->span);
                Term A = type(ctx, args[0]);
                Term t = check(ctx, args[1], A);
                Term u = check(ctx, args[2], A);
                return id_ty(A, t, u);
            }
        }
        break;
    }
    case SK::Pi:
    case SK::Sigma: {
        if (e->code) break;
        std::string x = e->names[0].empty() ? "_" : e->names[0];
        Term A = type(ctx, e->kids[0]);
        Term B;
        if (e->names[0].empty()) {
            B = shift(type(ctx, e->kids[1]), 1);
        } else {
            B = type(ctx.push_var(x, A), e->kids[1]);
        }
        return e->kind == SK::Pi ? pi(x, A, B) : sigma(x, A, B);
    }
    case SK::Later: {
        if (e->code) break;
        int k = resolve_clock(ctx, e->text, e->span);
        if (e->names[0].empty()) return later_nd(k, type(ctx, e->kids[0]));
        return later(e->names[0], k, type(ctx.push_tick(e->names[0], k), e->kids[0]));
    }
    case SK::Forall:
        if (e->code) break;
        return forall_ty(e->names[0], type(ctx.push_clock(e->names[0]), e->kids[0]));
    case SK::Univ:
        return univ(clock_set(ctx, e->names, e->span));
    case SK::El: {
        if (e->braces) {
            ClockSet d = clock_set(ctx, e->names, e->span);
            return el(d, check(ctx, e->kids[0], univ(d)));
        }
        auto [t, T] = infer(ctx, e->kids[0]);
        Term w = whnf(T);
        if (w->kind != K::Univ)
            throw TypeError("El expects a code, but " + show(ctx, t) + " has type " + show(ctx, T), e->span);
        return el(w->d1, t);
    }
    default:
        break;
    }
    auto [t, T] = infer(ctx, e);
    Term w = located(e->span, [&] { return whnf(T); });
    if (w->kind == K::Univ) return el(w->d1, t);
    throw TypeError("expected a type, but " + show(ctx, t) + " is a term of type " + show(ctx, T), e->span);
}

// Codes

Term Elaborator::check_code(const Context& ctx, const SExprP& e, const ClockSet& d) {
    switch (e->kind) {
    case SK::CodeNat:
        return code_nat(d);
    case SK::Pi:
    case SK::Sigma: {
        std::string x = e->names[0].empty() ? "_" : e->names[0];
        Term A = check(ctx, e->kids[0], univ(d));
        Context cx = ctx.push_var(x, el(d, A));
        Term B;
        if (e->names[0].empty()) {
            B = shift(check(ctx, e->kids[1], univ(d)), 1);
        } else {
            B = check(cx, e->kids[1], univ(shift_set(d)));
        }
        return e->kind == SK::Pi ? code_pi(d, x, A, B) : code_sigma(d, x, A, B);
    }
    case SK::Forall:
        return code_forall(d, e->names[0], check(ctx.push_clock(e->names[0]), e->kids[0], univ(shift_set(d, true))));
    case SK::Later: {
        int k = resolve_clock(ctx, e->text, e->span);
        if (!std::binary_search(d.begin(), d.end(), k))
            throw TypeError("clock '" + e->text + "' is not in the clock set of the universe " + show(ctx, univ(d)),
                            e->span);
        if (e->names[0].empty()) return code_later(d, "_", k, shift(check(ctx, e->kids[0], univ(d)), 1));
        std::string a = e->names[0];
        return code_later(d, a, k, check(ctx.push_tick(a, k), e->kids[0], univ(shift_set(d))));
    }
    default:
        throw TypeError("not a code", e->span);
    }
}

// Checking

Term Elaborator::check(const Context& ctx, const SExprP& e, const Term& ty) {
    auto fallback = [&]() {
        auto [t, T] = infer(ctx, e);
        return require_conv(ctx, t, T, ty, e->span);
    };
    bool is_code = e->kind == SK::CodeNat ||
                   (e->code && (e->kind == SK::Pi || e->kind == SK::Sigma || e->kind == SK::Forall || e->kind == SK::Later));
    if (is_code) {
        Term w = located(e->span, [&] { return whnf(ty); });
        if (w->kind != K::Univ)
            throw TypeError("a code must have a universe type, but is expected to have type " + show(ctx, ty), e->span);
        return check_code(ctx, e, w->d1);
    }
    switch (e->kind) {
    case SK::Lam: {
        const std::string& x = e->names[0];
        Term w = located(e->span, [&] { return whnf(ty); });
        bool has_type = e->kids.size() > 1;
        bool tick_binder = e->tick_binder;
        if (has_type && !tick_binder && e->kids[1]->kind == SK::Ident) {
            int ix = lookup(ctx, e->kids[1]->text);
            if (ix >= 0 && ctx.at_index(ix).kind == EntryKind::Clock) tick_binder = true;
        }
        if (tick_binder) {
            if (e->kids[1]->kind != SK::Ident) throw TypeError("a tick binder needs a clock", e->kids[1]->span);
            int k = resolve_clock(ctx, e->kids[1]->text, e->kids[1]->span);
            if (w->kind != K::Later) return fallback();
            if (w->ix != k)
                throw TypeError("tick lambda on clock '" + e->kids[1]->text + "' is expected to have type " +
                                    show(ctx, ty),
                                e->span);
            Term body = check(ctx.push_tick(x, k), e->kids[0], w->kids[0]);
            return tick_lam(x, k, w->kids[0], body);
        }
        if (w->kind == K::Pi) {
            if (has_type) {
                Term A0 = type(ctx, e->kids[1]);
                bool ok = located(e->span, [&] { return ch_.conv(A0, w->kids[0]); });
                if (!ok)
                    throw TypeError("binder type " + show(ctx, A0) + " does not match the expected domain " +
                                        show(ctx, w->kids[0]),
                                    e->kids[1]->span);
            }
            Term body = check(ctx.push_var(x, w->kids[0]), e->kids[0], w->kids[1]);
            return lam(x, w->kids[0], w->kids[1], body);
        }
        if (w->kind == K::Later && !has_type) {
            Term body = check(ctx.push_tick(x, w->ix), e->kids[0], w->kids[0]);
            return tick_lam(x, w->ix, w->kids[0], body);
        }
        if (has_type) return fallback();
        throw TypeError("a lambda cannot have type " + show(ctx, ty), e->span);
    }
    case SK::BigLam: {
        Term w = located(e->span, [&] { return whnf(ty); });
        if (w->kind != K::Forall) throw TypeError("a clock abstraction cannot have type " + show(ctx, ty), e->span);
        Term body = check(ctx.push_clock(e->names[0]), e->kids[0], w->kids[0]);
        return clk_lam(e->names[0], w->kids[0], body);
    }
    case SK::Pair: {
        Term w = located(e->span, [&] { return whnf(ty); });
        if (w->kind != K::Sigma) return fallback();
        Term a = check(ctx, e->kids[0], w->kids[0]);
        Term bty = located(e->span, [&] { return inst_var(w->kids[1], a); });
        Term b = check(ctx, e->kids[1], bty);
        return pair(w->name(0), w->kids[0], w->kids[1], a, b);
    }
    case SK::Ident:
        if (is_builtin(ctx, e, "refl")) {
            Term w = located(e->span, [&] { return whnf(ty); });
            if (w->kind != K::Id) throw TypeError("refl cannot have type " + show(ctx, ty), e->span);
            bool ok = located(e->span, [&] { return ch_.conv(w->kids[1], w->kids[2]); });
            if (!ok)
                throw TypeError("refl: " + show(ctx, w->kids[1]) + " and " + show(ctx, w->kids[2]) +
                                    " are not convertible within fuel " + std::to_string(ch_.fuel()),
                                e->span);
            return refl(w->kids[0], w->kids[1]);
        }
        return fallback();
    case SK::Fix:
    case SK::Dfix:
        if (e->kids.size() == 1) {
            auto [t, T] = fixlike(ctx, e, &ty);
            return require_conv(ctx, t, T, ty, e->span);
        }
        return fallback();
    case SK::Incl:
        if (!e->braces) {
            Term w = located(e->span, [&] { return whnf(ty); });
            if (w->kind != K::Univ) throw TypeError("'in' must have a universe type", e->span);
            auto [t, T] = infer(ctx, e->kids[0]);
            Term wt = whnf(T);
            if (wt->kind != K::Univ) throw TypeError("'in' expects a code, got a term of type " + show(ctx, T), e->span);
            if (!clock_subset(wt->d1, w->d1))
                throw TypeError("universe inclusion " + show(ctx, T) + " into " + show(ctx, ty) +
                                    " needs a subset of clocks",
                                e->span);
            return incl(wt->d1, w->d1, t);
        }
        return fallback();
    default:
        return fallback();
    }
}

// Inference

std::pair<Term, Term> Elaborator::fixlike(const Context& ctx, const SExprP& e, const Term* expected) {
    int k = resolve_clock(ctx, e->text, e->span);
    Term A;
    if (e->kids.size() > 1) {
        A = type(ctx, e->kids[1]);
    } else if (expected && e->kind == SK::Fix) {
        A = *expected;
    } else if (expected && e->kind == SK::Dfix) {
        Term w = located(e->span, [&] { return whnf(*expected); });
        if (w->kind == K::Later && w->ix == k && !mentions(w->kids[0], 0)) A = unshift(w->kids[0], 1);
    }
    Term f;
    if (!A) {
        auto [f0, F] = infer(ctx, e->kids[0]);
        Term w = located(e->span, [&] { return whnf(F); });
        if (w->kind != K::Pi || mentions(w->kids[1], 0))
            throw TypeError("cannot infer the type of the fixed point; write " +
                                std::string(e->kind == SK::Fix ? "fix" : "dfix") + "^k [A] t",
                            e->span);
        A = unshift(w->kids[1], 1);
        f = require_conv(ctx, f0, F, arrow(later_nd(k, A), A), e->kids[0]->span);
    } else {
        f = check(ctx, e->kids[0], arrow(later_nd(k, A), A));
    }
    Term d = dfix(A, k, f);
    if (e->kind == SK::Dfix) return {d, later_nd(k, A)};
    return {app("_", later_nd(k, A), shift(A, 1), f, d), A};
}

std::pair<Term, Term> Elaborator::apply(const Context& ctx, Term f, Term fty, const SExprP& arg, Span sp) {
    Term w = located(sp, [&] { return whnf(fty); });
    if (w->kind == K::Pi) {
        Term u = check(ctx, arg, w->kids[0]);
        Term r = app(w->name(0), w->kids[0], w->kids[1], f, u);
        return {r, located(sp, [&] { return inst_var(w->kids[1], u); })};
    }
    if (w->kind == K::Forall) {
        if (arg->kind != SK::Ident || arg->braces)
            throw TypeError("expected a clock argument for a term of type " + show(ctx, fty), arg->span);
        int c = resolve_clock(ctx, arg->text, arg->span);
        return {clk_app(w->name(0), w->kids[0], f, c), inst_clock(w->kids[0], c)};
    }
    throw TypeError(show(ctx, f) + " is not a function; it has type " + show(ctx, fty), sp);
}

std::pair<Term, Term> Elaborator::infer_app(const Context& ctx, const SExprP& e) {
    SExprP head;
    std::vector<SExprP> args;
    spine(e, head, args);
    std::size_t used = 0;
    Term f, T;
    auto need = [&](std::size_t n, const char* what) {
        if (args.size() < n) throw TypeError(std::string(what), e->span);
    };
    if (is_builtin(ctx, head, "suc")) {
        need(1, "suc expects one argument");
        f = suc(check(ctx, args[0], nat_ty()));
        T = nat_ty();
        used = 1;
    } else if (is_builtin(ctx, head, "fst") || is_builtin(ctx, head, "snd")) {
        need(1, "fst and snd expect one argument");
        auto [p, P] = infer(ctx, args[0]);
        Term w = located(args[0]->span, [&] { return whnf(P); });
        if (w->kind != K::Sigma)
            throw TypeError(show(ctx, p) + " is not a pair; it has type " + show(ctx, P), args[0]->span);
        if (head->text == "fst") {
            f = fst(w->name(0), w->kids[0], w->kids[1], p);
            T = w->kids[0];
        } else {
            f = snd(w->name(0), w->kids[0], w->kids[1], p);
            T = inst_var(w->kids[1], fst(w->name(0), w->kids[0], w->kids[1], p));
        }
        used = 1;
    } else if (is_builtin(ctx, head, "natrec")) {
        need(4, "natrec expects (x. P) z (n ih. s) t");
        const SExprP& pm = args[0];
        const SExprP& st = args[2];
        if (pm->kind != SK::Binder || pm->names.size() != 1)
            throw TypeError("natrec motive must be written (x. P)", pm->span);
        if (st->kind != SK::Binder || st->names.size() != 2)
            throw TypeError("natrec step must be written (n ih. s)", st->span);
        Term P = type(ctx.push_var(pm->names[0], nat_ty()), pm->kids[0]);
        Term z = check(ctx, args[1], inst_var(P, zero()));
        Context cs = ctx.push_var(st->names[0], nat_ty()).push_var(st->names[1], P);
        Term s = check(cs, st->kids[0], inst_var(shift(P, 2, 1), suc(var(1))));
        Term t = check(ctx, args[3], nat_ty());
        f = natrec(pm->names[0], P, z, st->names[0], st->names[1], s, t);
        T = inst_var(P, t);
        used = 4;
    } else if (is_builtin(ctx, head, "J")) {
        need(3, "J expects (x y p. P) (x. d) e");
        const SExprP& pm = args[0];
        const SExprP& dm = args[1];
        if (pm->kind != SK::Binder || pm->names.size() != 3)
            throw TypeError("J motive must be written (x y p. P)", pm->span);
        if (dm->kind != SK::Binder || dm->names.size() != 1)
            throw TypeError("J base case must be written (x. d)", dm->span);
        auto [eq, E] = infer(ctx, args[2]);
        Term w = located(args[2]->span, [&] { return whnf(E); });
        if (w->kind != K::Id) throw TypeError(show(ctx, eq) + " is not an equality proof", args[2]->span);
        Term A = w->kids[0];
        Context cp = ctx.push_var(pm->names[0], A)
                         .push_var(pm->names[1], shift(A, 1))
                         .push_var(pm->names[2], id_ty(shift(A, 2), var(1), var(0)));
        Term P = type(cp, pm->kids[0]);
        Term pd = inst_var3(shift(P, 1, 3), var(0), var(0), refl(shift(A, 1), var(0)));
        Term d = check(ctx.push_var(dm->names[0], A), dm->kids[0], pd);
        f = jelim({pm->names[0], pm->names[1], pm->names[2], dm->names[0]}, A, P, d, w->kids[1], w->kids[2], eq);
        T = inst_var3(P, w->kids[1], w->kids[2], eq);
        used = 3;
    } else if (is_builtin(ctx, head, "Id") || (head->kind == SK::Ident && !head->braces && lookup(ctx, head->text) < 0 &&
                                                prog_.find_alias(head->text))) {
        throw TypeError("a type is not a term: " + head->text + " has no code", e->span);
    } else {
        std::tie(f, T) = infer(ctx, head);
    }
    for (std::size_t i = used; i < args.size(); ++i) std::tie(f, T) = apply(ctx, f, T, args[i], e->span);
    return {f, T};
}

std::pair<Term, Term> Elaborator::infer_bracket(const Context& ctx, const SExprP& e) {
    const std::string& x = e->text;
    int b = lookup(ctx, x);
    if (b < 0) unbound(x, e->op_span);
    const Entry& ent = ctx.at_index(b);
    if (ent.kind == EntryKind::Clock) {
        auto [t, T] = infer(ctx, e->kids[0]);
        Term w = located(e->span, [&] { return whnf(T); });
        if (w->kind != K::Forall)
            throw TypeError(show(ctx, t) + " cannot be applied to clock '" + x + "'; it has type " + show(ctx, T),
                            e->span);
        return {clk_app(w->name(0), w->kids[0], t, b), inst_clock(w->kids[0], b)};
    }
    if (ent.kind != EntryKind::Tick) throw TypeError("'" + x + "' is neither a clock nor a tick", e->span);
    // Elaborate the operand in the context strictly before the tick.
    std::size_t keep = ctx.size() - static_cast<std::size_t>(b + 1);
    Context pre = ctx.prefix(keep);
    Hidden h;
    h.tick = x;
    h.at = e->op_span;
    for (std::size_t i = keep + 1; i < ctx.size(); ++i) h.names.push_back(ctx.entries[i].name);
    hidden_.push_back(h);
    std::pair<Term, Term> op;
    try {
        op = infer(pre, e->kids[0]);
    } catch (...) {
        hidden_.pop_back();
        throw;
    }
    hidden_.pop_back();
    auto [t, T] = op;
    Term w = located(e->span, [&] { return whnf(T); });
    if (w->kind != K::Later)
        throw TypeError(show(pre, t) + " cannot be applied to tick '" + x + "'; it has type " + show(pre, T), e->span);
    int drop = b + 1;
    int k = w->ix + drop;
    int kb = ctx.tick_clock(b);
    if (k != kb)
        throw TypeError("tick '" + x + "' is on clock '" + ctx.at_index(kb).name + "' but " + show(pre, t) +
                            " is delayed on clock '" + ctx.at_index(k).name + "'",
                        e->span);
    Term A = shift(w->kids[0], drop, 1);
    Term r = tick_app(w->name(0), k, A, shift(t, drop), b);
    return {r, inst_tick(A, b)};
}

std::pair<Term, Term> Elaborator::infer_diamond(const Context& ctx, const SExprP& e) {
    if (e->kind == SK::DiaExplicit) {
        int target = resolve_clock(ctx, e->text, e->span);
        const std::string& kname = e->names[0];
        Context cx = ctx.push_clock(kname);
        auto [t, T] = infer(cx, e->kids[0]);
        Term w = located(e->span, [&] { return whnf(T); });
        if (w->kind != K::Later || w->ix != 0)
            throw TypeError("in t [" + kname + ".][<> " + e->text + "], t must be delayed on clock '" + kname +
                                "'; it has type " + show(cx, T),
                            e->span);
        Term d = dia_app(kname, w->name(0), w->kids[0], t, target);
        Term ty = located(e->span, [&] { return ch_.infer(ctx, d); });
        return {d, ty};
    }
    auto [t, T] = infer(ctx, e->kids[0]);
    Term w = located(e->span, [&] { return whnf(T); });
    if (w->kind != K::Later)
        throw TypeError("cannot apply ⋄ to " + show(ctx, t) + ": it has type " + show(ctx, T) + ", not a later type",
                        e->span);
    int c = w->ix;
    std::string kname = ctx.at_index(c).name;
    Term d;
    try {
        Term s = abstract_clock(t, c);
        Term A2 = abstract_clock(w->kids[0], c, 1);
        d = dia_app(kname, w->name(0), A2, s, c);
        Term ty = ch_.infer(ctx, d);
        return {d, ty};
    } catch (const std::exception&) {
        throw TypeError("cannot apply ⋄ to " + show(ctx, t) + ": clock '" + kname +
                            "' also occurs in the context it depends on, so it cannot be bound locally",
                        e->span);
    }
}

std::pair<Term, Term> Elaborator::infer(const Context& ctx, const SExprP& e) {
    switch (e->kind) {
    case SK::Ident: {
        const std::string& x = e->text;
        int ix = e->braces ? -1 : lookup(ctx, x);
        if (ix >= 0) {
            const Entry& ent = ctx.at_index(ix);
            if (ent.kind == EntryKind::Clock) throw TypeError("'" + x + "' is a clock, not a term", e->span);
            if (ent.kind == EntryKind::Tick) throw TypeError("'" + x + "' is a tick, not a term", e->span);
            return {var(ix, x), ctx.type_of(ix)};
        }
        if (const GlobalDef* g = prog_.find(x)) {
            std::vector<int> args;
            if (e->braces) {
                if (static_cast<int>(e->names.size()) != g->ambient)
                    throw TypeError("'" + x + "' takes " + std::to_string(g->ambient) + " ambient clock arguments",
                                    e->span);
                for (const auto& k : e->names) args.push_back(resolve_clock(ctx, k, e->span));
            } else {
                args = Program::ambient_args(g->ambient, static_cast<int>(ctx.size()));
            }
            return {global(x, args), instantiate_ambient(g->type, g->ambient, args)};
        }
        if (prog_.find_alias(x) || x == "Nat") throw TypeError("a type is not a term: '" + x + "' has no code", e->span);
        if (x == "refl") throw TypeError("cannot infer the type of refl; add an ascription (refl : Id A t t)", e->span);
        if (builtins().count(x)) throw TypeError("'" + x + "' must be applied to its arguments", e->span);
        unbound(x, e->span);
    }
    case SK::Num:
        return {numeral(static_cast<unsigned>(e->num)), nat_ty()};
    case SK::App:
        return infer_app(ctx, e);
    case SK::Bracket:
        return infer_bracket(ctx, e);
    case SK::DiaImplicit:
    case SK::DiaExplicit:
        return infer_diamond(ctx, e);
    case SK::Pair: {
        auto [a, A] = infer(ctx, e->kids[0]);
        auto [b, B] = infer(ctx, e->kids[1]);
        return {pair("_", A, shift(B, 1), a, b), product(A, B)};
    }
    case SK::Ann: {
        Term A = type(ctx, e->kids[1]);
        return {check(ctx, e->kids[0], A), A};
    }
    case SK::Lam: {
        if (e->kids.size() < 2)
            throw TypeError("cannot infer the type of a lambda; annotate the binder or the lambda", e->span);
        const std::string& x = e->names[0];
        const SExprP& bt = e->kids[1];
        bool tick = e->tick_binder;
        if (!tick && bt->kind == SK::Ident) {
            int ix = lookup(ctx, bt->text);
            tick = ix >= 0 && ctx.at_index(ix).kind == EntryKind::Clock;
        }
        if (tick) {
            int k = resolve_clock(ctx, bt->text, bt->span);
            auto [b, B] = infer(ctx.push_tick(x, k), e->kids[0]);
            return {tick_lam(x, k, B, b), later(x, k, B)};
        }
        Term A = type(ctx, bt);
        auto [b, B] = infer(ctx.push_var(x, A), e->kids[0]);
        return {lam(x, A, B, b), pi(x, A, B)};
    }
    case SK::BigLam: {
        auto [b, B] = infer(ctx.push_clock(e->names[0]), e->kids[0]);
        return {clk_lam(e->names[0], B, b), forall_ty(e->names[0], B)};
    }
    case SK::Fix:
    case SK::Dfix:
        return fixlike(ctx, e, nullptr);
    case SK::Cirr:
    case SK::Tirr:
    case SK::Pfix: {
        int k = e->kind == SK::Cirr ? -1 : resolve_clock(ctx, e->text, e->span);
        Term A;
        Term t;
        if (e->kids.size() > 1) {
            A = type(ctx, e->kids[1]);
            Term want = e->kind == SK::Cirr ? forall_ty("k", shift(A, 1))
                        : e->kind == SK::Tirr ? later_nd(k, A)
                                              : arrow(later_nd(k, A), A);
            t = check(ctx, e->kids[0], want);
        } else {
            auto [t0, T] = infer(ctx, e->kids[0]);
            Term w = located(e->span, [&] { return whnf(T); });
            bool ok = false;
            if (e->kind == SK::Cirr && w->kind == K::Forall && !mentions(w->kids[0], 0)) {
                A = unshift(w->kids[0], 1);
                ok = true;
            } else if (e->kind == SK::Tirr && w->kind == K::Later && w->ix == k && !mentions(w->kids[0], 0)) {
                A = unshift(w->kids[0], 1);
                ok = true;
            } else if (e->kind == SK::Pfix && w->kind == K::Pi && !mentions(w->kids[1], 0)) {
                A = unshift(w->kids[1], 1);
                ok = true;
            }
            if (!ok && e->kind == SK::Cirr && w->kind == K::Forall)
                throw TypeError("clock irrelevance needs a type free of the quantified clock, but " +
                                    show(ctx, T) + " mentions '" + w->name(0) + "'",
                                e->span);
            if (!ok)
                throw TypeError("cannot infer the type argument of this axiom for a term of type " + show(ctx, T) +
                                    "; give it as [A]",
                                e->span);
            t = t0;
        }
        Term r = e->kind == SK::Cirr ? cirr("k", A, t) : e->kind == SK::Tirr ? tirr(A, k, t) : pfix(A, k, t);
        Term ty = located(e->span, [&] { return ch_.infer(ctx, r); });
        return {r, ty};
    }
    case SK::Incl: {
        if (!e->braces) throw TypeError("cannot infer the target universe of 'in'; write in{D}{D'}(t)", e->span);
        ClockSet d1 = clock_set(ctx, e->names, e->span);
        ClockSet d2 = clock_set(ctx, e->names2, e->span);
        if (!clock_subset(d1, d2)) throw TypeError("universe inclusion needs a subset of clocks", e->span);
        Term t = check(ctx, e->kids[0], univ(d1));
        return {incl(d1, d2, t), univ(d2)};
    }
    case SK::Univ:
        throw TypeError("a universe has no code in any universe", e->span);
    case SK::El:
    case SK::Pi:
    case SK::Sigma:
    case SK::Later:
    case SK::Forall:
        if (e->code) break;
        throw TypeError("a type is not a term; use the code form (prefix '#') inside a universe", e->span);
    case SK::Binder:
        throw TypeError("a binder argument (x. t) is only allowed for natrec and J", e->span);
    default:
        break;
    }
    throw TypeError("cannot infer the universe of this code; add an ascription such as (c : U{k})", e->span);
}

// Declarations

void Elaborator::add_k0() {
    prog_.ambient.push_back("k0");
    k0_implicit_ = true;
}

void Elaborator::add_decl(const SurfaceDecl& d) {
    auto taken = [&](const std::string& n) {
        return prog_.find(n) || prog_.find_alias(n) || builtins().count(n);
    };
    if (d.kind == SurfaceDecl::Clock) {
        const std::string& k = d.clocks.front();
        auto& amb = prog_.ambient;
        if (std::find(amb.begin(), amb.end(), k) != amb.end()) {
            if (k0_implicit_ && k == "k0") return;
            throw TypeError("clock '" + k + "' is already declared", d.span);
        }
        if (taken(k)) throw TypeError("'" + k + "' is already defined", d.span);
        amb.push_back(k);
        return;
    }
    if (taken(d.name)) throw TypeError("'" + d.name + "' is already defined", d.span);
    int a = static_cast<int>(prog_.ambient.size());
    Context ctx = prog_.ambient_context(a);
    struct P {
        std::string name;
        bool is_clock;
        Term type;
    };
    std::vector<P> ps;
    for (const SParam& p : d.params) {
        for (const auto& x : p.names) {
            if (p.is_clock) {
                ps.push_back({x, true, nullptr});
                ctx = ctx.push_clock(x);
            } else {
                Term A = type(ctx, p.type);
                ps.push_back({x, false, A});
                ctx = ctx.push_var(x, A);
            }
        }
    }
    if (d.kind == SurfaceDecl::Type) {
        TypeAlias al;
        al.name = d.name;
        al.ambient = a;
        al.span = d.span;
        for (const auto& p : ps) al.params.push_back({p.name, p.is_clock, p.type});
        al.body = type(ctx, d.type);
        prog_.aliases[d.name] = al;
        return;
    }
    Term T = type(ctx, d.type);
    Term b = check(ctx, d.body, T);
    for (auto it = ps.rbegin(); it != ps.rend(); ++it) {
        if (it->is_clock) {
            b = clk_lam(it->name, T, b);
            T = forall_ty(it->name, T);
        } else {
            b = lam(it->name, it->type, T, b);
            T = pi(it->name, it->type, T);
        }
    }
    // The elaborated output must pass the core checker on its own.
    Context amb = prog_.ambient_context(a);
    try {
        ch_.check_type(amb, T);
        ch_.check(amb, b, T);
    } catch (const TypeError& e) {
        throw TypeError(std::string("elaborated definition rejected by the core checker: ") + e.what(), d.span);
    }
    GlobalDef g;
    g.name = d.name;
    g.type = T;
    g.body = b;
    g.ambient = a;
    g.span = d.span;
    prog_.defs[d.name] = g;
    prog_.order.push_back(d.name);
}

FileResult check_source(const std::string& src, const CheckOptions& opts) {
    FileResult r;
    std::vector<SurfaceDecl> decls;
    try {
        decls = parse_file(src);
    } catch (const ParseError& e) {
        r.parse_ok = false;
        r.parse_message = e.what();
        r.parse_span = e.span;
        return r;
    }
    Elaborator el(r.prog, opts.fuel);
    if (opts.with_k0) el.add_k0();
    for (const auto& d : decls) {
        DeclReport rep;
        rep.name = d.name;
        rep.kind = d.kind == SurfaceDecl::Clock ? "clock" : d.kind == SurfaceDecl::Type ? "type" : "def";
        rep.span = d.span;
        try {
            el.add_decl(d);
        } catch (const TypeError& e) {
            rep.ok = false;
            rep.message = e.what();
            rep.error_span = no_span(e) ? d.span : e.span;
        } catch (const ScopeError& e) {
            rep.ok = false;
            rep.message = e.what();
            rep.error_span = d.span;
        }
        r.decls.push_back(std::move(rep));
    }
    return r;
}

}  // namespace clott
