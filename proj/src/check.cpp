#include "clott/check.hpp"

#include <algorithm>

#include "clott/pretty.hpp"
#include "clott/subst.hpp"

namespace clott {

ClockSet shift_set(const ClockSet& d, bool with_new) {
    std::vector<int> out;
    for (int c : d) out.push_back(c + 1);
    if (with_new) out.push_back(0);
    return make_clock_set(std::move(out));
}

namespace {

Term with_kid(const Node& n, std::size_t i, Term k) {
    Node m = n;
    m.kids[i] = std::move(k);
    return mk(std::move(m));
}

}  // namespace

Term unfold_dfix(const Term& a, int clock, const Term& f) {
    Term d = dfix(a, clock, f);
    return app("_", later_nd(clock, a), shift(a, 1), f, d);
}

std::string Checker::show(const Context& ctx, const Term& t) const {
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

Term Checker::unfold_global(const Node& n) const {
    const GlobalDef* g = prog_.find(n.gname);
    if (!g) throw TypeError("unknown definition '" + n.gname + "'");
    return instantiate_ambient(g->body, g->ambient, n.d1);
}

Term Checker::whnf(const Term& t0, int& fuel) const {
    Term t = t0;
    for (;;) {
        const Node& n = *t;
        switch (n.kind) {
        case K::Global:
            t = unfold_global(n);
            continue;
        case K::App: {
            Term f = whnf(n.kids[2], fuel);
            if (f->kind == K::Lam) {
                t = inst_var(f->kids[2], n.kids[3]);
                continue;
            }
            return f == n.kids[2] ? t : with_kid(n, 2, f);
        }
        case K::Fst:
        case K::Snd: {
            Term p = whnf(n.kids[2], fuel);
            if (p->kind == K::Pair) {
                t = p->kids[n.kind == K::Fst ? 2 : 3];
                continue;
            }
            return p == n.kids[2] ? t : with_kid(n, 2, p);
        }
        case K::NatRec: {
            Term m = whnf(n.kids[3], fuel);
            if (m->kind == K::Zero) {
                t = n.kids[1];
                continue;
            }
            if (m->kind == K::Suc) {
                Term pred = m->kids[0];
                Term rec = with_kid(n, 3, pred);
                t = inst_var2(n.kids[2], pred, rec);
                continue;
            }
            return m == n.kids[3] ? t : with_kid(n, 3, m);
        }
        case K::J: {
            Term e = whnf(n.kids[5], fuel);
            if (e->kind == K::Refl) {
                t = inst_var(n.kids[2], n.kids[3]);
                continue;
            }
            return e == n.kids[5] ? t : with_kid(n, 5, e);
        }
        case K::ClkApp: {
            Term f = whnf(n.kids[1], fuel);
            if (f->kind == K::ClkLam) {
                t = inst_clock(f->kids[1], n.ix);
                continue;
            }
            return f == n.kids[1] ? t : with_kid(n, 1, f);
        }
        case K::TickApp: {
            Term f = whnf(n.kids[1], fuel);
            if (f->kind == K::TickLam) {
                t = inst_tick(f->kids[1], n.ix2);
                continue;
            }
            if (f->kind == K::Dfix && fuel > 0) {
                --fuel;
                t = unfold_dfix(f->kids[0], f->ix, f->kids[1]);
                continue;
            }
            return f == n.kids[1] ? t : with_kid(n, 1, f);
        }
        case K::DiaApp: {
            Term f = whnf(n.kids[1], fuel);
            if (f->kind == K::TickLam) {
                t = inst_diamond(f->kids[1], n.ix);
                continue;
            }
            if (f->kind == K::Dfix && f->ix == 0 && fuel > 0) {
                --fuel;
                t = unfold_dfix(inst_clock(f->kids[0], n.ix), n.ix, inst_clock(f->kids[1], n.ix));
                continue;
            }
            return f == n.kids[1] ? t : with_kid(n, 1, f);
        }
        case K::El: {
            Term c = whnf(n.kids[0], fuel);
            const Node& cn = *c;
            switch (cn.kind) {
            case K::CodeNat:
                return nat_ty();
            case K::CodePi:
                return pi(cn.name(0), el(cn.d1, cn.kids[0]), el(shift_set(cn.d1), cn.kids[1]));
            case K::CodeSigma:
                return sigma(cn.name(0), el(cn.d1, cn.kids[0]), el(shift_set(cn.d1), cn.kids[1]));
            case K::CodeForall:
                return forall_ty(cn.name(0), el(shift_set(cn.d1, true), cn.kids[0]));
            case K::CodeLater:
                return later(cn.name(0), cn.ix, el(shift_set(cn.d1), cn.kids[0]));
            case K::Incl:
                t = el(cn.d1, cn.kids[0]);
                continue;
            default:
                return c == n.kids[0] ? t : with_kid(n, 0, c);
            }
        }
        case K::Incl: {
            if (n.d1 == n.d2) {
                t = n.kids[0];
                continue;
            }
            Term c = whnf(n.kids[0], fuel);
            const Node& cn = *c;
            const ClockSet& from = n.d1;
            const ClockSet& to = n.d2;
            switch (cn.kind) {
            case K::Incl:
                t = incl(cn.d1, to, cn.kids[0]);
                continue;
            case K::CodeNat:
                return code_nat(to);
            case K::CodePi:
                return code_pi(to, cn.name(0), incl(from, to, cn.kids[0]),
                               incl(shift_set(from), shift_set(to), cn.kids[1]));
            case K::CodeSigma:
                return code_sigma(to, cn.name(0), incl(from, to, cn.kids[0]),
                                  incl(shift_set(from), shift_set(to), cn.kids[1]));
            case K::CodeForall:
                return code_forall(to, cn.name(0), incl(shift_set(from, true), shift_set(to, true), cn.kids[0]));
            case K::CodeLater:
                return code_later(to, cn.name(0), cn.ix, incl(shift_set(from), shift_set(to), cn.kids[0]));
            default:
                return c == n.kids[0] ? t : with_kid(n, 0, c);
            }
        }
        default:
            return t;
        }
    }
}

Term Checker::normalize(const Term& t0, int& fuel) const {
    Term t = whnf(t0, fuel);
    if (t->kids.empty()) return t;
    Node n = *t;
    for (auto& k : n.kids) k = normalize(k, fuel);
    return mk(std::move(n));
}

bool Checker::conv(const Term& a, const Term& b, int fuel) const {
    if (erased_eq(a, b)) return true;
    int none = 0;
    Term x = whnf(a, none);
    Term y = whnf(b, none);
    for (;;) {
        if (erased_eq(x, y)) return true;
        if (conv_whnf(x, y, fuel)) return true;
        if (fuel <= 0) return false;
        // Heads disagree: try one dfix unfolding on each side that is stuck on one.
        int fx = 1, fy = 1;
        Term x2 = whnf(x, fx);
        Term y2 = whnf(y, fy);
        if (fx == 1 && fy == 1) return false;
        --fuel;
        x = x2;
        y = y2;
    }
}

bool Checker::conv_whnf(const Term& a, const Term& b, int fuel) const {
    const Node& x = *a;
    const Node& y = *b;
    auto cv = [&](const Term& p, const Term& q) { return conv(p, q, fuel); };
    if (x.kind == y.kind) {
        switch (x.kind) {
        case K::Var: return x.ix == y.ix;
        case K::Nat: case K::Zero: case K::CodeNat: return true;
        case K::Univ: return x.d1 == y.d1;
        case K::Global: return x.gname == y.gname && x.d1 == y.d1;
        case K::Suc: return cv(x.kids[0], y.kids[0]);
        case K::Pi: case K::Sigma: case K::CodePi: case K::CodeSigma:
            return cv(x.kids[0], y.kids[0]) && cv(x.kids[1], y.kids[1]);
        case K::Id:
            return cv(x.kids[0], y.kids[0]) && cv(x.kids[1], y.kids[1]) && cv(x.kids[2], y.kids[2]);
        case K::Later: case K::CodeLater:
            return x.ix == y.ix && cv(x.kids[0], y.kids[0]);
        case K::Forall: case K::CodeForall: case K::El:
            return cv(x.kids[0], y.kids[0]);
        case K::Incl:
            return x.d1 == y.d1 && x.d2 == y.d2 && cv(x.kids[0], y.kids[0]);
        case K::Lam: return cv(x.kids[2], y.kids[2]);
        case K::Pair: return cv(x.kids[2], y.kids[2]) && cv(x.kids[3], y.kids[3]);
        case K::ClkLam: return cv(x.kids[1], y.kids[1]);
        case K::TickLam: return x.ix == y.ix && cv(x.kids[1], y.kids[1]);
        case K::App: return cv(x.kids[2], y.kids[2]) && cv(x.kids[3], y.kids[3]);
        case K::Fst: case K::Snd: return cv(x.kids[2], y.kids[2]);
        case K::NatRec:
            return cv(x.kids[1], y.kids[1]) && cv(x.kids[2], y.kids[2]) && cv(x.kids[3], y.kids[3]);
        case K::J:
            return cv(x.kids[2], y.kids[2]) && cv(x.kids[3], y.kids[3]) && cv(x.kids[4], y.kids[4]) &&
                   cv(x.kids[5], y.kids[5]);
        case K::Refl: return cv(x.kids[1], y.kids[1]);
        case K::ClkApp: case K::DiaApp: case K::Dfix: case K::Tirr: case K::Pfix:
            return x.ix == y.ix && cv(x.kids[1], y.kids[1]);
        case K::TickApp: return x.ix2 == y.ix2 && cv(x.kids[1], y.kids[1]);
        case K::Cirr: return cv(x.kids[1], y.kids[1]);
        }
        return false;
    }
    // Eta: an introduction form against anything else.
    auto eta = [&](const Node& i, const Term& other) -> int {
        switch (i.kind) {
        case K::Lam: {
            Term o = app(i.name(0), shift(i.kids[0], 1), shift(i.kids[1], 1, 1), shift(other, 1), var(0));
            return cv(i.kids[2], o) ? 1 : 0;
        }
        case K::Pair:
            return cv(i.kids[2], fst(i.name(0), i.kids[0], i.kids[1], other)) &&
                           cv(i.kids[3], snd(i.name(0), i.kids[0], i.kids[1], other))
                       ? 1
                       : 0;
        case K::ClkLam: {
            Term o = clk_app(i.name(0), shift(i.kids[0], 1, 1), shift(other, 1), 0);
            return cv(i.kids[1], o) ? 1 : 0;
        }
        case K::TickLam: {
            Term o = tick_app(i.name(0), i.ix + 1, shift(i.kids[0], 1, 1), shift(other, 1), 0);
            return cv(i.kids[1], o) ? 1 : 0;
        }
        default:
            return -1;
        }
    };
    int r = eta(x, b);
    if (r >= 0) return r == 1;
    r = eta(y, a);
    if (r >= 0) return r == 1;
    return false;
}

void Checker::require_clock(const Context& ctx, int c) const {
    if (c < 0 || static_cast<std::size_t>(c) >= ctx.size())
        throw TypeError("clock reference out of scope");
    const Entry& e = ctx.at_index(c);
    if (e.kind != EntryKind::Clock) throw TypeError("'" + e.name + "' is not a clock in scope");
}

void Checker::require_clocks(const Context& ctx, const ClockSet& d) const {
    for (int c : d) require_clock(ctx, c);
}

void Checker::check_ctx(const Context& ctx) const {
    Context pre;
    std::set<std::string> seen;
    for (const Entry& e : ctx.entries) {
        if (e.name != "_" && !e.name.empty() && !seen.insert(e.name).second)
            throw TypeError("'" + e.name + "' is bound twice in the context");
        switch (e.kind) {
        case EntryKind::Var:
            check_type(pre, e.type);
            pre = pre.push_var(e.name, e.type);
            break;
        case EntryKind::Clock:
            pre = pre.push_clock(e.name);
            break;
        case EntryKind::Tick:
            if (e.clock < 0 || static_cast<std::size_t>(e.clock) >= pre.size() ||
                pre.at_index(e.clock).kind != EntryKind::Clock)
                throw TypeError("the clock of tick '" + e.name + "' is not a clock in scope");
            pre = pre.push_tick(e.name, e.clock);
            break;
        }
    }
}

void Checker::check_type(const Context& ctx, const Term& a) const {
    const Node& n = *a;
    switch (n.kind) {
    case K::Nat:
        return;
    case K::Pi:
    case K::Sigma:
        check_type(ctx, n.kids[0]);
        check_type(ctx.push_var(n.name(0), n.kids[0]), n.kids[1]);
        return;
    case K::Id:
        check_type(ctx, n.kids[0]);
        check(ctx, n.kids[1], n.kids[0]);
        check(ctx, n.kids[2], n.kids[0]);
        return;
    case K::Later:
        require_clock(ctx, n.ix);
        check_type(ctx.push_tick(n.name(0), n.ix), n.kids[0]);
        return;
    case K::Forall:
        check_type(ctx.push_clock(n.name(0)), n.kids[0]);
        return;
    case K::Univ:
        require_clocks(ctx, n.d1);
        return;
    case K::El:
        require_clocks(ctx, n.d1);
        check(ctx, n.kids[0], univ(n.d1));
        return;
    default:
        throw TypeError("expected a type, found the term " + show(ctx, a));
    }
}

void Checker::check(const Context& ctx, const Term& t, const Term& ty) const {
    Term got = infer(ctx, t);
    if (!conv(got, ty))
        throw TypeError("type mismatch for " + show(ctx, t) + "\n  expected: " + show(ctx, ty) +
                        "\n  found:    " + show(ctx, got) + "\n  (not convertible within fuel " +
                        std::to_string(fuel_) + ")");
}

Term Checker::infer(const Context& ctx, const Term& t) const {
    const Node& n = *t;
    switch (n.kind) {
    case K::Var: {
        if (n.ix < 0 || static_cast<std::size_t>(n.ix) >= ctx.size()) throw TypeError("variable out of scope");
        const Entry& e = ctx.at_index(n.ix);
        if (e.kind == EntryKind::Clock) throw TypeError("'" + e.name + "' is a clock, not a term");
        if (e.kind == EntryKind::Tick) throw TypeError("'" + e.name + "' is a tick, not a term");
        return ctx.type_of(n.ix);
    }
    case K::Global: {
        const GlobalDef* g = prog_.find(n.gname);
        if (!g) throw TypeError("unknown definition '" + n.gname + "'");
        if (static_cast<int>(n.d1.size()) != g->ambient)
            throw TypeError("definition '" + n.gname + "' expects " + std::to_string(g->ambient) + " ambient clocks");
        for (int c : n.d1) require_clock(ctx, c);
        return instantiate_ambient(g->type, g->ambient, n.d1);
    }
    case K::Zero:
        return nat_ty();
    case K::Suc:
        check(ctx, n.kids[0], nat_ty());
        return nat_ty();
    case K::NatRec: {
        const Term& P = n.kids[0];
        check_type(ctx.push_var(n.name(0), nat_ty()), P);
        check(ctx, n.kids[1], inst_var(P, zero()));
        Context cs = ctx.push_var(n.name(1), nat_ty()).push_var(n.name(2), P);
        check(cs, n.kids[2], inst_var(shift(P, 2, 1), suc(var(1))));
        check(ctx, n.kids[3], nat_ty());
        return inst_var(P, n.kids[3]);
    }
    case K::Lam: {
        check_type(ctx, n.kids[0]);
        Context cx = ctx.push_var(n.name(0), n.kids[0]);
        check_type(cx, n.kids[1]);
        check(cx, n.kids[2], n.kids[1]);
        return pi(n.name(0), n.kids[0], n.kids[1]);
    }
    case K::App: {
        check_type(ctx, n.kids[0]);
        check_type(ctx.push_var(n.name(0), n.kids[0]), n.kids[1]);
        check(ctx, n.kids[2], pi(n.name(0), n.kids[0], n.kids[1]));
        check(ctx, n.kids[3], n.kids[0]);
        return inst_var(n.kids[1], n.kids[3]);
    }
    case K::Pair: {
        check_type(ctx, n.kids[0]);
        check_type(ctx.push_var(n.name(0), n.kids[0]), n.kids[1]);
        check(ctx, n.kids[2], n.kids[0]);
        check(ctx, n.kids[3], inst_var(n.kids[1], n.kids[2]));
        return sigma(n.name(0), n.kids[0], n.kids[1]);
    }
    case K::Fst:
    case K::Snd: {
        check_type(ctx, n.kids[0]);
        check_type(ctx.push_var(n.name(0), n.kids[0]), n.kids[1]);
        check(ctx, n.kids[2], sigma(n.name(0), n.kids[0], n.kids[1]));
        if (n.kind == K::Fst) return n.kids[0];
        return inst_var(n.kids[1], fst(n.name(0), n.kids[0], n.kids[1], n.kids[2]));
    }
    case K::Refl:
        check_type(ctx, n.kids[0]);
        check(ctx, n.kids[1], n.kids[0]);
        return id_ty(n.kids[0], n.kids[1], n.kids[1]);
    case K::J: {
        const Term& A = n.kids[0];
        const Term& P = n.kids[1];
        check_type(ctx, A);
        Context cp = ctx.push_var(n.name(0), A)
                         .push_var(n.name(1), shift(A, 1))
                         .push_var(n.name(2), id_ty(shift(A, 2), var(1), var(0)));
        check_type(cp, P);
        Context cd = ctx.push_var(n.name(0), A);
        Term pd = inst_var3(shift(P, 1, 3), var(0), var(0), refl(shift(A, 1), var(0)));
        check(cd, n.kids[2], pd);
        check(ctx, n.kids[3], A);
        check(ctx, n.kids[4], A);
        check(ctx, n.kids[5], id_ty(A, n.kids[3], n.kids[4]));
        return inst_var3(P, n.kids[3], n.kids[4], n.kids[5]);
    }
    case K::ClkLam: {
        Context cx = ctx.push_clock(n.name(0));
        check_type(cx, n.kids[0]);
        check(cx, n.kids[1], n.kids[0]);
        return forall_ty(n.name(0), n.kids[0]);
    }
    case K::ClkApp: {
        require_clock(ctx, n.ix);
        check_type(ctx.push_clock(n.name(0)), n.kids[0]);
        check(ctx, n.kids[1], forall_ty(n.name(0), n.kids[0]));
        return inst_clock(n.kids[0], n.ix);
    }
    case K::TickLam: {
        require_clock(ctx, n.ix);
        Context cx = ctx.push_tick(n.name(0), n.ix);
        check_type(cx, n.kids[0]);
        check(cx, n.kids[1], n.kids[0]);
        return later(n.name(0), n.ix, n.kids[0]);
    }
    case K::TickApp: {
        int b = n.ix2;
        if (b < 0 || static_cast<std::size_t>(b) >= ctx.size()) throw TypeError("tick out of scope");
        const Entry& e = ctx.at_index(b);
        if (e.kind != EntryKind::Tick) throw TypeError("'" + e.name + "' is not a tick");
        int kb = ctx.tick_clock(b);
        if (n.ix != kb)
            throw TypeError("tick '" + e.name + "' is on clock '" + ctx.at_index(kb).name +
                            "' but the operand is delayed on another clock");
        int drop = b + 1;
        Term op, body;
        try {
            op = unshift(n.kids[1], drop);
            body = unshift(n.kids[0], drop, 1);
        } catch (const ScopeError&) {
            throw TypeError("the operand of [" + e.name + "] refers to '" + e.name +
                            "' or to entries bound after it");
        }
        Context pre = ctx.prefix(ctx.size() - static_cast<std::size_t>(drop));
        int k = n.ix - drop;
        check_type(pre.push_tick(n.name(0), k), body);
        check(pre, op, later(n.name(0), k, body));
        return inst_tick(n.kids[0], b);
    }
    case K::DiaApp: {
        require_clock(ctx, n.ix);
        Context cx = ctx.push_clock(n.name(0));
        check_type(cx.push_tick(n.name(1), 0), n.kids[0]);
        check(cx, n.kids[1], later(n.name(1), 0, n.kids[0]));
        return inst_diamond(n.kids[0], n.ix);
    }
    case K::Dfix: {
        require_clock(ctx, n.ix);
        const Term& A = n.kids[0];
        check_type(ctx, A);
        check(ctx, n.kids[1], arrow(later_nd(n.ix, A), A));
        return later_nd(n.ix, A);
    }
    case K::Cirr: {
        const Term& A = n.kids[0];
        check_type(ctx, A);
        check(ctx, n.kids[1], forall_ty(n.name(0), shift(A, 1)));
        Term t2 = shift(n.kids[1], 2);
        Term a3 = shift(A, 3);
        return forall_ty("k1", forall_ty("k2", id_ty(shift(A, 2), clk_app(n.name(0), a3, t2, 1),
                                                    clk_app(n.name(0), a3, t2, 0))));
    }
    case K::Tirr: {
        const Term& A = n.kids[0];
        require_clock(ctx, n.ix);
        check_type(ctx, A);
        check(ctx, n.kids[1], later_nd(n.ix, A));
        Term t2 = shift(n.kids[1], 2);
        Term a3 = shift(A, 3);
        Term eq = id_ty(shift(A, 2), tick_app("a", n.ix + 2, a3, t2, 1), tick_app("a", n.ix + 2, a3, t2, 0));
        return later("a1", n.ix, later("a2", n.ix + 1, eq));
    }
    case K::Pfix: {
        const Term& A = n.kids[0];
        require_clock(ctx, n.ix);
        check_type(ctx, A);
        check(ctx, n.kids[1], arrow(later_nd(n.ix, A), A));
        Term a1 = shift(A, 1);
        Term f1 = shift(n.kids[1], 1);
        Term d1 = dfix(a1, n.ix + 1, f1);
        Term lhs = tick_app("a", n.ix + 1, shift(A, 2), d1, 0);
        Term rhs = unfold_dfix(a1, n.ix + 1, f1);
        return later("a", n.ix, id_ty(a1, lhs, rhs));
    }
    case K::CodeNat:
        require_clocks(ctx, n.d1);
        return univ(n.d1);
    case K::CodePi:
    case K::CodeSigma:
        require_clocks(ctx, n.d1);
        check(ctx, n.kids[0], univ(n.d1));
        check(ctx.push_var(n.name(0), el(n.d1, n.kids[0])), n.kids[1], univ(shift_set(n.d1)));
        return univ(n.d1);
    case K::CodeForall:
        require_clocks(ctx, n.d1);
        check(ctx.push_clock(n.name(0)), n.kids[0], univ(shift_set(n.d1, true)));
        return univ(n.d1);
    case K::CodeLater:
        require_clocks(ctx, n.d1);
        require_clock(ctx, n.ix);
        if (!std::binary_search(n.d1.begin(), n.d1.end(), n.ix))
            throw TypeError("clock '" + ctx.at_index(n.ix).name + "' is not in the clock set of the universe");
        check(ctx.push_tick(n.name(0), n.ix), n.kids[0], univ(shift_set(n.d1)));
        return univ(n.d1);
    case K::Incl:
        require_clocks(ctx, n.d1);
        require_clocks(ctx, n.d2);
        if (!clock_subset(n.d1, n.d2)) throw TypeError("universe inclusion needs a subset of clocks");
        check(ctx, n.kids[0], univ(n.d1));
        return univ(n.d2);
    case K::Univ:
        throw TypeError("a universe has no code in any universe");
    default:
        throw TypeError(std::string("a type is not a term: ") + show(ctx, t));
    }
}

}  // namespace clott
