#include "clott/eval.hpp"

#include <algorithm>
#include <optional>

namespace clott::sem {

namespace {

ValueP mk_value(Value v) { return std::make_shared<const Value>(std::move(v)); }
Env mk_env(EnvNode n) { return std::make_shared<const EnvNode>(std::move(n)); }

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + salt + 0x632BE59BD9B4E019ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Morphism after(const std::optional<Morphism>& acc, const Morphism& m) {
    return acc ? compose(*acc, m) : m;
}

// Locates entry ix; acc maps the stage of the found node to the stage of e.
struct Walk {
    const EnvNode* node;
    std::optional<Morphism> acc;
};

Walk walk(const Env& e, int ix) {
    if (ix < 0) throw EvalError("negative environment index");
    const EnvNode* n = e.get();
    std::optional<Morphism> acc;
    while (true) {
        if (!n) throw EvalError("environment index out of range");
        switch (n->kind) {
        case EK::Root:
            throw EvalError("environment index out of range");
        case EK::Restrict:
            acc = after(acc, n->sigma);
            n = n->parent.get();
            continue;
        case EK::Val:
        case EK::Clock:
        case EK::Hole:
            if (ix == 0) return {n, acc};
            --ix;
            n = n->parent.get();
            continue;
        case EK::Tick:
            if (ix == 0) return {n, acc};
            --ix;
            acc = after(acc, n->sigma);
            n = n->parent.get();
            continue;
        }
    }
}

const char* ek_name(EK k) {
    switch (k) {
    case EK::Root: return "root";
    case EK::Val: return "variable";
    case EK::Clock: return "clock";
    case EK::Tick: return "tick";
    case EK::Restrict: return "restriction";
    case EK::Hole: return "hidden";
    }
    return "?";
}

// Sort of the newest entry, looking through restrictions.
EK newest_kind(const Env& e) {
    const EnvNode* n = e.get();
    while (n->kind == EK::Restrict) n = n->parent.get();
    return n->kind;
}

}  // namespace

ValueP v_nat(std::uint64_t n) { return mk_value({VK::Nat, n}); }
ValueP v_star() {
    static const ValueP star = mk_value({VK::Star});
    return star;
}
ValueP v_later(Atom a, ValueP inner) {
    Value v{VK::Later};
    v.atom = a;
    v.a = std::move(inner);
    return mk_value(std::move(v));
}
ValueP v_pair(ValueP a, ValueP b) {
    Value v{VK::Pair};
    v.a = std::move(a);
    v.b = std::move(b);
    return mk_value(std::move(v));
}
ValueP v_refl() {
    static const ValueP r = mk_value({VK::Refl});
    return r;
}
ValueP v_closure(VK kind, Term body, Env env, std::uint64_t seed) {
    Value v{kind, seed};
    v.body = std::move(body);
    v.env = std::move(env);
    return mk_value(std::move(v));
}

ValueP restrict(const ValueP& v, const Morphism& s) {
    if (s.is_identity()) return v;
    switch (v->kind) {
    case VK::Nat:
    case VK::Star:
    case VK::Refl:
        return v;
    case VK::Later: {
        Atom to = s(v->atom);
        if (s.dst.budget(to) == 0) return v_star();
        Morphism inner{s.src.dec(v->atom), s.dst.dec(to), s.map};
        return v_later(to, restrict(v->a, inner));
    }
    case VK::Pair:
        return v_pair(restrict(v->a, s), restrict(v->b, s));
    case VK::Fun:
    case VK::ClkFun:
    case VK::Code:
    case VK::GenFun:
    case VK::GenClk:
        return v_closure(v->kind, v->body, restrict_env(v->env, s), v->n);
    }
    return v;
}

Env env_root(const Stage& s) { return mk_env({EK::Root, s}); }

Env env_val(const Env& e, ValueP v) {
    EnvNode n{EK::Val, e->stage, e};
    n.v = std::move(v);
    n.size = e->size + 1;
    return mk_env(std::move(n));
}

Env env_clock(const Env& e, Atom a) {
    if (!e->stage.has(a)) throw EvalError("clock " + std::to_string(a) + " is not in stage " + e->stage.str());
    EnvNode n{EK::Clock, e->stage, e};
    n.atom = a;
    n.size = e->size + 1;
    return mk_env(std::move(n));
}

Env env_tick(const Env& inner, const Morphism& sigma, Atom inner_atom) {
    if (sigma.src != inner->stage) throw EvalError("tick morphism does not start at the inner stage");
    if (inner->stage.budget(inner_atom) <= sigma.dst.budget(sigma(inner_atom)))
        throw EvalError("a tick needs more budget before it than after it");
    EnvNode n{EK::Tick, sigma.dst, inner};
    n.atom = inner_atom;
    n.sigma = sigma;
    n.size = inner->size + 1;
    return mk_env(std::move(n));
}

Env env_hole(const Env& e) {
    EnvNode n{EK::Hole, e->stage, e};
    n.size = e->size + 1;
    return mk_env(std::move(n));
}

Env restrict_env(const Env& e, const Morphism& s) {
    if (s.src != e->stage) throw EvalError("restriction does not start at the environment's stage");
    if (s.is_identity()) return e;
    if (e->kind == EK::Root) return env_root(s.dst);
    if (e->kind == EK::Restrict) return restrict_env(e->parent, compose(s, e->sigma));
    EnvNode n{EK::Restrict, s.dst, e};
    n.sigma = s;
    n.size = e->size;
    return mk_env(std::move(n));
}

Env project_env(const Env& e, int n) {
    if (n < 0 || n > e->size) throw EvalError("cannot drop " + std::to_string(n) + " entries");
    Env cur = e;
    std::optional<Morphism> acc;
    while (true) {
        if (cur->kind == EK::Restrict) {
            acc = after(acc, cur->sigma);
            cur = cur->parent;
            continue;
        }
        if (n == 0) break;
        if (cur->kind == EK::Tick) acc = after(acc, cur->sigma);
        cur = cur->parent;
        --n;
    }
    return acc ? restrict_env(cur, *acc) : cur;
}

ValueP lookup_val(const Env& e, int ix) {
    Walk w = walk(e, ix);
    if (w.node->kind != EK::Val)
        throw EvalError("expected a variable at index " + std::to_string(ix) + ", found a " + ek_name(w.node->kind));
    return w.acc ? restrict(w.node->v, *w.acc) : w.node->v;
}

Atom lookup_clock(const Env& e, int ix) {
    Walk w = walk(e, ix);
    if (w.node->kind != EK::Clock)
        throw EvalError("expected a clock at index " + std::to_string(ix) + ", found a " + ek_name(w.node->kind));
    return w.acc ? (*w.acc)(w.node->atom) : w.node->atom;
}

TickView lookup_tick(const Env& e, int ix) {
    Walk w = walk(e, ix);
    if (w.node->kind != EK::Tick)
        throw EvalError("expected a tick at index " + std::to_string(ix) + ", found a " + ek_name(w.node->kind));
    return {after(w.acc, w.node->sigma), w.node->parent, w.node->atom};
}

Env Evaluator::global_env(const Stage& s, const std::vector<Atom>& ambient) const {
    Env e = env_root(s);
    for (Atom a : ambient) e = env_clock(e, a);
    return e;
}

ValueP Evaluator::eval_global(const std::string& name, const Stage& s, const std::vector<Atom>& ambient) {
    const GlobalDef* def = prog_.find(name);
    if (!def) throw EvalError("unknown definition '" + name + "'");
    if (static_cast<int>(ambient.size()) < def->ambient)
        throw EvalError("definition '" + name + "' needs " + std::to_string(def->ambient) + " clocks");
    std::vector<Atom> args(ambient.begin(), ambient.begin() + def->ambient);
    std::string key = name + "@" + s.str();
    for (Atom a : args) key += ":" + std::to_string(a);
    if (auto it = global_cache_.find(key); it != global_cache_.end()) return it->second;
    ValueP v = eval(def->body, global_env(s, args));
    global_cache_.emplace(std::move(key), v);
    return v;
}

Env Evaluator::diamond(const Env& e) const {
    Atom lam = lookup_clock(e, 0);
    Env base = project_env(e, 1);
    const Stage& s = e->stage;
    ClockIntro ci = clock_intro_iota(s, s.budget(lam) + opts_.extra_budget);
    Env inner = env_clock(restrict_env(base, ci.iota), ci.fresh);
    return env_tick(inner, merge_clock(ci.iota.dst, ci.fresh, lam), ci.fresh);
}

int Evaluator::sample_count() const {
    // Nested function and pair levels look at fewer arguments; the count multiplies.
    return nest_ <= 1 ? opts_.depth + 1 : std::min(opts_.depth + 1, 2);
}

ValueP Evaluator::tick_counit(const Term& operand, const TickView& tv, int holes) {
    Env ie = tv.inner;
    for (int i = 0; i < holes; ++i) ie = env_hole(ie);
    ValueP v = eval(operand, ie);
    if (v->kind != VK::Later) throw EvalError("tick application to a value with no ticks left");
    if (v->atom != tv.inner_atom) throw EvalError("tick application on the wrong clock");
    if (opts_.drop_tick_restriction) return v->a;
    Morphism m = reinterpret(tv.to_here, tv.inner->stage.dec(v->atom), tv.to_here.dst);
    return restrict(v->a, m);
}

ValueP Evaluator::apply(const ValueP& f, const ValueP& arg) {
    switch (f->kind) {
    case VK::Fun:
        return eval(f->body, env_val(f->env, arg));
    case VK::GenFun: {
        ValueP r = sample({f->body, env_val(f->env, arg)}, mix(f->n, arg->kind == VK::Nat ? arg->n : 7));
        if (!r) throw EvalError("sampled function has no value at this argument");
        return r;
    }
    default:
        throw EvalError("application of a value that is not a function");
    }
}

ValueP Evaluator::apply_clock(const ValueP& f, Atom a) {
    switch (f->kind) {
    case VK::ClkFun:
        return eval(f->body, env_clock(f->env, a));
    case VK::GenClk: {
        ValueP r = sample({f->body, env_clock(f->env, a)}, mix(f->n, static_cast<std::uint64_t>(a)));
        if (!r) throw EvalError("sampled clock function has no value at this clock");
        return r;
    }
    default:
        throw EvalError("clock application of a value that is not a clock abstraction");
    }
}

ValueP Evaluator::eval(const Term& t, const Env& env) {
    const Node& n = *t;
    switch (n.kind) {
    case K::Var:
        return lookup_val(env, n.ix);
    case K::Global: {
        std::vector<Atom> atoms;
        for (int c : n.d1) atoms.push_back(lookup_clock(env, c));
        return eval_global(n.gname, env->stage, atoms);
    }
    case K::Zero:
        return v_nat(0);
    case K::Suc: {
        ValueP v = eval(n.kid(0), env);
        if (v->kind != VK::Nat) throw EvalError("successor of a non-number");
        return v_nat(v->n + 1);
    }
    case K::NatRec: {
        ValueP k = eval(n.kid(3), env);
        if (k->kind != VK::Nat) throw EvalError("recursion on a non-number");
        ValueP acc = eval(n.kid(1), env);
        for (std::uint64_t i = 0; i < k->n; ++i) acc = eval(n.kid(2), env_val(env_val(env, v_nat(i)), acc));
        return acc;
    }
    case K::Lam:
        return v_closure(VK::Fun, n.kid(2), env);
    case K::App:
        return apply(eval(n.kid(2), env), eval(n.kid(3), env));
    case K::Pair:
        return v_pair(eval(n.kid(2), env), eval(n.kid(3), env));
    case K::Fst:
    case K::Snd: {
        ValueP p = eval(n.kid(2), env);
        if (p->kind != VK::Pair) throw EvalError("projection from a non-pair");
        return n.kind == K::Fst ? p->a : p->b;
    }
    case K::Refl:
        return v_refl();
    case K::J:
        return eval(n.kid(2), env_val(env, eval(n.kid(3), env)));
    case K::ClkLam:
        return v_closure(VK::ClkFun, n.kid(1), env);
    case K::ClkApp:
        return apply_clock(eval(n.kid(1), env), lookup_clock(env, n.ix));
    case K::TickLam: {
        Atom lam = lookup_clock(env, n.ix);
        const Stage& s = env->stage;
        if (s.budget(lam) == 0) return v_star();
        return v_later(lam, eval(n.kid(1), env_tick(env, tick_morphism(s, lam), lam)));
    }
    case K::TickApp:
        return tick_counit(n.kid(1), lookup_tick(env, n.ix2), n.ix2 + 1);
    case K::DiaApp: {
        Atom lam = lookup_clock(env, n.ix);
        Env dd = diamond(env_clock(env, lam));
        return tick_counit(n.kid(1), lookup_tick(dd, 0), 0);
    }
    case K::Dfix: {
        Atom lam = lookup_clock(env, n.ix);
        const Stage& s = env->stage;
        if (s.budget(lam) == 0) return v_star();
        Env before = restrict_env(env, tick_morphism(s, lam));
        return v_later(lam, apply(eval(n.kid(1), before), eval(t, before)));
    }
    case K::Cirr:
        return eval(clk_lam("k2", nat_ty(), refl(nat_ty(), zero())), env);
    case K::Tirr:
        return eval(tick_lam("a1", n.ix, nat_ty(), tick_lam("a2", n.ix + 1, nat_ty(), refl(nat_ty(), zero()))), env);
    case K::Pfix:
        return eval(tick_lam("a", n.ix, nat_ty(), refl(nat_ty(), zero())), env);
    case K::CodeNat:
    case K::CodePi:
    case K::CodeSigma:
    case K::CodeForall:
    case K::CodeLater:
        return v_closure(VK::Code, t, env);
    case K::Incl:
        return eval(n.kid(0), env);
    default:
        throw EvalError(std::string("a ") + kind_name(n.kind) + " type is not a value");
    }
}

Evaluator::View Evaluator::view(const SemType& st) {
    SemType t = st;
    for (int guard = 0; guard < 10000; ++guard) {
        const Node& n = *t.ty;
        switch (n.kind) {
        case K::Nat:
        case K::CodeNat:
            return {K::Nat, t.ty, t.env};
        case K::Pi:
        case K::CodePi:
            return {K::Pi, t.ty, t.env};
        case K::Sigma:
        case K::CodeSigma:
            return {K::Sigma, t.ty, t.env};
        case K::Id:
            return {K::Id, t.ty, t.env};
        case K::Later:
        case K::CodeLater:
            return {K::Later, t.ty, t.env};
        case K::Forall:
        case K::CodeForall:
            return {K::Forall, t.ty, t.env};
        case K::Univ:
            return {K::Univ, t.ty, t.env};
        default: {
            ValueP c = eval(n.kind == K::El ? n.kid(0) : t.ty, t.env);
            if (c->kind != VK::Code) throw EvalError("decoding a value that is not a code");
            t = {c->body, c->env};
        }
        }
    }
    throw EvalError("type does not reach a head form");
}

SemType Evaluator::later_body(const View& v) const {
    Atom lam = later_clock(v);
    return {v.ty->kids.at(0), env_tick(v.env, tick_morphism(v.env->stage, lam), lam)};
}

bool Evaluator::value_eq(const ValueP& v, const ValueP& w, const SemType& ty, int probes) {
    if (probes < 0) probes = opts_.probes;
    if (v == w) return true;
    View vw = view(ty);
    const Stage& s = vw.env->stage;
    switch (vw.kind) {
    case K::Nat:
        return v->kind == VK::Nat && w->kind == VK::Nat && v->n == w->n;
    case K::Sigma:
        if (v->kind != VK::Pair || w->kind != VK::Pair) return false;
        return value_eq(v->a, w->a, pi_dom(vw), probes) && value_eq(v->b, w->b, pi_cod(vw, v->a), probes);
    case K::Pi: {
        Nest guard(nest_);
        for (int i = 0; i < sample_count(); ++i) {
            ValueP a = sample(pi_dom(vw), static_cast<std::uint64_t>(i));
            if (!a) continue;
            // Kripke probes are spent at the outermost function level only.
            if (!value_eq(apply(v, a), apply(w, a), pi_cod(vw, a), 0)) return false;
        }
        if (probes > 0) {
            for (Atom lam : s.atoms()) {
                if (s.budget(lam) == 0) continue;
                Morphism m = tick_morphism(s, lam);
                SemType t2{ty.ty, restrict_env(ty.env, m)};
                if (!value_eq(restrict(v, m), restrict(w, m), t2, probes - 1)) return false;
            }
        }
        return true;
    }
    case K::Later: {
        Atom lam = later_clock(vw);
        if (s.budget(lam) == 0) return v->kind == VK::Star && w->kind == VK::Star;
        if (v->kind != VK::Later || w->kind != VK::Later || v->atom != lam || w->atom != lam) return false;
        return value_eq(v->a, w->a, later_body(vw), probes);
    }
    case K::Forall: {
        for (Atom lam : s.atoms())
            if (!value_eq(apply_clock(v, lam), apply_clock(w, lam), forall_body(vw, lam), probes)) return false;
        if (probes > 0) {
            ClockIntro ci = clock_intro_iota(s, 1);
            SemType t2{ty.ty, restrict_env(ty.env, ci.iota)};
            View v2 = view(t2);
            if (!value_eq(apply_clock(restrict(v, ci.iota), ci.fresh), apply_clock(restrict(w, ci.iota), ci.fresh),
                          forall_body(v2, ci.fresh), probes - 1))
                return false;
        }
        return true;
    }
    case K::Id:
        return v->kind == VK::Refl && w->kind == VK::Refl;
    case K::Univ:
        if (v->kind != VK::Code || w->kind != VK::Code) return false;
        return type_eq({v->body, v->env}, {w->body, w->env}, probes);
    default:
        throw EvalError("no observation for this type");
    }
}

bool Evaluator::type_eq(const SemType& a, const SemType& b, int probes) {
    if (probes < 0) probes = opts_.probes;
    View va = view(a), vb = view(b);
    if (va.kind != vb.kind) return false;
    if (va.env->stage != vb.env->stage) return false;
    const Stage& s = va.env->stage;
    switch (va.kind) {
    case K::Nat:
        return true;
    case K::Univ: {
        auto atoms = [](const View& v) {
            std::vector<Atom> out;
            for (int c : v.ty->d1) out.push_back(lookup_clock(v.env, c));
            std::sort(out.begin(), out.end());
            out.erase(std::unique(out.begin(), out.end()), out.end());
            return out;
        };
        return atoms(va) == atoms(vb);
    }
    case K::Pi:
    case K::Sigma: {
        if (!type_eq(pi_dom(va), pi_dom(vb), probes)) return false;
        Nest guard(nest_);
        for (int i = 0; i < sample_count(); ++i) {
            ValueP x = sample(pi_dom(va), static_cast<std::uint64_t>(i));
            if (!x) continue;
            if (!type_eq(pi_cod(va, x), pi_cod(vb, x), probes)) return false;
        }
        return true;
    }
    case K::Later: {
        Atom la = later_clock(va), lb = later_clock(vb);
        if (la != lb) return false;
        if (s.budget(la) == 0) return true;
        return type_eq(later_body(va), later_body(vb), probes);
    }
    case K::Forall: {
        for (Atom lam : s.atoms())
            if (!type_eq(forall_body(va, lam), forall_body(vb, lam), probes)) return false;
        if (probes > 0) {
            ClockIntro ci = clock_intro_iota(s, 1);
            View a2 = view({a.ty, restrict_env(a.env, ci.iota)});
            View b2 = view({b.ty, restrict_env(b.env, ci.iota)});
            if (!type_eq(forall_body(a2, ci.fresh), forall_body(b2, ci.fresh), probes - 1)) return false;
        }
        return true;
    }
    case K::Id: {
        SemType ta{va.ty->kids.at(0), va.env}, tb{vb.ty->kids.at(0), vb.env};
        if (!type_eq(ta, tb, probes)) return false;
        return value_eq(eval(va.ty->kids.at(1), va.env), eval(vb.ty->kids.at(1), vb.env), ta, probes) &&
               value_eq(eval(va.ty->kids.at(2), va.env), eval(vb.ty->kids.at(2), vb.env), ta, probes);
    }
    default:
        throw EvalError("no observation for this type");
    }
}

ValueP Evaluator::sample(const SemType& ty, std::uint64_t seed) {
    View v = view(ty);
    const Stage& s = v.env->stage;
    switch (v.kind) {
    case K::Nat:
        return v_nat(seed % static_cast<std::uint64_t>(opts_.depth + 1));
    case K::Sigma: {
        ValueP a = sample(pi_dom(v), mix(seed, 1));
        if (!a) return nullptr;
        ValueP b = sample(pi_cod(v, a), mix(seed, 2));
        if (!b) return nullptr;
        return v_pair(a, b);
    }
    case K::Pi:
        return v_closure(VK::GenFun, v.ty->kids.at(1), v.env, mix(seed, 3));
    case K::Later: {
        Atom lam = later_clock(v);
        if (s.budget(lam) == 0) return v_star();
        ValueP inner = sample(later_body(v), mix(seed, 4));
        if (!inner) return nullptr;
        return v_later(lam, inner);
    }
    case K::Forall:
        return v_closure(VK::GenClk, v.ty->kids.at(0), v.env, mix(seed, 5));
    case K::Id: {
        SemType a{v.ty->kids.at(0), v.env};
        ValueP l = eval(v.ty->kids.at(1), v.env), r = eval(v.ty->kids.at(2), v.env);
        return value_eq(l, r, a) ? v_refl() : nullptr;
    }
    case K::Univ: {
        Env root = env_root(s);
        switch (seed % 3) {
        case 0: return v_closure(VK::Code, code_nat({}), root);
        case 1: return v_closure(VK::Code, code_sigma({}, "_", code_nat({}), code_nat({})), root);
        default: return v_closure(VK::Code, code_pi({}, "_", code_nat({}), code_nat({})), root);
        }
    }
    default:
        throw EvalError("cannot sample this type");
    }
}

std::string Evaluator::observe(const ValueP& v, const SemType& ty, int probes) {
    if (probes < 0) probes = opts_.probes;
    View vw = view(ty);
    const Stage& s = vw.env->stage;
    switch (vw.kind) {
    case K::Nat:
        return v->kind == VK::Nat ? std::to_string(v->n) : "?";
    case K::Sigma:
        if (v->kind != VK::Pair) return "?";
        return "(" + observe(v->a, pi_dom(vw), probes) + "," + observe(v->b, pi_cod(vw, v->a), probes) + ")";
    case K::Pi: {
        std::string out = "[";
        Nest guard(nest_);
        for (int i = 0; i < sample_count(); ++i) {
            ValueP a = sample(pi_dom(vw), static_cast<std::uint64_t>(i));
            if (!a) continue;
            out += observe(apply(v, a), pi_cod(vw, a), 0) + ";";
        }
        if (probes > 0) {
            for (Atom lam : s.atoms()) {
                if (s.budget(lam) == 0) continue;
                Morphism m = tick_morphism(s, lam);
                out += "|" + observe(restrict(v, m), {ty.ty, restrict_env(ty.env, m)}, probes - 1);
            }
        }
        return out + "]";
    }
    case K::Later: {
        Atom lam = later_clock(vw);
        if (s.budget(lam) == 0) return v->kind == VK::Star ? "*" : "?";
        if (v->kind != VK::Later || v->atom != lam) return "?";
        return ">" + observe(v->a, later_body(vw), probes);
    }
    case K::Forall: {
        std::string out = "{";
        for (Atom lam : s.atoms()) out += observe(apply_clock(v, lam), forall_body(vw, lam), probes) + ";";
        if (probes > 0) {
            ClockIntro ci = clock_intro_iota(s, 1);
            View v2 = view({ty.ty, restrict_env(ty.env, ci.iota)});
            out += "|" + observe(apply_clock(restrict(v, ci.iota), ci.fresh), forall_body(v2, ci.fresh), probes - 1);
        }
        return out + "}";
    }
    case K::Id:
        return v->kind == VK::Refl ? "refl" : "?";
    case K::Univ:
        if (v->kind != VK::Code) return "?";
        return observe_type({v->body, v->env}, probes);
    default:
        return "?";
    }
}

std::string Evaluator::observe_type(const SemType& ty, int probes) {
    if (probes < 0) probes = opts_.probes;
    View vw = view(ty);
    const Stage& s = vw.env->stage;
    switch (vw.kind) {
    case K::Nat:
        return "N";
    case K::Univ: {
        std::vector<Atom> atoms;
        for (int c : vw.ty->d1) atoms.push_back(lookup_clock(vw.env, c));
        std::sort(atoms.begin(), atoms.end());
        atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
        std::string out = "U{";
        for (Atom a : atoms) out += std::to_string(a) + ",";
        return out + "}";
    }
    case K::Pi:
    case K::Sigma: {
        std::string out = std::string(vw.kind == K::Pi ? "Pi(" : "Sg(") + observe_type(pi_dom(vw), probes) + ";";
        Nest guard(nest_);
        for (int i = 0; i < sample_count(); ++i) {
            ValueP x = sample(pi_dom(vw), static_cast<std::uint64_t>(i));
            if (x) out += observe_type(pi_cod(vw, x), probes) + ";";
        }
        return out + ")";
    }
    case K::Later: {
        Atom lam = later_clock(vw);
        if (s.budget(lam) == 0) return "L" + std::to_string(lam) + "*";
        return "L" + std::to_string(lam) + "(" + observe_type(later_body(vw), probes) + ")";
    }
    case K::Forall: {
        std::string out = "A(";
        for (Atom lam : s.atoms()) out += observe_type(forall_body(vw, lam), probes) + ";";
        return out + ")";
    }
    case K::Id: {
        SemType a{vw.ty->kids.at(0), vw.env};
        return "Id(" + observe_type(a, probes) + ";" + observe(eval(vw.ty->kids.at(1), vw.env), a, probes) + ";" +
               observe(eval(vw.ty->kids.at(2), vw.env), a, probes) + ")";
    }
    default:
        return "?";
    }
}

bool Evaluator::env_eq(const Env& a, const Env& b, const Context& ctx) {
    if (a->stage != b->stage || a->size != b->size || a->size != static_cast<int>(ctx.size())) return false;
    for (int i = 0; i < a->size; ++i) {
        const Entry& e = ctx.at_index(i);
        switch (e.kind) {
        case EntryKind::Var:
            if (!value_eq(lookup_val(a, i), lookup_val(b, i), {ctx.type_of(i), a})) return false;
            break;
        case EntryKind::Clock:
            if (lookup_clock(a, i) != lookup_clock(b, i)) return false;
            break;
        case EntryKind::Tick: {
            TickView ta = lookup_tick(a, i), tb = lookup_tick(b, i);
            if (ta.to_here.map != tb.to_here.map || ta.inner_atom != tb.inner_atom) return false;
            Context pre = ctx.prefix(ctx.size() - static_cast<std::size_t>(i) - 1);
            return env_eq(ta.inner, tb.inner, pre);
        }
        }
    }
    return true;
}

std::string show_value(const ValueP& v, bool unicode) {
    switch (v->kind) {
    case VK::Nat: return std::to_string(v->n);
    case VK::Star: return unicode ? "⋆" : "*";
    case VK::Later: return show_value(v->a, unicode);
    case VK::Pair: return "(" + show_value(v->a, unicode) + "," + show_value(v->b, unicode) + ")";
    case VK::Refl: return "refl";
    case VK::Code: return unicode ? "⟨code⟩" : "<code>";
    case VK::ClkFun:
    case VK::GenClk: return unicode ? "⟨clock fun⟩" : "<clock fun>";
    case VK::Fun:
    case VK::GenFun: return unicode ? "⟨fun⟩" : "<fun>";
    }
    return "?";
}

namespace {

Env build_subst_env(Evaluator& ev, const clott::Subst& s, std::size_t k, const Env& dom) {
    if (k == 0) return env_root(dom->stage);
    const SubstEntry& e = s.entries[k - 1];
    Env here = project_env(dom, dom->size - e.dlen);
    switch (e.kind) {
    case SubstEntry::Term:
        return env_val(build_subst_env(ev, s, k - 1, dom), ev.eval(e.term, here));
    case SubstEntry::Clock:
    case SubstEntry::DiamondClock:
        return env_clock(build_subst_env(ev, s, k - 1, dom), lookup_clock(here, e.clock));
    case SubstEntry::DiamondTick:
        return ev.diamond(build_subst_env(ev, s, k - 1, dom));
    case SubstEntry::Keep:
        switch (newest_kind(here)) {
        case EK::Val: return env_val(build_subst_env(ev, s, k - 1, dom), lookup_val(here, 0));
        case EK::Clock: return env_clock(build_subst_env(ev, s, k - 1, dom), lookup_clock(here, 0));
        case EK::Tick: break;
        default: throw EvalError("substitution keeps an entry the environment does not have");
        }
        [[fallthrough]];
    case SubstEntry::Tick: {
        TickView tv = lookup_tick(here, 0);
        // Earlier entries live in the prefix before the tick, at the tick's inner stage.
        Env prev = build_subst_env(ev, s, k - 1, tv.inner);
        Morphism to_dom = tv.to_here;
        if (here->stage != dom->stage) throw EvalError("projection changed the stage");
        return env_tick(prev, to_dom, tv.inner_atom);
    }
    }
    throw EvalError("unknown substitution entry");
}

}  // namespace

Env apply_subst_env(Evaluator& ev, const clott::Subst& s, const Env& dom) {
    if (dom->size != s.dom_len)
        throw EvalError("environment has " + std::to_string(dom->size) + " entries, substitution expects " +
                        std::to_string(s.dom_len));
    return build_subst_env(ev, s, s.entries.size(), dom);
}

}  // namespace clott::sem
