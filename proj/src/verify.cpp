#include "clott/verify.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <set>

#include "clott/check.hpp"
#include "clott/elab.hpp"
#include "clott/eval.hpp"
#include "clott/parse.hpp"
#include "clott/pretty.hpp"
#include "clott/subst.hpp"

namespace clott {

namespace {

using namespace sem;

constexpr std::size_t kMaxCounterexamples = 5;
constexpr std::size_t kMaxAssignments = 16;
constexpr std::size_t kMaxPerFamily = 40;
constexpr std::size_t kMaxSubstInstances = 400;
constexpr std::size_t kMaxSubstPerSite = 6;

std::string clip(std::string s, std::size_t n = 400) {
    if (s.size() > n) s = s.substr(0, n) + "...";
    return s;
}

// A subterm of a definition body together with its context and inferred type.
struct Site {
    Context ctx;
    Term t;
    Term ty;
    std::string origin;
};

// A stage plus one atom for every clock entry of a context (indexed by entry position;
// -1 for the other entries).
struct Point {
    Stage s;
    std::vector<Atom> atoms;
};

class Runner {
public:
    Runner(const Program& prog, const VerifyConfig& cfg)
        : prog_(prog),
          cfg_(cfg),
          ch_(prog, cfg.fuel),
          ev_(prog, options(1)),
          ev2_(prog, options(2)),
          synth_(prog),
          elab_(synth_, cfg.fuel) {
        for (const auto& name : prog_.order) {
            const GlobalDef& d = prog_.defs.at(name);
            collect(d.body, prog_.ambient_context(d.ambient), name);
        }
    }

    SuiteResult run(const std::string& name) {
        SuiteResult r;
        r.name = name;
        cur_ = &r;
        auto t0 = std::chrono::steady_clock::now();
        if (name == "naturality") naturality();
        else if (name == "fixed-point") fixed_point();
        else if (name == "tick-irrelevance") tick_irrelevance();
        else if (name == "clock-irrelevance") clock_irrelevance();
        else if (name == "diamond") diamond();
        else if (name == "substitution") substitution();
        else if (name == "equations") equations();
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        cur_ = nullptr;
        return r;
    }

private:
    EvalOptions options(int extra) const {
        EvalOptions o;
        o.extra_budget = extra;
        o.depth = cfg_.depth;
        o.drop_tick_restriction = cfg_.mutate_tick;
        return o;
    }

    // ---- bookkeeping

    void pass(const std::string& family = "") {
        ++cur_->checks;
        if (!family.empty()) ++cur_->coverage[family];
    }

    void fail(Counterexample c, const std::string& family = "") {
        ++cur_->checks;
        ++cur_->failures;
        if (!family.empty()) ++cur_->coverage[family];
        if (!c.lhs.empty() && c.lhs == c.rhs && c.lhs.find('?') != std::string::npos)
            c.note += (c.note.empty() ? "" : "; ") + std::string("'?' marks a component outside its type");
        if (cur_->counterexamples.size() < kMaxCounterexamples) cur_->counterexamples.push_back(std::move(c));
    }

    void record(bool ok, const std::function<Counterexample()>& cex, const std::string& family = "") {
        if (ok)
            pass(family);
        else
            fail(cex(), family);
    }

    // Runs one check; evaluation errors count as failures.
    void guarded(const std::function<void()>& body, const std::function<Counterexample()>& cex,
                 const std::string& family = "") {
        try {
            body();
        } catch (const std::exception& e) {
            Counterexample c = cex();
            c.note = std::string("evaluation error: ") + e.what();
            fail(std::move(c), family);
        }
    }

    std::string show(const Context& ctx, const Term& t) const {
        try {
            return clip(pretty(t, ctx.names()), 300);
        } catch (const std::exception&) {
            return std::string("<") + kind_name(t->kind) + ">";
        }
    }

    std::string point_str(const Context& ctx, const Point& p) const {
        std::string out = p.s.str();
        std::string clocks;
        for (std::size_t i = 0; i < ctx.size(); ++i) {
            if (ctx.entries[i].kind != EntryKind::Clock) continue;
            if (!clocks.empty()) clocks += ",";
            clocks += ctx.entries[i].name + "->" + std::to_string(p.atoms[i]);
        }
        if (!clocks.empty()) out += " with " + clocks;
        return out;
    }

    // ---- sites

    void add_site(const Context& ctx, const Term& t, const std::string& origin) {
        try {
            Term ty = ch_.infer(ctx, t);
            sites_.push_back({ctx, t, ty, origin});
        } catch (const std::exception&) {
        }
    }

    void collect(const Term& t, const Context& ctx, const std::string& origin) {
        const Node& n = *t;
        if (is_type_kind(n.kind) || is_code_kind(n.kind)) return;
        add_site(ctx, t, origin);
        switch (n.kind) {
        case K::Lam:
            collect(n.kid(2), ctx.push_var(n.name(0), n.kid(0)), origin);
            break;
        case K::App:
        case K::Pair:
            collect(n.kid(2), ctx, origin);
            collect(n.kid(3), ctx, origin);
            break;
        case K::Fst:
        case K::Snd:
            collect(n.kid(2), ctx, origin);
            break;
        case K::Suc:
            collect(n.kid(0), ctx, origin);
            break;
        case K::NatRec:
            collect(n.kid(1), ctx, origin);
            collect(n.kid(2), ctx.push_var(n.name(1), nat_ty()).push_var(n.name(2), n.kid(0)), origin);
            collect(n.kid(3), ctx, origin);
            break;
        case K::ClkLam:
            collect(n.kid(1), ctx.push_clock(n.name(0)), origin);
            break;
        case K::ClkApp:
        case K::Dfix:
        case K::TickApp:
            collect(n.kid(1), ctx, origin);
            break;
        case K::TickLam:
            collect(n.kid(1), ctx.push_tick(n.name(0), n.ix), origin);
            break;
        case K::DiaApp:
            collect(n.kid(1), ctx.push_clock(n.name(0)), origin);
            break;
        default:
            break;
        }
    }

    // Globals seen from the full ambient context, with their types.
    std::vector<Site> global_sites() const {
        std::vector<Site> out;
        int amb = static_cast<int>(prog_.ambient.size());
        Context ctx = prog_.ambient_context(amb);
        for (const auto& name : prog_.order) {
            const GlobalDef& d = prog_.defs.at(name);
            auto args = Program::ambient_args(d.ambient, amb);
            out.push_back({ctx, global(name, args), instantiate_ambient(d.type, d.ambient, args), name});
        }
        return out;
    }

    // ---- stages and environments

    std::vector<Point> points(const Context& ctx, int max_budget = -1) const {
        if (max_budget < 0) max_budget = cfg_.max_budget;
        std::vector<std::size_t> clocks;
        for (std::size_t i = 0; i < ctx.size(); ++i)
            if (ctx.entries[i].kind == EntryKind::Clock) clocks.push_back(i);
        std::vector<Point> out;
        int lo = clocks.empty() ? 0 : 1;
        int hi = clocks.empty() ? 0 : cfg_.max_clocks;
        for (const Stage& s : enumerate_stages(lo, hi, max_budget)) {
            auto atoms = s.atoms();
            std::size_t total = 1;
            for (std::size_t i = 0; i < clocks.size() && total <= kMaxAssignments * 8; ++i) total *= atoms.size();
            std::size_t step = total > kMaxAssignments ? total / kMaxAssignments : 1;
            for (std::size_t code = 0, taken = 0; code < total && taken < kMaxAssignments; code += step, ++taken) {
                Point p{s, std::vector<Atom>(ctx.size(), -1)};
                std::size_t c = code;
                for (std::size_t pos : clocks) {
                    p.atoms[pos] = atoms[c % atoms.size()];
                    c /= atoms.size();
                }
                out.push_back(std::move(p));
            }
        }
        return out;
    }

    // Builds an environment for the first `len` entries. Entries before a tick live at a
    // stage with `extra` more ticks on every clock; the tick's morphism is the identity
    // on clocks. Returns nullptr when a sampled type has no inhabitant.
    Env build_env(Evaluator& ev, const Context& ctx, std::size_t len, const Stage& s, const std::vector<Atom>& atoms,
                  std::uint64_t seed, int extra) {
        std::size_t tick = len;
        for (std::size_t i = len; i-- > 0;)
            if (ctx.entries[i].kind == EntryKind::Tick) {
                tick = i;
                break;
            }
        Env e;
        std::size_t from = 0;
        if (tick < len) {
            Stage up = s;
            for (auto& c : up.clocks) c.second += extra;
            Env inner = build_env(ev, ctx, tick, up, atoms, seed * 31 + 7, extra);
            if (!inner) return nullptr;
            std::size_t clock_pos = tick - 1 - static_cast<std::size_t>(ctx.entries[tick].clock);
            Morphism m = identity(up);
            m.dst = s;
            e = env_tick(inner, m, atoms.at(clock_pos));
            from = tick + 1;
        } else {
            e = env_root(s);
        }
        for (std::size_t i = from; i < len; ++i) {
            const Entry& ent = ctx.entries[i];
            switch (ent.kind) {
            case EntryKind::Clock:
                e = env_clock(e, atoms.at(i));
                break;
            case EntryKind::Var: {
                ValueP v = ev.sample({ent.type, e}, seed * 131 + i);
                if (!v) return nullptr;
                e = env_val(e, v);
                break;
            }
            case EntryKind::Tick:
                throw EvalError("unexpected tick entry");
            }
        }
        return e;
    }

    bool has_tick(const Context& ctx) const {
        for (const auto& e : ctx.entries)
            if (e.kind == EntryKind::Tick) return true;
        return false;
    }

    // Calls f(point, env) for every point, once per tick representative.
    void each_env(Evaluator& ev, const Context& ctx, const std::function<void(const Point&, const Env&)>& f,
                  std::uint64_t seed = 1) {
        bool ticks = has_tick(ctx);
        for (const Point& p : points(ctx)) {
            for (int extra = 1; extra <= (ticks ? 2 : 1); ++extra) {
                Env e;
                try {
                    e = build_env(ev, ctx, ctx.size(), p.s, p.atoms, seed, extra);
                } catch (const std::exception&) {
                    e = nullptr;
                }
                if (!e) {
                    ++cur_->skipped;
                    continue;
                }
                f(p, e);
            }
        }
    }

    // Evaluates both sides in the same environment and compares at `ty`.
    void compare_terms(const Context& ctx, const Term& lhs, const Term& rhs, const Term& ty, const std::string& family,
                       const std::string& note = "") {
        each_env(ev_, ctx, [&](const Point& p, const Env& e) {
            ValueP a, b;
            auto cex = [&] {
                return Counterexample{show(ctx, lhs) + "  vs  " + show(ctx, rhs), point_str(ctx, p), "",
                                      a ? clip(ev_.observe(a, {ty, e})) : "", b ? clip(ev_.observe(b, {ty, e})) : "",
                                      note};
            };
            guarded([&] {
                a = ev_.eval(lhs, e);
                b = ev_.eval(rhs, e);
                record(ev_.value_eq(a, b, {ty, e}), cex, family);
            }, cex, family);
        });
    }

    void compare_types(const Context& ctx, const Term& lhs, const Term& rhs, const std::string& family) {
        each_env(ev_, ctx, [&](const Point& p, const Env& e) {
            auto cex = [&] {
                return Counterexample{show(ctx, lhs) + "  vs  " + show(ctx, rhs), point_str(ctx, p), "",
                                      clip(ev_.observe_type({lhs, e})), clip(ev_.observe_type({rhs, e})), ""};
            };
            guarded([&] { record(ev_.type_eq({lhs, e}, {rhs, e}), cex, family); }, cex, family);
        });
    }

    bool typechecks(const Context& ctx, const Term& t) const {
        try {
            ch_.infer(ctx, t);
            return true;
        } catch (const std::exception&) {
            return false;
        }
    }

    Term whnf_or_null(const Term& t) const {
        try {
            return ch_.whnf(t);
        } catch (const std::exception&) {
            return nullptr;
        }
    }

    // t[tick j] for t : ▷(a:k).A in ctx, seen in ctx extended by m entries (j < m).
    static Term tick_of(const Term& t, const Term& later_whnf, int m, int j) {
        const Node& w = *later_whnf;
        return tick_app(w.name(0), w.ix + m, shift(w.kid(0), m, 1), shift(t, m), j);
    }

    // ---- suites

    void naturality() {
        for (const auto& name : prog_.order) {
            const GlobalDef& d = prog_.defs.at(name);
            Context ctx = prog_.ambient_context(d.ambient);
            std::vector<Stage> targets = enumerate_stages(d.ambient > 0 ? 1 : 0, cfg_.max_clocks, cfg_.max_budget);
            for (const Point& p : points(ctx)) {
                std::vector<Atom> atoms = p.atoms;
                for (const Stage& t : targets) {
                    for (const Morphism& m : enumerate_morphisms(p.s, t)) {
                        std::vector<Atom> moved;
                        for (Atom a : atoms) moved.push_back(m(a));
                        ValueP lhs, rhs;
                        SemType ty{d.type, ev_.global_env(t, moved)};
                        auto cex = [&] {
                            return Counterexample{name, point_str(ctx, p), m.str(),
                                                  lhs ? clip(ev_.observe(lhs, ty)) : "",
                                                  rhs ? clip(ev_.observe(rhs, ty)) : "",
                                                  "restriction of the value vs value at the target"};
                        };
                        guarded([&] {
                            lhs = restrict(ev_.eval_global(name, p.s, atoms), m);
                            rhs = ev_.eval_global(name, t, moved);
                            record(ev_.value_eq(lhs, rhs, ty), cex, "definitions");
                        }, cex, "definitions");
                    }
                }
            }
        }
    }

    struct FixInstance {
        Context ctx;
        Term lhs, rhs, ty;
        std::string form;
    };

    // (dfix t)[<>] against t (dfix t) where the clock can be bound locally, and
    // (dfix t)[a] against t (dfix t) under a fresh tick otherwise.
    std::vector<FixInstance> fix_instances(bool with_tick_form) const {
        std::vector<FixInstance> out;
        std::set<std::string> seen;
        for (const Site& s : sites_) {
            if (s.t->kind != K::Dfix) continue;
            const Node& d = *s.t;
            std::string key = s.origin + "|" + show(s.ctx, s.t);
            if (!seen.insert(key).second) continue;
            Term a = d.kid(0);
            int c = d.ix;
            Term unfolded = unfold_dfix(a, c, d.kid(1));
            try {
                Term lhs = dia_app(s.ctx.entries[s.ctx.size() - 1 - static_cast<std::size_t>(c)].name, "a",
                                   abstract_clock(shift(a, 1), c, 1), abstract_clock(s.t, c), c);
                if (typechecks(s.ctx, lhs)) {
                    out.push_back({s.ctx, lhs, unfolded, a, "diamond form"});
                    continue;
                }
            } catch (const std::exception&) {
            }
            if (!with_tick_form) continue;
            Context cx = s.ctx.push_tick("a", c);
            Term lhs = tick_app("b", c + 1, shift(a, 2), shift(s.t, 1), 0);
            Term rhs = shift(unfolded, 1);
            if (typechecks(cx, lhs) && typechecks(cx, rhs)) out.push_back({cx, lhs, rhs, shift(a, 1), "tick form"});
        }
        return out;
    }

    void fixed_point() {
        for (const auto& fi : fix_instances(true)) compare_terms(fi.ctx, fi.lhs, fi.rhs, fi.ty, fi.form);
    }

    // Terms of a later type: sites, globals, and second projections of globals.
    std::vector<Site> later_terms() const {
        std::vector<Site> out;
        std::set<std::string> seen;
        auto consider = [&](const Site& s) {
            Term w = whnf_or_null(s.ty);
            if (!w) return;
            if (w->kind == K::Later) {
                if (seen.insert(s.origin + "|" + show(s.ctx, s.t)).second) out.push_back({s.ctx, s.t, w, s.origin});
            } else if (w->kind == K::Sigma) {
                Term snd_t = snd(w->name(0), w->kid(0), w->kid(1), s.t);
                try {
                    Term ty = ch_.infer(s.ctx, snd_t);
                    Term w2 = whnf_or_null(ty);
                    if (w2 && w2->kind == K::Later && seen.insert(s.origin + "|" + show(s.ctx, snd_t)).second)
                        out.push_back({s.ctx, snd_t, w2, s.origin});
                } catch (const std::exception&) {
                }
            }
        };
        for (const Site& s : sites_) consider(s);
        for (const Site& s : global_sites()) consider(s);
        return out;
    }

    void tick_irrelevance() {
        for (const Site& s : later_terms()) {
            const Node& w = *s.ty;
            Context cx = s.ctx.push_tick("a1", w.ix).push_tick("a2", w.ix + 1);
            Term first = tick_of(s.t, s.ty, 2, 1);
            Term second = tick_of(s.t, s.ty, 2, 0);
            if (!typechecks(cx, first) || !typechecks(cx, second)) {
                ++cur_->skipped;
                continue;
            }
            Term ty1 = inst_tick(shift(w.kid(0), 2, 1), 1);
            Term ty2 = inst_tick(shift(w.kid(0), 2, 1), 0);
            compare_terms(cx, first, second, ty2, "terms");
            compare_types(cx, ty1, ty2, "types");
        }
    }

    void clock_irrelevance() {
        // Invariance: restricting along a fresh clock and merging it back is the identity,
        // in both orders, on sampled values of every definition's type.
        for (const auto& name : prog_.order) {
            const GlobalDef& d = prog_.defs.at(name);
            Context ctx = prog_.ambient_context(d.ambient);
            for (const Point& p : points(ctx)) {
                Env genv = ev_.global_env(p.s, std::vector<Atom>(p.atoms.begin(), p.atoms.end()));
                SemType ty{d.type, genv};
                for (Atom mu : p.s.atoms()) {
                    ClockIntro ci = clock_intro_iota(p.s, p.s.budget(mu));
                    Morphism back = merge_clock(ci.iota.dst, ci.fresh, mu);
                    SemType ty_up{d.type, restrict_env(genv, ci.iota)};
                    for (int i = 0; i < cfg_.samples; ++i) {
                        ValueP v, w, v2, w2;
                        auto cex = [&] {
                            return Counterexample{name + " : sampled value " + std::to_string(i), point_str(ctx, p),
                                                  ci.iota.str() + " then " + back.str(),
                                                  v ? clip(ev_.observe(v, ty)) : "", v2 ? clip(ev_.observe(v2, ty)) : "",
                                                  "value not invariant under clock introduction"};
                        };
                        guarded([&] {
                            v = ev_.sample(ty, static_cast<std::uint64_t>(i));
                            if (!v) {
                                ++cur_->skipped;
                                return;
                            }
                            v2 = restrict(restrict(v, ci.iota), back);
                            record(ev_.value_eq(v, v2, ty, 0), cex, "introduce then merge");
                            w = ev_.sample(ty_up, static_cast<std::uint64_t>(i));
                            if (!w) return;
                            w2 = restrict(restrict(w, back), ci.iota);
                            record(ev_.value_eq(w, w2, ty_up, 0), cex, "merge then introduce");
                        }, cex, "introduce then merge");
                    }
                }
            }
        }
        // Clock irrelevance: t[k1] and t[k2] agree for t : forall k. A with k not free in A.
        std::vector<std::pair<std::string, Site>> terms;
        int amb = static_cast<int>(prog_.ambient.size());
        for (const Site& g : global_sites()) {
            Term w = whnf_or_null(g.ty);
            if (!w || w->kind != K::Forall) continue;
            if (!mentions(w->kid(0), 0)) terms.push_back({"definition", {g.ctx, g.t, w, g.origin}});
            std::string text = "/\\kk. fst (" + g.origin + " [kk])";
            try {
                Term ty = forall_ty("kk", nat_ty());
                Term t = elab_.check(prog_.ambient_context(amb), parse_expr(text), ty);
                terms.push_back({"synthesized", {g.ctx, t, ty, text}});
            } catch (const std::exception&) {
            }
        }
        for (const auto& [family, s] : terms) {
            Term body = unshift(s.ty->kid(0), 1);
            for (const Point& p : points(s.ctx)) {
                Env e = build_env(ev_, s.ctx, s.ctx.size(), p.s, p.atoms, 1, 1);
                if (!e) continue;
                std::vector<Atom> atoms = p.s.atoms();
                for (std::size_t i = 0; i < atoms.size(); ++i) {
                    for (std::size_t j = i + 1; j <= atoms.size(); ++j) {
                        ValueP a, b;
                        SemType ty{body, e};
                        std::string what = j < atoms.size() ? std::to_string(atoms[j]) : "a fresh clock";
                        auto cex = [&] {
                            return Counterexample{show(s.ctx, s.t), point_str(s.ctx, p),
                                                  "clock " + std::to_string(atoms[i]) + " vs " + what,
                                                  a ? clip(ev_.observe(a, ty)) : "", b ? clip(ev_.observe(b, ty)) : "",
                                                  s.origin};
                        };
                        guarded([&] {
                            ValueP v = ev_.eval(s.t, e);
                            if (j < atoms.size()) {
                                a = ev_.apply_clock(v, atoms[i]);
                                b = ev_.apply_clock(v, atoms[j]);
                                record(ev_.value_eq(a, b, ty), cex, family);
                            } else {
                                ClockIntro ci = clock_intro_iota(p.s, p.s.budget(atoms[i]) + 1);
                                ValueP up = restrict(v, ci.iota);
                                SemType ty_up{body, restrict_env(e, ci.iota)};
                                a = ev_.apply_clock(up, atoms[i]);
                                b = ev_.apply_clock(up, ci.fresh);
                                ty = ty_up;
                                record(ev_.value_eq(a, b, ty_up), cex, family);
                            }
                        }, cex, family);
                    }
                }
            }
        }
    }

    void diamond() {
        int amb = static_cast<int>(prog_.ambient.size());
        Context base = prog_.ambient_context(amb);
        // Contexts: the ambient clocks, optionally with a variable of a definition's type.
        std::vector<Context> ctxs{base};
        for (const auto& name : prog_.order) {
            const GlobalDef& d = prog_.defs.at(name);
            ctxs.push_back(base.push_var("x", instantiate_ambient(d.type, d.ambient, Program::ambient_args(d.ambient, amb))));
        }
        for (const Context& ctx : ctxs) {
            Context with_clock = ctx.push_clock("kk");
            for (const Point& p : points(ctx)) {
                Env e = build_env(ev_, ctx, ctx.size(), p.s, p.atoms, 3, 1);
                if (!e) {
                    ++cur_->skipped;
                    continue;
                }
                for (Atom lam : p.s.atoms()) {
                    Env ek = env_clock(e, lam);
                    for (Evaluator* ev : {&ev_, &ev2_}) {
                        auto cex = [&] {
                            return Counterexample{pretty(with_clock), point_str(ctx, p),
                                                  "clock kk -> " + std::to_string(lam), "", "",
                                                  "projection after diamond is not the identity (extra budget " +
                                                      std::to_string(ev->options().extra_budget) + ")"};
                        };
                        guarded([&] {
                            Env dd = ev->diamond(ek);
                            record(ev_.env_eq(project_env(dd, 1), ek, with_clock), cex, "project after diamond");
                        }, cex, "project after diamond");
                    }
                }
            }
        }
        // The other composite, observed through terms that use the tick.
        Context cx = base.push_clock("kk").push_tick("aa", 0);
        for (const Site& g : global_sites()) {
            Term w = whnf_or_null(g.ty);
            if (!w || w->kind != K::Forall) continue;
            for (const std::string& text :
                 {"(" + g.origin + " [kk]) [aa]", "(snd (" + g.origin + " [kk])) [aa]"}) {
                Term t, ty;
                try {
                    std::tie(t, ty) = elab_.infer(cx, parse_expr(text));
                } catch (const std::exception&) {
                    continue;
                }
                each_env(ev_, cx, [&](const Point& p, const Env& e) {
                    ValueP a, b;
                    auto cex = [&] {
                        return Counterexample{text, point_str(cx, p), "", a ? clip(ev_.observe(a, {ty, e})) : "",
                                              b ? clip(ev_.observe(b, {ty, e})) : "",
                                              "diamond after projection changes the value"};
                    };
                    guarded([&] {
                        a = ev_.eval(t, e);
                        b = ev_.eval(t, ev_.diamond(project_env(e, 1)));
                        record(ev_.value_eq(a, b, {ty, e}), cex, "diamond after project");
                    }, cex, "diamond after project");
                });
                // Fresh budget independence of the same construction.
                Term dt = shift(t, 0);
                each_env(ev_, cx, [&](const Point& p, const Env& e) {
                    std::string oa, ob;
                    auto cex = [&] {
                        return Counterexample{text, point_str(cx, p), "", oa, ob, "fresh budget +1 vs +2"};
                    };
                    guarded([&] {
                        oa = clip(ev_.observe(ev_.eval(dt, ev_.diamond(project_env(e, 1))), {ty, e}));
                        ob = clip(ev2_.observe(ev2_.eval(dt, ev2_.diamond(project_env(e, 1))), {ty, e}));
                        record(oa == ob, cex, "fresh budget");
                    }, cex, "fresh budget");
                });
            }
        }
        // Fresh budget independence for every definition and fixed-point instance using ⋄.
        for (const auto& name : prog_.order) {
            const GlobalDef& d = prog_.defs.at(name);
            if (!uses_diamond(d.body)) continue;
            Context ctx = prog_.ambient_context(d.ambient);
            for (const Point& p : points(ctx)) {
                std::string oa, ob;
                auto cex = [&] { return Counterexample{name, point_str(ctx, p), "", oa, ob, "fresh budget +1 vs +2"}; };
                guarded([&] {
                    SemType ty{d.type, ev_.global_env(p.s, p.atoms)};
                    oa = clip(ev_.observe(ev_.eval_global(name, p.s, p.atoms), ty));
                    ob = clip(ev2_.observe(ev2_.eval_global(name, p.s, p.atoms), ty));
                    record(oa == ob, cex, "fresh budget");
                }, cex, "fresh budget");
            }
        }
        for (const auto& fi : fix_instances(false)) {
            each_env(ev_, fi.ctx, [&](const Point& p, const Env& e) {
                std::string oa, ob;
                auto cex = [&] {
                    return Counterexample{show(fi.ctx, fi.lhs), point_str(fi.ctx, p), "", oa, ob, "fresh budget +1 vs +2"};
                };
                guarded([&] {
                    oa = clip(ev_.observe(ev_.eval(fi.lhs, e), {fi.ty, e}));
                    ob = clip(ev2_.observe(ev2_.eval(fi.lhs, e), {fi.ty, e}));
                    record(oa == ob, cex, "fresh budget");
                }, cex, "fresh budget");
            });
        }
    }

    static bool uses_diamond(const Term& t) {
        if (t->kind == K::DiaApp) return true;
        for (const auto& k : t->kids)
            if (uses_diamond(k)) return true;
        return false;
    }

    // ---- evaluation commutes with substitution

    struct SubstInstance {
        Context dom;
        Subst sigma;
        std::string former;
    };

    // Extends sigma : dom -> cod.prefix(from) through the remaining entries of cod.
    static bool lift_through(const Context& cod, std::size_t from, SubstInstance& inst) {
        for (std::size_t i = from; i < cod.size(); ++i) {
            const Entry& e = cod.entries[i];
            switch (e.kind) {
            case EntryKind::Var:
                inst.dom = inst.dom.push_var(e.name, subst(e.type, inst.sigma));
                break;
            case EntryKind::Clock:
                inst.dom = inst.dom.push_clock(e.name);
                break;
            case EntryKind::Tick: {
                Term probe = subst(later_nd(e.clock, nat_ty()), inst.sigma);
                if (probe->kind != K::Later) return false;
                inst.dom = inst.dom.push_tick(e.name, probe->ix);
                break;
            }
            }
            inst.sigma = inst.sigma.lift();
        }
        return true;
    }

    // Terms of type a in ctx usable as substitution payloads.
    std::vector<Term> payloads(const Context& ctx, const Term& a) const {
        std::vector<Term> out;
        auto fits = [&](const Term& u) {
            try {
                ch_.check(ctx, u, a);
                return true;
            } catch (const std::exception&) {
                return false;
            }
        };
        for (int i = 0; i < static_cast<int>(ctx.size()) && out.size() < 2; ++i)
            if (ctx.at_index(i).kind == EntryKind::Var && fits(var(i, ctx.at_index(i).name))) out.push_back(var(i));
        Term w = whnf_or_null(a);
        if (w && w->kind == K::Nat) {
            out.push_back(numeral(2));
            out.push_back(suc(numeral(0)));
        }
        int amb = 0;
        while (amb < static_cast<int>(ctx.size()) && ctx.entries[static_cast<std::size_t>(amb)].kind == EntryKind::Clock)
            ++amb;
        for (const auto& name : prog_.order) {
            if (out.size() >= 4) break;
            const GlobalDef& d = prog_.defs.at(name);
            if (d.ambient > amb || d.ambient > static_cast<int>(prog_.ambient.size())) continue;
            Term g = global(name, Program::ambient_args(d.ambient, static_cast<int>(ctx.size())));
            if (fits(g)) out.push_back(g);
        }
        return out;
    }

    std::vector<SubstInstance> substitutions_for(const Context& cod) const {
        std::vector<SubstInstance> out;
        int n = static_cast<int>(cod.size());
        auto clocks_in = [](const Context& c) {
            std::vector<int> out;
            for (int i = 0; i < static_cast<int>(c.size()); ++i)
                if (c.at_index(i).kind == EntryKind::Clock) out.push_back(i);
            return out;
        };
        for (int p = n - 1; p >= 0; --p) {
            const Entry& e = cod.entries[static_cast<std::size_t>(p)];
            Context pre = cod.prefix(static_cast<std::size_t>(p));
            std::vector<SubstInstance> formers;
            switch (e.kind) {
            case EntryKind::Var:
                for (const Term& u : payloads(pre, e.type)) {
                    formers.push_back({pre, identity_subst(p).ext_var(u), "term"});
                    formers.push_back(
                        {pre.push_var("w", nat_ty()), weaken(identity_subst(p), 1).ext_var(shift(u, 1)), "weakening"});
                }
                break;
            case EntryKind::Clock:
                for (int c : clocks_in(pre)) {
                    formers.push_back({pre, identity_subst(p).ext_clock(c), "clock"});
                    formers.push_back({pre.push_var("w", nat_ty()), weaken(identity_subst(p), 1).ext_clock(c + 1),
                                       "weakening"});
                }
                break;
            case EntryKind::Tick: {
                Context dom = pre.push_tick("b", e.clock);
                formers.push_back({dom, weaken(identity_subst(p), 1).ext_tick(), "tick"});
                if (e.clock == 0 && p >= 1) {
                    Context pre2 = cod.prefix(static_cast<std::size_t>(p - 1));
                    for (int c : clocks_in(pre2))
                        formers.push_back({pre2, identity_subst(p - 1).ext_diamond(c), "diamond"});
                }
                break;
            }
            }
            for (auto& f : formers) {
                if (p + 1 < n) f.former += "+lift";
                if (lift_through(cod, static_cast<std::size_t>(p) + 1, f)) out.push_back(std::move(f));
            }
            if (out.size() >= 3 * kMaxSubstPerSite) break;
        }
        return out;
    }

    void substitution() {
        std::size_t instances = 0;
        std::set<std::string> seen;
        std::vector<Site> pool = sites_;
        for (const Site& s : pool) {
            if (instances >= kMaxSubstInstances) break;
            if (s.ctx.size() == 0) continue;
            std::size_t here = 0;
            for (SubstInstance& inst : substitutions_for(s.ctx)) {
                if (here >= kMaxSubstPerSite || instances >= kMaxSubstInstances) break;
                Term ts, tys;
                try {
                    ch_.check_ctx(inst.dom);
                    ts = subst(s.t, inst.sigma);
                    tys = subst(s.ty, inst.sigma);
                    ch_.check(inst.dom, ts, tys);
                } catch (const std::exception&) {
                    ++cur_->skipped;
                    continue;
                }
                std::string key = pretty(inst.dom) + "|" + show(inst.dom, ts) + "|" + show(s.ctx, s.t);
                if (!seen.insert(key).second) continue;
                ++here;
                ++instances;
                std::string family = inst.former;
                auto base = family.substr(0, family.find('+'));
                ++cur_->coverage["instances"];
                each_env(ev_, inst.dom, [&](const Point& p, const Env& e) {
                    ValueP a, b;
                    auto cex = [&] {
                        return Counterexample{show(s.ctx, s.t) + " under " + family + " substitution, giving " +
                                                  show(inst.dom, ts),
                                              point_str(inst.dom, p), "", a ? clip(ev_.observe(a, {tys, e})) : "",
                                              b ? clip(ev_.observe(b, {tys, e})) : "", "domain " + pretty(inst.dom)};
                    };
                    guarded([&] {
                        a = ev_.eval(ts, e);
                        Env se = apply_subst_env(ev_, inst.sigma, e);
                        b = ev_.eval(s.t, se);
                        bool ok = ev_.value_eq(a, b, {tys, e}) && ev_.type_eq({tys, e}, {s.ty, se});
                        record(ok, cex, base);
                    }, cex, base);
                });
            }
        }
    }

    // ---- judgemental equalities

    void equation(const Context& ctx, const Term& lhs, const Term& rhs, const std::string& family, bool is_type) {
        if (eq_instances_[family] >= static_cast<int>(kMaxPerFamily)) return;
        Term ty;
        try {
            if (is_type) {
                ch_.check_type(ctx, lhs);
                ch_.check_type(ctx, rhs);
            } else {
                ty = ch_.infer(ctx, lhs);
                ch_.check(ctx, rhs, ty);
            }
        } catch (const std::exception&) {
            ++cur_->skipped;
            return;
        }
        ++eq_instances_[family];
        if (!ch_.conv(lhs, rhs)) {
            fail({show(ctx, lhs) + "  vs  " + show(ctx, rhs), "", "", "", "", "not convertible within fuel " +
                                                                                 std::to_string(cfg_.fuel)},
                 family);
            return;
        }
        if (is_type)
            compare_types(ctx, lhs, rhs, family);
        else
            compare_terms(ctx, lhs, rhs, ty, family);
    }

    void equations() {
        std::vector<Site> all = sites_;
        for (const Site& g : global_sites()) all.push_back(g);
        for (const Site& s : all) {
            const Node& n = *s.t;
            int len = static_cast<int>(s.ctx.size());
            // Clock beta.
            if (n.kind == K::ClkLam) {
                for (int c = 0; c < len; ++c)
                    if (s.ctx.at_index(c).kind == EntryKind::Clock)
                        equation(s.ctx, clk_app(n.name(0), n.kid(0), s.t, c), inst_clock(n.kid(1), c), "clock beta",
                                 false);
            }
            // Tick beta, and beta for the tick constant.
            if (n.kind == K::TickLam) {
                Context cx = s.ctx.push_tick("b", n.ix);
                equation(cx, tick_app(n.name(0), n.ix + 1, shift(n.kid(0), 1, 1), shift(s.t, 1), 0), n.kid(1),
                         "tick beta", false);
                try {
                    std::string kname = s.ctx.at_index(n.ix).name;
                    Term lhs = dia_app(kname, n.name(0), abstract_clock(n.kid(0), n.ix, 1), abstract_clock(s.t, n.ix), n.ix);
                    Term rhs = inst_diamond(abstract_clock(n.kid(1), n.ix, 1), n.ix);
                    if (typechecks(s.ctx, lhs)) equation(s.ctx, lhs, rhs, "diamond beta", false);
                } catch (const std::exception&) {
                }
            }
            Term w = whnf_or_null(s.ty);
            if (!w) continue;
            // Clock eta.
            if (w->kind == K::Forall) {
                Term body = clk_app(w->name(0), shift(w->kid(0), 1, 1), shift(s.t, 1), 0);
                equation(s.ctx, clk_lam(w->name(0), w->kid(0), body), s.t, "clock eta", false);
            }
            // Tick eta.
            if (w->kind == K::Later) {
                Term body = tick_app(w->name(0), w->ix + 1, shift(w->kid(0), 1, 1), shift(s.t, 1), 0);
                equation(s.ctx, tick_lam(w->name(0), w->ix, w->kid(0), body), s.t, "tick eta", false);
            }
            // Universe equations on codes.
            if (w->kind == K::Univ) universe_equations(s, w->d1);
        }
        for (const auto& fi : fix_instances(false)) equation(fi.ctx, fi.lhs, fi.rhs, "dfix diamond", false);
    }

    void universe_equations(const Site& s, const ClockSet& delta) {
        ClockSet all;
        for (int i = 0; i < static_cast<int>(s.ctx.size()); ++i)
            if (s.ctx.at_index(i).kind == EntryKind::Clock) all.push_back(i);
        all = make_clock_set(all);
        std::vector<int> mid = delta;
        for (int c : all)
            if (!std::binary_search(delta.begin(), delta.end(), c)) {
                mid.push_back(c);
                break;
            }
        ClockSet delta1 = make_clock_set(mid);
        Term c = s.t;
        Term w = whnf_or_null(c);
        if (!w) return;
        if (w->kind == K::CodeForall) {
            equation(s.ctx, el(delta, c), forall_ty(w->name(0), el(shift_set(delta, true), w->kid(0))), "el forall", true);
            equation(s.ctx, incl(delta, all, c),
                     code_forall(all, w->name(0), incl(shift_set(delta, true), shift_set(all, true), w->kid(0))),
                     "in forall", false);
        }
        if (w->kind == K::CodeLater) {
            equation(s.ctx, el(delta, c), later(w->name(0), w->ix, el(shift_set(delta), w->kid(0))), "el later", true);
            equation(s.ctx, incl(delta, all, c),
                     code_later(all, w->name(0), w->ix, incl(shift_set(delta), shift_set(all), w->kid(0))), "in later",
                     false);
        }
        equation(s.ctx, el(all, incl(delta, all, c)), el(delta, c), "el in", true);
        equation(s.ctx, incl(delta1, all, incl(delta, delta1, c)), incl(delta, all, c), "in in", false);
        equation(s.ctx, incl(delta, delta, c), c, "in same", false);
    }

    const Program& prog_;
    VerifyConfig cfg_;
    Checker ch_;
    Evaluator ev_, ev2_;
    Program synth_;
    Elaborator elab_;
    std::vector<Site> sites_;
    std::map<std::string, int> eq_instances_;
    SuiteResult* cur_ = nullptr;
};

}  // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"naturality", "fixed-point",  "tick-irrelevance", "clock-irrelevance",
                                                "diamond",    "substitution", "equations"};
    return names;
}

VerifyReport verify_program(const Program& prog, const std::string& file, const VerifyConfig& cfg,
                            const std::vector<std::string>& only) {
    VerifyReport rep;
    rep.file = file;
    Runner r(prog, cfg);
    for (const auto& name : suite_names()) {
        if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
        rep.suites.push_back(r.run(name));
    }
    return rep;
}

const std::vector<std::string>& required_families(const std::string& suite) {
    static const std::map<std::string, std::vector<std::string>> table{
        {"naturality", {"definitions"}},
        {"fixed-point", {"diamond form"}},
        {"tick-irrelevance", {"terms", "types"}},
        {"clock-irrelevance", {"introduce then merge", "merge then introduce", "definition", "synthesized"}},
        {"diamond", {"project after diamond", "diamond after project", "fresh budget"}},
        {"substitution", {"term", "clock", "tick", "diamond", "weakening"}},
        {"equations",
         {"clock beta", "clock eta", "tick beta", "tick eta", "dfix diamond", "diamond beta", "el forall", "el later",
          "in forall", "in later", "el in", "in in", "in same"}},
    };
    static const std::vector<std::string> none;
    auto it = table.find(suite);
    return it == table.end() ? none : it->second;
}

CorpusReport verify_corpus(const std::vector<std::pair<std::string, const Program*>>& files, const VerifyConfig& cfg,
                           const std::vector<std::string>& only) {
    CorpusReport out;
    std::map<std::string, std::map<std::string, int>> seen;
    for (const auto& [file, prog] : files) {
        out.files.push_back(verify_program(*prog, file, cfg, only));
        for (const auto& s : out.files.back().suites) {
            auto& m = seen[s.name];
            for (const auto& [k, v] : s.coverage) m[k] += v;
            if (s.name == "substitution") out.subst_instances += s.coverage.count("instances") ? s.coverage.at("instances") : 0;
        }
    }
    for (const auto& name : suite_names()) {
        if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
        for (const auto& fam : required_families(name))
            if (seen[name][fam] == 0) out.missing.push_back({name, fam});
        if (name == "substitution" && out.subst_instances < cfg.min_subst)
            out.missing.push_back({name, "at least " + std::to_string(cfg.min_subst) + " instances (found " +
                                             std::to_string(out.subst_instances) + ")"});
    }
    return out;
}

}  // namespace clott
