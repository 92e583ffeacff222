#include "clott/syntax.hpp"

#include <algorithm>

namespace clott {

const char* kind_name(K k) {
    switch (k) {
    case K::Nat: return "Nat";
    case K::Pi: return "Pi";
    case K::Sigma: return "Sigma";
    case K::Id: return "Id";
    case K::Later: return "Later";
    case K::Forall: return "Forall";
    case K::Univ: return "Univ";
    case K::El: return "El";
    case K::Var: return "Var";
    case K::Global: return "Global";
    case K::Zero: return "Zero";
    case K::Suc: return "Suc";
    case K::NatRec: return "NatRec";
    case K::Lam: return "Lam";
    case K::App: return "App";
    case K::Pair: return "Pair";
    case K::Fst: return "Fst";
    case K::Snd: return "Snd";
    case K::Refl: return "Refl";
    case K::J: return "J";
    case K::ClkLam: return "ClkLam";
    case K::ClkApp: return "ClkApp";
    case K::TickLam: return "TickLam";
    case K::TickApp: return "TickApp";
    case K::DiaApp: return "DiaApp";
    case K::Dfix: return "Dfix";
    case K::Cirr: return "Cirr";
    case K::Tirr: return "Tirr";
    case K::Pfix: return "Pfix";
    case K::CodeNat: return "CodeNat";
    case K::CodePi: return "CodePi";
    case K::CodeSigma: return "CodeSigma";
    case K::CodeForall: return "CodeForall";
    case K::CodeLater: return "CodeLater";
    case K::Incl: return "Incl";
    }
    return "?";
}

bool is_type_kind(K k) {
    switch (k) {
    case K::Nat: case K::Pi: case K::Sigma: case K::Id: case K::Later:
    case K::Forall: case K::Univ: case K::El:
        return true;
    default:
        return false;
    }
}

bool is_code_kind(K k) {
    switch (k) {
    case K::CodeNat: case K::CodePi: case K::CodeSigma: case K::CodeForall:
    case K::CodeLater: case K::Incl:
        return true;
    default:
        return false;
    }
}

ClockSet make_clock_set(std::vector<int> xs) {
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

bool clock_subset(const ClockSet& a, const ClockSet& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

const std::string& Node::name(std::size_t i) const {
    static const std::string anon = "_";
    return i < names.size() ? names[i] : anon;
}

std::vector<Bind> child_binders(K k, std::size_t c) {
    using B = Bind;
    switch (k) {
    case K::Pi: case K::Sigma: case K::CodePi: case K::CodeSigma:
        return c == 1 ? std::vector<B>{B::Var} : std::vector<B>{};
    case K::Later: case K::CodeLater:
        return {B::Tick};
    case K::Forall: case K::CodeForall:
        return {B::Clock};
    case K::NatRec:
        if (c == 0) return {B::Var};
        if (c == 2) return {B::Var, B::Var};
        return {};
    case K::Lam:
        return c >= 1 ? std::vector<B>{B::Var} : std::vector<B>{};
    case K::App: case K::Pair: case K::Fst: case K::Snd:
        return c == 1 ? std::vector<B>{B::Var} : std::vector<B>{};
    case K::J:
        if (c == 1) return {B::Var, B::Var, B::Var};
        if (c == 2) return {B::Var};
        return {};
    case K::ClkLam:
        return {B::Clock};
    case K::ClkApp:
        return c == 0 ? std::vector<B>{B::Clock} : std::vector<B>{};
    case K::TickLam:
        return {B::Tick};
    case K::TickApp:
        return c == 0 ? std::vector<B>{B::Tick} : std::vector<B>{};
    case K::DiaApp:
        return c == 0 ? std::vector<B>{B::Clock, B::Tick} : std::vector<B>{B::Clock};
    default:
        return {};
    }
}

namespace {

bool has_clock_field(K k) {
    switch (k) {
    case K::Later: case K::ClkApp: case K::TickLam: case K::TickApp: case K::DiaApp:
    case K::Dfix: case K::Tirr: case K::Pfix: case K::CodeLater:
        return true;
    default:
        return false;
    }
}

bool has_clock_set(K k) {
    switch (k) {
    case K::Univ: case K::El: case K::CodeNat: case K::CodePi: case K::CodeSigma:
    case K::CodeForall: case K::CodeLater: case K::Incl:
        return true;
    default:
        return false;
    }
}

int map_clock(int c, int depth, Mapper& m) {
    if (c < depth) return c;
    return m.clock(c - depth) + depth;
}

ClockSet map_set(const ClockSet& s, int depth, Mapper& m) {
    std::vector<int> out;
    out.reserve(s.size());
    for (int c : s) out.push_back(map_clock(c, depth, m));
    return make_clock_set(std::move(out));
}

}  // namespace

Term map_term(const Term& t, Mapper& m, int depth) {
    const Node& n = *t;
    if (n.kind == K::Var) {
        if (n.ix < depth) return t;
        return m.var(n.ix - depth, depth, n);
    }
    if (n.kind == K::TickApp && n.ix2 >= depth) {
        if (Term r = m.tick_app(n, depth)) return r;
    }
    Node out = n;
    if (has_clock_field(n.kind)) out.ix = map_clock(n.ix, depth, m);
    if (n.kind == K::TickApp && n.ix2 >= depth) out.ix2 = m.tick(n.ix2 - depth) + depth;
    if (n.kind == K::Global) {
        for (int& c : out.d1) c = map_clock(c, depth, m);
    }
    if (has_clock_set(n.kind)) {
        out.d1 = map_set(n.d1, depth, m);
        if (n.kind == K::Incl) out.d2 = map_set(n.d2, depth, m);
    }
    for (std::size_t i = 0; i < n.kids.size(); ++i) {
        int d = depth + static_cast<int>(child_binders(n.kind, i).size());
        out.kids[i] = map_term(n.kids[i], m, d);
    }
    return mk(std::move(out));
}

namespace {

struct ShiftMapper : Mapper {
    int n, cutoff;
    ShiftMapper(int n_, int c_) : n(n_), cutoff(c_) {}
    int adj(int j) const { return j >= cutoff ? j + n : j; }
    Term var(int j, int depth, const Node& site) override { return var_at(adj(j) + depth, site); }
    int clock(int j) override { return adj(j); }
    int tick(int j) override { return adj(j); }
    static Term var_at(int i, const Node& site) {
        Node v = site;
        v.ix = i;
        return mk(std::move(v));
    }
};

struct UnshiftMapper : Mapper {
    int n, cutoff;
    UnshiftMapper(int n_, int c_) : n(n_), cutoff(c_) {}
    int adj(int j) const {
        if (j < cutoff) return j;
        if (j < cutoff + n) throw ScopeError("reference to an entry that is not in scope here");
        return j - n;
    }
    Term var(int j, int depth, const Node& site) override { return ShiftMapper::var_at(adj(j) + depth, site); }
    int clock(int j) override { return adj(j); }
    int tick(int j) override { return adj(j); }
};

struct OccursMapper : Mapper {
    int target;
    bool found = false;
    explicit OccursMapper(int t) : target(t) {}
    Term var(int j, int depth, const Node& site) override {
        if (j == target) found = true;
        return ShiftMapper::var_at(j + depth, site);
    }
    int clock(int j) override {
        if (j == target) found = true;
        return j;
    }
    int tick(int j) override {
        if (j == target) found = true;
        return j;
    }
};

}  // namespace

Term shift(const Term& t, int n, int cutoff) {
    if (n == 0) return t;
    ShiftMapper m(n, cutoff);
    return map_term(t, m);
}

Term unshift(const Term& t, int n, int cutoff) {
    if (n == 0) return t;
    UnshiftMapper m(n, cutoff);
    return map_term(t, m);
}

bool mentions(const Term& t, int j) {
    OccursMapper m(j);
    map_term(t, m);
    return m.found;
}

namespace {

bool annotation_child(K k, std::size_t c) {
    switch (k) {
    case K::Lam: case K::App: case K::Pair: case K::Fst: case K::Snd:
        return c <= 1;
    case K::Refl: case K::ClkLam: case K::ClkApp: case K::TickLam: case K::TickApp:
    case K::DiaApp: case K::Dfix: case K::Cirr: case K::Tirr: case K::Pfix:
        return c == 0;
    case K::NatRec:
        return c == 0;
    case K::J:
        return c <= 1;
    default:
        return false;
    }
}

bool eq_impl(const Term& a, const Term& b, bool erase) {
    if (a.get() == b.get()) return true;
    const Node& x = *a;
    const Node& y = *b;
    if (x.kind != y.kind) return false;
    bool skip_clock = erase && x.kind == K::TickApp;
    if (!skip_clock && x.ix != y.ix) return false;
    if (x.ix2 != y.ix2 || x.gname != y.gname) return false;
    bool skip_sets = erase && is_code_kind(x.kind) && x.kind != K::Incl;
    if (!skip_sets && (x.d1 != y.d1 || x.d2 != y.d2)) return false;
    if (x.kids.size() != y.kids.size()) return false;
    for (std::size_t i = 0; i < x.kids.size(); ++i) {
        if (erase && annotation_child(x.kind, i)) continue;
        if (!eq_impl(x.kids[i], y.kids[i], erase)) return false;
    }
    return true;
}

struct ClockCollector : Mapper {
    std::vector<int> found;
    Term var(int j, int depth, const Node& site) override { return ShiftMapper::var_at(j + depth, site); }
    int clock(int j) override {
        found.push_back(j);
        return j;
    }
    int tick(int j) override { return j; }
};

}  // namespace

bool alpha_eq(const Term& a, const Term& b) { return eq_impl(a, b, false); }
bool erased_eq(const Term& a, const Term& b) { return eq_impl(a, b, true); }

ClockSet free_clocks(const Term& t) {
    ClockCollector c;
    map_term(t, c);
    return make_clock_set(std::move(c.found));
}

// Constructors

Term mk(Node n) { return std::make_shared<const Node>(std::move(n)); }

namespace {
Node node(K k) {
    Node n;
    n.kind = k;
    return n;
}
}  // namespace

Term nat_ty() { return mk(node(K::Nat)); }

Term pi(std::string x, Term a, Term b) {
    Node n = node(K::Pi);
    n.names = {std::move(x)};
    n.kids = {std::move(a), std::move(b)};
    return mk(std::move(n));
}

Term sigma(std::string x, Term a, Term b) {
    Node n = node(K::Sigma);
    n.names = {std::move(x)};
    n.kids = {std::move(a), std::move(b)};
    return mk(std::move(n));
}

Term arrow(Term a, Term b) { return pi("_", std::move(a), shift(b, 1)); }
Term product(Term a, Term b) { return sigma("_", std::move(a), shift(b, 1)); }

Term id_ty(Term a, Term t, Term u) {
    Node n = node(K::Id);
    n.kids = {std::move(a), std::move(t), std::move(u)};
    return mk(std::move(n));
}

Term later(std::string a, int clock, Term body) {
    Node n = node(K::Later);
    n.names = {std::move(a)};
    n.ix = clock;
    n.kids = {std::move(body)};
    return mk(std::move(n));
}

Term later_nd(int clock, Term body) { return later("_", clock, shift(body, 1)); }

Term forall_ty(std::string k, Term body) {
    Node n = node(K::Forall);
    n.names = {std::move(k)};
    n.kids = {std::move(body)};
    return mk(std::move(n));
}

Term univ(ClockSet d) {
    Node n = node(K::Univ);
    n.d1 = make_clock_set(std::move(d));
    return mk(std::move(n));
}

Term el(ClockSet d, Term code) {
    Node n = node(K::El);
    n.d1 = make_clock_set(std::move(d));
    n.kids = {std::move(code)};
    return mk(std::move(n));
}

Term var(int i, std::string hint) {
    Node n = node(K::Var);
    n.ix = i;
    n.names = {std::move(hint)};
    return mk(std::move(n));
}

Term global(std::string name, std::vector<int> ambient_args) {
    Node n = node(K::Global);
    n.gname = std::move(name);
    n.d1 = std::move(ambient_args);
    return mk(std::move(n));
}

Term zero() { return mk(node(K::Zero)); }

Term suc(Term t) {
    Node n = node(K::Suc);
    n.kids = {std::move(t)};
    return mk(std::move(n));
}

Term numeral(unsigned k) {
    Term t = zero();
    for (unsigned i = 0; i < k; ++i) t = suc(t);
    return t;
}

Term natrec(std::string x, Term motive, Term z, std::string nn, std::string ih, Term s, Term t) {
    Node n = node(K::NatRec);
    n.names = {std::move(x), std::move(nn), std::move(ih)};
    n.kids = {std::move(motive), std::move(z), std::move(s), std::move(t)};
    return mk(std::move(n));
}

Term lam(std::string x, Term a, Term b, Term body) {
    Node n = node(K::Lam);
    n.names = {std::move(x)};
    n.kids = {std::move(a), std::move(b), std::move(body)};
    return mk(std::move(n));
}

Term app(std::string x, Term a, Term b, Term f, Term u) {
    Node n = node(K::App);
    n.names = {std::move(x)};
    n.kids = {std::move(a), std::move(b), std::move(f), std::move(u)};
    return mk(std::move(n));
}

Term pair(std::string x, Term a, Term b, Term l, Term r) {
    Node n = node(K::Pair);
    n.names = {std::move(x)};
    n.kids = {std::move(a), std::move(b), std::move(l), std::move(r)};
    return mk(std::move(n));
}

Term fst(std::string x, Term a, Term b, Term t) {
    Node n = node(K::Fst);
    n.names = {std::move(x)};
    n.kids = {std::move(a), std::move(b), std::move(t)};
    return mk(std::move(n));
}

Term snd(std::string x, Term a, Term b, Term t) {
    Node n = node(K::Snd);
    n.names = {std::move(x)};
    n.kids = {std::move(a), std::move(b), std::move(t)};
    return mk(std::move(n));
}

Term refl(Term a, Term t) {
    Node n = node(K::Refl);
    n.kids = {std::move(a), std::move(t)};
    return mk(std::move(n));
}

Term jelim(std::vector<std::string> names, Term a, Term motive, Term d, Term l, Term r, Term e) {
    Node n = node(K::J);
    n.names = std::move(names);
    n.kids = {std::move(a), std::move(motive), std::move(d), std::move(l), std::move(r), std::move(e)};
    return mk(std::move(n));
}

Term clk_lam(std::string k, Term a, Term body) {
    Node n = node(K::ClkLam);
    n.names = {std::move(k)};
    n.kids = {std::move(a), std::move(body)};
    return mk(std::move(n));
}

Term clk_app(std::string k, Term a, Term t, int clock) {
    Node n = node(K::ClkApp);
    n.names = {std::move(k)};
    n.ix = clock;
    n.kids = {std::move(a), std::move(t)};
    return mk(std::move(n));
}

Term tick_lam(std::string a, int clock, Term ty, Term body) {
    Node n = node(K::TickLam);
    n.names = {std::move(a)};
    n.ix = clock;
    n.kids = {std::move(ty), std::move(body)};
    return mk(std::move(n));
}

Term tick_app(std::string a, int clock, Term ty, Term t, int tick) {
    Node n = node(K::TickApp);
    n.names = {std::move(a)};
    n.ix = clock;
    n.ix2 = tick;
    n.kids = {std::move(ty), std::move(t)};
    return mk(std::move(n));
}

Term dia_app(std::string k, std::string a, Term ty, Term t, int clock) {
    Node n = node(K::DiaApp);
    n.names = {std::move(k), std::move(a)};
    n.ix = clock;
    n.kids = {std::move(ty), std::move(t)};
    return mk(std::move(n));
}

Term dfix(Term a, int clock, Term t) {
    Node n = node(K::Dfix);
    n.ix = clock;
    n.kids = {std::move(a), std::move(t)};
    return mk(std::move(n));
}

Term cirr(std::string k, Term a, Term t) {
    Node n = node(K::Cirr);
    n.names = {std::move(k)};
    n.kids = {std::move(a), std::move(t)};
    return mk(std::move(n));
}

Term tirr(Term a, int clock, Term t) {
    Node n = node(K::Tirr);
    n.ix = clock;
    n.kids = {std::move(a), std::move(t)};
    return mk(std::move(n));
}

Term pfix(Term a, int clock, Term t) {
    Node n = node(K::Pfix);
    n.ix = clock;
    n.kids = {std::move(a), std::move(t)};
    return mk(std::move(n));
}

Term code_nat(ClockSet d) {
    Node n = node(K::CodeNat);
    n.d1 = make_clock_set(std::move(d));
    return mk(std::move(n));
}

Term code_pi(ClockSet d, std::string x, Term a, Term b) {
    Node n = node(K::CodePi);
    n.d1 = make_clock_set(std::move(d));
    n.names = {std::move(x)};
    n.kids = {std::move(a), std::move(b)};
    return mk(std::move(n));
}

Term code_sigma(ClockSet d, std::string x, Term a, Term b) {
    Node n = node(K::CodeSigma);
    n.d1 = make_clock_set(std::move(d));
    n.names = {std::move(x)};
    n.kids = {std::move(a), std::move(b)};
    return mk(std::move(n));
}

Term code_forall(ClockSet d, std::string k, Term a) {
    Node n = node(K::CodeForall);
    n.d1 = make_clock_set(std::move(d));
    n.names = {std::move(k)};
    n.kids = {std::move(a)};
    return mk(std::move(n));
}

Term code_later(ClockSet d, std::string a, int clock, Term body) {
    Node n = node(K::CodeLater);
    n.d1 = make_clock_set(std::move(d));
    n.names = {std::move(a)};
    n.ix = clock;
    n.kids = {std::move(body)};
    return mk(std::move(n));
}

Term incl(ClockSet from, ClockSet to, Term t) {
    Node n = node(K::Incl);
    n.d1 = make_clock_set(std::move(from));
    n.d2 = make_clock_set(std::move(to));
    n.kids = {std::move(t)};
    return mk(std::move(n));
}

// Contexts

const Entry& Context::at_index(int i) const {
    if (i < 0 || static_cast<std::size_t>(i) >= entries.size())
        throw ScopeError("index " + std::to_string(i) + " out of scope");
    return entries[entries.size() - 1 - static_cast<std::size_t>(i)];
}

Term Context::type_of(int i) const {
    const Entry& e = at_index(i);
    if (e.kind != EntryKind::Var) throw ScopeError("'" + e.name + "' is not a term variable");
    return shift(e.type, i + 1);
}

int Context::tick_clock(int i) const {
    const Entry& e = at_index(i);
    if (e.kind != EntryKind::Tick) throw ScopeError("'" + e.name + "' is not a tick");
    return e.clock + i + 1;
}

Context Context::prefix(std::size_t len) const {
    Context c;
    c.entries.assign(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(len));
    return c;
}

Context Context::push_var(std::string x, Term a) const {
    Context c = *this;
    c.entries.push_back({EntryKind::Var, std::move(x), std::move(a), -1});
    return c;
}

Context Context::push_clock(std::string k) const {
    Context c = *this;
    c.entries.push_back({EntryKind::Clock, std::move(k), nullptr, -1});
    return c;
}

Context Context::push_tick(std::string a, int clock) const {
    Context c = *this;
    c.entries.push_back({EntryKind::Tick, std::move(a), nullptr, clock});
    return c;
}

std::vector<std::string> Context::names() const {
    std::vector<std::string> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.name);
    return out;
}

}  // namespace clott
