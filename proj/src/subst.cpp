#include "clott/subst.hpp"

namespace clott {

Subst Subst::ext_var(clott::Term u) const {
    Subst r = *this;
    r.entries.push_back({SubstEntry::Term, std::move(u), -1, dom_len});
    return r;
}

Subst Subst::ext_clock(int c) const {
    Subst r = *this;
    r.entries.push_back({SubstEntry::Clock, nullptr, c, dom_len});
    return r;
}

Subst Subst::ext_tick() const {
    if (dom_len == 0) throw ScopeError("tick substitution needs a domain tick");
    Subst r = *this;
    r.entries.push_back({SubstEntry::Tick, nullptr, -1, dom_len});
    return r;
}

Subst Subst::ext_diamond(int c) const {
    Subst r = *this;
    r.entries.push_back({SubstEntry::DiamondClock, nullptr, c, dom_len});
    r.entries.push_back({SubstEntry::DiamondTick, nullptr, -1, dom_len});
    return r;
}

Subst Subst::lift() const {
    Subst r = *this;
    r.dom_len += 1;
    r.entries.push_back({SubstEntry::Keep, nullptr, -1, r.dom_len});
    return r;
}

Subst empty_subst(int dom_len) {
    Subst s;
    s.dom_len = dom_len;
    return s;
}

Subst identity_subst(int n) {
    Subst s;
    for (int i = 0; i < n; ++i) s = s.lift();
    return s;
}

Subst weaken(const Subst& s, int extra) {
    Subst r = s;
    r.dom_len += extra;
    return r;
}

namespace {

const SubstEntry& entry_for(const Subst& s, int m, int j) {
    if (j < 0 || j >= m) throw ScopeError("reference outside the substitution's codomain");
    return s.entries[static_cast<std::size_t>(m - 1 - j)];
}

// Clock reference j of the first m codomain entries, answered in a domain of length n.
int clock_image(const Subst& s, int m, int n, int j) {
    const SubstEntry& e = entry_for(s, m, j);
    switch (e.kind) {
    case SubstEntry::Keep: return n - e.dlen;
    case SubstEntry::Clock:
    case SubstEntry::DiamondClock: return e.clock + (n - e.dlen);
    default: throw ScopeError("clock reference mapped to a non-clock");
    }
}

struct SubstMapper : Mapper {
    const Subst& s;
    int m, n;
    SubstMapper(const Subst& s_, int m_, int n_) : s(s_), m(m_), n(n_) {}

    clott::Term var(int j, int depth, const Node& site) override {
        const SubstEntry& e = entry_for(s, m, j);
        if (e.kind == SubstEntry::Keep) {
            Node v = site;
            v.ix = n - e.dlen + depth;
            return mk(std::move(v));
        }
        if (e.kind == SubstEntry::Term) return shift(e.term, n - e.dlen + depth);
        throw ScopeError("variable mapped to a non-term");
    }
    int clock(int j) override { return clock_image(s, m, n, j); }
    int tick(int j) override {
        const SubstEntry& e = entry_for(s, m, j);
        if (e.kind == SubstEntry::Keep || e.kind == SubstEntry::Tick) return n - e.dlen;
        throw ScopeError("tick reference mapped to a non-tick");
    }
    // t[a] with a |-> (<> : k') becomes an application to the tick constant with an
    // explicit clock binder; the operand is strengthened to the prefix ending at k.
    clott::Term tick_app(const Node& site, int depth) override {
        int j = site.ix2 - depth;
        if (j >= m) throw ScopeError("tick outside the substitution's codomain");
        int p = m - 1 - j;
        const SubstEntry& e = s.entries[static_cast<std::size_t>(p)];
        if (e.kind != SubstEntry::DiamondTick) return nullptr;
        const SubstEntry& ck = s.entries[static_cast<std::size_t>(p - 1)];
        int d = ck.dlen;
        int drop = depth + (m - 1 - p) + 1;
        Subst pre;
        pre.dom_len = d;
        pre.entries.assign(s.entries.begin(), s.entries.begin() + (p - 1));
        pre = pre.lift();   // the bound clock
        clott::Term t = subst(unshift(site.kids[1], drop), pre);
        clott::Term a = subst(unshift(site.kids[0], drop, 1), pre.lift());
        int out = n + depth - d;
        return dia_app("k", site.name(0), shift(a, out, 2), shift(t, out, 1), ck.clock + (n - d) + depth);
    }
};

}  // namespace

Term subst(const Term& t, const Subst& s) {
    SubstMapper m(s, s.cod_len(), s.dom_len);
    return map_term(t, m);
}

Subst compose(const Subst& sigma, const Subst& tau) {
    if (tau.dom_len != sigma.cod_len()) throw ScopeError("composition of mismatched substitutions");
    Subst r;
    r.dom_len = sigma.dom_len;
    for (const SubstEntry& e : tau.entries) {
        int d = e.dlen;
        int dd = d == 0 ? 0 : sigma.entries[static_cast<std::size_t>(d - 1)].dlen;
        Subst pre;
        pre.dom_len = dd;
        pre.entries.assign(sigma.entries.begin(), sigma.entries.begin() + d);
        switch (e.kind) {
        case SubstEntry::Keep:
            r.entries.push_back(sigma.entries[static_cast<std::size_t>(d - 1)]);
            break;
        case SubstEntry::Term:
            r.entries.push_back({SubstEntry::Term, subst(e.term, pre), -1, dd});
            break;
        case SubstEntry::Clock:
        case SubstEntry::DiamondClock:
            r.entries.push_back({e.kind, nullptr, clock_image(pre, d, dd, e.clock), dd});
            break;
        case SubstEntry::Tick: {
            const SubstEntry& b = sigma.entries[static_cast<std::size_t>(d - 1)];
            if (b.kind != SubstEntry::Keep && b.kind != SubstEntry::Tick)
                throw ScopeError("composition sends a tick to the tick constant");
            r.entries.push_back({SubstEntry::Tick, nullptr, -1, b.dlen});
            break;
        }
        case SubstEntry::DiamondTick:
            r.entries.push_back({SubstEntry::DiamondTick, nullptr, -1, dd});
            break;
        }
    }
    return r;
}

namespace {

// Replaces the k innermost entries (all term variables) by us[0] (innermost) .. us[k-1].
struct InstVars : Mapper {
    const std::vector<Term>& us;
    int k;
    explicit InstVars(const std::vector<Term>& u) : us(u), k(static_cast<int>(u.size())) {}
    Term var(int j, int depth, const Node& site) override {
        if (j < k) return shift(us[static_cast<std::size_t>(j)], depth);
        Node v = site;
        v.ix = j - k + depth;
        return mk(std::move(v));
    }
    int clock(int j) override {
        if (j < k) throw ScopeError("term variable used as a clock");
        return j - k;
    }
    int tick(int j) override {
        if (j < k) throw ScopeError("term variable used as a tick");
        return j - k;
    }
};

struct InstOne : Mapper {
    Bind sort;
    int target;
    InstOne(Bind s, int t) : sort(s), target(t) {}
    Term var(int j, int depth, const Node& site) override {
        if (j == 0) throw ScopeError("binder of the wrong sort used as a variable");
        Node v = site;
        v.ix = j - 1 + depth;
        return mk(std::move(v));
    }
    int clock(int j) override {
        if (j == 0) {
            if (sort != Bind::Clock) throw ScopeError("binder of the wrong sort used as a clock");
            return target;
        }
        return j - 1;
    }
    int tick(int j) override {
        if (j == 0) {
            if (sort != Bind::Tick) throw ScopeError("binder of the wrong sort used as a tick");
            return target;
        }
        return j - 1;
    }
};

// Context ... , k : clock, a : k  ->  ... with k |-> c and a |-> <>.
struct InstDiamond : Mapper {
    int c;
    explicit InstDiamond(int c_) : c(c_) {}
    Term var(int j, int depth, const Node& site) override {
        if (j < 2) throw ScopeError("clock or tick used as a variable");
        Node v = site;
        v.ix = j - 2 + depth;
        return mk(std::move(v));
    }
    int clock(int j) override {
        if (j == 1) return c;
        if (j == 0) throw ScopeError("tick used as a clock");
        return j - 2;
    }
    int tick(int j) override {
        if (j < 2) throw ScopeError("the tick constant cannot be used here");
        return j - 2;
    }
    Term tick_app(const Node& site, int depth) override {
        if (site.ix2 - depth != 0) return nullptr;
        Term t = unshift(site.kids[1], depth + 1);
        Term a = unshift(site.kids[0], depth + 1, 1);
        return dia_app("k", site.name(0), shift(a, depth, 2), shift(t, depth, 1), c + depth);
    }
};

struct AbstractClock : Mapper {
    int c;
    explicit AbstractClock(int c_) : c(c_) {}
    Term var(int j, int depth, const Node& site) override {
        Node v = site;
        v.ix = j + 1 + depth;
        return mk(std::move(v));
    }
    int clock(int j) override { return j == c ? 0 : j + 1; }
    int tick(int j) override { return j + 1; }
};

}  // namespace

Term inst_var(const Term& body, const Term& u) {
    std::vector<Term> us{u};
    InstVars m(us);
    return map_term(body, m);
}

Term inst_var2(const Term& body, const Term& u1, const Term& u0) {
    std::vector<Term> us{u0, u1};
    InstVars m(us);
    return map_term(body, m);
}

Term inst_var3(const Term& body, const Term& u2, const Term& u1, const Term& u0) {
    std::vector<Term> us{u0, u1, u2};
    InstVars m(us);
    return map_term(body, m);
}

Term inst_clock(const Term& body, int c) {
    InstOne m(Bind::Clock, c);
    return map_term(body, m);
}

Term inst_tick(const Term& body, int b) {
    InstOne m(Bind::Tick, b);
    return map_term(body, m);
}

Term inst_diamond(const Term& body, int c) {
    InstDiamond m(c);
    return map_term(body, m);
}

Term abstract_clock(const Term& t, int c, int binders) {
    AbstractClock m(c);
    return map_term(t, m, binders);
}

}  // namespace clott
