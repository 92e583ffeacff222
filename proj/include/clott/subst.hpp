#pragma once

#include "clott/syntax.hpp"

namespace clott {

// Telescopic substitution sigma : Gamma -> Gamma'. One entry per codomain position
// (oldest first). Each payload lives in the domain prefix of length `dlen`; applying
// the substitution in the full domain weakens it by dom_len - dlen.
struct SubstEntry {
    enum Kind : std::uint8_t {
        Keep,           // identity on domain position dlen-1 (any sort)
        Term,           // x |-> term
        Clock,          // k |-> clock (index in the prefix)
        Tick,           // a |-> b, where b is domain position dlen-1
        DiamondClock,   // first half of (a:k) |-> (<>:k'); clock = k'
        DiamondTick,    // second half; always follows DiamondClock
    };
    Kind kind;
    clott::Term term;
    int clock = -1;
    int dlen = 0;
};

struct Subst {
    int dom_len = 0;
    std::vector<SubstEntry> entries;

    int cod_len() const { return static_cast<int>(entries.size()); }

    // Formers. Payloads are given relative to the current domain.
    Subst ext_var(clott::Term u) const;
    Subst ext_clock(int c) const;
    // Maps the next codomain tick to the newest domain entry, which must be a tick.
    Subst ext_tick() const;
    Subst ext_diamond(int c) const;
    // Identity on one more entry: the domain and the codomain both grow by one.
    Subst lift() const;
};

Subst empty_subst(int dom_len);
Subst identity_subst(int n);
// sigma composed with the projection Gamma, Gamma0 -> Gamma.
Subst weaken(const Subst& s, int extra);
// Composition by action: (sigma o tau) with tau : Gamma2 -> Gamma3, sigma : Gamma1 -> Gamma2.
// Tick entries of tau must land on Keep or Tick entries of sigma.
Subst compose(const Subst& sigma, const Subst& tau);

Term subst(const Term& t, const Subst& s);
inline Term subst_term(const Term& t, const Subst& s) { return subst(t, s); }
inline Term subst_type(const Term& t, const Subst& s) { return subst(t, s); }

// Single substitutions for the innermost binder of the given sort.
Term inst_var(const Term& body, const Term& u);        // body[u/x]
Term inst_var2(const Term& body, const Term& u1, const Term& u0);  // two innermost vars
Term inst_var3(const Term& body, const Term& u2, const Term& u1, const Term& u0);
Term inst_clock(const Term& body, int c);              // body[c/k], c in the outer context
Term inst_tick(const Term& body, int b);               // body[b/a], b in the outer context
// body lives under (k : clock, a : k); the result replaces a by <> and k by c.
Term inst_diamond(const Term& body, int c);

// Replace clock c (relative to the context below t's own `binders` innermost binders)
// by a new clock inserted just below those binders.
Term abstract_clock(const Term& t, int c, int binders = 0);

}  // namespace clott
