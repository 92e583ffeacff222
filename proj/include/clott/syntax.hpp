#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace clott {

// Node kinds. Types and terms share one node representation; the kind fixes the sort.
enum class K : std::uint8_t {
    // types
    Nat, Pi, Sigma, Id, Later, Forall, Univ, El,
    // terms
    Var, Global, Zero, Suc, NatRec, Lam, App, Pair, Fst, Snd, Refl, J,
    ClkLam, ClkApp, TickLam, TickApp, DiaApp, Dfix, Cirr, Tirr, Pfix,
    // universe codes
    CodeNat, CodePi, CodeSigma, CodeForall, CodeLater, Incl,
};

const char* kind_name(K k);
bool is_type_kind(K k);
bool is_code_kind(K k);

// Finite set of clock references (de Bruijn indices), kept sorted and duplicate free.
using ClockSet = std::vector<int>;
ClockSet make_clock_set(std::vector<int> xs);
bool clock_subset(const ClockSet& a, const ClockSet& b);

struct Node;
using Term = std::shared_ptr<const Node>;
using TermAst = Term;
using TypeAst = Term;

// Field usage per kind (children listed with the number of binders they sit under):
//   Pi/Sigma          names[0]=x            kids A(0) B(1)
//   Id                                      kids A(0) t(0) u(0)
//   Later             names[0]=a  ix=clock  kids A(1 tick)
//   Forall            names[0]=k            kids A(1 clock)
//   Univ              d1
//   El                d1                    kids t(0)
//   Var               ix, names[0] = hint
//   Global            gname, d1 = clock arguments for the ambient clocks (ordered, not a set)
//   Suc                                     kids t
//   NatRec            names x; n ih         kids P(1) z(0) s(2) t(0)
//   Lam               names[0]=x            kids A(0) B(1) body(1)
//   App               names[0]=x            kids A(0) B(1) f(0) u(0)
//   Pair              names[0]=x            kids A(0) B(1) a(0) b(0)
//   Fst/Snd           names[0]=x            kids A(0) B(1) t(0)
//   Refl                                    kids A(0) t(0)
//   J                 names x y p; z        kids A(0) P(3) d(1) a(0) b(0) e(0)
//   ClkLam            names[0]=k            kids A(1) body(1)
//   ClkApp            names[0]=k  ix=clock  kids A(1) t(0)
//   TickLam           names[0]=a  ix=clock  kids A(1) body(1)
//   TickApp           names[0]=a  ix=clock of annotation, ix2=tick   kids A(1) t(0)
//   DiaApp            names k a   ix=clock argument                  kids A(2: clock, tick) t(1: clock)
//   Dfix              ix=clock              kids A(0) t(0)
//   Cirr              names[0]=k            kids A(0) t(0)
//   Tirr/Pfix         ix=clock              kids A(0) t(0)
//   CodeNat           d1
//   CodePi/CodeSigma  d1 names[0]=x         kids A(0) B(1)
//   CodeForall        d1 names[0]=k         kids A(1 clock)
//   CodeLater         d1 names[0]=a ix=clock kids A(1 tick)
//   Incl              d1 d2                 kids t(0)
// The operand of TickApp and its annotation are stored relative to the full context
// at the application site; they only reference entries before the tick.
struct Node {
    K kind;
    int ix = -1;
    int ix2 = -1;
    std::string gname;
    std::vector<std::string> names;
    ClockSet d1, d2;
    std::vector<Term> kids;

    const Term& kid(std::size_t i) const { return kids.at(i); }
    const std::string& name(std::size_t i = 0) const;
};

// Number of binders child i of a node of kind k lives under, and the sort of each.
enum class Bind : std::uint8_t { Var, Clock, Tick };
std::vector<Bind> child_binders(K k, std::size_t child);

struct ScopeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Constructors.
Term mk(Node n);
Term nat_ty();
Term pi(std::string x, Term a, Term b);
Term sigma(std::string x, Term a, Term b);
Term arrow(Term a, Term b);      // non-dependent Pi, b given in the outer context
Term product(Term a, Term b);    // non-dependent Sigma
Term id_ty(Term a, Term t, Term u);
Term later(std::string a, int clock, Term body);
Term later_nd(int clock, Term body);   // body given in the outer context
Term forall_ty(std::string k, Term body);
Term univ(ClockSet d);
Term el(ClockSet d, Term code);

Term var(int i, std::string hint = "");
Term global(std::string name, std::vector<int> ambient_args);
Term zero();
Term suc(Term t);
Term numeral(unsigned n);
Term natrec(std::string x, Term motive, Term z, std::string n, std::string ih, Term s, Term t);
Term lam(std::string x, Term a, Term b, Term body);
Term app(std::string x, Term a, Term b, Term f, Term u);
Term pair(std::string x, Term a, Term b, Term l, Term r);
Term fst(std::string x, Term a, Term b, Term t);
Term snd(std::string x, Term a, Term b, Term t);
Term refl(Term a, Term t);
Term jelim(std::vector<std::string> names, Term a, Term motive, Term d, Term l, Term r, Term e);
Term clk_lam(std::string k, Term a, Term body);
Term clk_app(std::string k, Term a, Term t, int clock);
Term tick_lam(std::string a, int clock, Term ty, Term body);
Term tick_app(std::string a, int clock, Term ty, Term t, int tick);
Term dia_app(std::string k, std::string a, Term ty, Term t, int clock);
Term dfix(Term a, int clock, Term t);
Term cirr(std::string k, Term a, Term t);
Term tirr(Term a, int clock, Term t);
Term pfix(Term a, int clock, Term t);
Term code_nat(ClockSet d);
Term code_pi(ClockSet d, std::string x, Term a, Term b);
Term code_sigma(ClockSet d, std::string x, Term a, Term b);
Term code_forall(ClockSet d, std::string k, Term a);
Term code_later(ClockSet d, std::string a, int clock, Term body);
Term incl(ClockSet from, ClockSet to, Term t);

// Index mapping. A Mapper receives free references as indices relative to the
// context outside the traversed term (depth already subtracted) and answers with
// references relative to the output context, again without depth.
struct Mapper {
    virtual ~Mapper() = default;
    virtual Term var(int j, int depth, const Node& site) = 0;   // result is valid at depth
    virtual int clock(int j) = 0;
    virtual int tick(int j) = 0;
    // Chance to rewrite a TickApp whose tick is free; nullptr means default handling.
    virtual Term tick_app(const Node&, int /*depth*/) { return nullptr; }
};
Term map_term(const Term& t, Mapper& m, int depth = 0);

// Weakening: free indices >= cutoff move up by n.
Term shift(const Term& t, int n, int cutoff = 0);
// Strengthening: free indices >= cutoff+n move down by n; references into the
// dropped range [cutoff, cutoff+n) raise ScopeError.
Term unshift(const Term& t, int n, int cutoff = 0);
bool mentions(const Term& t, int j);   // free reference to index j (any sort)

bool alpha_eq(const Term& a, const Term& b);
// Structural equality that skips the typing annotations carried by eliminators and intros.
bool erased_eq(const Term& a, const Term& b);
ClockSet free_clocks(const Term& t);

// Contexts.
enum class EntryKind : std::uint8_t { Var, Clock, Tick };
struct Entry {
    EntryKind kind;
    std::string name;
    Term type;        // Var: relative to the prefix before the entry
    int clock = -1;   // Tick: clock index relative to the prefix before the entry
};

struct Context {
    std::vector<Entry> entries;

    std::size_t size() const { return entries.size(); }
    const Entry& at_index(int i) const;           // de Bruijn index
    Term type_of(int i) const;                    // weakened to the full context
    int tick_clock(int i) const;                  // clock of tick i, relative to the full context
    Context prefix(std::size_t len) const;
    Context push_var(std::string x, Term a) const;
    Context push_clock(std::string k) const;
    Context push_tick(std::string a, int clock) const;
    std::vector<std::string> names() const;
};

}  // namespace clott
