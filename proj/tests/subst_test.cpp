#include <random>

#include "clott/pretty.hpp"
#include "clott/subst.hpp"
#include "support.hpp"

using namespace clott;

namespace {

// Sort of a context entry; ticks remember their clock relative to the prefix.
struct Sort {
    EntryKind kind;
    int clock = -1;
};
using Sorts = std::vector<Sort>;

std::vector<int> indices_of(const Sorts& s, EntryKind k) {
    std::vector<int> out;
    int n = static_cast<int>(s.size());
    for (int i = 0; i < n; ++i)
        if (s[static_cast<std::size_t>(n - 1 - i)].kind == k) out.push_back(i);
    return out;
}

// Random well-scoped terms over a context of sorts. Typing is not respected; the
// substitution laws are syntactic.
class Gen {
public:
    explicit Gen(unsigned seed) : rng_(seed) {}

    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
    template <class T>
    T pick(const std::vector<T>& xs) {
        return xs[static_cast<std::size_t>(pick(static_cast<int>(xs.size())))];
    }

    Term term(const Sorts& s, int depth) {
        auto vars = indices_of(s, EntryKind::Var);
        auto clocks = indices_of(s, EntryKind::Clock);
        auto ticks = indices_of(s, EntryKind::Tick);
        int choice = depth <= 0 ? pick(2) : pick(12);
        switch (choice) {
        case 0: return zero();
        case 1: return vars.empty() ? numeral(2) : var(pick(vars));
        case 2: return suc(term(s, depth - 1));
        case 3: {
            Sorts s2 = s;
            s2.push_back({EntryKind::Var});
            return lam("x", nat_ty(), nat_ty(), term(s2, depth - 1));
        }
        case 4: {
            if (clocks.empty()) break;
            int c = pick(clocks);
            Sorts s2 = s;
            s2.push_back({EntryKind::Tick, c});
            return tick_lam("a", c, nat_ty(), term(s2, depth - 1));
        }
        case 5: {
            Sorts s2 = s;
            s2.push_back({EntryKind::Clock});
            return clk_lam("j", later_nd(0, nat_ty()), term(s2, depth - 1));
        }
        case 6:
            if (clocks.empty()) break;
            return clk_app("j", nat_ty(), term(s, depth - 1), pick(clocks));
        case 7: {
            if (ticks.empty()) break;
            int t = pick(ticks);
            int n = static_cast<int>(s.size());
            const Sort& tick = s[static_cast<std::size_t>(n - 1 - t)];
            Sorts before(s.begin(), s.begin() + (n - 1 - t));
            Term operand = shift(term(before, depth - 1), t + 1);
            return tick_app("b", tick.clock + t + 1, nat_ty(), operand, t);
        }
        case 8:
            return pair("x", nat_ty(), nat_ty(), term(s, depth - 1), term(s, depth - 1));
        case 9:
            if (clocks.empty()) break;
            return global("g", {pick(clocks), pick(clocks)});
        case 10:
            if (clocks.empty()) break;
            return el(make_clock_set({pick(clocks)}), code_later(make_clock_set({pick(clocks)}), "a", pick(clocks),
                                                                 code_nat({})));
        case 11:
            if (clocks.empty()) break;
            return forall_ty("j", later_nd(1 + pick(clocks), nat_ty()));
        }
        return zero();
    }

    Sorts base(int n) {
        Sorts s;
        for (int i = 0; i < n; ++i) s.push_back({pick(2) ? EntryKind::Var : EntryKind::Clock});
        return s;
    }

    // A context extending base with vars, clocks and ticks on earlier clocks.
    Sorts context(int n) {
        Sorts s = base(1);
        s.push_back({EntryKind::Clock});
        while (static_cast<int>(s.size()) < n) {
            auto clocks = indices_of(s, EntryKind::Clock);
            int r = pick(3);
            if (r == 0) s.push_back({EntryKind::Var});
            else if (r == 1) s.push_back({EntryKind::Clock});
            else s.push_back({EntryKind::Tick, pick(clocks)});
        }
        return s;
    }

    // A substitution with codomain `cod`, built from a random base domain by the
    // term, clock and identity formers. `dom` receives the domain sorts.
    Subst subst_into(const Sorts& cod, Sorts& dom) {
        dom = base(1 + pick(3));
        Subst s = empty_subst(static_cast<int>(dom.size()));
        for (std::size_t i = 0; i < cod.size(); ++i) {
            const Sort& e = cod[i];
            auto clocks = indices_of(dom, EntryKind::Clock);
            if (e.kind == EntryKind::Var && pick(2)) {
                s = s.ext_var(term(dom, 2));
            } else if (e.kind == EntryKind::Clock && !clocks.empty() && pick(2)) {
                s = s.ext_clock(pick(clocks));
            } else {
                Sort d = e;
                if (e.kind == EntryKind::Tick) {
                    // the image of the tick's clock in the current domain
                    Subst pre = s;
                    Term probe = subst(later_nd(e.clock, nat_ty()), pre);
                    d.clock = probe->ix;
                }
                s = s.lift();
                dom.push_back(d);
            }
        }
        return s;
    }

private:
    std::mt19937 rng_;
};

// Free occurrences of variable j.
int free_uses(const Term& t, int j) {
    struct Count : Mapper {
        int j, n = 0;
        explicit Count(int j_) : j(j_) {}
        Term var(int i, int depth, const Node& site) override {
            if (i == j) ++n;
            Node v = site;
            v.ix = i + depth;
            return mk(std::move(v));
        }
        int clock(int i) override { return i; }
        int tick(int i) override { return i; }
    } c(j);
    map_term(t, c);
    return c.n;
}

}  // namespace

TEST(Subst, IdentityLawOnCorpus) {
    for (const auto& f : clott::test::corpus_files()) {
        FileResult r = clott::test::load_corpus(f);
        for (const auto& name : r.prog.order) {
            const GlobalDef& d = r.prog.defs.at(name);
            Subst id = identity_subst(d.ambient);
            EXPECT_TRUE(alpha_eq(subst(d.body, id), d.body)) << name;
            EXPECT_TRUE(alpha_eq(subst(d.type, id), d.type)) << name;
        }
    }
}

TEST(Subst, IdentityAndWeakeningOnRandomTerms) {
    Gen g(7);
    for (int i = 0; i < 300; ++i) {
        Sorts s = g.context(2 + g.pick(5));
        Term t = g.term(s, 4);
        int n = static_cast<int>(s.size());
        EXPECT_TRUE(alpha_eq(subst(t, identity_subst(n)), t));
        EXPECT_TRUE(alpha_eq(subst(t, weaken(identity_subst(n), 2)), shift(t, 2)));
    }
}

// Property: substituting along tau then sigma is substituting along their composite.
TEST(Subst, ActionIsCompatibleWithComposition) {
    Gen g(11);
    int checked = 0;
    for (int i = 0; i < 400; ++i) {
        Sorts c3 = g.context(2 + g.pick(5));
        Sorts c2, c1;
        Subst tau = g.subst_into(c3, c2);
        Subst sigma = g.subst_into(c2, c1);
        Term t = g.term(c3, 4);
        Term lhs = subst(subst(t, tau), sigma);
        Term rhs = subst(t, compose(sigma, tau));
        EXPECT_TRUE(alpha_eq(lhs, rhs)) << pretty(t, {}) << "\n  " << pretty(lhs, {}) << "\n  " << pretty(rhs, {});
        ++checked;
    }
    EXPECT_EQ(checked, 400);
}

TEST(Subst, SingleSubstitutions) {
    // (\y. x y-free) [suc 0 / x]: x is index 1 under the binder
    Term body = lam("y", nat_ty(), nat_ty(), var(1, "x"));
    EXPECT_TRUE(alpha_eq(inst_var(body, suc(zero())), lam("y", nat_ty(), nat_ty(), suc(zero()))));
    // clock instantiation: |>k Nat with k innermost, replaced by outer clock 3
    EXPECT_TRUE(alpha_eq(inst_clock(later_nd(0, nat_ty()), 3), later_nd(3, nat_ty())));
    // tick renaming: outer k, x : |>k Nat, b : k; body x [a] under a : k
    Term ta = tick_app("c", 3, nat_ty(), var(2), 0);
    EXPECT_TRUE(alpha_eq(inst_tick(ta, 0), tick_app("c", 2, nat_ty(), var(1), 0)));
    EXPECT_TRUE(alpha_eq(inst_var2(pair("_", nat_ty(), nat_ty(), var(1), var(0)), numeral(1), numeral(2)),
                         pair("_", nat_ty(), nat_ty(), numeral(1), numeral(2))));
}

// Bound names never capture free names of the substituted term: the binder is
// renamed when printed, and the de Bruijn structure keeps the reference outside.
TEST(Subst, CaptureFreedom) {
    Term body = lam("x", nat_ty(), nat_ty(), pair("_", nat_ty(), nat_ty(), var(0, "x"), var(1, "y")));
    Term out = inst_var(body, var(0, "x"));
    Term want = lam("x", nat_ty(), nat_ty(), pair("_", nat_ty(), nat_ty(), var(0, "x"), var(1, "x")));
    EXPECT_TRUE(alpha_eq(out, want));
    std::string s = pretty(out, {"x"}, PrettyOptions{false, nullptr});
    EXPECT_EQ(s.find("\\x. (x, x)"), std::string::npos) << s;
    // Clash-prone random instances: binders and the substituted variable share a name.
    // Codomain x : Nat, k : clock; domain y : Nat, k : clock with y printed as x.
    Gen g(5);
    for (int i = 0; i < 200; ++i) {
        Sorts cod{{EntryKind::Var}, {EntryKind::Clock}};
        Term t = g.term(cod, 4);
        Subst s2 = empty_subst(2).ext_var(var(1, "x")).ext_clock(0);
        Term r = subst(t, s2);
        EXPECT_EQ(free_uses(r, 1), free_uses(t, 1));
        EXPECT_EQ(free_uses(r, 0), 0);
    }
}
// The clauses for replacing a tick by the tick constant. The body lives under
// (k : clock, a : k) on top of the outer context  k'' , k' , x : forall j. |>j Nat , a'' : k''.
// Body indices: a=0 k=1 a''=2 x=3 k'=4 k''=5. Outer indices: a''=0 x=1 k'=2 k''=3.
class TickConstant : public ::testing::Test {
protected:
    static constexpr int kp = 2;   // k' in the outer context
    Term nat = nat_ty();
    Term go(const Term& body) { return inst_diamond(body, kp); }
};

TEST_F(TickConstant, ClockLambda) {
    Term body = clk_lam("j", later("b", 2, nat), tick_lam("b", 2, nat, zero()));
    EXPECT_TRUE(alpha_eq(go(body), clk_lam("j", later("b", 3, nat), tick_lam("b", 3, nat, zero()))));
}

TEST_F(TickConstant, ClockApplicationAtBoundClock) {
    Term body = clk_app("j", later_nd(0, nat), var(3), 1);
    EXPECT_TRUE(alpha_eq(go(body), clk_app("j", later_nd(0, nat), var(1), 2)));
}

TEST_F(TickConstant, ClockApplicationAtOtherClock) {
    Term body = clk_app("j", later_nd(0, nat), var(3), 5);
    EXPECT_TRUE(alpha_eq(go(body), clk_app("j", later_nd(0, nat), var(1), 3)));
}

TEST_F(TickConstant, TickLambdaOnBoundClock) {
    EXPECT_TRUE(alpha_eq(go(tick_lam("b", 1, nat, zero())), tick_lam("b", 2, nat, zero())));
}

TEST_F(TickConstant, TickLambdaOnOtherClock) {
    EXPECT_TRUE(alpha_eq(go(tick_lam("b", 5, nat, zero())), tick_lam("b", 3, nat, zero())));
}

TEST_F(TickConstant, TickApplicationAtReplacedTick) {
    // (x [k]) [a]  becomes  (x [k]) applied to the tick constant, with k bound and set to k'
    Term operand = clk_app("j", later_nd(0, nat), var(3), 1);
    Term body = tick_app("b", 1, nat, operand, 0);
    Term want = dia_app("k", "b", nat, clk_app("j", later_nd(0, nat), var(2), 0), 2);
    EXPECT_TRUE(alpha_eq(go(body), want)) << pretty(go(body), {"k''", "k'", "x", "a''"});
}

TEST_F(TickConstant, TickApplicationAtOtherTickSameClock) {
    EXPECT_TRUE(alpha_eq(go(tick_app("b", 1, nat, var(3), 2)), tick_app("b", 2, nat, var(1), 0)));
}

TEST_F(TickConstant, TickApplicationAtOtherTickOtherClock) {
    EXPECT_TRUE(alpha_eq(go(tick_app("b", 5, nat, var(3), 2)), tick_app("b", 3, nat, var(1), 0)));
}

TEST_F(TickConstant, DiamondApplicationAtBoundClock) {
    EXPECT_TRUE(alpha_eq(go(dia_app("j", "b", nat, var(4), 1)), dia_app("j", "b", nat, var(2), 2)));
}

TEST_F(TickConstant, DiamondApplicationAtOtherClock) {
    EXPECT_TRUE(alpha_eq(go(dia_app("j", "b", nat, var(4), 5)), dia_app("j", "b", nat, var(2), 3)));
}

// On types the substitution distributes; universes replace the bound clock.
TEST_F(TickConstant, TypesAndUniverses) {
    EXPECT_TRUE(alpha_eq(go(later("b", 1, nat)), later("b", 2, nat)));
    EXPECT_TRUE(alpha_eq(go(univ({1, 5})), univ({2, 3})));
    EXPECT_TRUE(alpha_eq(go(code_later({1}, "b", 1, code_nat({2}))), code_later({2}, "b", 2, code_nat({3}))));
}

TEST(Subst, DiamondFormerMatchesInstDiamond) {
    // body under (k, a); substitution: identity on the outer 4 entries, then (a:k) |-> (<> : k')
    Term operand = clk_app("j", later_nd(0, nat_ty()), var(3), 1);
    Term body = tick_app("b", 1, nat_ty(), operand, 0);
    Subst s = identity_subst(4).ext_diamond(2);
    EXPECT_TRUE(alpha_eq(subst(body, s), inst_diamond(body, 2)));
}
