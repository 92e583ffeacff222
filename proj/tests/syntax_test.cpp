#include <set>

#include "clott/pretty.hpp"
#include "clott/syntax.hpp"
#include "support.hpp"

using namespace clott;
using clott::test::load_corpus;

namespace {

// Renames every binder and variable hint, keeping the de Bruijn structure.
Term rename(const Term& t, const std::string& prefix, int& counter) {
    Node n = *t;
    for (auto& x : n.names) x = prefix + std::to_string(counter++);
    for (auto& k : n.kids) k = rename(k, prefix, counter);
    return mk(std::move(n));
}

Term rename(const Term& t, const std::string& prefix) {
    int c = 0;
    return rename(t, prefix, c);
}

// Every type and body in the corpus.
std::vector<Term> corpus_terms() {
    std::vector<Term> out;
    for (const auto& f : clott::test::corpus_files()) {
        FileResult r = load_corpus(f);
        for (const auto& name : r.prog.order) {
            out.push_back(r.prog.defs.at(name).type);
            out.push_back(r.prog.defs.at(name).body);
        }
    }
    return out;
}

}  // namespace

TEST(ClockSet, SortedAndDuplicateFree) {
    EXPECT_EQ(make_clock_set({3, 1, 3, 0}), (ClockSet{0, 1, 3}));
    EXPECT_TRUE(clock_subset({1}, {0, 1}));
    EXPECT_FALSE(clock_subset({2}, {0, 1}));
    EXPECT_TRUE(clock_subset({}, {}));
}

TEST(AlphaEq, IgnoresBinderNames) {
    Term a = lam("x", nat_ty(), nat_ty(), var(0, "x"));
    Term b = lam("y", nat_ty(), nat_ty(), var(0, "y"));
    EXPECT_TRUE(alpha_eq(a, b));
    EXPECT_FALSE(alpha_eq(a, lam("x", nat_ty(), nat_ty(), zero())));
}

TEST(AlphaEq, DistinguishesIndicesOfEachSort) {
    EXPECT_FALSE(alpha_eq(var(0), var(1)));
    EXPECT_FALSE(alpha_eq(later_nd(0, nat_ty()), later_nd(1, nat_ty())));
    EXPECT_FALSE(alpha_eq(univ({0}), univ({0, 1})));
    EXPECT_FALSE(alpha_eq(global("g", {0}), global("g", {1})));
}

TEST(AlphaEq, ErasedEqualitySkipsAnnotations) {
    Term f = var(0);
    Term a = app("x", nat_ty(), nat_ty(), f, zero());
    Term b = app("x", later_nd(0, nat_ty()), nat_ty(), f, zero());
    EXPECT_FALSE(alpha_eq(a, b));
    EXPECT_TRUE(erased_eq(a, b));
}

// Property: alpha_eq is an equivalence on the corpus and renaming stays inside a class.
TEST(AlphaEq, EquivalenceOnCorpusUnderRenaming) {
    for (const Term& t : corpus_terms()) {
        Term r1 = rename(t, "p");
        Term r2 = rename(r1, "q");
        EXPECT_TRUE(alpha_eq(t, t));
        EXPECT_TRUE(alpha_eq(t, r1));
        EXPECT_TRUE(alpha_eq(r1, t));
        EXPECT_TRUE(alpha_eq(r1, r2));
        EXPECT_TRUE(alpha_eq(t, r2));
    }
}

TEST(AlphaEq, DistinctCorpusTermsStayDistinct) {
    auto ts = corpus_terms();
    // Equal terms must at least agree on kind and free clocks.
    for (std::size_t i = 0; i < ts.size(); ++i)
        for (std::size_t j = i + 1; j < ts.size(); ++j)
            if (alpha_eq(ts[i], ts[j])) {
                EXPECT_EQ(ts[i]->kind, ts[j]->kind);
                EXPECT_EQ(free_clocks(ts[i]), free_clocks(ts[j]));
            }
}

TEST(FreeClocks, Examples) {
    // |>k Nat in a context where k is index 2
    EXPECT_EQ(free_clocks(later_nd(2, nat_ty())), (ClockSet{2}));
    // forall j. |>j Nat is closed
    EXPECT_TRUE(free_clocks(forall_ty("j", later_nd(0, nat_ty()))).empty());
    // forall j. |>k Nat with k at index 1 outside
    EXPECT_EQ(free_clocks(forall_ty("j", later_nd(2, nat_ty()))), (ClockSet{1}));
    EXPECT_EQ(free_clocks(univ({0, 3})), (ClockSet{0, 3}));
    EXPECT_EQ(free_clocks(global("g", {4, 2})), (ClockSet{2, 4}));
}

TEST(FreeClocks, InvariantUnderRenaming) {
    for (const Term& t : corpus_terms()) EXPECT_EQ(free_clocks(t), free_clocks(rename(t, "r")));
}

TEST(Shift, RoundTripsWithUnshift) {
    for (const Term& t : corpus_terms()) {
        for (int n : {1, 3}) {
            Term up = shift(t, n);
            EXPECT_TRUE(alpha_eq(unshift(up, n), t));
            for (int c : free_clocks(up)) EXPECT_GE(c, n);
        }
    }
}

TEST(Shift, UnshiftRejectsDroppedReferences) {
    EXPECT_THROW(unshift(var(0), 1), ScopeError);
    EXPECT_TRUE(alpha_eq(unshift(var(2), 1), var(1)));
    EXPECT_TRUE(alpha_eq(unshift(var(0), 1, 1), var(0)));
    EXPECT_THROW(unshift(later_nd(1, nat_ty()), 1, 1), ScopeError);
}

TEST(Shift, RespectsBinders) {
    Term t = lam("x", nat_ty(), nat_ty(), var(1));
    EXPECT_TRUE(alpha_eq(shift(t, 2), lam("x", nat_ty(), nat_ty(), var(3))));
    Term bound = lam("x", nat_ty(), nat_ty(), var(0));
    EXPECT_TRUE(alpha_eq(shift(bound, 2), bound));
}

TEST(Mentions, FindsFreeReferencesOnly) {
    Term t = lam("x", nat_ty(), nat_ty(), var(1));
    EXPECT_TRUE(mentions(t, 0));
    EXPECT_FALSE(mentions(t, 1));
    EXPECT_FALSE(mentions(lam("x", nat_ty(), nat_ty(), var(0)), 0));
}

TEST(Context, IndicesAndWeakening) {
    Context c = Context{}.push_clock("k").push_var("x", later_nd(0, nat_ty())).push_tick("a", 1);
    EXPECT_EQ(c.size(), 3u);
    EXPECT_EQ(c.at_index(0).kind, EntryKind::Tick);
    EXPECT_EQ(c.tick_clock(0), 2);
    EXPECT_TRUE(alpha_eq(c.type_of(1), later_nd(2, nat_ty())));
    EXPECT_EQ(c.names(), (std::vector<std::string>{"k", "x", "a"}));
    EXPECT_EQ(c.prefix(1).size(), 1u);
}

TEST(Pretty, UnicodeAndAscii) {
    Term t = forall_ty("k", later_nd(0, nat_ty()));
    EXPECT_EQ(pretty(t, {}), "∀k. ▷k Nat");
    EXPECT_EQ(pretty(t, {}, PrettyOptions{false, nullptr}), "forall k. |>k Nat");
}

TEST(Pretty, AvoidsCapture) {
    // \x. y where the free variable is also called x
    Term t = lam("x", nat_ty(), nat_ty(), var(1, "x"));
    std::string s = pretty(t, {"x"}, PrettyOptions{false, nullptr});
    EXPECT_NE(s, "\\x. x");
}

// Property: pretty, parse and elaborate, then pretty again gives the same text and an
// alpha-equal core term, for every corpus definition.
TEST(Pretty, ReparsesToSameCore) {
    for (const auto& f : clott::test::corpus_files()) {
        FileResult r = load_corpus(f);
        std::set<std::string> reserved(r.prog.order.begin(), r.prog.order.end());
        for (bool unicode : {true, false}) {
            PrettyOptions po{unicode, &reserved};
            for (const auto& name : r.prog.order) {
                const GlobalDef& d = r.prog.defs.at(name);
                std::vector<std::string> scope(r.prog.ambient.begin(), r.prog.ambient.begin() + d.ambient);
                Context ctx = r.prog.ambient_context(d.ambient);
                Elaborator el(r.prog);
                std::string ty1 = pretty(d.type, scope, po);
                Term ty = el.type(ctx, parse_expr(ty1));
                EXPECT_TRUE(alpha_eq(ty, d.type)) << f << ": " << name << " : " << ty1;
                EXPECT_EQ(pretty(ty, scope, po), ty1);
                std::string b1 = pretty(d.body, scope, po);
                Term body = el.check(ctx, parse_expr(b1), d.type);
                EXPECT_TRUE(alpha_eq(body, d.body)) << f << ": " << name << " := " << b1;
                EXPECT_EQ(pretty(body, scope, po), b1);
            }
        }
    }
}
