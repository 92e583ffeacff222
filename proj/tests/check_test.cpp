#include <filesystem>

#include "clott/check.hpp"
#include "clott/pretty.hpp"
#include "support.hpp"

using namespace clott;
using clott::test::infer_in;
using clott::test::load_corpus;
using clott::test::type_in;

namespace {

// Line of the `-- ERROR` marker in a negative file.
int marked_line(const std::string& src) {
    std::istringstream in(src);
    std::string line;
    for (int n = 1; std::getline(in, line); ++n)
        if (line.find("-- ERROR") != std::string::npos) return n;
    return -1;
}

// Terms that must all be convertible with each other: a global, its body, and the
// body's weak head and full normal forms.
std::vector<Term> class_of(const Checker& ch, const GlobalDef& d) {
    int fuel = ch.fuel();
    return {global(d.name, Program::ambient_args(d.ambient, d.ambient)), d.body, ch.whnf(d.body),
            ch.normalize(d.body, fuel)};
}

}  // namespace

TEST(Check, CorpusFilesPass) {
    for (const auto& f : clott::test::corpus_files()) {
        FileResult r = load_corpus(f);
        EXPECT_TRUE(r.ok()) << f;
        for (const auto& d : r.decls) EXPECT_TRUE(d.ok) << f << ": " << d.name << ": " << d.message;
    }
}

TEST(Check, NegativesFailAtTheirMarkedLine) {
    int seen = 0;
    for (const auto& e : std::filesystem::directory_iterator(clott::test::corpus_path("negative"))) {
        std::string src = clott::test::read_text(e.path().string());
        int want = marked_line(src);
        ASSERT_GT(want, 0) << e.path();
        FileResult r = check_source(src);
        EXPECT_FALSE(r.ok()) << e.path();
        int line = -1;
        if (!r.parse_ok) {
            line = r.parse_span.line;
        } else {
            for (const auto& d : r.decls)
                if (!d.ok) {
                    line = d.error_span.line > 0 ? d.error_span.line : d.span.line;
                    break;
                }
        }
        EXPECT_EQ(line, want) << e.path();
        ++seen;
    }
    EXPECT_GE(seen, 8);
}

TEST(Check, DoubleTickCitesSecondUse) {
    std::string src = clott::test::read_text(clott::test::corpus_path("negative/double_tick.clott"));
    FileResult r = check_source(src);
    ASSERT_FALSE(r.ok());
    const DeclReport* bad = nullptr;
    for (const auto& d : r.decls)
        if (!d.ok) bad = &d;
    ASSERT_NE(bad, nullptr);
    // the second [a] is the later of the two occurrences on the line
    std::string line = src.substr(src.find("bad :"));
    line = line.substr(0, line.find('\n'));
    int second = static_cast<int>(line.rfind("[a]")) + 1;
    int first = static_cast<int>(line.find("[a]")) + 1;
    EXPECT_NE(first, second);
    // reported where the name stops resolving, citing the enclosing application
    EXPECT_EQ(bad->error_span.col, first);
    EXPECT_NE(bad->message.find("tick 'a'"), std::string::npos);
    std::string at = std::to_string(bad->span.line) + ":" + std::to_string(second);
    EXPECT_NE(bad->message.find(at), std::string::npos) << bad->message;
}

TEST(Check, DiamondOnContextClockIsRejected) {
    FileResult r = check_source(clott::test::read_text(clott::test::corpus_path("negative/diamond_escape.clott")));
    ASSERT_FALSE(r.ok());
    bool found = false;
    for (const auto& d : r.decls)
        if (!d.ok) found = d.message.find("⋄") != std::string::npos;
    EXPECT_TRUE(found);
}

// Guarded streams unfold: Str k and Nat * |>(a : k). Str k are convertible.
TEST(Conv, StreamTypeUnfolds) {
    FileResult r = load_corpus("streams.clott");
    Checker ch(r.prog);
    Term str = type_in(r.prog, "Str k");
    Term unfolded = type_in(r.prog, "Nat * |>(a : k). Str k");
    EXPECT_TRUE(ch.conv(str, unfolded));
    EXPECT_TRUE(ch.conv(unfolded, str));
    EXPECT_FALSE(ch.conv(str, type_in(r.prog, "Nat * |>(a : k0). Str k")));
    EXPECT_FALSE(ch.conv(str, type_in(r.prog, "Nat")));
    // With no unfolding budget the fixed point stays folded.
    EXPECT_FALSE(ch.conv(str, unfolded, 0));
}

TEST(Conv, LiftedPredicateUnfolds) {
    FileResult r = load_corpus("lifting.clott");
    Checker ch(r.prog);
    Context ctx = r.prog.ambient_context(1)
                      .push_var("P", type_in(r.prog, "Nat -> U{k}"))
                      .push_var("x", nat_ty());
    Context ctx2 = ctx.push_var("xs", type_in(r.prog, "|>k Str", &ctx));
    Term lhs = type_in(r.prog, "StrP P (x :: xs)", &ctx2);
    Term rhs = type_in(r.prog, "El{k}(P x) * |>(a : k). StrP P (xs [a])", &ctx2);
    EXPECT_TRUE(ch.conv(lhs, rhs));
    Term wrong = type_in(r.prog, "El{k}(P x) * |>(a : k). StrP P (x :: xs)", &ctx2);
    EXPECT_FALSE(ch.conv(lhs, wrong));
}

TEST(Conv, BetaAndEtaForClocksAndTicks) {
    FileResult r = load_corpus("streams.clott");
    Checker ch(r.prog);
    Context ctx = r.prog.ambient_context(2).push_var("t", type_in(r.prog, "|>k Nat"));
    Context cf = r.prog.ambient_context(2).push_var("f", type_in(r.prog, "forall j. |>j Nat"));
    // clock beta: (/\j. \(a : j). 0) [k] == \(a : k). 0
    EXPECT_TRUE(ch.conv(infer_in(r.prog, "(/\\j. \\(a : j). 0) [k]").first, infer_in(r.prog, "(\\(a : k). 0 : |>k Nat)").first));
    // tick eta: \(a : k). t [a] == t
    EXPECT_TRUE(ch.conv(infer_in(r.prog, "((\\(a : k). t [a]) : |>k Nat)", &ctx).first, var(0)));
    // clock eta: /\j. f [j] == f
    EXPECT_TRUE(ch.conv(infer_in(r.prog, "((/\\j. f [j]) : forall j. |>j Nat)", &cf).first, var(0)));
    EXPECT_FALSE(ch.conv(infer_in(r.prog, "((/\\j. f [k]) : forall j. |>k Nat)", &cf).first, var(0)));
}

TEST(Conv, DistinctFixedPointsDiffer) {
    FileResult r = load_corpus("streams.clott");
    Checker ch(r.prog);
    Term a = infer_in(r.prog, "dfix^k [Nat] (\\x. 0)").first;
    Term b = infer_in(r.prog, "dfix^k [Nat] (\\x. 1)").first;
    EXPECT_FALSE(ch.conv(a, b));
    EXPECT_TRUE(ch.conv(a, a));
    // No tick or tick constant to unfold at: normal form is the term itself.
    int fuel = 8;
    EXPECT_TRUE(alpha_eq(ch.normalize(a, fuel), a));
    EXPECT_EQ(fuel, 8);
}

TEST(Conv, FailureMessageNamesFuel) {
    FileResult r = check_source("clock k\nf : Nat := (\\(a : k). 0 : |>k Nat)\n");
    ASSERT_FALSE(r.ok());
    EXPECT_NE(r.decls[1].message.find("within fuel 8"), std::string::npos) << r.decls[1].message;
}

// Property: conversion is an equivalence on corpus terms, checked within and across
// the classes of definitions.
TEST(Conv, EquivalenceOnCorpus) {
    for (const auto& f : clott::test::corpus_files()) {
        FileResult r = load_corpus(f);
        Checker ch(r.prog);
        int amb = static_cast<int>(r.prog.ambient.size());
        std::vector<std::pair<Term, Term>> all;   // term and its type in the full ambient context
        for (const auto& name : r.prog.order) {
            const GlobalDef& d = r.prog.defs.at(name);
            auto cls = class_of(ch, d);
            for (const Term& a : cls)
                for (const Term& b : cls) EXPECT_TRUE(ch.conv(a, b)) << f << ": " << name;
            auto args = Program::ambient_args(d.ambient, amb);
            all.push_back({instantiate_ambient(d.body, d.ambient, args), instantiate_ambient(d.type, d.ambient, args)});
        }
        for (std::size_t i = 0; i < all.size(); ++i)
            for (std::size_t j = 0; j < all.size(); ++j) {
                if (!ch.conv(all[i].second, all[j].second)) continue;
                bool ij = ch.conv(all[i].first, all[j].first);
                EXPECT_EQ(ij, ch.conv(all[j].first, all[i].first)) << f;
                if (!ij) continue;
                for (std::size_t k = 0; k < all.size(); ++k)
                    if (ch.conv(all[j].first, all[k].first) && ch.conv(all[j].second, all[k].second)) {
                        EXPECT_TRUE(ch.conv(all[i].first, all[k].first)) << f;
                    }
            }
    }
}

// Property: weak head reduction preserves types.
TEST(Check, SubjectReduction) {
    for (const auto& f : clott::test::corpus_files()) {
        FileResult r = load_corpus(f);
        Checker ch(r.prog);
        for (const auto& name : r.prog.order) {
            const GlobalDef& d = r.prog.defs.at(name);
            Context ctx = r.prog.ambient_context(d.ambient);
            Term g = global(name, Program::ambient_args(d.ambient, d.ambient));
            Term ty = ch.infer(ctx, g);
            EXPECT_TRUE(ch.conv(ty, d.type)) << name;
            EXPECT_NO_THROW(ch.check(ctx, ch.whnf(d.body), d.type)) << name;
            EXPECT_NO_THROW(ch.check(ctx, ch.whnf(g), ty)) << name;
            for (const auto& sub : {d.body}) {
                clott::test::each_subterm(sub, [&](const Term& s) {
                    if (s->kind != K::App || s->kid(2)->kind != K::Lam) return;
                    // closed beta redexes only: their type is checkable in ctx
                    try {
                        Term a = ch.infer(ctx, s);
                        EXPECT_TRUE(ch.conv(ch.infer(ctx, ch.whnf(s)), a)) << name;
                    } catch (const TypeError&) {
                    }
                });
            }
        }
    }
}

TEST(Axioms, ClockIrrelevanceType) {
    FileResult r = load_corpus("streams.clott");
    Checker ch(r.prog);
    Context ctx = r.prog.ambient_context(2);
    auto [t, ty] = infer_in(r.prog, "cirr [Nat] cnat");
    Term want = type_in(r.prog, "forall k1 k2. Id Nat (cnat [k1]) (cnat [k2])");
    EXPECT_TRUE(alpha_eq(ty, want)) << pretty(ty, {"k", "k0"});
    EXPECT_NO_THROW(ch.check(ctx, t, want));
    // the clock may not occur in the result type
    FileResult bad = check_source(clott::test::read_text(clott::test::corpus_path("negative/cirr_free_clock.clott")));
    EXPECT_FALSE(bad.ok());
}

TEST(Axioms, TickIrrelevanceType) {
    FileResult r = load_corpus("streams.clott");
    Checker ch(r.prog);
    Context ctx = r.prog.ambient_context(2).push_var("x", type_in(r.prog, "|>k Nat"));
    auto [t, ty] = infer_in(r.prog, "tirr^k x", &ctx);
    Term want = type_in(r.prog, "|>(a : k). |>(b : k). Id Nat (x [a]) (x [b])", &ctx);
    EXPECT_TRUE(alpha_eq(ty, want)) << pretty(ty, {"k", "k0", "x"});
    EXPECT_NO_THROW(ch.check(ctx, t, want));
}

TEST(Axioms, FixedPointUnfoldingType) {
    FileResult r = load_corpus("streams.clott");
    Checker ch(r.prog);
    Context ctx = r.prog.ambient_context(2).push_var("f", type_in(r.prog, "|>k Nat -> Nat"));
    auto [t, ty] = infer_in(r.prog, "pfix^k f", &ctx);
    Term want = type_in(r.prog, "|>(a : k). Id Nat ((dfix^k f) [a]) (f (dfix^k f))", &ctx);
    EXPECT_TRUE(alpha_eq(ty, want)) << pretty(ty, {"k", "k0", "f"});
    EXPECT_NO_THROW(ch.check(ctx, t, want));
}

// The derived rule for t[<>]: with k bound locally the application typechecks.
TEST(Check, DiamondRuleIsDerivable) {
    FileResult r = load_corpus("streams.clott");
    Checker ch(r.prog);
    Context ctx = r.prog.ambient_context(2);
    for (const char* src : {"((\\(x : forall j. |>j Nat). /\\j. (x [j]) [<>]) : (forall j. |>j Nat) -> forall j. Nat)",
                            "/\\j. ((\\(a : j). 3 : |>j Nat)) [<>]",
                            "/\\j. (dfix^j [Nat] (\\x. 0)) [<>]",
                            "tl czeros"}) {
        auto [t, ty] = infer_in(r.prog, src);
        EXPECT_NO_THROW(ch.check(ctx, t, ty)) << src;
    }
}

TEST(Check, EmptyFileIsOk) {
    FileResult r = check_source("-- nothing here\n");
    EXPECT_TRUE(r.ok());
    EXPECT_TRUE(r.decls.empty());
}
