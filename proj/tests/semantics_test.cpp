#include <set>

#include "clott/eval.hpp"
#include "clott/time.hpp"
#include "clott/verify.hpp"
#include "support.hpp"

using namespace clott;
using namespace clott::sem;
using clott::test::infer_in;
using clott::test::load_corpus;

namespace {

// Brute-force count of clock maps src -> dst that never increase the budget.
std::size_t count_maps(const Stage& src, const Stage& dst) {
    std::size_t n = src.size(), m = dst.size();
    if (n == 0) return 1;
    if (m == 0) return 0;
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= m;
    std::size_t ok = 0;
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t c = code;
        bool good = true;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t j = c % m;
            c /= m;
            if (dst.clocks[j].second > src.clocks[i].second) good = false;
        }
        ok += good;
    }
    return ok;
}

// The expected printout of a guarded stream of constant n at budget b.
std::string constant_stream(int n, int b) {
    std::string s = "⋆";
    for (int i = 0; i <= b; ++i) s = "(" + std::to_string(n) + "," + s + ")";
    return s;
}

std::string eval_at(Program& prog, const std::string& src, const std::vector<std::pair<Atom, int>>& stage) {
    Evaluator ev(prog);
    auto [t, ty] = infer_in(prog, src);
    std::vector<Atom> amb;
    for (std::size_t i = 0; i < prog.ambient.size(); ++i) amb.push_back(static_cast<Atom>(i));
    return show_value(ev.eval(t, ev.global_env(make_stage(stage), amb)));
}

bool same_morphism(const Morphism& a, const Morphism& b) { return a.src == b.src && a.dst == b.dst && a.map == b.map; }

}  // namespace

TEST(Time, StageValidation) {
    EXPECT_THROW(make_stage({{0, -1}}), StageError);
    EXPECT_THROW(make_stage({{0, 1}, {0, 2}}), StageError);
    Stage s = make_stage({{1, 2}, {0, 3}});
    EXPECT_EQ(s.atoms(), (std::vector<Atom>{0, 1}));
    EXPECT_EQ(s.budget(1), 2);
    EXPECT_EQ(s.dec(1).budget(1), 1);
    EXPECT_THROW(make_stage({{0, 0}}).dec(0), StageError);
    EXPECT_EQ(s.fresh(), 2);
}

TEST(Time, ParseStageLiteral) {
    NamedStage s = parse_stage("k0=3,k1=2");
    EXPECT_EQ(s.names, (std::vector<std::string>{"k0", "k1"}));
    EXPECT_EQ(s.stage.budget(s.atom_of("k0")), 3);
    EXPECT_EQ(s.stage.budget(s.atom_of("k1")), 2);
    EXPECT_EQ(parse_stage("").stage.size(), 0u);
    EXPECT_EQ(parse_stage(" k = 1 ").stage.budget(0), 1);
    try {
        parse_stage("k=3,k=2");
        FAIL();
    } catch (const StageError& e) {
        EXPECT_STREQ(e.what(), "duplicate clock in stage");
    }
    try {
        parse_stage("k=-1");
        FAIL();
    } catch (const StageError& e) {
        EXPECT_STREQ(e.what(), "budget must be nonnegative");
    }
    EXPECT_THROW(parse_stage("k"), StageError);
    EXPECT_THROW(parse_stage("k=x"), StageError);
    EXPECT_THROW(parse_stage("=1"), StageError);
}

// Property: enumeration agrees with a brute-force count, and every result is a morphism.
TEST(Time, MorphismEnumerationMatchesBruteForce) {
    auto stages = enumerate_stages(0, 2, 2);
    for (const Stage& a : stages)
        for (const Stage& b : stages) {
            auto ms = enumerate_morphisms(a, b);
            EXPECT_EQ(ms.size(), count_maps(a, b)) << a.str() << " -> " << b.str();
            for (const auto& m : ms) EXPECT_TRUE(is_morphism(a, b, m.map));
        }
}

// Property: composition is associative and unital.
TEST(Time, CategoryLaws) {
    auto stages = enumerate_stages(1, 2, 2);
    int checked = 0;
    for (const Stage& a : stages)
        for (const Stage& b : stages)
            for (const Morphism& f : enumerate_morphisms(a, b)) {
                EXPECT_TRUE(same_morphism(compose(f, identity(a)), f));
                EXPECT_TRUE(same_morphism(compose(identity(b), f), f));
                for (const Stage& c : stages)
                    for (const Morphism& g : enumerate_morphisms(b, c))
                        for (const Morphism& h : enumerate_morphisms(c, a)) {
                            EXPECT_TRUE(same_morphism(compose(h, compose(g, f)), compose(compose(h, g), f)));
                            ++checked;
                        }
            }
    EXPECT_GT(checked, 1000);
}

TEST(Time, TickIntroductionAndMerge) {
    for (const Stage& s : enumerate_stages(1, 2, 3)) {
        for (Atom a : s.atoms()) {
            if (s.budget(a) > 0) {
                Morphism t = tick_morphism(s, a);
                EXPECT_TRUE(is_morphism(t.src, t.dst, t.map));
                EXPECT_EQ(t.dst.budget(a), s.budget(a) - 1);
            }
            ClockIntro ci = clock_intro_iota(s, s.budget(a));
            EXPECT_FALSE(s.has(ci.fresh));
            EXPECT_EQ(ci.iota.dst.budget(ci.fresh), s.budget(a));
            Morphism back = merge_clock(ci.iota.dst, ci.fresh, a);
            EXPECT_TRUE(compose(back, ci.iota).is_identity());
        }
    }
    EXPECT_THROW(merge_clock(make_stage({{0, 1}}), 0, 0), StageError);
}

TEST(Restrict, LowerBudgetTruncatesDelayedData) {
    Stage s = make_stage({{0, 2}});
    ValueP v = v_later(0, v_later(0, v_nat(4)));
    EXPECT_EQ(show_value(v), "4");
    Morphism m = make_morphism(s, make_stage({{0, 1}}), {{0, 0}});
    EXPECT_EQ(show_value(restrict(v, m)), "⋆");
    Morphism z = make_morphism(s, make_stage({{0, 0}}), {{0, 0}});
    EXPECT_EQ(restrict(v, z)->kind, VK::Star);
    // a later value on another clock keeps its shape
    Stage two = make_stage({{0, 2}, {1, 2}});
    Morphism swap = make_morphism(two, make_stage({{0, 2}, {1, 0}}), {{0, 1}, {1, 0}});
    ValueP w = v_later(0, v_nat(1));
    EXPECT_EQ(restrict(w, swap)->kind, VK::Star);
}

TEST(Eval, GuardedZerosAtEveryBudget) {
    FileResult r = load_corpus("streams.clott");
    for (int n = 0; n <= 5; ++n) EXPECT_EQ(eval_at(r.prog, "zeros", {{0, n}, {1, 0}}), constant_stream(0, n));
}

TEST(Eval, StreamFunctions) {
    FileResult r = load_corpus("streams.clott");
    EXPECT_EQ(eval_at(r.prog, "from 3", {{0, 2}, {1, 0}}), "(3,(4,(5,⋆)))");
    EXPECT_EQ(eval_at(r.prog, "mapk (\\n. suc (suc n)) zeros", {{0, 2}, {1, 0}}), constant_stream(2, 2));
    EXPECT_EQ(eval_at(r.prog, "cons 7 (\\(a : k). zeros)", {{0, 1}, {1, 0}}), "(7,(0,⋆))");
    EXPECT_EQ(eval_at(r.prog, "cnat [k0]", {{0, 0}, {1, 0}}), "3");
    EXPECT_EQ(eval_at(r.prog, "hd ones", {{0, 0}, {1, 0}}), "1");
    EXPECT_EQ(eval_at(r.prog, "hd (tl (map (\\n. suc n) ones))", {{0, 0}, {1, 3}}), "2");
}

TEST(Eval, HeadOfTailsOfClockQuantifiedZeros) {
    FileResult r = load_corpus("streams.clott");
    std::string t = "czeros";
    for (int j = 0; j <= 3; ++j) {
        for (int b : {0, 2})
            EXPECT_EQ(eval_at(r.prog, "hd (" + t + ")", {{0, b}, {1, b}}), "0") << "j=" << j;
        t = "tl (" + t + ")";
    }
}

TEST(Eval, LiftedProof) {
    FileResult r = load_corpus("lifting.clott");
    EXPECT_EQ(eval_at(r.prog, "first_wit", {{0, 2}}), "1");
    EXPECT_EQ(eval_at(r.prog, "zeros_wit", {{0, 1}}), "(1,(1,⋆))");
}

TEST(Eval, UniverseCodesDecode) {
    FileResult r = load_corpus("universe.clott");
    EXPECT_EQ(eval_at(r.prog, "fun_val 4", {{0, 1}, {1, 0}}), "5");
    EXPECT_EQ(eval_at(r.prog, "pair_val", {{0, 1}, {1, 0}}), "(1,2)");
    EXPECT_EQ(eval_at(r.prog, "pair_val", {{0, 0}, {1, 0}}), "(1,⋆)");
    EXPECT_EQ(eval_at(r.prog, "LaterNat", {{0, 1}, {1, 0}}), "⟨code⟩");
}

// Values are natural: restricting the value is evaluating at the restricted stage.
TEST(Eval, RestrictionCommutesWithEvaluation) {
    FileResult r = load_corpus("streams.clott");
    Evaluator ev(r.prog);
    Stage big = make_stage({{0, 3}, {1, 2}});
    auto [t, ty] = infer_in(r.prog, "(zeros, from 1)");
    for (const Stage& small : enumerate_stages(2, 2, 3))
        for (const Morphism& m : enumerate_morphisms(big, small)) {
            ValueP a = restrict(ev.eval(t, ev.global_env(big, {0, 1})), m);
            ValueP b = ev.eval(t, ev.global_env(small, {m(0), m(1)}));
            SemType st{ty, ev.global_env(small, {m(0), m(1)})};
            EXPECT_TRUE(ev.value_eq(a, b, st)) << m.str();
            EXPECT_EQ(show_value(a), show_value(b));
        }
}

// Property: restriction is functorial on sampled values of every corpus type.
TEST(Eval, RestrictionIsFunctorial) {
    for (const auto& f : clott::test::corpus_files()) {
        FileResult r = load_corpus(f);
        Evaluator ev(r.prog);
        for (const auto& name : r.prog.order) {
            const GlobalDef& d = r.prog.defs.at(name);
            std::vector<Atom> amb;
            for (int i = 0; i < d.ambient; ++i) amb.push_back(static_cast<Atom>(i));
            Stage s = make_stage(d.ambient == 0 ? std::vector<std::pair<Atom, int>>{{0, 2}}
                                                : std::vector<std::pair<Atom, int>>{{0, 2}, {1, 2}});
            if (static_cast<int>(s.size()) < d.ambient) continue;
            Env env = ev.global_env(s, amb);
            SemType ty{d.type, env};
            for (std::uint64_t seed = 0; seed < 4; ++seed) {
                ValueP v = ev.sample(ty, seed);
                if (!v) continue;
                int checked = 0;
                for (const Stage& mid : enumerate_stages(1, 2, 2))
                    for (const Morphism& f1 : enumerate_morphisms(s, mid))
                        for (const Stage& end : enumerate_stages(1, 1, 1))
                            for (const Morphism& f2 : enumerate_morphisms(mid, end)) {
                                if (checked++ > 30) break;
                                SemType at_end{d.type, restrict_env(env, compose(f2, f1))};
                                EXPECT_TRUE(ev.value_eq(restrict(restrict(v, f1), f2), restrict(v, compose(f2, f1)),
                                                        at_end))
                                    << f << ": " << name;
                            }
            }
        }
    }
}

// A tick entry is a representative of a class: (sigma o tau, rho) and (sigma, tau . rho)
// must give the same results.
TEST(Eval, TickRepresentativesAreInterchangeable) {
    FileResult r = load_corpus("streams.clott");
    Evaluator ev(r.prog);
    // context k : clock, x : |>k |>k Nat, a : k ;  term x [a] : |>k Nat
    Context ctx = Context{}.push_clock("k").push_var("x", later_nd(0, later_nd(1, nat_ty()))).push_tick("a", 1);
    Term xa = tick_app("b", 2, later_nd(3, nat_ty()), var(1), 0);
    for (int top : {3, 5}) {
        Stage s2 = make_stage({{0, top}});
        Env rho = env_val(env_clock(env_root(s2), 0), v_later(0, v_later(0, v_nat(4))));
        Stage s1 = make_stage({{0, 2}});
        Morphism tau = make_morphism(s2, s1, {{0, 0}});
        Morphism sigma = tick_morphism(s1, 0);
        Env rep1 = env_tick(restrict_env(rho, tau), sigma, 0);
        Env rep2 = env_tick(rho, compose(sigma, tau), 0);
        ValueP v1 = ev.eval(xa, rep1);
        ValueP v2 = ev.eval(xa, rep2);
        EXPECT_TRUE(ev.value_eq(v1, v2, SemType{later_nd(2, nat_ty()), rep1}));
        EXPECT_EQ(show_value(v1), show_value(v2));
        EXPECT_EQ(show_value(v1), "4");
        EXPECT_TRUE(ev.env_eq(project_env(rep1, 1), project_env(rep2, 1), ctx.prefix(2)));
    }
}

TEST(Observe, EqualityAndSampling) {
    FileResult r = load_corpus("streams.clott");
    Evaluator ev(r.prog);
    Env env = ev.global_env(make_stage({{0, 2}, {1, 1}}), {0, 1});
    SemType nat{nat_ty(), env};
    EXPECT_TRUE(ev.value_eq(v_nat(3), v_nat(3), nat));
    EXPECT_FALSE(ev.value_eq(v_nat(3), v_nat(4), nat));
    auto [t, ty] = infer_in(r.prog, "(\\n. suc n : Nat -> Nat)");
    auto [u, uty] = infer_in(r.prog, "(\\n. suc (suc n) : Nat -> Nat)");
    SemType fn{ty, env};
    EXPECT_FALSE(ev.value_eq(ev.eval(t, env), ev.eval(u, env), fn));
    EXPECT_TRUE(ev.value_eq(ev.eval(t, env), ev.eval(t, env), fn));
    for (const auto& name : r.prog.order) {
        const GlobalDef& d = r.prog.defs.at(name);
        SemType st{d.type, ev.global_env(make_stage({{0, 2}, {1, 1}}), std::vector<Atom>{0, 1}.size() >= 2
                                                                            ? std::vector<Atom>(d.ambient, 0)
                                                                            : std::vector<Atom>{})};
        st.env = ev.global_env(make_stage({{0, 2}, {1, 1}}), d.ambient == 2 ? std::vector<Atom>{0, 1}
                                                             : d.ambient == 1 ? std::vector<Atom>{0}
                                                                              : std::vector<Atom>{});
        ValueP a = ev.sample(st, 3), b = ev.sample(st, 3);
        if (!a) continue;
        EXPECT_EQ(ev.observe(a, st), ev.observe(b, st)) << name;
        EXPECT_TRUE(ev.value_eq(a, a, st)) << name;
    }
}

// Budget zero: every delayed component is the unit.
TEST(Eval, BudgetZeroCollapsesLaterValues) {
    FileResult r = load_corpus("streams.clott");
    EXPECT_EQ(eval_at(r.prog, "zeros", {{0, 0}, {1, 0}}), "(0,⋆)");
    EXPECT_EQ(eval_at(r.prog, "(\\(a : k). 5 : |>k Nat)", {{0, 0}, {1, 0}}), "⋆");
    EXPECT_EQ(eval_at(r.prog, "(\\(a : k). 5 : |>k Nat)", {{0, 1}, {1, 0}}), "5");
}

TEST(Eval, PlainPrinting) {
    EXPECT_EQ(show_value(v_pair(v_nat(0), v_star()), false), "(0,*)");
    EXPECT_EQ(show_value(v_pair(v_nat(0), v_star()), true), "(0,⋆)");
}

namespace {

VerifyConfig small() {
    VerifyConfig c;
    c.max_budget = 2;
    c.samples = 6;
    return c;
}

}  // namespace

class Suites : public ::testing::TestWithParam<std::string> {};

TEST_P(Suites, PassOnStreamsAtSmallBounds) {
    FileResult r = load_corpus("streams.clott");
    VerifyReport rep = verify_program(r.prog, "streams.clott", small(), {GetParam()});
    ASSERT_EQ(rep.suites.size(), 1u);
    const SuiteResult& s = rep.suites[0];
    EXPECT_GT(s.checks, 0);
    EXPECT_EQ(s.failures, 0) << (s.counterexamples.empty() ? "" : s.counterexamples[0].term + " @ " +
                                                                      s.counterexamples[0].stage + "  " +
                                                                      s.counterexamples[0].note);
}

INSTANTIATE_TEST_SUITE_P(All, Suites, ::testing::ValuesIn(suite_names()),
                         [](const auto& info) {
                             std::string n = info.param;
                             for (auto& c : n)
                                 if (c == '-') c = '_';
                             return n;
                         });

// Mutation: a tick application that forgets to restrict breaks naturality.
TEST(Suites, MutatedTickApplicationIsCaught) {
    FileResult r = load_corpus("streams.clott");
    VerifyConfig cfg = small();
    cfg.mutate_tick = true;
    VerifyReport rep = verify_program(r.prog, "streams.clott", cfg, {"naturality"});
    ASSERT_EQ(rep.suites.size(), 1u);
    EXPECT_GT(rep.suites[0].failures, 0);
    ASSERT_FALSE(rep.suites[0].counterexamples.empty());
    const Counterexample& c = rep.suites[0].counterexamples[0];
    EXPECT_FALSE(c.term.empty());
    EXPECT_FALSE(c.stage.empty());
    EXPECT_FALSE(c.morphism.empty());
    if (c.lhs == c.rhs) {
        EXPECT_NE(c.note.find("outside its type"), std::string::npos);
    }
}

TEST(Suites, DegenerateBudgetStillPasses) {
    for (const auto& f : clott::test::corpus_files()) {
        FileResult r = load_corpus(f);
        VerifyConfig cfg;
        cfg.max_budget = 0;
        cfg.samples = 4;
        VerifyReport rep = verify_program(r.prog, f, cfg);
        for (const auto& s : rep.suites) EXPECT_EQ(s.failures, 0) << f << ": " << s.name;
    }
}

TEST(Suites, CoverageIsJudgedAcrossFiles) {
    std::vector<FileResult> rs;
    for (const auto& f : clott::test::corpus_files()) rs.push_back(load_corpus(f));
    VerifyConfig cfg = small();
    std::vector<std::pair<std::string, const Program*>> one{{"universe.clott", &rs[2].prog}};
    CorpusReport alone = verify_corpus(one, cfg, {"fixed-point"});
    EXPECT_FALSE(alone.missing.empty());   // no guarded fixed point in that file
    EXPECT_FALSE(alone.ok());
    std::vector<std::pair<std::string, const Program*>> both{{"universe.clott", &rs[2].prog},
                                                            {"streams.clott", &rs[0].prog}};
    CorpusReport together = verify_corpus(both, cfg, {"fixed-point"});
    EXPECT_TRUE(together.missing.empty());
    EXPECT_TRUE(together.ok());
}

// Running twice gives the same report.
TEST(Suites, Deterministic) {
    FileResult r = load_corpus("lifting.clott");
    auto a = verify_program(r.prog, "lifting.clott", small(), {"substitution", "equations"});
    auto b = verify_program(r.prog, "lifting.clott", small(), {"substitution", "equations"});
    ASSERT_EQ(a.suites.size(), b.suites.size());
    for (std::size_t i = 0; i < a.suites.size(); ++i) {
        EXPECT_EQ(a.suites[i].checks, b.suites[i].checks);
        EXPECT_EQ(a.suites[i].skipped, b.suites[i].skipped);
        EXPECT_EQ(a.suites[i].coverage, b.suites[i].coverage);
    }
}
