#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "clott/program.hpp"
#include "clott/subst.hpp"
#include "clott/syntax.hpp"
#include "clott/time.hpp"

namespace clott::sem {

struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Value;
using ValueP = std::shared_ptr<const Value>;
struct EnvNode;
using Env = std::shared_ptr<const EnvNode>;

enum class VK : std::uint8_t {
    Nat,
    Star,     // the single element of a later type with no ticks left
    Later,    // atom, inner value at the stage with one tick less on atom
    Pair,
    Refl,
    Fun,      // closure: body under one variable
    ClkFun,   // closure: body under one clock
    Code,     // universe element: a code term with its environment
    GenFun,   // sampled function: body is the codomain type
    GenClk,   // sampled clock function: body is the body type
};

// Values carry no stage of their own; the stage is that of the environment or type
// they are used with. Closures keep their environment, which does know its stage.
struct Value {
    VK kind;
    std::uint64_t n = 0;    // Nat; sampling seed for GenFun/GenClk
    Atom atom = -1;         // Later
    ValueP a{}, b{};        // Later inner (a); Pair components
    Term body{};
    Env env{};
};

ValueP v_nat(std::uint64_t n);
ValueP v_star();
ValueP v_later(Atom a, ValueP inner);
ValueP v_pair(ValueP a, ValueP b);
ValueP v_refl();
ValueP v_closure(VK kind, Term body, Env env, std::uint64_t seed = 0);

// Forward action of a morphism on a value at its source stage.
ValueP restrict(const ValueP& v, const Morphism& s);

// Environments mirror contexts entry by entry. A tick entry keeps a representative
// (sigma, inner) of its class: the environment of the prefix at an earlier stage and
// the morphism from that stage to the current one.
enum class EK : std::uint8_t { Root, Val, Clock, Tick, Restrict, Hole };

struct EnvNode {
    EK kind;
    Stage stage;
    Env parent{};       // Tick: the inner environment; Restrict: the restricted one
    ValueP v{};         // Val
    Atom atom = -1;     // Clock; Tick: the tick's clock at the inner stage
    Morphism sigma{};   // Tick, Restrict: parent->stage to stage
    int size = 0;       // number of context entries
};

Env env_root(const Stage& s);
Env env_val(const Env& e, ValueP v);
Env env_clock(const Env& e, Atom a);
// The tick entry [(sigma, inner)]; requires inner's budget on `inner_atom` to exceed the
// current budget of sigma(inner_atom).
Env env_tick(const Env& inner, const Morphism& sigma, Atom inner_atom);
Env env_hole(const Env& e);   // placeholder for entries a term cannot see
Env restrict_env(const Env& e, const Morphism& s);
// Drops the n newest entries; a dropped tick is collapsed by restricting its inner
// environment along the tick's morphism.
Env project_env(const Env& e, int n);

ValueP lookup_val(const Env& e, int ix);
Atom lookup_clock(const Env& e, int ix);
struct TickView {
    Morphism to_here;   // from the inner stage to the stage of the lookup
    Env inner;          // environment of the entries before the tick
    Atom inner_atom;
};
TickView lookup_tick(const Env& e, int ix);

// A type together with the environment of its free variables. Codes and code-valued
// terms are read as the type they decode to.
struct SemType {
    Term ty;
    Env env;
};

struct EvalOptions {
    int extra_budget = 1;   // m = budget + extra_budget for the fresh clock of a ⋄
    int depth = 4;          // naturals 0..depth are the sampled function arguments
    int probes = 1;         // levels of tick morphisms used when comparing functions
    bool drop_tick_restriction = false;   // deliberately wrong counit, for mutation tests
};

// The interpretation of the annotated core at concrete stages, plus the observational
// equality and value samplers built on top of it.
class Evaluator {
public:
    Evaluator(const Program& prog, EvalOptions opts = {}) : prog_(prog), opts_(opts) {}

    const EvalOptions& options() const { return opts_; }
    const Program& program() const { return prog_; }

    ValueP eval(const Term& t, const Env& env);
    ValueP apply(const ValueP& f, const ValueP& arg);
    ValueP apply_clock(const ValueP& f, Atom a);

    // Environment of a top-level definition: the stage and one atom per ambient clock.
    Env global_env(const Stage& s, const std::vector<Atom>& ambient) const;
    ValueP eval_global(const std::string& name, const Stage& s, const std::vector<Atom>& ambient);

    // The inverse of projecting a tick: from an environment ending in a clock entry to
    // one ending in that clock and a tick on it, via a fresh clock with
    // budget + extra_budget ticks.
    Env diamond(const Env& e) const;

    // Observations. All compare at the stage of the type's environment.
    bool value_eq(const ValueP& v, const ValueP& w, const SemType& ty, int probes = -1);
    bool type_eq(const SemType& a, const SemType& b, int probes = -1);
    // Deterministic sample from (type, seed); nullptr when no inhabitant is produced.
    ValueP sample(const SemType& ty, std::uint64_t seed);
    // What value_eq looks at, rendered as text. Two evaluators with different options
    // can be compared through their observations.
    std::string observe(const ValueP& v, const SemType& ty, int probes = -1);
    std::string observe_type(const SemType& ty, int probes = -1);
    // Entrywise equality of two environments for the same context. Tick entries are
    // compared by their representatives.
    bool env_eq(const Env& a, const Env& b, const Context& ctx);

    // Head-normal view of a type: El and code-valued terms are decoded.
    struct View {
        K kind;             // Nat, Pi, Sigma, Id, Later, Forall, Univ
        Term ty;
        Env env;
    };
    View view(const SemType& t);
    SemType pi_dom(const View& v) const { return {v.ty->kids.at(0), v.env}; }
    SemType pi_cod(const View& v, const ValueP& a) const { return {v.ty->kids.at(1), env_val(v.env, a)}; }
    Atom later_clock(const View& v) const { return lookup_clock(v.env, v.ty->ix); }
    SemType later_body(const View& v) const;   // requires a tick left
    SemType forall_body(const View& v, Atom a) const { return {v.ty->kids.at(0), env_clock(v.env, a)}; }

private:
    ValueP tick_counit(const Term& operand, const TickView& tv, int holes);
    int sample_count() const;

    struct Nest {
        int& n;
        explicit Nest(int& c) : n(++c) {}
        ~Nest() { --n; }
    };
    int nest_ = 0;

    const Program& prog_;
    EvalOptions opts_;
    std::map<std::string, ValueP> global_cache_;
};

// Prints a value: right-nested pairs, naturals, ⋆ for the unit of an exhausted later,
// ⟨fun⟩ for closures. Later values are transparent.
std::string show_value(const ValueP& v, bool unicode = true);

// Interpretation of a telescopic substitution: maps an environment of its domain to
// one of its codomain. Diamond entries use ev.diamond.
Env apply_subst_env(Evaluator& ev, const clott::Subst& s, const Env& dom);

}  // namespace clott::sem
