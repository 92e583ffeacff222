#pragma once

#include <stdexcept>
#include <string>

#include "clott/program.hpp"
#include "clott/syntax.hpp"

namespace clott {

struct TypeError : std::runtime_error {
    Span span;
    explicit TypeError(const std::string& msg, Span s = {}) : std::runtime_error(msg), span(s) {}
};

// Algorithmic judgements for the annotated core. Conversion performs at most `fuel`
// unfoldings of dfix at a tick or at the tick constant per compared position.
class Checker {
public:
    explicit Checker(const Program& prog, int fuel = 8) : prog_(prog), fuel_(fuel) {}

    int fuel() const { return fuel_; }
    const Program& program() const { return prog_; }

    void check_ctx(const Context& ctx) const;
    void check_type(const Context& ctx, const Term& a) const;
    Term infer(const Context& ctx, const Term& t) const;
    void check(const Context& ctx, const Term& t, const Term& ty) const;

    // Weak head normal form. `fuel` is decremented once per dfix unfolding; with no fuel
    // left the dfix redex is left in place.
    Term whnf(const Term& t, int& fuel) const;
    Term whnf(const Term& t) const {
        int f = fuel_;
        return whnf(t, f);
    }
    // Deep normal form, sharing one fuel budget across the whole term.
    Term normalize(const Term& t, int& fuel) const;

    bool conv(const Term& a, const Term& b) const { return conv(a, b, fuel_); }
    bool conv(const Term& a, const Term& b, int fuel) const;

private:
    bool conv_whnf(const Term& a, const Term& b, int fuel) const;
    void require_clock(const Context& ctx, int c) const;
    void require_clocks(const Context& ctx, const ClockSet& d) const;
    Term unfold_global(const Node& n) const;
    std::string show(const Context& ctx, const Term& t) const;

    const Program& prog_;
    int fuel_;
};

// f (dfix^k [a] f): one unfolding of a guarded fixed point.
Term unfold_dfix(const Term& a, int clock, const Term& f);

// Clock set seen under one more binder; `with_new` adds the binder itself.
ClockSet shift_set(const ClockSet& d, bool with_new = false);

}  // namespace clott
