#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace clott::sem {

// A semantic clock. Atoms are names local to a stage; morphisms say how they relate.
using Atom = int;

struct StageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A time object: finitely many clocks, each with the number of ticks left.
struct Stage {
    std::vector<std::pair<Atom, int>> clocks;   // sorted by atom

    bool has(Atom a) const;
    int budget(Atom a) const;                   // throws StageError if absent
    std::vector<Atom> atoms() const;
    std::size_t size() const { return clocks.size(); }

    Stage with(Atom a, int n) const;            // add or update
    Stage dec(Atom a) const;                    // one tick less on a; requires budget > 0
    Atom fresh() const;                         // smallest atom above all present ones

    bool operator==(const Stage& o) const { return clocks == o.clocks; }
    bool operator!=(const Stage& o) const { return !(*this == o); }
    std::string str() const;                    // {0=2,1=3}
};

Stage make_stage(std::vector<std::pair<Atom, int>> clocks);

// A map of time objects: every source clock goes to a target clock with no more
// ticks left. Values move forward along morphisms.
struct Morphism {
    Stage src, dst;
    std::vector<std::pair<Atom, Atom>> map;     // sorted by source atom, total on src

    Atom operator()(Atom a) const;
    bool is_identity() const;
    std::string str() const;
};

bool is_morphism(const Stage& src, const Stage& dst, const std::vector<std::pair<Atom, Atom>>& map);
// Validates and builds; throws StageError when the budget inequality fails.
Morphism make_morphism(Stage src, Stage dst, std::vector<std::pair<Atom, Atom>> map);
Morphism identity(const Stage& s);
// sigma after tau; requires tau.dst == sigma.src.
Morphism compose(const Morphism& sigma, const Morphism& tau);
// The identity on clocks from s to s with one tick less on a.
Morphism tick_morphism(const Stage& s, Atom a);
// The same clock map between new endpoints (e.g. the decremented stages under a later).
Morphism reinterpret(const Morphism& m, Stage src, Stage dst);
// Every morphism between two finite stages.
std::vector<Morphism> enumerate_morphisms(const Stage& src, const Stage& dst);

// Adjoining a fresh clock with n ticks: the inclusion s -> (s, fresh = n).
struct ClockIntro {
    Morphism iota;
    Atom fresh;
};
ClockIntro clock_intro_iota(const Stage& s, int n);
// Identifies `from` with `to` and drops `from`: (E, from) -> E.
Morphism merge_clock(const Stage& s, Atom from, Atom to);

// All stages with atoms 0..n-1 for n in [min_clocks, max_clocks] and budgets in [0, max_budget].
std::vector<Stage> enumerate_stages(int min_clocks, int max_clocks, int max_budget);

// A stage written as `k0=3,k1=2`. Clock i of the literal gets atom i.
struct NamedStage {
    Stage stage;
    std::vector<std::string> names;
    Atom atom_of(const std::string& name) const;   // -1 when absent
};
NamedStage parse_stage(const std::string& literal);

}  // namespace clott::sem
