#include "clott/pretty.hpp"

#include <algorithm>
#include <sstream>

#include "clott/program.hpp"

namespace clott {

namespace {

// Precedence levels, loosest first.
enum Prec { P_EXPR = 0, P_PROD = 1, P_PREFIX = 2, P_APP = 3, P_ATOM = 4 };

// Role of a position: the elaborator checks some positions against a known type and
// infers others. Intro forms in an inferred position need an ascription.
enum class Role { Check, Infer };

struct Printer {
    const PrettyOptions& o;
    std::vector<std::string> scope;   // oldest first

    const char* lam_s() const { return o.unicode ? "λ" : "\\"; }
    const char* biglam_s() const { return o.unicode ? "Λ" : "/\\"; }
    const char* later_s() const { return o.unicode ? "▷" : "|>"; }
    const char* dia_s() const { return o.unicode ? "⋄" : "<>"; }
    const char* arrow_s() const { return o.unicode ? "→" : "->"; }
    const char* times_s() const { return o.unicode ? "×" : "*"; }
    const char* forall_s() const { return o.unicode ? "∀" : "forall "; }

    const std::string& at(int ix) const {
        static const std::string bad = "?";
        int n = static_cast<int>(scope.size());
        if (ix < 0 || ix >= n) return bad;
        return scope[static_cast<std::size_t>(n - 1 - ix)];
    }

    bool taken(const std::string& s) const {
        if (std::find(scope.begin(), scope.end(), s) != scope.end()) return true;
        return o.reserved && o.reserved->count(s);
    }

    std::string fresh(std::string hint, const char* fallback) const {
        if (hint.empty() || hint == "_") hint = fallback;
        // Strip a numeric suffix we may have added earlier.
        std::string base = hint;
        while (base.size() > 1 && std::isdigit(static_cast<unsigned char>(base.back()))) base.pop_back();
        if (!taken(hint)) return hint;
        for (int i = 1;; ++i) {
            std::string c = base + std::to_string(i);
            if (!taken(c)) return c;
        }
    }

    struct Bound {
        Printer& p;
        std::size_t n;
        Bound(Printer& pr, std::initializer_list<std::string> names) : p(pr), n(names.size()) {
            for (const auto& s : names) p.scope.push_back(s);
        }
        ~Bound() {
            for (std::size_t i = 0; i < n; ++i) p.scope.pop_back();
        }
    };

    std::string clockset(const ClockSet& d) {
        std::string s = "{";
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (i) s += ",";
            s += at(d[i]);
        }
        return s + "}";
    }

    static std::string paren(const std::string& s, bool yes) { return yes ? "(" + s + ")" : s; }

    std::string ascribe(const Term& t, const Term& ty) {
        return "(" + go(t, P_EXPR, Role::Check) + " : " + go(ty, P_EXPR, Role::Check) + ")";
    }

    // Type that an intro form would get from its annotations.
    static Term intro_type(const Node& n) {
        switch (n.kind) {
        case K::Lam: return pi(n.name(0), n.kids[0], n.kids[1]);
        case K::Pair: return sigma(n.name(0), n.kids[0], n.kids[1]);
        case K::ClkLam: return forall_ty(n.name(0), n.kids[0]);
        case K::TickLam: return later(n.name(0), n.ix, n.kids[0]);
        case K::Refl: return id_ty(n.kids[0], n.kids[1], n.kids[1]);
        case K::CodeNat: case K::CodePi: case K::CodeSigma: case K::CodeForall: case K::CodeLater:
            return univ(n.d1);
        default: return nullptr;
        }
    }

    static bool is_fix(const Node& n) {
        if (n.kind != K::App) return false;
        const Node& d = *n.kids[3];
        return d.kind == K::Dfix && alpha_eq(d.kids[1], n.kids[2]) &&
               alpha_eq(n.kids[0], later_nd(d.ix, d.kids[0]));
    }

    static bool numeral_value(const Term& t, unsigned& out) {
        unsigned k = 0;
        const Node* n = t.get();
        while (n->kind == K::Suc) {
            ++k;
            n = n->kids[0].get();
        }
        if (n->kind != K::Zero) return false;
        out = k;
        return true;
    }

    std::string binder_or_arrow(const Node& n, const char* op, bool code) {
        std::string hash = code ? "#" : "";
        if (mentions(n.kids[1], 0)) {
            std::string x = fresh(n.name(0), "x");
            std::string a = go(n.kids[0], P_EXPR, Role::Check);
            Bound b(*this, {x});
            return "(" + x + " : " + a + ") " + hash + op + " " + go(n.kids[1], n.kind == K::Pi || n.kind == K::CodePi ? P_EXPR : P_PROD, Role::Check);
        }
        Term body = unshift(n.kids[1], 1);
        bool is_arrow = n.kind == K::Pi || n.kind == K::CodePi;
        std::string l = go(n.kids[0], is_arrow ? P_PROD : P_PREFIX, Role::Check);
        std::string r = go(body, is_arrow ? P_EXPR : P_PROD, Role::Check);
        return l + " " + hash + op + " " + r;
    }

    std::string later_form(const Node& n, bool code) {
        std::string hash = code ? "#" : "";
        std::string k = at(n.ix);
        if (mentions(n.kids[0], 0)) {
            std::string a = fresh(n.name(0), "a");
            Bound b(*this, {a});
            return hash + later_s() + "(" + a + " : " + k + "). " + go(n.kids[0], P_EXPR, Role::Check);
        }
        Term body = unshift(n.kids[0], 1);
        return hash + later_s() + k + " " + go(body, P_APP, Role::Check);
    }

    std::string go(const Term& t, int prec, Role role) {
        const Node& n = *t;
        if (role == Role::Infer) {
            if (Term ty = intro_type(n)) return ascribe(t, ty);
        }
        switch (n.kind) {
        case K::Nat: return "Nat";
        case K::Pi: return paren(binder_or_arrow(n, arrow_s(), false), prec > P_EXPR);
        case K::Sigma: return paren(binder_or_arrow(n, times_s(), false), prec > P_PROD);
        case K::Id:
            return paren("Id " + go(n.kids[0], P_ATOM, Role::Check) + " " + go(n.kids[1], P_ATOM, Role::Check) + " " +
                             go(n.kids[2], P_ATOM, Role::Check),
                         prec > P_APP);
        case K::Later: {
            std::string s = later_form(n, false);
            bool dep = mentions(n.kids[0], 0);
            return paren(s, prec > (dep ? P_EXPR : P_PREFIX));
        }
        case K::Forall: {
            std::string k = fresh(n.name(0), "k");
            Bound b(*this, {k});
            return paren(std::string(forall_s()) + k + ". " + go(n.kids[0], P_EXPR, Role::Check), prec > P_EXPR);
        }
        case K::Univ: return n.d1.empty() ? "U" : "U" + clockset(n.d1);
        case K::El: return "El" + clockset(n.d1) + "(" + go(n.kids[0], P_EXPR, Role::Check) + ")";
        case K::Var: return at(n.ix);
        case K::Global: {
            bool dflt = true;
            std::vector<int> want = Program::ambient_args(static_cast<int>(n.d1.size()), static_cast<int>(scope.size()));
            if (want != n.d1) dflt = false;
            // Default arguments only make sense when the scope starts with the ambient clocks.
            if (dflt) return n.gname;
            std::string s = n.gname + "{";
            for (std::size_t i = 0; i < n.d1.size(); ++i) {
                if (i) s += ",";
                s += at(n.d1[i]);
            }
            return s + "}";
        }
        case K::Zero: return "0";
        case K::Suc: {
            unsigned k;
            if (numeral_value(t, k)) return std::to_string(k);
            return paren("suc " + go(n.kids[0], P_ATOM, Role::Check), prec > P_APP);
        }
        case K::NatRec: {
            std::string x = fresh(n.name(0), "x");
            std::string motive;
            {
                Bound b(*this, {x});
                motive = "(" + x + ". " + go(n.kids[0], P_EXPR, Role::Check) + ")";
            }
            std::string z = go(n.kids[1], P_ATOM, Role::Check);
            std::string m = fresh(n.name(1), "n");
            std::string step;
            {
                Bound b1(*this, {m});
                std::string ih = fresh(n.name(2), "ih");
                Bound b2(*this, {ih});
                step = "(" + m + " " + ih + ". " + go(n.kids[2], P_EXPR, Role::Check) + ")";
            }
            return paren("natrec " + motive + " " + z + " " + step + " " + go(n.kids[3], P_ATOM, Role::Check),
                         prec > P_APP);
        }
        case K::Lam: {
            std::string x = fresh(n.name(0), "x");
            Bound b(*this, {x});
            return paren(std::string(lam_s()) + x + ". " + go(n.kids[2], P_EXPR, Role::Check), prec > P_EXPR);
        }
        case K::App: {
            if (is_fix(n)) {
                const Node& d = *n.kids[3];
                return paren("fix^" + at(d.ix) + " [" + go(d.kids[0], P_EXPR, Role::Check) + "] " +
                                 go(d.kids[1], P_ATOM, Role::Check),
                             prec > P_APP);
            }
            return paren(go(n.kids[2], P_APP, Role::Infer) + " " + go(n.kids[3], P_ATOM, Role::Check), prec > P_APP);
        }
        case K::Pair:
            return "(" + go(n.kids[2], P_EXPR, Role::Check) + ", " + go(n.kids[3], P_EXPR, Role::Check) + ")";
        case K::Fst:
        case K::Snd:
            return paren(std::string(n.kind == K::Fst ? "fst " : "snd ") + go(n.kids[2], P_ATOM, Role::Infer),
                         prec > P_APP);
        case K::Refl: return "refl";
        case K::J: {
            std::string x = fresh(n.name(0), "x");
            std::string motive, base;
            {
                Bound b1(*this, {x});
                std::string y = fresh(n.name(1), "y");
                Bound b2(*this, {y});
                std::string p = fresh(n.name(2), "p");
                Bound b3(*this, {p});
                motive = "(" + x + " " + y + " " + p + ". " + go(n.kids[1], P_EXPR, Role::Check) + ")";
            }
            {
                Bound b(*this, {x});
                base = "(" + x + ". " + go(n.kids[2], P_EXPR, Role::Check) + ")";
            }
            return paren("J " + motive + " " + base + " " + go(n.kids[5], P_ATOM, Role::Infer), prec > P_APP);
        }
        case K::ClkLam: {
            std::string k = fresh(n.name(0), "k");
            Bound b(*this, {k});
            return paren(std::string(biglam_s()) + k + ". " + go(n.kids[1], P_EXPR, Role::Check), prec > P_EXPR);
        }
        case K::ClkApp:
            return paren(go(n.kids[1], P_ATOM, Role::Infer) + " [" + at(n.ix) + "]", prec > P_APP);
        case K::TickLam: {
            std::string k = at(n.ix);
            std::string a = fresh(n.name(0), "a");
            Bound b(*this, {a});
            return paren(std::string(lam_s()) + "(" + a + " : " + k + "). " + go(n.kids[1], P_EXPR, Role::Check),
                         prec > P_EXPR);
        }
        case K::TickApp:
            return paren(go(n.kids[1], P_ATOM, Role::Infer) + " [" + at(n.ix2) + "]", prec > P_APP);
        case K::DiaApp: {
            std::string target = at(n.ix);
            std::string k = fresh(n.name(0), "k");
            Bound b(*this, {k});
            return paren(go(n.kids[1], P_ATOM, Role::Infer) + " [" + k + ".][" + dia_s() + " " + target + "]",
                         prec > P_APP);
        }
        case K::Dfix:
            return paren("dfix^" + at(n.ix) + " [" + go(n.kids[0], P_EXPR, Role::Check) + "] " +
                             go(n.kids[1], P_ATOM, Role::Check),
                         prec > P_APP);
        case K::Cirr:
            return paren("cirr [" + go(n.kids[0], P_EXPR, Role::Check) + "] " + go(n.kids[1], P_ATOM, Role::Check),
                         prec > P_APP);
        case K::Tirr:
        case K::Pfix:
            return paren(std::string(n.kind == K::Tirr ? "tirr^" : "pfix^") + at(n.ix) + " [" +
                             go(n.kids[0], P_EXPR, Role::Check) + "] " + go(n.kids[1], P_ATOM, Role::Check),
                         prec > P_APP);
        case K::CodeNat: return "#Nat";
        case K::CodePi: return paren(binder_or_arrow(n, arrow_s(), true), prec > P_EXPR);
        case K::CodeSigma: return paren(binder_or_arrow(n, times_s(), true), prec > P_PROD);
        case K::CodeForall: {
            std::string k = fresh(n.name(0), "k");
            Bound b(*this, {k});
            return paren(std::string("#") + forall_s() + k + ". " + go(n.kids[0], P_EXPR, Role::Check),
                         prec > P_EXPR);
        }
        case K::CodeLater: {
            bool dep = mentions(n.kids[0], 0);
            return paren(later_form(n, true), prec > (dep ? P_EXPR : P_PREFIX));
        }
        case K::Incl:
            return "in" + clockset(n.d1) + clockset(n.d2) + "(" + go(n.kids[0], P_EXPR, Role::Check) + ")";
        }
        return "?";
    }
};

}  // namespace

std::string pretty(const Term& t, const std::vector<std::string>& scope, const PrettyOptions& opts) {
    Printer p{opts, scope};
    return p.go(t, P_EXPR, Role::Check);
}

std::string pretty(const Context& ctx, const PrettyOptions& opts) {
    Printer p{opts, {}};
    std::ostringstream os;
    for (std::size_t i = 0; i < ctx.entries.size(); ++i) {
        const Entry& e = ctx.entries[i];
        if (i) os << ", ";
        std::string name = p.fresh(e.name, e.kind == EntryKind::Clock ? "k" : e.kind == EntryKind::Tick ? "a" : "x");
        switch (e.kind) {
        case EntryKind::Var: os << name << " : " << p.go(e.type, P_EXPR, Role::Check); break;
        case EntryKind::Clock: os << name << " : clock"; break;
        case EntryKind::Tick: os << name << " : " << p.at(e.clock); break;
        }
        p.scope.push_back(name);
    }
    return os.str();
}

}  // namespace clott
