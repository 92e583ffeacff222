#include "clott/time.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace clott::sem {

namespace {

template <class V>
auto find_clock(V& cs, Atom a) {
    return std::lower_bound(cs.begin(), cs.end(), a, [](const auto& p, Atom x) { return p.first < x; });
}

}  // namespace

Stage make_stage(std::vector<std::pair<Atom, int>> clocks) {
    std::sort(clocks.begin(), clocks.end());
    for (std::size_t i = 0; i < clocks.size(); ++i) {
        if (clocks[i].second < 0) throw StageError("budget must be nonnegative");
        if (i > 0 && clocks[i].first == clocks[i - 1].first) throw StageError("duplicate clock in stage");
    }
    return Stage{std::move(clocks)};
}

bool Stage::has(Atom a) const {
    auto it = find_clock(clocks, a);
    return it != clocks.end() && it->first == a;
}

int Stage::budget(Atom a) const {
    auto it = find_clock(clocks, a);
    if (it == clocks.end() || it->first != a)
        throw StageError("clock " + std::to_string(a) + " is not in stage " + str());
    return it->second;
}

std::vector<Atom> Stage::atoms() const {
    std::vector<Atom> out;
    for (const auto& c : clocks) out.push_back(c.first);
    return out;
}

Stage Stage::with(Atom a, int n) const {
    Stage s = *this;
    auto it = find_clock(s.clocks, a);
    if (it != s.clocks.end() && it->first == a)
        it->second = n;
    else
        s.clocks.insert(it, {a, n});
    return s;
}

Stage Stage::dec(Atom a) const {
    int b = budget(a);
    if (b == 0) throw StageError("no ticks left on clock " + std::to_string(a));
    return with(a, b - 1);
}

Atom Stage::fresh() const { return clocks.empty() ? 0 : clocks.back().first + 1; }

std::string Stage::str() const {
    std::string s = "{";
    for (std::size_t i = 0; i < clocks.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(clocks[i].first) + "=" + std::to_string(clocks[i].second);
    }
    return s + "}";
}

Atom Morphism::operator()(Atom a) const {
    auto it = std::lower_bound(map.begin(), map.end(), a, [](const auto& p, Atom x) { return p.first < x; });
    if (it == map.end() || it->first != a) throw StageError("morphism is undefined on clock " + std::to_string(a));
    return it->second;
}

bool Morphism::is_identity() const {
    if (src != dst) return false;
    for (const auto& p : map)
        if (p.first != p.second) return false;
    return true;
}

std::string Morphism::str() const {
    std::string s = src.str() + " -> " + dst.str() + " [";
    for (std::size_t i = 0; i < map.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(map[i].first) + "->" + std::to_string(map[i].second);
    }
    return s + "]";
}

bool is_morphism(const Stage& src, const Stage& dst, const std::vector<std::pair<Atom, Atom>>& map) {
    if (map.size() != src.size()) return false;
    for (std::size_t i = 0; i < map.size(); ++i) {
        const auto& [from, to] = map[i];
        if (from != src.clocks[i].first) return false;
        if (!dst.has(to)) return false;
        if (dst.budget(to) > src.clocks[i].second) return false;
    }
    return true;
}

Morphism make_morphism(Stage src, Stage dst, std::vector<std::pair<Atom, Atom>> map) {
    std::sort(map.begin(), map.end());
    if (!is_morphism(src, dst, map))
        throw StageError("not a morphism of time objects: " + Morphism{src, dst, map}.str());
    return Morphism{std::move(src), std::move(dst), std::move(map)};
}

Morphism identity(const Stage& s) {
    std::vector<std::pair<Atom, Atom>> m;
    for (const auto& c : s.clocks) m.push_back({c.first, c.first});
    return Morphism{s, s, std::move(m)};
}

Morphism compose(const Morphism& sigma, const Morphism& tau) {
    if (tau.dst != sigma.src)
        throw StageError("cannot compose: " + tau.dst.str() + " is not " + sigma.src.str());
    if (tau.is_identity()) return sigma;
    if (sigma.is_identity()) return tau;
    std::vector<std::pair<Atom, Atom>> m;
    m.reserve(tau.map.size());
    for (const auto& [a, b] : tau.map) m.push_back({a, sigma(b)});
    return Morphism{tau.src, sigma.dst, std::move(m)};
}

Morphism tick_morphism(const Stage& s, Atom a) {
    Morphism m = identity(s);
    m.dst = s.dec(a);
    return m;
}

Morphism reinterpret(const Morphism& m, Stage src, Stage dst) {
    return make_morphism(std::move(src), std::move(dst), m.map);
}

std::vector<Morphism> enumerate_morphisms(const Stage& src, const Stage& dst) {
    std::vector<Morphism> out;
    std::size_t n = src.size();
    auto targets = dst.atoms();
    if (n > 0 && targets.empty()) return out;
    std::vector<std::size_t> pick(n, 0);
    while (true) {
        std::vector<std::pair<Atom, Atom>> m;
        for (std::size_t i = 0; i < n; ++i) m.push_back({src.clocks[i].first, targets[pick[i]]});
        if (is_morphism(src, dst, m)) out.push_back(Morphism{src, dst, std::move(m)});
        std::size_t i = 0;
        while (i < n && ++pick[i] == targets.size()) pick[i++] = 0;
        if (i == n) break;
    }
    return out;
}

ClockIntro clock_intro_iota(const Stage& s, int n) {
    if (n < 0) throw StageError("budget must be nonnegative");
    Atom f = s.fresh();
    Morphism m = identity(s);
    m.dst = s.with(f, n);
    return {std::move(m), f};
}

Morphism merge_clock(const Stage& s, Atom from, Atom to) {
    if (from == to) throw StageError("cannot merge a clock with itself");
    Stage dst;
    for (const auto& c : s.clocks)
        if (c.first != from) dst.clocks.push_back(c);
    std::vector<std::pair<Atom, Atom>> m;
    for (const auto& c : s.clocks) m.push_back({c.first, c.first == from ? to : c.first});
    return make_morphism(s, std::move(dst), std::move(m));
}

std::vector<Stage> enumerate_stages(int min_clocks, int max_clocks, int max_budget) {
    std::vector<Stage> out;
    for (int n = std::max(0, min_clocks); n <= max_clocks; ++n) {
        std::vector<int> b(static_cast<std::size_t>(n), 0);
        while (true) {
            Stage s;
            for (int i = 0; i < n; ++i) s.clocks.push_back({i, b[static_cast<std::size_t>(i)]});
            out.push_back(s);
            int i = 0;
            while (i < n && ++b[static_cast<std::size_t>(i)] > max_budget) b[static_cast<std::size_t>(i++)] = 0;
            if (i == n) break;
        }
    }
    return out;
}

Atom NamedStage::atom_of(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<Atom>(i);
    return -1;
}

NamedStage parse_stage(const std::string& literal) {
    auto trim = [](std::string s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
        std::size_t i = 0;
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        return s.substr(i);
    };
    NamedStage out;
    if (trim(literal).empty()) return out;
    std::vector<std::pair<Atom, int>> clocks;
    std::size_t pos = 0;
    while (pos <= literal.size()) {
        std::size_t comma = literal.find(',', pos);
        if (comma == std::string::npos) comma = literal.size();
        std::string item = literal.substr(pos, comma - pos);
        pos = comma + 1;
        std::size_t eq = item.find('=');
        if (eq == std::string::npos) throw StageError("malformed stage entry '" + trim(item) + "': expected name=budget");
        std::string name = trim(item.substr(0, eq));
        std::string num = trim(item.substr(eq + 1));
        bool ident = !name.empty() && (std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_');
        for (char c : name) ident = ident && (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'');
        if (!ident) throw StageError("malformed clock name '" + name + "' in stage");
        long long b = 0;
        auto [end, ec] = std::from_chars(num.data(), num.data() + num.size(), b);
        if (num.empty() || ec != std::errc{} || end != num.data() + num.size())
            throw StageError("malformed budget '" + num + "' for clock " + name);
        if (b < 0) throw StageError("budget must be nonnegative");
        if (b > 1000) throw StageError("budget " + num + " is too large");
        if (out.atom_of(name) >= 0) throw StageError("duplicate clock in stage");
        clocks.push_back({static_cast<Atom>(out.names.size()), static_cast<int>(b)});
        out.names.push_back(name);
    }
    out.stage = make_stage(std::move(clocks));
    return out;
}

}  // namespace clott::sem
