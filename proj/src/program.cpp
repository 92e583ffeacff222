#include "clott/program.hpp"

namespace clott {

const GlobalDef* Program::find(const std::string& name) const {
    auto it = defs.find(name);
    return it == defs.end() ? nullptr : &it->second;
}

const TypeAlias* Program::find_alias(const std::string& name) const {
    auto it = aliases.find(name);
    return it == aliases.end() ? nullptr : &it->second;
}

Context Program::ambient_context(int len) const {
    Context c;
    for (int i = 0; i < len; ++i) c = c.push_clock(ambient.at(static_cast<std::size_t>(i)));
    return c;
}

std::vector<int> Program::ambient_args(int ambient, int n) {
    std::vector<int> args;
    for (int i = 0; i < ambient; ++i) args.push_back(n - 1 - i);
    return args;
}

namespace {

struct AmbientMapper : Mapper {
    int a;
    const std::vector<int>& args;
    AmbientMapper(int a_, const std::vector<int>& args_) : a(a_), args(args_) {}
    Term var(int, int, const Node&) override { throw ScopeError("definition mentions a non-ambient variable"); }
    int clock(int j) override {
        if (j >= a) throw ScopeError("definition mentions a clock outside its ambient context");
        return args[static_cast<std::size_t>(a - 1 - j)];
    }
    int tick(int) override { throw ScopeError("definition mentions a free tick"); }
};

}  // namespace

Term instantiate_ambient(const Term& t, int ambient, const std::vector<int>& args) {
    AmbientMapper m(ambient, args);
    return map_term(t, m);
}

}  // namespace clott
