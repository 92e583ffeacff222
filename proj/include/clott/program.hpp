#pragma once

#include <map>
#include <string>
#include <vector>

#include "clott/syntax.hpp"

namespace clott {

struct Span {
    int line = 0;
    int col = 0;
    int end_line = 0;
    int end_col = 0;
};

// A checked top-level definition. Its type and body live in the ambient context
// made of the first `ambient` top-level clocks.
struct GlobalDef {
    std::string name;
    Term type;
    Term body;
    int ambient = 0;
    Span span;
};

struct AliasParam {
    std::string name;
    bool is_clock = false;
    Term type;   // term parameters: relative to ambient + earlier params
};

// `type Name params := T`, expanded during elaboration.
struct TypeAlias {
    std::string name;
    std::vector<AliasParam> params;
    Term body;   // relative to ambient + params
    int ambient = 0;
    Span span;
};

struct Program {
    std::vector<std::string> ambient;   // top-level clocks, oldest first
    std::map<std::string, GlobalDef> defs;
    std::map<std::string, TypeAlias> aliases;
    std::vector<std::string> order;     // definitions in declaration order

    const GlobalDef* find(const std::string& name) const;
    const TypeAlias* find_alias(const std::string& name) const;
    // The ambient context as a checker context (clocks only).
    Context ambient_context(int len) const;
    // Default arguments: the ambient clocks themselves, seen from a context of size n.
    static std::vector<int> ambient_args(int ambient, int n);
};

// Replace the ambient clocks of a definition's type or body by `args`
// (args[i] is the clock used for ambient clock i, in the caller's context).
Term instantiate_ambient(const Term& t, int ambient, const std::vector<int>& args);

}  // namespace clott
