#pragma once

#include <set>
#include <string>
#include <vector>

#include "clott/syntax.hpp"

namespace clott {

struct PrettyOptions {
    bool unicode = true;
    // Names that bound variables must avoid (typically the global definitions).
    const std::set<std::string>* reserved = nullptr;
};

// `scope` lists the names of the enclosing context, oldest first. Printed output
// re-elaborates to the same core term against the same expected type.
std::string pretty(const Term& t, const std::vector<std::string>& scope, const PrettyOptions& opts = {});
std::string pretty(const Context& ctx, const PrettyOptions& opts = {});

}  // namespace clott
