#pragma once

#include <string>
#include <vector>

#include "scenedet/app_ir/types.hpp"

namespace scenedet::app_ir {

// Structured invariant violation. `line` is 0 when the bundle was built
// in memory rather than parsed from text.
struct Violation {
    std::string code;    // e.g. "duplicate_class", "inner_of_cycle"
    std::string subject; // offending name or "Cls.method#3" location
    int line = 0;
    std::string message;

    bool operator==(const Violation&) const = default;
};

// Empty result iff all AppBundle invariants hold.
std::vector<Violation> validate(const AppBundle& bundle);

} // namespace scenedet::app_ir
