#pragma once

#include <map>
#include <set>
#include <string>

#include "scenedet/analysis/reach.hpp"
#include "scenedet/app_ir/types.hpp"
#include "scenedet/callgraph/call_graph.hpp"

namespace scenedet::analysis {

// Caller-side attribution of a class, following the ATG construction
// rules: a fragment maps to itself plus every activity that (transitively)
// hosts it; an inner class maps to its nearest enclosing UI class,
// expanded the same way when that owner is a fragment; anything else maps
// to itself.
//
// Hosting is derived from three sources within the depth budget:
// layout nodes typed with the fragment class (static embedding), NewWidget
// of the fragment class (dynamic embedding), and navgraph host/destination
// pairs.
class CallerResolver {
public:
    CallerResolver(const app_ir::AppBundle& bundle,
                   const callgraph::CallGraph& cg, const ReachIndex& reach);

    // Throws UnknownClass for names not declared in the bundle.
    std::set<std::string> resolve(const std::string& class_name) const;

    // Activities transitively hosting the fragment.
    std::set<std::string> host_activities(const std::string& fragment) const;

private:
    const app_ir::AppBundle& bundle_;
    // fragment -> UI classes that directly embed or host it
    std::map<std::string, std::set<std::string>> direct_owners_;
};

} // namespace scenedet::analysis
