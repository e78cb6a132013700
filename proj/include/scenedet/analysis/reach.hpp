#pragma once

#include <map>
#include <set>
#include <string>

#include "scenedet/app_ir/types.hpp"
#include "scenedet/callgraph/call_graph.hpp"

namespace scenedet::analysis {

struct AnalysisConfig {
    // Inter-procedural depth budget shared by widget identification,
    // backward taint and transition-unit discovery.
    int max_depth = 10;
};

// Depth-bounded reachability from each class's own methods, plus the
// inverse view (which classes reach a given method). A transition site or
// widget API call "belongs to" every class that reaches its method within
// the depth budget; sites beyond the budget stay unattributed, which is
// what makes long helper chains drop out of the analysis.
class ReachIndex {
public:
    ReachIndex(const app_ir::AppBundle& bundle,
               const callgraph::CallGraph& cg, const AnalysisConfig& cfg);

    const std::set<callgraph::MethodRef>&
    reached_from(const std::string& class_name) const;

    const std::set<std::string>&
    reaching_classes(const callgraph::MethodRef& method) const;

private:
    std::map<std::string, std::set<callgraph::MethodRef>> reached_;
    std::map<callgraph::MethodRef, std::set<std::string>> reaching_;
    std::set<callgraph::MethodRef> empty_methods_;
    std::set<std::string> empty_classes_;
};

} // namespace scenedet::analysis
