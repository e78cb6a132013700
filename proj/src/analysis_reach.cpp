#include "scenedet/analysis/reach.hpp"

namespace scenedet::analysis {

ReachIndex::ReachIndex(const app_ir::AppBundle& bundle,
                       const callgraph::CallGraph& cg,
                       const AnalysisConfig& cfg)
{
    for (const auto& c : bundle.classes) {
        auto reached = callgraph::reachable_from_class(cg, c.name,
                                                       cfg.max_depth);
        for (const auto& m : reached)
            reaching_[m].insert(c.name);
        reached_[c.name] = std::move(reached);
    }
}

const std::set<callgraph::MethodRef>&
ReachIndex::reached_from(const std::string& class_name) const
{
    auto it = reached_.find(class_name);
    return it == reached_.end() ? empty_methods_ : it->second;
}

const std::set<std::string>&
ReachIndex::reaching_classes(const callgraph::MethodRef& method) const
{
    auto it = reaching_.find(method);
    return it == reaching_.end() ? empty_classes_ : it->second;
}

} // namespace scenedet::analysis
