#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "scenedet/analysis/reach.hpp"
#include "scenedet/app_ir/types.hpp"
#include "scenedet/callgraph/call_graph.hpp"
#include "scenedet/widgets/taint.hpp"

namespace scenedet::atg {

using widgets::SiteRef;

enum class UnitKind { ExplicitApi, ImplicitIcc, SystemListener, Navigation };

const char* unit_kind_name(UnitKind k);

// One discovered transition site. Instruction units carry their concrete
// location; navgraph units use "<nav:id>" as the method slot. Only sites
// some UI-attributable class reaches within the depth budget become
// units, so a start call buried behind an over-long helper chain never
// surfaces.
struct TransitionUnit {
    SiteRef location;
    UnitKind kind{};
    std::set<std::string> callees;

    bool operator==(const TransitionUnit&) const = default;
};

struct AtgEdge {
    std::string from;
    std::string to;
    std::vector<int> provenance; // indices into the unit list

    auto operator<=>(const AtgEdge&) const = default;
};

struct Atg {
    std::set<std::pair<std::string, app_ir::ClassKind>> nodes;
    std::vector<AtgEdge> edges; // sorted (from, to)
    std::vector<TransitionUnit> units;

    bool has_node(const std::string& name) const;
    bool has_edge(const std::string& from, const std::string& to) const;
    std::set<std::pair<std::string, std::string>> edge_pairs() const;
};

std::vector<TransitionUnit>
find_transition_units(const app_ir::AppBundle& bundle,
                      const callgraph::CallGraph& cg,
                      const analysis::AnalysisConfig& cfg = {});

// Alg. 1 get_CallerActs (convenience wrapper over analysis::CallerResolver).
std::set<std::string> resolve_callers(const std::string& cls,
                                      const app_ir::AppBundle& bundle,
                                      const callgraph::CallGraph& cg,
                                      const analysis::AnalysisConfig& cfg
                                      = {});

Atg build_atg(const app_ir::AppBundle& bundle,
              const callgraph::CallGraph& cg,
              const analysis::AnalysisConfig& cfg = {});

// Edge-list text dump ("A -> B" per line).
std::string dump_edges(const Atg& atg);

} // namespace scenedet::atg
