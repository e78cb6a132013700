#include "scenedet/atg/atg.hpp"

#include <algorithm>

#include "scenedet/analysis/callers.hpp"

namespace scenedet::atg {

using app_ir::ApiKind;
using app_ir::AppBundle;
using app_ir::ClassKind;
using app_ir::Instruction;
using callgraph::MethodRef;

const char* unit_kind_name(UnitKind k)
{
    switch (k) {
    case UnitKind::ExplicitApi:
        return "ExplicitApi";
    case UnitKind::ImplicitIcc:
        return "ImplicitIcc";
    case UnitKind::SystemListener:
        return "SystemListener";
    case UnitKind::Navigation:
        return "Navigation";
    }
    return "?";
}

bool Atg::has_node(const std::string& name) const
{
    for (const auto& [n, kind] : nodes) {
        if (n == name)
            return true;
    }
    return false;
}

bool Atg::has_edge(const std::string& from, const std::string& to) const
{
    for (const auto& e : edges) {
        if (e.from == from && e.to == to)
            return true;
    }
    return false;
}

std::set<std::pair<std::string, std::string>> Atg::edge_pairs() const
{
    std::set<std::pair<std::string, std::string>> pairs;
    for (const auto& e : edges)
        pairs.insert({e.from, e.to});
    return pairs;
}

namespace {

struct UnitScan {
    std::vector<TransitionUnit> units;
    // Parallel to units: the classes whose resolved callers source the
    // edges of this unit (empty method slot marks navgraph units).
    std::vector<std::set<std::string>> sources;
};

UnitScan scan_units(const AppBundle& bundle, const callgraph::CallGraph& cg,
                    const analysis::AnalysisConfig& cfg)
{
    analysis::ReachIndex reach(bundle, cg, cfg);
    analysis::CallerResolver resolver(bundle, cg, reach);

    UnitScan out;

    auto ui_filter = [&](const std::set<std::string>& names) {
        std::set<std::string> ui;
        for (const auto& n : names) {
            if (bundle.is_ui_class(n))
                ui.insert(n);
        }
        return ui;
    };

    for (const auto& cls : bundle.classes) {
        for (const auto& method : cls.methods) {
            MethodRef mref{cls.name, method.name};
            bool in_override = cls.overrides_system_listener.count(
                                       method.name)
                    > 0;
            for (int i = 0; i < static_cast<int>(method.instructions.size());
                 ++i) {
                const auto& in = method.instructions[i];
                if (in.kind != Instruction::Kind::ApiCall)
                    continue;

                UnitKind kind;
                std::string callee;
                switch (in.api) {
                case ApiKind::StartActivity:
                case ApiKind::StartActivityForResult:
                    if (!in.target.empty()) {
                        kind = UnitKind::ExplicitApi;
                        callee = in.target;
                    }
                    else {
                        // Intent register: same-method def-use back to the
                        // producing NewIntent; unconsumed or foreign
                        // intents yield no unit.
                        kind = UnitKind::ImplicitIcc;
                        const std::string& reg = in.operands[0];
                        for (int j = i - 1; j >= 0; --j) {
                            const auto& d = method.instructions[j];
                            if (d.dst != reg)
                                continue;
                            if (d.kind == Instruction::Kind::ApiCall
                                && d.api == ApiKind::NewIntent)
                                callee = d.target;
                            break;
                        }
                        if (callee.empty())
                            continue;
                    }
                    break;
                case ApiKind::NavNavigate:
                    kind = UnitKind::Navigation;
                    callee = in.target;
                    break;
                default:
                    continue;
                }
                if (in_override)
                    kind = UnitKind::SystemListener;
                if (!bundle.is_ui_class(callee))
                    continue;

                // Union the resolved callers over every class that reaches
                // this site within the depth budget.
                std::set<std::string> sources;
                for (const auto& reaching : reach.reaching_classes(mref)) {
                    for (const auto& caller : resolver.resolve(reaching))
                        sources.insert(caller);
                }
                sources = ui_filter(sources);
                if (sources.empty())
                    continue;

                TransitionUnit unit;
                unit.location = {cls.name, method.name, i};
                unit.kind = kind;
                unit.callees = {callee};
                out.units.push_back(std::move(unit));
                out.sources.push_back(std::move(sources));
            }
        }
    }

    for (std::size_t n = 0; n < bundle.nav_graphs.size(); ++n) {
        const auto& nav = bundle.nav_graphs[n];
        TransitionUnit unit;
        unit.location = {nav.host_class, "<nav:" + nav.id + ">",
                         static_cast<int>(n)};
        unit.kind = UnitKind::Navigation;
        for (const auto& dest : nav.destinations) {
            if (bundle.is_ui_class(dest))
                unit.callees.insert(dest);
        }
        if (unit.callees.empty() || !bundle.find_class(nav.host_class))
            continue;
        auto sources = ui_filter(resolver.resolve(nav.host_class));
        if (sources.empty())
            continue;
        out.units.push_back(std::move(unit));
        out.sources.push_back(std::move(sources));
    }

    return out;
}

} // namespace

std::vector<TransitionUnit>
find_transition_units(const AppBundle& bundle,
                      const callgraph::CallGraph& cg,
                      const analysis::AnalysisConfig& cfg)
{
    return scan_units(bundle, cg, cfg).units;
}

std::set<std::string> resolve_callers(const std::string& cls,
                                      const AppBundle& bundle,
                                      const callgraph::CallGraph& cg,
                                      const analysis::AnalysisConfig& cfg)
{
    analysis::ReachIndex reach(bundle, cg, cfg);
    analysis::CallerResolver resolver(bundle, cg, reach);
    return resolver.resolve(cls);
}

Atg build_atg(const AppBundle& bundle, const callgraph::CallGraph& cg,
              const analysis::AnalysisConfig& cfg)
{
    Atg atg;
    for (const auto& cls : bundle.classes) {
        if (cls.kind == ClassKind::Activity
            || cls.kind == ClassKind::Fragment)
            atg.nodes.insert({cls.name, cls.kind});
    }

    UnitScan scan = scan_units(bundle, cg, cfg);
    atg.units = scan.units;

    std::map<std::pair<std::string, std::string>, std::set<int>> edge_units;
    for (std::size_t u = 0; u < scan.units.size(); ++u) {
        for (const auto& from : scan.sources[u]) {
            for (const auto& to : scan.units[u].callees)
                edge_units[{from, to}].insert(static_cast<int>(u));
        }
    }
    for (const auto& [pair, units] : edge_units) {
        AtgEdge e;
        e.from = pair.first;
        e.to = pair.second;
        e.provenance.assign(units.begin(), units.end());
        atg.edges.push_back(std::move(e));
    }
    std::sort(atg.edges.begin(), atg.edges.end());
    return atg;
}

std::string dump_edges(const Atg& atg)
{
    std::string out;
    for (const auto& e : atg.edges)
        out += e.from + " -> " + e.to + "\n";
    return out;
}

} // namespace scenedet::atg
