#pragma once

#include <compare>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "scenedet/app_ir/types.hpp"

namespace scenedet::callgraph {

struct MethodRef {
    std::string class_name;
    std::string method_name;

    std::string str() const { return class_name + "." + method_name; }

    auto operator<=>(const MethodRef&) const = default;
};

enum class EdgeKind { Direct, Implicit };

// One row of the implicit run/start pair table: a call to `start_method`
// on an object of `top_class` actually executes `run_method`.
struct ImplicitPairTable {
    struct Row {
        std::string top_class;
        std::string run_method;
        std::string start_method;
    };
    std::vector<Row> rows;

    // The six default rows. The AsyncTask chain keeps the table's
    // "doPostExecute" spelling; deployments can correct it via a config
    // file (see load_implicit_pairs).
    static const ImplicitPairTable& table4();

    const Row* row_for_start(const std::string& start_method) const;
};

// Config format: one row per line, `top_class run_method start_method`,
// '#' comments and blank lines ignored.
ImplicitPairTable load_implicit_pairs(const std::filesystem::path& path);

struct CallGraph {
    std::set<MethodRef> nodes;
    // Deterministic adjacency; parallel edges collapse per (callee, kind).
    std::map<MethodRef, std::set<std::pair<MethodRef, EdgeKind>>> out_edges;
    std::map<std::string, std::vector<MethodRef>> class_index;
    std::vector<std::string> warnings; // unresolved targets, non-fatal

    bool has_edge(const MethodRef& from, const MethodRef& to) const;
    std::size_t edge_count() const;
};

CallGraph build_call_graph(const app_ir::AppBundle& bundle,
                           const ImplicitPairTable& table
                           = ImplicitPairTable::table4());

// BFS closure over out-edges, up to max_depth hops. Depth 0 yields {from}.
// Throws UnknownMethod when `from` is not a node.
std::set<MethodRef> reachable_methods(const CallGraph& cg,
                                      const MethodRef& from, int max_depth);

// Multi-source variant used by the per-class analyses: closure from every
// method of `class_name` with the same depth budget per source.
std::set<MethodRef> reachable_from_class(const CallGraph& cg,
                                         const std::string& class_name,
                                         int max_depth);

// Edge-list text dump for debugging.
std::string dump_edges(const CallGraph& cg);

} // namespace scenedet::callgraph
