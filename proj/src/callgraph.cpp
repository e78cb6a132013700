#include "scenedet/callgraph/call_graph.hpp"

#include <deque>
#include <fstream>
#include <sstream>

#include "scenedet/common/errors.hpp"

namespace scenedet::callgraph {

using app_ir::ApiKind;
using app_ir::AppBundle;
using app_ir::Instruction;

const ImplicitPairTable& ImplicitPairTable::table4()
{
    static const ImplicitPairTable table{{
            {"AsyncTask", "onPreExecute", "execute"},
            {"AsyncTask", "doInBackground", "onPreExecute"},
            {"AsyncTask", "doPostExecute", "doInBackground"},
            {"OnClickListener", "OnClick", "setOnClickListener"},
            {"Runnable", "run", "start"},
            {"Message", "handleMessage", "sendMessage"},
    }};
    return table;
}

const ImplicitPairTable::Row*
ImplicitPairTable::row_for_start(const std::string& start_method) const
{
    for (const auto& r : rows) {
        if (r.start_method == start_method)
            return &r;
    }
    return nullptr;
}

ImplicitPairTable load_implicit_pairs(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open implicit pair table " + path.string());
    ImplicitPairTable table;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        std::istringstream ls(line);
        ImplicitPairTable::Row row;
        if (ls >> row.top_class >> row.run_method >> row.start_method)
            table.rows.push_back(std::move(row));
    }
    return table;
}

bool CallGraph::has_edge(const MethodRef& from, const MethodRef& to) const
{
    auto it = out_edges.find(from);
    if (it == out_edges.end())
        return false;
    for (const auto& [callee, kind] : it->second) {
        if (callee == to)
            return true;
    }
    return false;
}

std::size_t CallGraph::edge_count() const
{
    std::size_t n = 0;
    for (const auto& [from, outs] : out_edges)
        n += outs.size();
    return n;
}

namespace {

// Maps a start-site API to the start-method name keyed in the pair table.
const char* start_method_of(ApiKind api)
{
    switch (api) {
    case ApiKind::ThreadStart:
        return "start";
    case ApiKind::AsyncExecute:
        return "execute";
    case ApiKind::SetOnClickListener:
        return "setOnClickListener";
    case ApiKind::SendMessage:
        return "sendMessage";
    default:
        return nullptr;
    }
}

} // namespace

CallGraph build_call_graph(const AppBundle& bundle,
                           const ImplicitPairTable& table)
{
    CallGraph cg;
    for (const auto& c : bundle.classes) {
        for (const auto& m : c.methods) {
            MethodRef ref{c.name, m.name};
            cg.nodes.insert(ref);
            cg.class_index[c.name].push_back(ref);
        }
    }

    auto add_edge = [&](const MethodRef& from, const MethodRef& to,
                        EdgeKind kind) {
        cg.out_edges[from].insert({to, kind});
    };

    for (const auto& c : bundle.classes) {
        for (const auto& m : c.methods) {
            MethodRef caller{c.name, m.name};
            for (const auto& in : m.instructions) {
                if (in.kind == Instruction::Kind::Call) {
                    auto dot = in.target.rfind('.');
                    if (dot == std::string::npos) {
                        cg.warnings.push_back("unresolved call target '"
                                              + in.target + "' in "
                                              + caller.str());
                        continue;
                    }
                    MethodRef callee{in.target.substr(0, dot),
                                     in.target.substr(dot + 1)};
                    if (cg.nodes.count(callee)) {
                        add_edge(caller, callee, EdgeKind::Direct);
                    }
                    else {
                        cg.warnings.push_back("unresolved call target '"
                                              + in.target + "' in "
                                              + caller.str());
                    }
                    continue;
                }
                if (in.kind != Instruction::Kind::ApiCall)
                    continue;
                const char* start = start_method_of(in.api);
                if (!start)
                    continue;
                const auto* target_cls = bundle.find_class(in.target);
                if (!target_cls) {
                    cg.warnings.push_back("unresolved start target '"
                                          + in.target + "' in "
                                          + caller.str());
                    continue;
                }
                // Walk the run/start chain: execute -> onPreExecute ->
                // doInBackground -> doPostExecute for AsyncTask; a single
                // hop for the other rows. Each edge needs both endpoints
                // to exist as methods.
                MethodRef from = caller;
                std::string start_name = start;
                std::set<std::string> seen_starts;
                while (const auto* row = table.row_for_start(start_name)) {
                    if (!seen_starts.insert(start_name).second)
                        break;
                    MethodRef run{target_cls->name, row->run_method};
                    bool from_exists = cg.nodes.count(from) > 0;
                    bool run_exists = cg.nodes.count(run) > 0;
                    if (from_exists && run_exists)
                        add_edge(from, run, EdgeKind::Implicit);
                    from = run;
                    start_name = row->run_method;
                }
            }
        }
    }
    return cg;
}

std::set<MethodRef> reachable_methods(const CallGraph& cg,
                                      const MethodRef& from, int max_depth)
{
    if (!cg.nodes.count(from))
        throw UnknownMethod("unknown method " + from.str());
    std::set<MethodRef> seen{from};
    std::deque<std::pair<MethodRef, int>> queue{{from, 0}};
    while (!queue.empty()) {
        auto [cur, depth] = queue.front();
        queue.pop_front();
        if (depth >= max_depth)
            continue;
        auto it = cg.out_edges.find(cur);
        if (it == cg.out_edges.end())
            continue;
        for (const auto& [callee, kind] : it->second) {
            if (seen.insert(callee).second)
                queue.push_back({callee, depth + 1});
        }
    }
    return seen;
}

std::set<MethodRef> reachable_from_class(const CallGraph& cg,
                                         const std::string& class_name,
                                         int max_depth)
{
    std::set<MethodRef> seen;
    std::deque<std::pair<MethodRef, int>> queue;
    auto it = cg.class_index.find(class_name);
    if (it == cg.class_index.end())
        return seen;
    for (const auto& m : it->second) {
        if (seen.insert(m).second)
            queue.push_back({m, 0});
    }
    while (!queue.empty()) {
        auto [cur, depth] = queue.front();
        queue.pop_front();
        if (depth >= max_depth)
            continue;
        auto oit = cg.out_edges.find(cur);
        if (oit == cg.out_edges.end())
            continue;
        for (const auto& [callee, kind] : oit->second) {
            if (seen.insert(callee).second)
                queue.push_back({callee, depth + 1});
        }
    }
    return seen;
}

std::string dump_edges(const CallGraph& cg)
{
    std::string out;
    for (const auto& [from, outs] : cg.out_edges) {
        for (const auto& [to, kind] : outs) {
            out += from.str();
            out += kind == EdgeKind::Direct ? " -> " : " ~> ";
            out += to.str();
            out += "\n";
        }
    }
    return out;
}

} // namespace scenedet::callgraph
