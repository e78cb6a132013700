#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "scenedet/analysis/reach.hpp"
#include "scenedet/app_ir/types.hpp"
#include "scenedet/callgraph/call_graph.hpp"

namespace scenedet::widgets {

struct SiteRef {
    std::string class_name;
    std::string method_name;
    int instr_index = 0;

    std::string str() const
    {
        return class_name + "." + method_name + "#"
                + std::to_string(instr_index);
    }

    auto operator<=>(const SiteRef&) const = default;
};

// Stoplist of common tokens removed from imprints. File format: one token
// per line, '#' comments.
using Stoplist = std::set<std::string>;

Stoplist default_stoplist();
Stoplist load_stoplist(const std::filesystem::path& path);

// Splits a constant value on the URL delimiters / ? & = : . and drops
// empty pieces.
std::vector<std::string> split_url_tokens(const std::string& value);

struct TaintResult {
    SiteRef sink;
    std::set<std::string> tokens;
    int discarded_runtime_sources = 0;
    bool depth_exhausted = false;
};

// Backward def-use taint from a LoadUrl sink over text values. Constant
// and resource sources are instantiated and tokenized; runtime sources are
// discarded and counted. Call boundaries (return-value and argument flow)
// each cost one depth unit up to cfg.max_depth. Throws SinkNotText when
// the sink operand is produced by a non-text instruction.
TaintResult backward_taint_text(const app_ir::AppBundle& bundle,
                                const callgraph::CallGraph& cg,
                                const SiteRef& sink,
                                const analysis::AnalysisConfig& cfg = {},
                                const Stoplist& stoplist
                                = default_stoplist());

// All LoadUrl sinks of the bundle, in deterministic order.
std::vector<SiteRef> loadurl_sites(const app_ir::AppBundle& bundle);

// Runs the backward taint on every LoadUrl site and attributes tokens to
// the owning Activity/Fragment via the same caller resolution the ATG
// uses. Owners gain tokens as sorted unions.
std::map<std::string, std::set<std::string>>
generate_imprints(const app_ir::AppBundle& bundle,
                  const callgraph::CallGraph& cg, const Stoplist& stoplist,
                  const analysis::AnalysisConfig& cfg = {});

// Number of LoadUrl sinks attributed to each Activity/Fragment; feeds the
// has_webview flag.
std::map<std::string, int>
webview_sites_by_owner(const app_ir::AppBundle& bundle,
                       const callgraph::CallGraph& cg,
                       const analysis::AnalysisConfig& cfg = {});

} // namespace scenedet::widgets
