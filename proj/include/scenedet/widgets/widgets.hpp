#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "scenedet/analysis/reach.hpp"
#include "scenedet/app_ir/types.hpp"
#include "scenedet/callgraph/call_graph.hpp"

namespace scenedet::widgets {

struct WidgetRecord {
    std::string widget_type;
    std::string widget_id; // empty = none
    std::string icon;      // empty = none
    std::set<app_ir::ListenerKind> listeners;

    bool operator==(const WidgetRecord&) const = default;
    auto operator<=>(const WidgetRecord&) const = default;
};

// Per-node UI attribute labels of the scene graph. Widget identification
// fills the native side; imprint generation fills tokens and the webview
// flag.
struct UiAttributes {
    std::string owner;
    std::vector<WidgetRecord> native_widgets;
    std::set<std::string> imprint_tokens;
    bool has_webview = false;
    int layout_depth = 0;

    bool operator==(const UiAttributes&) const = default;
};

// For each Activity/Fragment: widgets of every layout reached through
// SetContentView/Inflate within the depth budget, plus NewWidget dynamic
// additions; listeners come from layout declarations and from
// SetOnClickListener sites resolved through same-method FindViewById /
// NewWidget registers. Layout nodes typed with a fragment class are
// embeddings, not widgets, and are skipped here.
std::map<std::string, UiAttributes>
identify_native_widgets(const app_ir::AppBundle& bundle,
                        const callgraph::CallGraph& cg,
                        const analysis::AnalysisConfig& cfg = {},
                        std::vector<std::string>* warnings = nullptr);

} // namespace scenedet::widgets
