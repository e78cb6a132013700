#include "scenedet/scenegraph/scene_graph.hpp"

#include <nlohmann/json.hpp>

#include "scenedet/common/errors.hpp"
#include "scenedet/widgets/taint.hpp"

namespace scenedet::scenegraph {

using app_ir::ClassKind;
using app_ir::ListenerKind;
using json = nlohmann::ordered_json;

SceneGraph build_scene_graph(const app_ir::AppBundle& bundle,
                             const analysis::AnalysisConfig& cfg,
                             const widgets::Stoplist& stoplist,
                             std::vector<std::string>* warnings)
{
    SceneGraph sg;
    sg.app_id = bundle.manifest.package_name;

    auto cg = callgraph::build_call_graph(bundle);
    if (warnings)
        warnings->insert(warnings->end(), cg.warnings.begin(),
                         cg.warnings.end());

    sg.attributes = widgets::identify_native_widgets(bundle, cg, cfg,
                                                     warnings);
    auto imprints = widgets::generate_imprints(bundle, cg, stoplist, cfg);
    auto webview_sites = widgets::webview_sites_by_owner(bundle, cg, cfg);
    for (auto& [owner, ui] : sg.attributes) {
        auto it = imprints.find(owner);
        if (it != imprints.end())
            ui.imprint_tokens = it->second;
        bool has_webview_widget = false;
        for (const auto& w : ui.native_widgets) {
            if (w.widget_type == "WebView")
                has_webview_widget = true;
        }
        auto sit = webview_sites.find(owner);
        ui.has_webview = has_webview_widget
                || (sit != webview_sites.end() && sit->second > 0);
    }

    sg.atg = atg::build_atg(bundle, cg, cfg);
    return sg;
}

namespace {

json widget_to_json(const widgets::WidgetRecord& w)
{
    json j;
    j["type"] = w.widget_type;
    if (!w.widget_id.empty())
        j["id"] = w.widget_id;
    if (!w.icon.empty())
        j["icon"] = w.icon;
    json listeners = json::array();
    for (auto k : w.listeners)
        listeners.push_back(app_ir::listener_kind_name(k));
    if (!listeners.empty())
        j["listeners"] = listeners;
    return j;
}

widgets::WidgetRecord widget_from_json(const json& j,
                                       const std::string& path)
{
    widgets::WidgetRecord w;
    if (!j.contains("type") || !j["type"].is_string())
        throw FormatError(path + ".type", "missing or non-string");
    w.widget_type = j["type"].get<std::string>();
    if (j.contains("id"))
        w.widget_id = j["id"].get<std::string>();
    if (j.contains("icon"))
        w.icon = j["icon"].get<std::string>();
    if (j.contains("listeners")) {
        for (const auto& l : j["listeners"]) {
            auto k = app_ir::listener_kind_from(l.get<std::string>());
            if (!k)
                throw FormatError(path + ".listeners",
                                  "unknown listener kind");
            w.listeners.insert(*k);
        }
    }
    return w;
}

} // namespace

std::string serialize(const SceneGraph& sg)
{
    json j;
    j["version"] = "sg/1";
    j["app_id"] = sg.app_id;

    json nodes = json::array();
    for (const auto& [name, kind] : sg.atg.nodes) {
        json n;
        n["name"] = name;
        n["kind"] = app_ir::class_kind_name(kind);
        auto it = sg.attributes.find(name);
        if (it != sg.attributes.end()) {
            const auto& ui = it->second;
            json ws = json::array();
            for (const auto& w : ui.native_widgets)
                ws.push_back(widget_to_json(w));
            n["widgets"] = ws;
            n["tokens"] = json(ui.imprint_tokens);
            n["has_webview"] = ui.has_webview;
            n["layout_depth"] = ui.layout_depth;
        }
        nodes.push_back(n);
    }
    j["nodes"] = nodes;

    json units = json::array();
    for (const auto& u : sg.atg.units) {
        json uj;
        uj["class"] = u.location.class_name;
        uj["method"] = u.location.method_name;
        uj["index"] = u.location.instr_index;
        uj["kind"] = atg::unit_kind_name(u.kind);
        uj["callees"] = json(u.callees);
        units.push_back(uj);
    }
    j["units"] = units;

    json edges = json::array();
    for (const auto& e : sg.atg.edges) {
        json ej;
        ej["from"] = e.from;
        ej["to"] = e.to;
        ej["units"] = json(e.provenance);
        edges.push_back(ej);
    }
    j["edges"] = edges;

    return j.dump(2) + "\n";
}

SceneGraph deserialize(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    }
    catch (const json::exception& e) {
        throw FormatError("$", e.what());
    }

    auto require = [&](const json& obj, const char* key,
                       const std::string& path) -> const json& {
        if (!obj.contains(key))
            throw FormatError(path + "." + key, "missing field");
        return obj[key];
    };

    if (require(j, "version", "$").get<std::string>() != "sg/1")
        throw FormatError("$.version", "unsupported version");

    SceneGraph sg;
    sg.app_id = require(j, "app_id", "$").get<std::string>();

    const json& nodes = require(j, "nodes", "$");
    if (!nodes.is_array())
        throw FormatError("$.nodes", "expected array");
    int ni = -1;
    for (const auto& n : nodes) {
        ++ni;
        std::string path = "$.nodes[" + std::to_string(ni) + "]";
        std::string name = require(n, "name", path).get<std::string>();
        auto kind = app_ir::class_kind_from(
                require(n, "kind", path).get<std::string>());
        if (!kind)
            throw FormatError(path + ".kind", "unknown class kind");
        sg.atg.nodes.insert({name, *kind});
        widgets::UiAttributes ui;
        ui.owner = name;
        if (n.contains("widgets")) {
            int wi = -1;
            for (const auto& w : n["widgets"]) {
                ++wi;
                ui.native_widgets.push_back(widget_from_json(
                        w, path + ".widgets[" + std::to_string(wi) + "]"));
            }
        }
        if (n.contains("tokens")) {
            for (const auto& t : n["tokens"])
                ui.imprint_tokens.insert(t.get<std::string>());
        }
        if (n.contains("has_webview")) {
            if (!n["has_webview"].is_boolean())
                throw FormatError(path + ".has_webview", "expected bool");
            ui.has_webview = n["has_webview"].get<bool>();
        }
        if (n.contains("layout_depth"))
            ui.layout_depth = n["layout_depth"].get<int>();
        sg.attributes.emplace(name, std::move(ui));
    }

    if (j.contains("units")) {
        int ui_idx = -1;
        for (const auto& u : j["units"]) {
            ++ui_idx;
            std::string path = "$.units[" + std::to_string(ui_idx) + "]";
            atg::TransitionUnit unit;
            unit.location.class_name =
                    require(u, "class", path).get<std::string>();
            unit.location.method_name =
                    require(u, "method", path).get<std::string>();
            unit.location.instr_index = require(u, "index", path).get<int>();
            std::string kind = require(u, "kind", path).get<std::string>();
            bool known = false;
            for (auto k : {atg::UnitKind::ExplicitApi,
                           atg::UnitKind::ImplicitIcc,
                           atg::UnitKind::SystemListener,
                           atg::UnitKind::Navigation}) {
                if (kind == atg::unit_kind_name(k)) {
                    unit.kind = k;
                    known = true;
                }
            }
            if (!known)
                throw FormatError(path + ".kind", "unknown unit kind");
            for (const auto& c : require(u, "callees", path))
                unit.callees.insert(c.get<std::string>());
            sg.atg.units.push_back(std::move(unit));
        }
    }

    const json& edges = require(j, "edges", "$");
    int ei = -1;
    for (const auto& e : edges) {
        ++ei;
        std::string path = "$.edges[" + std::to_string(ei) + "]";
        atg::AtgEdge edge;
        edge.from = require(e, "from", path).get<std::string>();
        edge.to = require(e, "to", path).get<std::string>();
        if (e.contains("units")) {
            for (const auto& p : e["units"])
                edge.provenance.push_back(p.get<int>());
        }
        if (!sg.atg.has_node(edge.from))
            throw FormatError(path + ".from", "unknown node " + edge.from);
        if (!sg.atg.has_node(edge.to))
            throw FormatError(path + ".to", "unknown node " + edge.to);
        sg.atg.edges.push_back(std::move(edge));
    }

    return sg;
}

GraphStats stats(const SceneGraph& sg)
{
    GraphStats s;
    s.nodes = static_cast<int>(sg.atg.nodes.size());
    s.transition_pairs = static_cast<int>(sg.atg.edges.size());
    std::set<std::string> tokens;
    for (const auto& [name, ui] : sg.attributes) {
        s.widgets += static_cast<int>(ui.native_widgets.size());
        tokens.insert(ui.imprint_tokens.begin(), ui.imprint_tokens.end());
    }
    s.tokens = static_cast<int>(tokens.size());
    return s;
}

} // namespace scenedet::scenegraph
