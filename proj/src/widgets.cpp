#include "scenedet/widgets/widgets.hpp"

#include <algorithm>

namespace scenedet::widgets {

using app_ir::ApiKind;
using app_ir::AppBundle;
using app_ir::ClassKind;
using app_ir::Instruction;
using app_ir::ListenerKind;
using app_ir::WidgetNode;
using callgraph::MethodRef;

namespace {

int tree_height(const WidgetNode& w)
{
    int h = 0;
    for (const auto& c : w.children)
        h = std::max(h, tree_height(c));
    return h + 1;
}

bool is_fragment_class(const AppBundle& b, const std::string& type)
{
    const auto* c = b.find_class(type);
    return c && c->kind == ClassKind::Fragment;
}

void collect_widgets(const AppBundle& b, const WidgetNode& w,
                     std::vector<WidgetRecord>& out)
{
    if (!is_fragment_class(b, w.widget_type))
        out.push_back({w.widget_type, w.widget_id, w.icon, w.listeners});
    for (const auto& c : w.children)
        collect_widgets(b, c, out);
}

} // namespace

std::map<std::string, UiAttributes>
identify_native_widgets(const AppBundle& bundle,
                        const callgraph::CallGraph& cg,
                        const analysis::AnalysisConfig& cfg,
                        std::vector<std::string>* warnings)
{
    analysis::ReachIndex reach(bundle, cg, cfg);
    std::map<std::string, UiAttributes> out;

    for (const auto& cls : bundle.classes) {
        if (cls.kind != ClassKind::Activity && cls.kind != ClassKind::Fragment)
            continue;
        UiAttributes ui;
        ui.owner = cls.name;

        const auto& reached = reach.reached_from(cls.name);

        // Pass 1: layouts and dynamic widgets. Dynamic widgets are indexed
        // by their creation site so listener attachment can find them.
        std::set<std::string> layout_ids;
        std::map<std::pair<MethodRef, int>, std::size_t> dynamic_index;
        std::vector<std::vector<std::size_t>> id_index; // per widget id match

        for (const auto& mref : reached) {
            const auto* mcls = bundle.find_class(mref.class_name);
            const auto* method = mcls ? mcls->find_method(mref.method_name)
                                      : nullptr;
            if (!method)
                continue;
            int idx = -1;
            for (const auto& in : method->instructions) {
                ++idx;
                if (in.kind != Instruction::Kind::ApiCall)
                    continue;
                if (in.api == ApiKind::SetContentView
                    || in.api == ApiKind::Inflate) {
                    if (bundle.find_layout(in.resource_id)) {
                        layout_ids.insert(in.resource_id);
                    }
                    else if (warnings) {
                        warnings->push_back("unresolved layout '"
                                            + in.resource_id + "' in "
                                            + mref.str());
                    }
                }
                else if (in.api == ApiKind::NewWidget) {
                    if (is_fragment_class(bundle, in.target))
                        continue; // fragment embedding, not a widget
                    dynamic_index[{mref, idx}] = ui.native_widgets.size();
                    ui.native_widgets.push_back({in.target, "", "", {}});
                }
            }
        }
        for (const auto& lid : layout_ids) {
            const auto* layout = bundle.find_layout(lid);
            collect_widgets(bundle, layout->root, ui.native_widgets);
            ui.layout_depth = std::max(ui.layout_depth,
                                       tree_height(layout->root));
        }

        // Pass 2: SetOnClickListener sites. The widget register resolves
        // through the same method's FindViewById or NewWidget definition;
        // id lookups attach to every matching widget of the reached
        // layouts (ids are unique per layout, not per class).
        for (const auto& mref : reached) {
            const auto* mcls = bundle.find_class(mref.class_name);
            const auto* method = mcls ? mcls->find_method(mref.method_name)
                                      : nullptr;
            if (!method)
                continue;
            std::map<std::string, std::string> reg_to_id;
            std::map<std::string, std::pair<MethodRef, int>> reg_to_site;
            int idx = -1;
            for (const auto& in : method->instructions) {
                ++idx;
                if (in.kind != Instruction::Kind::ApiCall)
                    continue;
                if (in.api == ApiKind::FindViewById) {
                    reg_to_id[in.dst] = in.resource_id;
                    reg_to_site.erase(in.dst);
                }
                else if (in.api == ApiKind::NewWidget && !in.dst.empty()) {
                    reg_to_site[in.dst] = {mref, idx};
                    reg_to_id.erase(in.dst);
                }
                else if (in.api == ApiKind::SetOnClickListener) {
                    const std::string& reg = in.operands[0];
                    auto sit = reg_to_site.find(reg);
                    if (sit != reg_to_site.end()) {
                        auto dit = dynamic_index.find(sit->second);
                        if (dit != dynamic_index.end())
                            ui.native_widgets[dit->second].listeners.insert(
                                    ListenerKind::OnClick);
                        continue;
                    }
                    auto iit = reg_to_id.find(reg);
                    if (iit == reg_to_id.end())
                        continue;
                    for (auto& w : ui.native_widgets) {
                        if (!w.widget_id.empty()
                            && w.widget_id == iit->second)
                            w.listeners.insert(ListenerKind::OnClick);
                    }
                }
            }
        }

        std::sort(ui.native_widgets.begin(), ui.native_widgets.end());
        out.emplace(cls.name, std::move(ui));
    }
    return out;
}

} // namespace scenedet::widgets
