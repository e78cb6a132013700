#include "scenedet/analysis/callers.hpp"

#include <deque>
#include <functional>

#include "scenedet/common/errors.hpp"

namespace scenedet::analysis {

using app_ir::ApiKind;
using app_ir::AppBundle;
using app_ir::ClassKind;
using app_ir::Instruction;
using app_ir::WidgetNode;

CallerResolver::CallerResolver(const AppBundle& bundle,
                               const callgraph::CallGraph& /*cg*/,
                               const ReachIndex& reach)
    : bundle_(bundle)
{
    auto note_embed = [&](const std::string& owner,
                          const std::string& type) {
        const auto* c = bundle.find_class(type);
        if (c && c->kind == ClassKind::Fragment && type != owner)
            direct_owners_[type].insert(owner);
    };

    for (const auto& cls : bundle.classes) {
        if (cls.kind != ClassKind::Activity && cls.kind != ClassKind::Fragment)
            continue;
        for (const auto& mref : reach.reached_from(cls.name)) {
            const auto* mcls = bundle.find_class(mref.class_name);
            const auto* method = mcls ? mcls->find_method(mref.method_name)
                                      : nullptr;
            if (!method)
                continue;
            for (const auto& in : method->instructions) {
                if (in.kind != Instruction::Kind::ApiCall)
                    continue;
                if (in.api == ApiKind::SetContentView
                    || in.api == ApiKind::Inflate) {
                    const auto* layout = bundle.find_layout(in.resource_id);
                    if (!layout)
                        continue;
                    std::function<void(const WidgetNode&)> walk =
                            [&](const WidgetNode& w) {
                                note_embed(cls.name, w.widget_type);
                                for (const auto& ch : w.children)
                                    walk(ch);
                            };
                    walk(layout->root);
                }
                else if (in.api == ApiKind::NewWidget) {
                    note_embed(cls.name, in.target);
                }
            }
        }
    }
    for (const auto& nav : bundle.nav_graphs) {
        if (!bundle.is_ui_class(nav.host_class))
            continue;
        for (const auto& dest : nav.destinations)
            note_embed(nav.host_class, dest);
    }
}

std::set<std::string>
CallerResolver::host_activities(const std::string& fragment) const
{
    std::set<std::string> acts;
    std::set<std::string> seen{fragment};
    std::deque<std::string> queue{fragment};
    while (!queue.empty()) {
        std::string cur = queue.front();
        queue.pop_front();
        auto it = direct_owners_.find(cur);
        if (it == direct_owners_.end())
            continue;
        for (const auto& owner : it->second) {
            const auto* c = bundle_.find_class(owner);
            if (!c || !seen.insert(owner).second)
                continue;
            if (c->kind == ClassKind::Activity)
                acts.insert(owner);
            else if (c->kind == ClassKind::Fragment)
                queue.push_back(owner);
        }
    }
    return acts;
}

std::set<std::string>
CallerResolver::resolve(const std::string& class_name) const
{
    const auto* cls = bundle_.find_class(class_name);
    if (!cls)
        throw UnknownClass("unknown class " + class_name);
    if (cls->kind == ClassKind::Fragment) {
        auto callers = host_activities(class_name);
        callers.insert(class_name);
        return callers;
    }
    if (!cls->inner_of.empty()) {
        // Walk outward to the nearest UI class; a fragment owner expands
        // to its hosts like the fragment branch above.
        std::set<std::string> seen{class_name};
        const app_ir::AppClass* outer = bundle_.find_class(cls->inner_of);
        while (outer && seen.insert(outer->name).second) {
            if (outer->kind == ClassKind::Activity)
                return {outer->name};
            if (outer->kind == ClassKind::Fragment)
                return resolve(outer->name);
            if (outer->inner_of.empty())
                break;
            outer = bundle_.find_class(outer->inner_of);
        }
        return {class_name};
    }
    return {class_name};
}

} // namespace scenedet::analysis
