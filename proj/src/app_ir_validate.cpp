#include "scenedet/app_ir/validate.hpp"

#include <functional>
#include <set>

namespace scenedet::app_ir {

namespace {

void check_widget_ids(const WidgetNode& w, std::set<std::string>& seen,
                      const std::string& layout_id,
                      std::vector<Violation>& out)
{
    if (!w.widget_id.empty() && !seen.insert(w.widget_id).second) {
        out.push_back({"duplicate_widget_id", w.widget_id, 0,
                       "widget id '" + w.widget_id
                               + "' appears twice in layout '" + layout_id
                               + "'"});
    }
    for (const auto& c : w.children)
        check_widget_ids(c, seen, layout_id, out);
}

} // namespace

std::vector<Violation> validate(const AppBundle& b)
{
    std::vector<Violation> out;

    if (b.manifest.package_name.empty())
        out.push_back({"empty_package", "", 0, "package name is empty"});

    std::set<std::string> class_names;
    for (const auto& c : b.classes) {
        if (!class_names.insert(c.name).second)
            out.push_back({"duplicate_class", c.name, 0,
                           "class '" + c.name + "' declared twice"});
    }

    std::set<std::string> layout_ids;
    for (const auto& l : b.layouts) {
        if (!layout_ids.insert(l.id).second)
            out.push_back({"duplicate_layout", l.id, 0,
                           "layout '" + l.id + "' declared twice"});
        std::set<std::string> widget_ids;
        check_widget_ids(l.root, widget_ids, l.id, out);
    }

    for (const auto& a : b.manifest.declared_activities) {
        const auto* c = b.find_class(a);
        if (!c || c->kind != ClassKind::Activity)
            out.push_back({"bad_declared_activity", a, 0,
                           "declared activity '" + a
                                   + "' is not an Activity class"});
    }

    // inner_of: target exists, chain acyclic.
    for (const auto& c : b.classes) {
        if (c.inner_of.empty())
            continue;
        if (!b.find_class(c.inner_of)) {
            out.push_back({"inner_of_missing", c.name, 0,
                           "inner_of target '" + c.inner_of
                                   + "' does not exist"});
            continue;
        }
        std::set<std::string> seen{c.name};
        const AppClass* cur = b.find_class(c.inner_of);
        bool cyclic = false;
        while (cur) {
            if (!seen.insert(cur->name).second) {
                cyclic = true;
                break;
            }
            cur = cur->inner_of.empty() ? nullptr
                                        : b.find_class(cur->inner_of);
        }
        if (cyclic)
            out.push_back({"inner_of_cycle", c.name, 0,
                           "inner_of chain of '" + c.name + "' is cyclic"});
    }

    std::set<std::string> nav_ids;
    for (const auto& n : b.nav_graphs) {
        if (!nav_ids.insert(n.id).second)
            out.push_back({"duplicate_navgraph", n.id, 0,
                           "navgraph '" + n.id + "' declared twice"});
        const auto* host = b.find_class(n.host_class);
        if (!host
            || (host->kind != ClassKind::Activity
                && host->kind != ClassKind::Fragment))
            out.push_back({"navgraph_bad_host", n.id, 0,
                           "navgraph host '" + n.host_class
                                   + "' is not an Activity or Fragment"});
        if (n.destinations.empty())
            out.push_back({"navgraph_empty_destinations", n.id, 0,
                           "navgraph '" + n.id + "' has no destinations"});
        for (const auto& d : n.destinations) {
            if (!b.find_class(d))
                out.push_back({"dangling_class_ref", d, 0,
                               "navgraph '" + n.id
                                       + "' destination '" + d
                                       + "' does not exist"});
        }
    }

    for (const auto& c : b.classes) {
        std::set<std::string> method_names;
        for (const auto& m : c.methods) {
            if (!method_names.insert(m.name).second)
                out.push_back({"duplicate_method", c.name + "." + m.name, 0,
                               "method '" + m.name + "' declared twice in '"
                                       + c.name + "'"});
            for (std::size_t i = 0; i < m.instructions.size(); ++i) {
                const auto& in = m.instructions[i];
                std::string where = c.name + "." + m.name + "#"
                        + std::to_string(i);
                if (in.kind == Instruction::Kind::ResourceText
                    && !b.string_resources.count(in.resource_id)) {
                    out.push_back({"dangling_resource", in.resource_id, 0,
                                   where + " references unknown string "
                                           "resource '"
                                           + in.resource_id + "'"});
                }
                if (in.kind == Instruction::Kind::ApiCall
                    && (in.api == ApiKind::SetContentView
                        || in.api == ApiKind::Inflate)
                    && !b.find_layout(in.resource_id)) {
                    out.push_back({"dangling_layout", in.resource_id, 0,
                                   where + " references unknown layout '"
                                           + in.resource_id + "'"});
                }
            }
        }
    }

    return out;
}

} // namespace scenedet::app_ir
