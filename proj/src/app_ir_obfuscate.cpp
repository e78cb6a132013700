#include "scenedet/app_ir/obfuscate.hpp"

#include <algorithm>
#include <set>
#include <vector>

#include "scenedet/callgraph/call_graph.hpp"
#include "scenedet/common/rng.hpp"

namespace scenedet::app_ir {

namespace {

// 0 -> "a", 25 -> "z", 26 -> "aa", ...
std::string short_name(std::size_t index)
{
    std::string s;
    ++index;
    while (index > 0) {
        --index;
        s.insert(s.begin(), static_cast<char>('a' + index % 26));
        index /= 26;
    }
    return s;
}

std::map<std::string, std::string>
make_mapping(const std::set<std::string>& originals,
             const std::string& prefix, const std::set<std::string>& reserved,
             RandomStream& rng)
{
    std::vector<std::string> targets;
    std::size_t i = 0;
    while (targets.size() < originals.size()) {
        std::string cand = prefix + short_name(i++);
        if (!reserved.count(cand) && !originals.count(cand))
            targets.push_back(cand);
    }
    rng.shuffle(targets);
    std::map<std::string, std::string> map;
    std::size_t k = 0;
    for (const auto& name : originals)
        map[name] = targets[k++];
    return map;
}

} // namespace

std::string RenameMap::map_class(const std::string& name) const
{
    auto it = classes.find(name);
    return it == classes.end() ? name : it->second;
}

std::string RenameMap::map_method(const std::string& name) const
{
    auto it = methods.find(name);
    return it == methods.end() ? name : it->second;
}

std::string RenameMap::map_widget(const std::string& id) const
{
    auto it = widget_ids.find(id);
    return it == widget_ids.end() ? id : it->second;
}

RenameMap build_rename_map(const AppBundle& b, std::uint64_t seed)
{
    RandomStream rng(seed);

    std::set<std::string> class_names;
    std::set<std::string> method_names;
    std::set<std::string> widget_ids;
    std::set<std::string> preserved;

    for (const auto& row : callgraph::ImplicitPairTable::table4().rows) {
        preserved.insert(row.run_method);
        preserved.insert(row.start_method);
    }
    for (const auto& c : b.classes) {
        class_names.insert(c.name);
        for (const auto& o : c.overrides_system_listener)
            preserved.insert(o);
        for (const auto& m : c.methods)
            method_names.insert(m.name);
    }
    for (const auto& name : preserved)
        method_names.erase(name);

    std::function<void(const WidgetNode&)> collect = [&](const WidgetNode& w) {
        if (!w.widget_id.empty())
            widget_ids.insert(w.widget_id);
        for (const auto& c : w.children)
            collect(c);
    };
    for (const auto& l : b.layouts)
        collect(l.root);

    RenameMap map;
    map.classes = make_mapping(class_names, "ob.", {}, rng);
    map.methods = make_mapping(method_names, "", preserved, rng);
    map.widget_ids = make_mapping(widget_ids, "w_", {}, rng);
    return map;
}

namespace {

void rename_widget(WidgetNode& w, const AppBundle& b, const RenameMap& map)
{
    // Layout nodes typed with a fragment class name follow the class map.
    if (b.find_class(w.widget_type))
        w.widget_type = map.map_class(w.widget_type);
    if (!w.widget_id.empty())
        w.widget_id = map.map_widget(w.widget_id);
    for (auto& c : w.children)
        rename_widget(c, b, map);
}

std::string rename_method_ref(const std::string& target, const RenameMap& map)
{
    auto dot = target.rfind('.');
    if (dot == std::string::npos)
        return target;
    std::string cls = target.substr(0, dot);
    std::string method = target.substr(dot + 1);
    return map.map_class(cls) + "." + map.map_method(method);
}

} // namespace

AppBundle apply_rename(const AppBundle& original, const RenameMap& map)
{
    AppBundle b = original;

    std::set<std::string> declared;
    for (const auto& a : b.manifest.declared_activities)
        declared.insert(map.map_class(a));
    b.manifest.declared_activities = std::move(declared);

    for (auto& l : b.layouts)
        rename_widget(l.root, original, map);

    for (auto& n : b.nav_graphs) {
        n.host_class = map.map_class(n.host_class);
        for (auto& d : n.destinations)
            d = map.map_class(d);
    }

    for (auto& c : b.classes) {
        c.name = map.map_class(c.name);
        if (!c.inner_of.empty())
            c.inner_of = map.map_class(c.inner_of);
        for (auto& m : c.methods) {
            m.name = map.map_method(m.name);
            for (auto& in : m.instructions) {
                switch (in.kind) {
                case Instruction::Kind::Call:
                    in.target = rename_method_ref(in.target, map);
                    break;
                case Instruction::Kind::ApiCall:
                    switch (in.api) {
                    case ApiKind::StartActivity:
                    case ApiKind::StartActivityForResult:
                    case ApiKind::NewIntent:
                    case ApiKind::NavNavigate:
                    case ApiKind::SetOnClickListener:
                    case ApiKind::ThreadStart:
                    case ApiKind::AsyncExecute:
                    case ApiKind::SendMessage:
                        if (!in.target.empty())
                            in.target = map.map_class(in.target);
                        break;
                    case ApiKind::NewWidget:
                        if (original.find_class(in.target))
                            in.target = map.map_class(in.target);
                        break;
                    case ApiKind::FindViewById:
                        in.resource_id = map.map_widget(in.resource_id);
                        break;
                    default:
                        break;
                    }
                    break;
                default:
                    break;
                }
            }
        }
    }
    return b;
}

AppBundle apply_rename_obfuscation(const AppBundle& bundle,
                                   std::uint64_t seed)
{
    return apply_rename(bundle, build_rename_map(bundle, seed));
}

} // namespace scenedet::app_ir
