#include "scenedet/harness/corpus.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "scenedet/app_ir/obfuscate.hpp"
#include "scenedet/app_ir/parser.hpp"
#include "scenedet/common/errors.hpp"
#include "scenedet/common/hash.hpp"
#include "scenedet/common/rng.hpp"

namespace scenedet::harness {

using namespace app_ir;
using detector::AppLabel;
using json = nlohmann::ordered_json;

namespace {

// ---- instruction factories -------------------------------------------

Instruction i_const(const std::string& dst, const std::string& value)
{
    Instruction in;
    in.kind = Instruction::Kind::ConstText;
    in.dst = dst;
    in.text_value = value;
    return in;
}

Instruction i_resource(const std::string& dst, const std::string& id)
{
    Instruction in;
    in.kind = Instruction::Kind::ResourceText;
    in.dst = dst;
    in.resource_id = id;
    return in;
}

Instruction i_runtime(const std::string& dst)
{
    Instruction in;
    in.kind = Instruction::Kind::RuntimeText;
    in.dst = dst;
    return in;
}

Instruction i_text(const std::string& dst, TextOpKind op,
                   std::vector<std::string> operands)
{
    Instruction in;
    in.kind = Instruction::Kind::TextOp;
    in.dst = dst;
    in.text_op = op;
    in.operands = std::move(operands);
    return in;
}

Instruction i_call(const std::string& dst, const std::string& target,
                   std::vector<std::string> args = {})
{
    Instruction in;
    in.kind = Instruction::Kind::Call;
    in.dst = dst;
    in.target = target;
    in.operands = std::move(args);
    return in;
}

Instruction i_api(ApiKind api)
{
    Instruction in;
    in.kind = Instruction::Kind::ApiCall;
    in.api = api;
    return in;
}

Instruction i_set_content_view(const std::string& layout)
{
    Instruction in = i_api(ApiKind::SetContentView);
    in.resource_id = layout;
    return in;
}

Instruction i_find_view(const std::string& dst, const std::string& id)
{
    Instruction in = i_api(ApiKind::FindViewById);
    in.dst = dst;
    in.resource_id = id;
    return in;
}

Instruction i_new_widget(const std::string& dst, const std::string& type)
{
    Instruction in = i_api(ApiKind::NewWidget);
    in.dst = dst;
    in.target = type;
    return in;
}

Instruction i_attach(const std::string& parent, const std::string& child)
{
    Instruction in = i_api(ApiKind::AttachWidget);
    in.operands = {parent, child};
    return in;
}

Instruction i_load_url(const std::string& reg)
{
    Instruction in = i_api(ApiKind::LoadUrl);
    in.operands = {reg};
    return in;
}

Instruction i_start(const std::string& target)
{
    Instruction in = i_api(ApiKind::StartActivity);
    in.target = target;
    return in;
}

Instruction i_start_reg(const std::string& reg)
{
    Instruction in = i_api(ApiKind::StartActivity);
    in.operands = {reg};
    return in;
}

Instruction i_start_for_result(const std::string& target)
{
    Instruction in = i_api(ApiKind::StartActivityForResult);
    in.target = target;
    return in;
}

Instruction i_new_intent(const std::string& dst, const std::string& target)
{
    Instruction in = i_api(ApiKind::NewIntent);
    in.dst = dst;
    in.target = target;
    return in;
}

Instruction i_nav(const std::string& target)
{
    Instruction in = i_api(ApiKind::NavNavigate);
    in.target = target;
    return in;
}

Instruction i_set_onclick(const std::string& widget_reg,
                          const std::string& listener)
{
    Instruction in = i_api(ApiKind::SetOnClickListener);
    in.operands = {widget_reg};
    in.target = listener;
    return in;
}

Instruction i_thread_start(const std::string& cls)
{
    Instruction in = i_api(ApiKind::ThreadStart);
    in.target = cls;
    return in;
}

Instruction i_async(const std::string& cls)
{
    Instruction in = i_api(ApiKind::AsyncExecute);
    in.target = cls;
    return in;
}

Instruction i_return(const std::string& reg = "")
{
    Instruction in;
    in.kind = Instruction::Kind::Return;
    if (!reg.empty())
        in.operands = {reg};
    return in;
}

// ---- bundle building --------------------------------------------------

class Builder {
public:
    explicit Builder(const std::string& package)
    {
        b_.manifest.package_name = package;
        // add_class hands out references into this vector.
        b_.classes.reserve(128);
    }

    std::string qualify(const std::string& simple) const
    {
        return b_.manifest.package_name + "." + simple;
    }

    AppClass& add_class(const std::string& simple, ClassKind kind,
                        const std::string& inner_of_simple = "")
    {
        AppClass c;
        c.name = qualify(simple);
        c.kind = kind;
        if (!inner_of_simple.empty())
            c.inner_of = qualify(inner_of_simple);
        if (kind == ClassKind::Activity)
            b_.manifest.declared_activities.insert(c.name);
        b_.classes.push_back(std::move(c));
        return b_.classes.back();
    }

    MethodIR& add_method(AppClass& cls, const std::string& name,
                         std::vector<Instruction> instrs = {})
    {
        cls.methods.push_back({name, "", std::move(instrs)});
        return cls.methods.back();
    }

    // Layout with flat widget list under one root container; records the
    // ground-truth (type, listener-count) rows as it goes. Fragment-typed
    // embed nodes are added separately and never recorded as widgets.
    void add_layout(const std::string& id,
                    const std::vector<WidgetNode>& widgets,
                    const std::string& owner_simple, GroundTruth& gt,
                    const std::vector<std::string>& embeds = {})
    {
        LayoutResource l;
        l.id = id;
        l.root.widget_type = "LinearLayout";
        for (const auto& w : widgets)
            l.root.children.push_back(w);
        for (const auto& frag : embeds) {
            WidgetNode e;
            e.widget_type = qualify(frag);
            l.root.children.push_back(e);
        }
        b_.layouts.push_back(std::move(l));

        auto& rows = gt.widgets[qualify(owner_simple)];
        rows.push_back({"LinearLayout", 0});
        for (const auto& w : widgets)
            rows.push_back({w.widget_type,
                            static_cast<int>(w.listeners.size())});
        std::sort(rows.begin(), rows.end());
    }

    void add_string_res(const std::string& id, const std::string& value)
    {
        b_.string_resources[id] = value;
    }

    void add_navgraph(const std::string& id, const std::string& host_simple,
                      const std::vector<std::string>& dest_simple)
    {
        NavGraphResource n;
        n.id = id;
        n.host_class = qualify(host_simple);
        for (const auto& d : dest_simple)
            n.destinations.push_back(qualify(d));
        b_.nav_graphs.push_back(std::move(n));
    }

    AppBundle take() { return std::move(b_); }

private:
    AppBundle b_;
};

WidgetNode widget(const std::string& type, const std::string& id = "",
                  std::set<ListenerKind> listeners = {},
                  const std::string& icon = "")
{
    WidgetNode w;
    w.widget_type = type;
    w.widget_id = id;
    w.icon = icon;
    w.listeners = std::move(listeners);
    return w;
}

void add_edge_gt(GroundTruth& gt, const std::string& from,
                 const std::string& to)
{
    gt.edges.push_back({from, to});
}

void finish_gt(const AppBundle& b, GroundTruth& gt)
{
    gt.app_id = b.manifest.package_name;
    gt.class_count = static_cast<int>(b.classes.size());
    std::sort(gt.edges.begin(), gt.edges.end());
    gt.edges.erase(std::unique(gt.edges.begin(), gt.edges.end()),
                   gt.edges.end());
}

} // namespace

// ---- benchmark apps ---------------------------------------------------

GeneratedApp make_app1()
{
    // Activity-to-activity transitions only, 13 of them.
    Builder bld("com.bench.app1");
    GroundTruth gt;
    auto q = [&](const char* s) { return bld.qualify(s); };

    const char* acts[] = {"Splash",   "Main",   "Login",  "Home",
                          "Browse",   "Detail", "Cart",   "Checkout",
                          "Profile",  "Orders", "Settings", "About",
                          "Search",   "Help"};
    std::map<std::string, AppClass*> cls;
    for (const char* a : acts)
        cls[a] = &bld.add_class(a, ClassKind::Activity);

    struct Site {
        const char* from;
        const char* to;
        int mech; // 0 explicit, 1 icc, 2 for-result
    };
    const Site sites[] = {
            {"Splash", "Main", 0},    {"Main", "Login", 0},
            {"Main", "Home", 0},      {"Home", "Browse", 0},
            {"Home", "Search", 0},    {"Home", "Profile", 0},
            {"Browse", "Detail", 0},  {"Detail", "Cart", 1},
            {"Cart", "Checkout", 2},  {"Profile", "Orders", 1},
            {"Profile", "Settings", 1}, {"Settings", "About", 0},
            {"Search", "Help", 0},
    };

    std::map<std::string, std::vector<Instruction>> body;
    int reg = 0;
    for (const auto& s : sites) {
        auto& instrs = body[s.from];
        switch (s.mech) {
        case 0:
            instrs.push_back(i_start(q(s.to)));
            break;
        case 1: {
            std::string r = "it" + std::to_string(reg++);
            instrs.push_back(i_new_intent(r, q(s.to)));
            instrs.push_back(i_start_reg(r));
            break;
        }
        case 2:
            instrs.push_back(i_start_for_result(q(s.to)));
            break;
        }
        add_edge_gt(gt, q(s.from), q(s.to));
    }
    gt.planted_transitions = 13;

    int li = 0;
    for (const char* a : acts) {
        std::string layout = "lay_" + std::to_string(li++);
        bld.add_layout(layout,
                       {widget("TextView", "title_" + layout),
                        widget("Button", "btn_" + layout,
                               {ListenerKind::OnClick}),
                        widget("ImageView", "", {}, "ic_" + layout)},
                       a, gt);
        std::vector<Instruction> instrs{i_set_content_view(layout)};
        auto& extra = body[a];
        instrs.insert(instrs.end(), extra.begin(), extra.end());
        bld.add_method(*cls[a], "onCreate", std::move(instrs));
    }

    AppBundle b = bld.take();
    finish_gt(b, gt);
    return {std::move(b), std::move(gt)};
}

GeneratedApp make_app2()
{
    // Activity-to-fragment transitions, 13 of them.
    Builder bld("com.bench.app2");
    GroundTruth gt;
    auto q = [&](const char* s) { return bld.qualify(s); };

    const char* acts[] = {"Main", "Dash", "Media", "Social", "Extra"};
    const char* frags[] = {"FeedF",  "ChatF",  "MapF",  "PhotoF",
                           "VideoF", "NotesF", "TasksF", "MusicF"};
    std::map<std::string, AppClass*> cls;
    for (const char* a : acts)
        cls[a] = &bld.add_class(a, ClassKind::Activity);
    for (const char* f : frags)
        cls[f] = &bld.add_class(f, ClassKind::Fragment);

    const std::pair<const char*, const char*> sites[] = {
            {"Main", "FeedF"},   {"Main", "ChatF"},  {"Main", "MapF"},
            {"Dash", "PhotoF"},  {"Dash", "VideoF"}, {"Dash", "NotesF"},
            {"Media", "MusicF"}, {"Media", "VideoF"}, {"Media", "PhotoF"},
            {"Social", "FeedF"}, {"Social", "ChatF"}, {"Extra", "TasksF"},
            {"Extra", "NotesF"},
    };
    std::map<std::string, std::vector<Instruction>> body;
    for (const auto& [from, to] : sites) {
        body[from].push_back(i_start(q(to)));
        add_edge_gt(gt, q(from), q(to));
    }
    gt.planted_transitions = 13;

    int li = 0;
    for (auto& [simple, c] : cls) {
        std::string layout = "lay_" + std::to_string(li++);
        bld.add_layout(layout,
                       {widget("TextView", "t_" + layout),
                        widget("Button", "b_" + layout,
                               {ListenerKind::OnClick})},
                       simple, gt);
        std::vector<Instruction> instrs{i_set_content_view(layout)};
        auto it = body.find(simple);
        if (it != body.end())
            instrs.insert(instrs.end(), it->second.begin(),
                          it->second.end());
        bld.add_method(*c, "onCreate", std::move(instrs));
    }

    AppBundle b = bld.take();
    finish_gt(b, gt);
    return {std::move(b), std::move(gt)};
}

GeneratedApp make_app3()
{
    // Fragment-to-fragment transitions, 13 of them. HostA embeds F1 via
    // its layout; F1 itself starts nothing so the sidecar stays at the
    // planted 13 pairs.
    Builder bld("com.bench.app3");
    GroundTruth gt;
    auto q = [&](const char* s) { return bld.qualify(s); };

    auto& host = bld.add_class("HostA", ClassKind::Activity);
    std::map<std::string, AppClass*> cls;
    for (int i = 1; i <= 9; ++i) {
        std::string name = "F" + std::to_string(i);
        cls[name] = &bld.add_class(name, ClassKind::Fragment);
    }

    const std::pair<const char*, const char*> sites[] = {
            {"F2", "F3"}, {"F2", "F1"}, {"F3", "F4"}, {"F3", "F1"},
            {"F4", "F5"}, {"F5", "F6"}, {"F5", "F1"}, {"F6", "F7"},
            {"F7", "F8"}, {"F7", "F2"}, {"F8", "F9"}, {"F9", "F1"},
            {"F9", "F2"},
    };
    std::map<std::string, std::vector<Instruction>> body;
    for (const auto& [from, to] : sites) {
        body[from].push_back(i_start(q(to)));
        add_edge_gt(gt, q(from), q(to));
    }
    gt.planted_transitions = 13;

    bld.add_layout("host_lay",
                   {widget("Toolbar", "bar"), widget("TextView", "title")},
                   "HostA", gt, {"F1"});
    bld.add_method(host, "onCreate", {i_set_content_view("host_lay")});

    int li = 0;
    for (auto& [simple, c] : cls) {
        std::string layout = "frag_lay_" + std::to_string(li++);
        bld.add_layout(layout,
                       {widget("TextView", "t_" + layout),
                        widget("Button", "b_" + layout,
                               {ListenerKind::OnClick})},
                       simple, gt);
        std::vector<Instruction> instrs{i_set_content_view(layout)};
        auto it = body.find(simple);
        if (it != body.end())
            instrs.insert(instrs.end(), it->second.begin(),
                          it->second.end());
        bld.add_method(*c, "onCreate", std::move(instrs));
    }

    AppBundle b = bld.take();
    finish_gt(b, gt);
    return {std::move(b), std::move(gt)};
}

GeneratedApp make_app4()
{
    // Navigation only; 12 transition pairs once the navgraph hosting
    // expansion is counted.
    Builder bld("com.bench.app4");
    GroundTruth gt;
    auto q = [&](const char* s) { return bld.qualify(s); };

    auto& nav_a = bld.add_class("NavA", ClassKind::Activity);
    std::map<std::string, AppClass*> cls;
    for (int i = 1; i <= 6; ++i) {
        std::string name = "F" + std::to_string(i);
        cls[name] = &bld.add_class(name, ClassKind::Fragment);
    }

    bld.add_navgraph("nav_main", "NavA", {"F1", "F2", "F3"});
    for (const char* f : {"F1", "F2", "F3"})
        add_edge_gt(gt, q("NavA"), q(f));

    const std::pair<const char*, const char*> sites[] = {
            {"F1", "F4"}, {"F2", "F5"}, {"F3", "F5"}, {"F4", "F6"},
            {"F5", "F6"}, {"F6", "F1"}, {"F4", "F1"},
    };
    std::map<std::string, std::vector<Instruction>> body;
    for (const auto& [from, to] : sites) {
        body[from].push_back(i_nav(q(to)));
        add_edge_gt(gt, q(from), q(to));
    }
    // NavA hosts F1..F3, so their sites also source from NavA.
    add_edge_gt(gt, q("NavA"), q("F4"));
    add_edge_gt(gt, q("NavA"), q("F5"));
    gt.planted_transitions = 12;

    bld.add_layout("nav_lay", {widget("NavHostFragment", "nav_host")},
                   "NavA", gt);
    bld.add_method(nav_a, "onCreate", {i_set_content_view("nav_lay")});

    int li = 0;
    for (auto& [simple, c] : cls) {
        std::string layout = "f_lay_" + std::to_string(li++);
        bld.add_layout(layout,
                       {widget("TextView", "t_" + layout),
                        widget("Button", "b_" + layout,
                               {ListenerKind::OnClick})},
                       simple, gt);
        std::vector<Instruction> instrs{i_set_content_view(layout)};
        auto it = body.find(simple);
        if (it != body.end())
            instrs.insert(instrs.end(), it->second.begin(),
                          it->second.end());
        bld.add_method(*c, "onCreate", std::move(instrs));
    }

    AppBundle b = bld.take();
    finish_gt(b, gt);
    return {std::move(b), std::move(gt)};
}

GeneratedApp make_app5()
{
    // Mixed transition types, 11 reachable sites plus one start call at
    // call depth 11 that stays invisible (the planted miss).
    Builder bld("com.bench.app5");
    GroundTruth gt;
    auto q = [&](const char* s) { return bld.qualify(s); };

    auto& main = bld.add_class("Main", ClassKind::Activity);
    main.overrides_system_listener.insert("onKeyDown");
    auto& store = bld.add_class("Store", ClassKind::Activity);
    auto& pay = bld.add_class("Pay", ClassKind::Activity);
    auto& profile = bld.add_class("Profile", ClassKind::Activity);
    auto& vault = bld.add_class("Vault", ClassKind::Activity);
    auto& cart_frag = bld.add_class("CartFrag", ClassKind::Fragment);
    auto& list_frag = bld.add_class("ListFrag", ClassKind::Fragment);
    auto& buy_click = bld.add_class("BuyClick", ClassKind::Listener, "Store");
    auto& refresher = bld.add_class("Refresher", ClassKind::Plain);
    auto& help_task = bld.add_class("HelpTask", ClassKind::Plain);
    auto& deep_nav = bld.add_class("DeepNav", ClassKind::Plain);

    // Main
    bld.add_layout("main_lay",
                   {widget("TextView", "title"),
                    widget("Button", "go_store", {ListenerKind::OnClick}),
                    widget("ImageView", "", {}, "ic_logo")},
                   "Main", gt);
    bld.add_method(main, "onCreate",
                   {i_set_content_view("main_lay"), i_start(q("Store"))});
    bld.add_method(main, "onMenu",
                   {i_new_intent("it0", q("Pay")), i_start_reg("it0")});
    bld.add_method(main, "onKeyDown", {i_start(q("Profile"))});
    add_edge_gt(gt, q("Main"), q("Store"));
    add_edge_gt(gt, q("Main"), q("Pay"));
    add_edge_gt(gt, q("Main"), q("Profile"));

    // Store embeds CartFrag and wires the buy button to BuyClick.
    bld.add_layout("store_lay",
                   {widget("RecyclerView", "items"),
                    widget("Button", "btn_buy")},
                   "Store", gt, {"CartFrag"});
    // btn_buy picks up OnClick through SetOnClickListener below.
    for (auto& row : gt.widgets[q("Store")]) {
        if (row.first == "Button")
            row.second = 1;
    }
    std::sort(gt.widgets[q("Store")].begin(), gt.widgets[q("Store")].end());
    bld.add_method(store, "onCreate",
                   {i_set_content_view("store_lay"),
                    i_find_view("v0", "btn_buy"),
                    i_set_onclick("v0", q("BuyClick"))});
    bld.add_method(store, "refresh", {i_thread_start(q("Refresher"))});
    bld.add_method(buy_click, "OnClick",
                   {i_start(q("Pay")), i_call("", q("DeepNav") + ".f1")});
    bld.add_method(refresher, "run", {i_start(q("Profile"))});
    add_edge_gt(gt, q("Store"), q("Pay"));
    add_edge_gt(gt, q("Store"), q("Profile"));

    // The over-depth chain: OnClick -> f1 -> ... -> f10 -> go.
    for (int i = 1; i <= 10; ++i) {
        std::string next = i == 10 ? "go" : ("f" + std::to_string(i + 1));
        bld.add_method(deep_nav, "f" + std::to_string(i),
                       {i_call("", q("DeepNav") + "." + next)});
    }
    bld.add_method(deep_nav, "go", {i_start(q("Vault"))});
    gt.missed_edges.push_back({q("Store"), q("Vault")});

    // CartFrag adds one widget dynamically next to its layout.
    bld.add_layout("cart_lay",
                   {widget("TextView", "cart_total"),
                    widget("Button", "checkout", {ListenerKind::OnClick})},
                   "CartFrag", gt);
    bld.add_method(cart_frag, "onCreate",
                   {i_set_content_view("cart_lay"),
                    i_find_view("p0", "cart_total"),
                    i_new_widget("c0", "ImageView"), i_attach("p0", "c0")});
    gt.widgets[q("CartFrag")].push_back({"ImageView", 0});
    std::sort(gt.widgets[q("CartFrag")].begin(),
              gt.widgets[q("CartFrag")].end());
    bld.add_method(cart_frag, "onReady", {i_start(q("Main"))});
    add_edge_gt(gt, q("CartFrag"), q("Main"));
    add_edge_gt(gt, q("Store"), q("Main")); // Store hosts CartFrag

    // Pay carries the web widget.
    bld.add_string_res("pay_base", "https://pay.app5.bench/checkout");
    bld.add_layout("pay_lay",
                   {widget("WebView", "pay_web"),
                    widget("Button", "pay_done", {ListenerKind::OnClick})},
                   "Pay", gt);
    bld.add_method(pay, "onCreate",
                   {i_set_content_view("pay_lay"),
                    i_resource("u0", "pay_base"), i_const("u1", "?session="),
                    i_runtime("u2"),
                    i_text("u3", TextOpKind::Concat, {"u0", "u1", "u2"}),
                    i_load_url("u3")});
    bld.add_method(pay, "onDone", {i_start_for_result(q("Main"))});
    bld.add_method(pay, "onHelp", {i_async(q("HelpTask"))});
    bld.add_method(help_task, "onPreExecute", {});
    bld.add_method(help_task, "doInBackground", {i_start(q("Profile"))});
    add_edge_gt(gt, q("Pay"), q("Main"));
    add_edge_gt(gt, q("Pay"), q("Profile"));
    gt.tokens = {"pay", "app5", "bench", "checkout", "session"};
    gt.runtime_sources = 1;

    // Profile hosts ListFrag through a navgraph.
    bld.add_navgraph("nav_profile", "Profile", {"ListFrag"});
    bld.add_layout("profile_lay",
                   {widget("TextView", "who"),
                    widget("Button", "logout", {ListenerKind::OnClick})},
                   "Profile", gt);
    bld.add_method(profile, "onCreate", {i_set_content_view("profile_lay")});
    bld.add_method(profile, "onLogout", {i_start(q("Main"))});
    add_edge_gt(gt, q("Profile"), q("ListFrag"));
    add_edge_gt(gt, q("Profile"), q("Main"));

    bld.add_layout("list_lay", {widget("RecyclerView", "rows")}, "ListFrag",
                   gt);
    bld.add_method(list_frag, "onCreate", {i_set_content_view("list_lay")});
    bld.add_method(list_frag, "onSelect", {i_nav(q("CartFrag"))});
    add_edge_gt(gt, q("ListFrag"), q("CartFrag"));
    add_edge_gt(gt, q("Profile"), q("CartFrag")); // Profile hosts ListFrag

    bld.add_layout("vault_lay", {widget("TextView", "locked")}, "Vault", gt);
    bld.add_method(vault, "onCreate", {i_set_content_view("vault_lay")});

    gt.planted_transitions = 11;

    AppBundle b = bld.take();
    finish_gt(b, gt);
    return {std::move(b), std::move(gt)};
}

GeneratedApp make_token_app()
{
    // Taint fixture: 36 distinct constant-derivable tokens spread over
    // direct constants, resources, an inter-procedural figure-7 flow, a
    // parameter flow, a replace, and stoplist hits; two runtime sources
    // must be discarded.
    Builder bld("com.bench.tokens");
    GroundTruth gt;
    auto q = [&](const char* s) { return bld.qualify(s); };

    auto& w1 = bld.add_class("W1", ClassKind::Activity);
    auto& w2 = bld.add_class("W2", ClassKind::Activity);
    auto& w3 = bld.add_class("W3", ClassKind::Activity);
    auto& w4 = bld.add_class("W4", ClassKind::Activity);
    auto& src = bld.add_class("StrSrc", ClassKind::Plain);

    bld.add_string_res("base_url", "https://api.figure.example");
    bld.add_string_res("mirror_url", "https://github.com/mirror/repo");

    // W1: url = append(StrSrc.B(), v4-runtime); B = append(A(), "/v1/...")
    bld.add_method(src, "A",
                   {i_resource("v1", "base_url"), i_return("v1")});
    bld.add_method(src, "B",
                   {i_call("t", q("StrSrc") + ".A"),
                    i_const("v3", "/v1/session/open"),
                    i_text("v2", TextOpKind::Append, {"t", "v3"}),
                    i_return("v2")});
    bld.add_layout("w1_lay", {widget("WebView", "web1")}, "W1", gt);
    bld.add_method(w1, "onCreate",
                   {i_set_content_view("w1_lay"),
                    i_call("u0", q("StrSrc") + ".B"), i_runtime("v4"),
                    i_text("url", TextOpKind::Append, {"u0", "v4"}),
                    i_load_url("url")});

    // W2: two direct constant sinks.
    bld.add_layout("w2_lay", {widget("WebView", "web2")}, "W2", gt);
    bld.add_method(
            w2, "onCreate",
            {i_set_content_view("w2_lay"),
             i_const("c1",
                     "https://cdn.assets.shop/main.js?key=abt12&flag=on"),
             i_load_url("c1")});
    bld.add_method(w2, "onHelp",
                   {i_const("c2", "/help/faq"), i_load_url("c2")});

    // W3: parameter flow through buildPath plus a replace.
    bld.add_method(w3, "buildPath",
                   {i_const("t1", "checkout/confirm"),
                    i_text("t2", TextOpKind::Append, {"p", "t1"}),
                    i_return("t2")});
    bld.add_layout("w3_lay", {widget("WebView", "web3")}, "W3", gt);
    bld.add_method(w3, "onCreate",
                   {i_set_content_view("w3_lay"),
                    i_const("h0", "gateway.pay.market"),
                    i_const("r1", "lang=EN"), i_const("r2", "EN"),
                    i_const("r3", "zh"),
                    i_text("rr", TextOpKind::Replace, {"r1", "r2", "r3"}),
                    i_call("qq", q("W3") + ".buildPath", {"h0"}),
                    i_text("s1", TextOpKind::Append, {"qq", "rr"}),
                    i_runtime("s2"),
                    i_text("s3", TextOpKind::Append, {"s1", "s2"}),
                    i_load_url("s3")});

    // W4: resource with a stoplist hit, then two constants.
    bld.add_layout("w4_lay", {widget("WebView", "web4")}, "W4", gt);
    bld.add_method(w4, "onCreate",
                   {i_set_content_view("w4_lay"),
                    i_resource("g1", "mirror_url"), i_load_url("g1")});
    bld.add_method(w4, "onExtra",
                   {i_const("k1", "token=se7ret&user=admin9"),
                    i_const("k2", "wss://live.feed.quote"),
                    i_text("kk", TextOpKind::Concat, {"k1", "k2"}),
                    i_load_url("kk")});

    gt.tokens = {"api",      "figure",  "example", "v1",     "session",
                 "open",     "cdn",     "assets",  "shop",   "main",
                 "js",       "key",     "abt12",   "flag",   "on",
                 "help",     "faq",     "gateway", "pay",    "market",
                 "checkout", "confirm", "lang",    "EN",     "zh",
                 "com",      "mirror",  "repo",    "token",  "se7ret",
                 "user",     "admin9",  "wss",     "live",   "feed",
                 "quote"};
    gt.runtime_sources = 2;
    gt.planted_transitions = 0;

    AppBundle b = bld.take();
    finish_gt(b, gt);
    return {std::move(b), std::move(gt)};
}

// ---- class families ---------------------------------------------------

namespace {

struct FamilyProfile {
    std::vector<std::pair<const char*, ClassKind>> roles;
    std::vector<std::pair<const char*, const char*>> motif;
    std::vector<const char*> token_pool;
    std::vector<const char*> extra_permissions;
    std::vector<const char*> app_names;
    std::vector<const char*> widget_pool;
    int widgets_lo, widgets_hi;
    int tokens_lo, tokens_hi;
    int sink_classes;
    int extra_nodes_hi;
    int extra_edges_hi;
};

const FamilyProfile& family_profile(AppLabel label)
{
    static const FamilyProfile gambling{
            {{"Splash", ClassKind::Activity},
             {"Hub", ClassKind::Activity},
             {"Lobby", ClassKind::Activity},
             {"Recharge", ClassKind::Activity},
             {"Withdraw", ClassKind::Activity},
             {"Service", ClassKind::Activity},
             {"RoomA", ClassKind::Activity},
             {"RoomB", ClassKind::Activity}},
            {{"Splash", "Hub"},
             {"Hub", "Lobby"},
             {"Hub", "Recharge"},
             {"Hub", "Withdraw"},
             {"Hub", "Service"},
             {"Lobby", "RoomA"},
             {"Lobby", "RoomB"},
             {"RoomA", "Recharge"},
             {"RoomB", "Recharge"}},
            {"bet", "odds", "jackpot", "casino", "lottery", "spin", "bonus",
             "agent", "recharge8", "withdraw6", "vip8", "room", "hall",
             "luck"},
            {"android.permission.WAKE_LOCK"},
            {"Lucky Win", "Golden Hall", "Spin City", "Royal Game",
             "Fortune Club"},
            {"ImageView", "Button", "TextView", "WebView", "GridView"},
            26, 34, 7, 8, 2, 1, 1};

    static const FamilyProfile porn{
            {{"Splash", ClassKind::Activity},
             {"Gate", ClassKind::Activity},
             {"Grid", ClassKind::Activity},
             {"Player", ClassKind::Activity},
             {"VipPay", ClassKind::Activity}},
            {{"Splash", "Gate"},
             {"Gate", "Grid"},
             {"Grid", "Player"},
             {"Player", "VipPay"},
             {"Grid", "VipPay"}},
            {"video", "stream", "m3u8", "adult", "cam", "live18", "player7",
             "hub6", "preview", "night"},
            {"android.permission.READ_EXTERNAL_STORAGE"},
            {"Night Show", "Hot Clips", "Peach Live", "Velvet"},
            {"VideoView", "ImageView", "WebView", "TextView", "Button"},
            24, 32, 5, 6, 2, 1, 1};

    static const FamilyProfile scam{
            {{"Home", ClassKind::Activity},
             {"Personal", ClassKind::Activity},
             {"LoanApply", ClassKind::Activity},
             {"BankCard", ClassKind::Activity},
             {"Certification", ClassKind::Activity}},
            {{"Home", "Personal"},
             {"Personal", "LoanApply"},
             {"Personal", "BankCard"},
             {"Personal", "Certification"}},
            {"loan", "credit", "apply", "invest", "profit", "fund",
             "bankcard", "verify7", "quota", "repay"},
            {"android.permission.READ_CONTACTS"},
            {"Easy Loan", "Quick Cash", "Rich Plan", "Gold Invest"},
            {"EditText", "Button", "TextView", "WebView", "CheckBox"},
            22, 30, 5, 6, 1, 1, 1};

    static const FamilyProfile misc{
            {{"Main", ClassKind::Activity},
             {"TaskList", ClassKind::Activity},
             {"Reward", ClassKind::Activity},
             {"Cashout", ClassKind::Activity},
             {"Share", ClassKind::Activity},
             {"Invite", ClassKind::Activity}},
            {{"Main", "TaskList"},
             {"TaskList", "Reward"},
             {"Reward", "Cashout"},
             {"Main", "Share"},
             {"Share", "Invite"},
             {"Invite", "Reward"}},
            {"task", "reward", "points", "share", "invite", "coin", "sign",
             "checkin", "cashout", "stepcount"},
            {"android.permission.VIBRATE"},
            {"Daily Bonus", "Task Star", "Coin Rain"},
            {"Button", "ProgressBar", "ImageView", "TextView", "WebView"},
            18, 26, 4, 5, 1, 1, 1};

    static const FamilyProfile legit{
            {{"Splash", ClassKind::Activity},
             {"Main", ClassKind::Activity},
             {"Home", ClassKind::Activity},
             {"Search", ClassKind::Activity},
             {"Cart", ClassKind::Activity},
             {"Profile", ClassKind::Activity},
             {"Settings", ClassKind::Activity},
             {"Category", ClassKind::Activity},
             {"Detail", ClassKind::Activity},
             {"Reviews", ClassKind::Activity},
             {"Checkout", ClassKind::Activity},
             {"Address", ClassKind::Activity},
             {"Payment", ClassKind::Activity},
             {"Orders", ClassKind::Activity},
             {"Coupons", ClassKind::Activity},
             {"Help", ClassKind::Activity},
             {"About", ClassKind::Activity},
             {"Privacy", ClassKind::Activity},
             {"NewsFrag", ClassKind::Fragment},
             {"DealsFrag", ClassKind::Fragment}},
            {{"Splash", "Main"},    {"Main", "Home"},
             {"Main", "Search"},    {"Main", "Cart"},
             {"Main", "Profile"},   {"Main", "Settings"},
             {"Home", "Category"},  {"Home", "Detail"},
             {"Category", "Detail"}, {"Detail", "Reviews"},
             {"Detail", "Checkout"}, {"Cart", "Checkout"},
             {"Checkout", "Address"}, {"Checkout", "Payment"},
             {"Profile", "Orders"}, {"Profile", "Coupons"},
             {"Profile", "Help"},   {"Settings", "About"},
             {"Settings", "Privacy"}, {"Search", "Detail"}},
            {"catalog", "search", "order", "coupon", "news", "deal",
             "category", "review", "address", "payment", "faq", "account",
             "v2", "cart", "wishlist", "notify", "support", "invoice"},
            {"android.permission.CAMERA",
             "android.permission.ACCESS_FINE_LOCATION"},
            {"ShopSmart", "City Market", "Daily Goods", "HomeMall",
             "FreshCart"},
            {"RecyclerView", "TextView", "EditText", "Button", "ImageView",
             "Toolbar", "TabLayout", "CardView", "CheckBox", "Spinner",
             "RatingBar", "WebView"},
            170, 250, 12, 18, 3, 4, 4};

    switch (label) {
    case AppLabel::GamblingGame:
        return gambling;
    case AppLabel::Porn:
        return porn;
    case AppLabel::InvestmentScam:
        return scam;
    case AppLabel::Miscellaneous:
        return misc;
    case AppLabel::Legitimate:
        return legit;
    }
    return misc;
}

// Earlier pool entries dominate: each family has a signature widget mix.
const char* weighted_pick(RandomStream& rng,
                          const std::vector<const char*>& pool)
{
    std::vector<int> weights(pool.size());
    int total = 0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        weights[i] = std::max<int>(1, 5 - static_cast<int>(2 * i));
        total += weights[i];
    }
    int pick = static_cast<int>(rng.next_below(total));
    for (std::size_t i = 0; i < pool.size(); ++i) {
        pick -= weights[i];
        if (pick < 0)
            return pool[i];
    }
    return pool.back();
}

std::string random_syllables(RandomStream& rng, int count)
{
    static const char* syl[] = {"ka", "zo", "mi", "ta", "re", "lu", "no",
                                "pe", "si", "vo", "da", "gu", "xi", "fa",
                                "bo", "qi", "ne", "wu", "ry", "ha"};
    std::string s;
    for (int i = 0; i < count; ++i)
        s += syl[rng.next_below(std::size(syl))];
    return s;
}

} // namespace

std::vector<std::pair<std::string, std::string>> motif_edges(AppLabel label)
{
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [from, to] : family_profile(label).motif)
        out.push_back({from, to});
    return out;
}

GeneratedApp make_family_app(AppLabel label, std::uint64_t group_seed,
                             std::uint64_t member_seed, int index)
{
    const FamilyProfile& prof = family_profile(label);
    // Structure comes from the group stream, identity from the member
    // stream: clones of one codebase share their skeleton.
    RandomStream rng(group_seed);
    RandomStream member_rng(member_seed);

    std::string package = "com." + random_syllables(member_rng, 2) + "."
            + random_syllables(member_rng, 2) + std::to_string(index);
    Builder bld(package);
    GroundTruth gt;
    gt.label = label;

    auto q = [&](const std::string& s) { return package + "." + s; };

    std::map<std::string, AppClass*> cls;
    std::vector<std::string> activities;
    std::vector<std::string> fragments;
    for (const auto& [role, kind] : prof.roles) {
        cls[role] = &bld.add_class(role, kind);
        if (kind == ClassKind::Activity)
            activities.push_back(role);
        else
            fragments.push_back(role);
    }
    // Noise activities.
    int extra_nodes = static_cast<int>(rng.next_below(prof.extra_nodes_hi + 1));
    for (int i = 0; i < extra_nodes; ++i) {
        std::string name = "Extra" + std::to_string(i);
        cls[name] = &bld.add_class(name, ClassKind::Activity);
        activities.push_back(name);
    }

    // Transition sites: motif edges, fragment hosting via navgraph, noise
    // edges. Fragments never source edges here, so the ground truth stays
    // a straight union of the planted pairs.
    std::set<std::pair<std::string, std::string>> planted;
    std::map<std::string, std::vector<Instruction>> body;
    int reg = 0;
    auto plant = [&](const std::string& from, const std::string& to) {
        if (from == to || !planted.insert({from, to}).second)
            return;
        if (cls[to]->kind == ClassKind::Fragment) {
            body[from].push_back(i_nav(q(to)));
        }
        else if (rng.next_bernoulli(0.25)) {
            std::string r = "nt" + std::to_string(reg++);
            body[from].push_back(i_new_intent(r, q(to)));
            body[from].push_back(i_start_reg(r));
        }
        else {
            body[from].push_back(i_start(q(to)));
        }
        add_edge_gt(gt, q(from), q(to));
    };

    for (const auto& [from, to] : prof.motif) {
        if (cls[to]->kind == ClassKind::Fragment)
            continue; // handled via navgraph below
        plant(from, to);
    }
    if (!fragments.empty()) {
        std::string host = "Home";
        if (!cls.count(host))
            host = activities[1 % activities.size()];
        bld.add_navgraph("nav0", host, fragments);
        for (const auto& f : fragments) {
            planted.insert({host, f});
            add_edge_gt(gt, q(host), q(f));
        }
    }
    int extra_edges = static_cast<int>(rng.next_below(prof.extra_edges_hi + 1));
    for (int i = 0; i < extra_edges + extra_nodes; ++i) {
        const std::string& from =
                activities[rng.next_below(activities.size())];
        const std::string& to =
                activities[rng.next_below(activities.size())];
        plant(from, to);
    }
    gt.planted_transitions = static_cast<int>(planted.size());

    // Widgets: spread the per-app budget over the UI classes.
    int widget_budget = rng.next_int(prof.widgets_lo, prof.widgets_hi);
    std::vector<std::string> ui_names = activities;
    ui_names.insert(ui_names.end(), fragments.begin(), fragments.end());
    int per_class = std::max(
            1, widget_budget / static_cast<int>(ui_names.size()));

    // Token sinks live in the first few non-splash classes.
    // Token pools are ordered by how characteristic they are for the
    // family; a group takes a prefix, so families share their head tokens.
    int token_count = rng.next_int(prof.tokens_lo, prof.tokens_hi);
    std::vector<std::string> pool;
    for (const char* t : prof.token_pool)
        pool.push_back(t);
    token_count = std::min<int>(token_count, static_cast<int>(pool.size()));
    std::vector<std::string> chosen(pool.begin(),
                                    pool.begin() + token_count);
    gt.tokens.insert(chosen.begin(), chosen.end());
    int sink_count = std::min<int>(prof.sink_classes,
                                   static_cast<int>(ui_names.size()));

    int li = 0;
    std::size_t tok_cursor = 0;
    for (const auto& simple : ui_names) {
        std::string layout = "lay_" + std::to_string(li);
        bool is_sink = li < sink_count && !chosen.empty();
        ++li;

        std::vector<WidgetNode> ws;
        int count = std::max(1, per_class + rng.next_int(-1, 1));
        for (int wi = 0; wi < count; ++wi) {
            std::string type = weighted_pick(rng, prof.widget_pool);
            std::set<ListenerKind> listeners;
            if (rng.next_bernoulli(0.3))
                listeners.insert(ListenerKind::OnClick);
            if (rng.next_bernoulli(0.05))
                listeners.insert(ListenerKind::OnLongClick);
            ws.push_back(widget(type,
                                "w" + std::to_string(li) + "_"
                                        + std::to_string(wi),
                                std::move(listeners)));
        }
        if (is_sink)
            ws.push_back(widget("WebView", "web" + std::to_string(li)));
        if (li == 1 && member_rng.next_bernoulli(0.5))
            ws.push_back(widget("TextView", "member_note"));
        bld.add_layout(layout, ws, simple, gt);

        std::vector<Instruction> instrs{i_set_content_view(layout)};
        if (is_sink) {
            // Split this sink's token share into a resource half and a
            // constant half, optionally trailing a runtime piece.
            std::size_t share = chosen.size() / sink_count;
            std::size_t lo = tok_cursor;
            std::size_t hi = li == sink_count
                    ? chosen.size()
                    : std::min(chosen.size(), tok_cursor + share);
            tok_cursor = hi;
            std::string head = "https://";
            std::string tail;
            for (std::size_t t = lo; t < hi; ++t) {
                if (t < lo + (hi - lo) / 2)
                    head += (t == lo ? "" : ".") + chosen[t];
                else
                    tail += "/" + chosen[t];
            }
            std::string res_id = "u" + std::to_string(li);
            bld.add_string_res(res_id, head);
            instrs.push_back(i_resource("r0", res_id));
            instrs.push_back(i_const("r1", tail));
            if (rng.next_bernoulli(0.5)) {
                instrs.push_back(i_runtime("r2"));
                instrs.push_back(i_text("r3", TextOpKind::Concat,
                                        {"r0", "r1", "r2"}));
                ++gt.runtime_sources;
            }
            else {
                instrs.push_back(
                        i_text("r3", TextOpKind::Append, {"r0", "r1"}));
            }
            instrs.push_back(i_load_url("r3"));
        }
        auto bit = body.find(simple);
        if (bit != body.end())
            instrs.insert(instrs.end(), bit->second.begin(),
                          bit->second.end());
        bld.add_method(*cls[simple], "onCreate", std::move(instrs));
    }

    AppBundle b = bld.take();
    // Stores reuse the same few storefront names within a family; about
    // half of the releases keep the bare name.
    b.manifest.app_name =
            prof.app_names[member_rng.next_below(prof.app_names.size())];
    if (member_rng.next_bernoulli(0.55))
        b.manifest.app_name += " " + std::to_string(member_rng.next_int(2, 99));
    b.manifest.permissions.insert("android.permission.INTERNET");
    for (const char* p : {"android.permission.ACCESS_NETWORK_STATE",
                          "android.permission.WAKE_LOCK",
                          "android.permission.VIBRATE",
                          "android.permission.WRITE_EXTERNAL_STORAGE"}) {
        if (rng.next_bernoulli(0.5))
            b.manifest.permissions.insert(p);
    }
    for (const char* p : prof.extra_permissions) {
        if (rng.next_bernoulli(0.3))
            b.manifest.permissions.insert(p);
    }
    // cert_digest is assigned by the corpus generator (developer groups).
    b.manifest.cert_digest = "selfcert";

    finish_gt(b, gt);
    return {std::move(b), std::move(gt)};
}

// ---- sidecar json ------------------------------------------------------

std::string ground_truth_to_json(const GroundTruth& gt)
{
    json j;
    j["version"] = "gt/1";
    j["app_id"] = gt.app_id;
    if (gt.label)
        j["label"] = detector::label_name(*gt.label);
    j["class_count"] = gt.class_count;
    j["planted_transitions"] = gt.planted_transitions;
    json edges = json::array();
    for (const auto& [from, to] : gt.edges)
        edges.push_back(json::array({from, to}));
    j["edges"] = edges;
    json missed = json::array();
    for (const auto& [from, to] : gt.missed_edges)
        missed.push_back(json::array({from, to}));
    j["missed_edges"] = missed;
    json widgets = json::object();
    for (const auto& [owner, rows] : gt.widgets) {
        json arr = json::array();
        for (const auto& [type, listeners] : rows)
            arr.push_back(json::array({type, listeners}));
        widgets[owner] = arr;
    }
    j["widgets"] = widgets;
    j["tokens"] = json(gt.tokens);
    j["runtime_sources"] = gt.runtime_sources;
    return j.dump(2) + "\n";
}

GroundTruth ground_truth_from_json(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    }
    catch (const json::exception& e) {
        throw FormatError("$", e.what());
    }
    if (!j.contains("version") || j["version"] != "gt/1")
        throw FormatError("$.version", "unsupported ground truth version");
    GroundTruth gt;
    gt.app_id = j["app_id"].get<std::string>();
    if (j.contains("label"))
        gt.label = detector::label_from(j["label"].get<std::string>());
    gt.class_count = j["class_count"].get<int>();
    gt.planted_transitions = j["planted_transitions"].get<int>();
    for (const auto& e : j["edges"])
        gt.edges.push_back({e[0].get<std::string>(),
                            e[1].get<std::string>()});
    for (const auto& e : j["missed_edges"])
        gt.missed_edges.push_back({e[0].get<std::string>(),
                                   e[1].get<std::string>()});
    for (const auto& [owner, rows] : j["widgets"].items()) {
        for (const auto& r : rows)
            gt.widgets[owner].push_back(
                    {r[0].get<std::string>(), r[1].get<int>()});
    }
    for (const auto& t : j["tokens"])
        gt.tokens.insert(t.get<std::string>());
    gt.runtime_sources = j["runtime_sources"].get<int>();
    return gt;
}

// ---- corpus emission ---------------------------------------------------

namespace {

GroundTruth rename_ground_truth(const GroundTruth& gt,
                                const app_ir::RenameMap& map)
{
    GroundTruth out = gt;
    out.edges.clear();
    for (const auto& [from, to] : gt.edges)
        out.edges.push_back({map.map_class(from), map.map_class(to)});
    std::sort(out.edges.begin(), out.edges.end());
    out.missed_edges.clear();
    for (const auto& [from, to] : gt.missed_edges)
        out.missed_edges.push_back(
                {map.map_class(from), map.map_class(to)});
    out.widgets.clear();
    for (const auto& [owner, rows] : gt.widgets)
        out.widgets[map.map_class(owner)] = rows;
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << text;
}

} // namespace

CorpusIndex gen_corpus(const CorpusSpec& spec)
{
    namespace fs = std::filesystem;
    fs::create_directories(spec.out_dir / "benchmark");
    fs::create_directories(spec.out_dir / "apps");
    if (spec.emit_renamed) {
        fs::create_directories(spec.out_dir / "renamed" / "benchmark");
        fs::create_directories(spec.out_dir / "renamed" / "apps");
    }

    CorpusIndex index;
    index.seed = spec.seed;
    RandomStream master(spec.seed);

    auto emit = [&](const GeneratedApp& app, const std::string& subdir,
                    const std::string& stem, bool benchmark) {
        std::string file = subdir + "/" + stem + ".appir";
        std::string gt_file = subdir + "/" + stem + ".gt.json";
        write_file(spec.out_dir / file,
                   app_ir::serialize_bundle(app.bundle));
        write_file(spec.out_dir / gt_file, ground_truth_to_json(app.gt));
        index.apps.push_back(
                {app.gt.app_id, file, gt_file, app.gt.label, benchmark});

        if (spec.emit_renamed) {
            std::uint64_t rseed = fnv1a64(app.gt.app_id) ^ spec.seed
                    ^ 0x0b5f00d5ull;
            auto map = app_ir::build_rename_map(app.bundle, rseed);
            GeneratedApp renamed{app_ir::apply_rename(app.bundle, map),
                                 rename_ground_truth(app.gt, map)};
            write_file(spec.out_dir / "renamed" / file,
                       app_ir::serialize_bundle(renamed.bundle));
            write_file(spec.out_dir / "renamed" / gt_file,
                       ground_truth_to_json(renamed.gt));
        }
    };

    emit(make_app1(), "benchmark", "App1", true);
    emit(make_app2(), "benchmark", "App2", true);
    emit(make_app3(), "benchmark", "App3", true);
    emit(make_app4(), "benchmark", "App4", true);
    emit(make_app5(), "benchmark", "App5", true);
    emit(make_token_app(), "benchmark", "TokenApp", true);

    const AppLabel labels[] = {AppLabel::GamblingGame, AppLabel::Porn,
                               AppLabel::InvestmentScam,
                               AppLabel::Miscellaneous,
                               AppLabel::Legitimate};
    for (AppLabel label : labels) {
        // Developer groups: consecutive runs share a certificate, some
        // share the store-front app name as well; a few apps reuse a
        // generic name across families.
        int emitted = 0;
        int group_no = 0;
        while (emitted < spec.counts_per_class) {
            int group = std::min<int>(spec.counts_per_class - emitted,
                                      master.next_int(1, 4));
            char cert[32];
            std::snprintf(cert, sizeof cert, "%016llx",
                          static_cast<unsigned long long>(
                                  master.next_u64()));
            bool share_name = master.next_bernoulli(0.4);
            ++group_no;
            std::uint64_t group_seed = master.fork_seed();
            std::string group_name;
            for (int g = 0; g < group; ++g, ++emitted) {
                GeneratedApp app = make_family_app(label, group_seed,
                                                   master.fork_seed(),
                                                   emitted);
                app.bundle.manifest.cert_digest = cert;
                if (g == 0)
                    group_name = app.bundle.manifest.app_name;
                else if (share_name)
                    app.bundle.manifest.app_name = group_name;
                if (master.next_bernoulli(0.02))
                    app.bundle.manifest.app_name = "Super App";
                std::string stem = std::string(detector::label_name(label))
                        + "_" + std::to_string(emitted);
                emit(app, "apps", stem, false);
            }
        }
    }

    json manifest;
    manifest["version"] = "corpus/1";
    manifest["seed"] = index.seed;
    json apps = json::array();
    for (const auto& e : index.apps) {
        json a;
        a["app_id"] = e.app_id;
        a["file"] = e.file;
        a["gt"] = e.gt;
        if (e.label)
            a["label"] = detector::label_name(*e.label);
        a["benchmark"] = e.benchmark;
        apps.push_back(a);
    }
    manifest["apps"] = apps;
    write_file(spec.out_dir / "corpus.json", manifest.dump(2) + "\n");
    return index;
}

CorpusIndex load_corpus_index(const std::filesystem::path& dir)
{
    std::ifstream in(dir / "corpus.json");
    if (!in)
        throw IoError("cannot read " + (dir / "corpus.json").string());
    json j;
    try {
        in >> j;
    }
    catch (const json::exception& e) {
        throw FormatError("$", e.what());
    }
    if (!j.contains("version") || j["version"] != "corpus/1")
        throw FormatError("$.version", "unsupported corpus version");
    CorpusIndex index;
    index.seed = j["seed"].get<std::uint64_t>();
    for (const auto& a : j["apps"]) {
        CorpusManifestEntry e;
        e.app_id = a["app_id"].get<std::string>();
        e.file = a["file"].get<std::string>();
        e.gt = a["gt"].get<std::string>();
        if (a.contains("label"))
            e.label = detector::label_from(a["label"].get<std::string>());
        e.benchmark = a["benchmark"].get<bool>();
        index.apps.push_back(std::move(e));
    }
    return index;
}

} // namespace scenedet::harness
