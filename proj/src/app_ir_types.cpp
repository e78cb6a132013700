#include "scenedet/app_ir/types.hpp"

#include <algorithm>

namespace scenedet::app_ir {

const char* listener_kind_name(ListenerKind k)
{
    switch (k) {
    case ListenerKind::OnClick:
        return "OnClick";
    case ListenerKind::OnLongClick:
        return "OnLongClick";
    case ListenerKind::OnKeyDown:
        return "OnKeyDown";
    case ListenerKind::Custom:
        return "Custom";
    }
    return "?";
}

std::optional<ListenerKind> listener_kind_from(const std::string& name)
{
    if (name == "OnClick")
        return ListenerKind::OnClick;
    if (name == "OnLongClick")
        return ListenerKind::OnLongClick;
    if (name == "OnKeyDown")
        return ListenerKind::OnKeyDown;
    if (name == "Custom")
        return ListenerKind::Custom;
    return std::nullopt;
}

const char* class_kind_name(ClassKind k)
{
    switch (k) {
    case ClassKind::Activity:
        return "Activity";
    case ClassKind::Fragment:
        return "Fragment";
    case ClassKind::Listener:
        return "Listener";
    case ClassKind::Plain:
        return "Plain";
    }
    return "?";
}

std::optional<ClassKind> class_kind_from(const std::string& name)
{
    if (name == "Activity")
        return ClassKind::Activity;
    if (name == "Fragment")
        return ClassKind::Fragment;
    if (name == "Listener")
        return ClassKind::Listener;
    if (name == "Plain")
        return ClassKind::Plain;
    return std::nullopt;
}

const char* text_op_name(TextOpKind k)
{
    switch (k) {
    case TextOpKind::Append:
        return "append";
    case TextOpKind::Assign:
        return "assign";
    case TextOpKind::Replace:
        return "replace";
    case TextOpKind::Concat:
        return "concat";
    }
    return "?";
}

std::optional<TextOpKind> text_op_from(const std::string& name)
{
    if (name == "append")
        return TextOpKind::Append;
    if (name == "assign")
        return TextOpKind::Assign;
    if (name == "replace")
        return TextOpKind::Replace;
    if (name == "concat")
        return TextOpKind::Concat;
    return std::nullopt;
}

namespace {
struct ApiName {
    ApiKind kind;
    const char* name;
};
constexpr ApiName kApiNames[] = {
        {ApiKind::SetContentView, "SetContentView"},
        {ApiKind::Inflate, "Inflate"},
        {ApiKind::FindViewById, "FindViewById"},
        {ApiKind::NewWidget, "NewWidget"},
        {ApiKind::AttachWidget, "AttachWidget"},
        {ApiKind::LoadUrl, "LoadUrl"},
        {ApiKind::StartActivity, "StartActivity"},
        {ApiKind::StartActivityForResult, "StartActivityForResult"},
        {ApiKind::NewIntent, "NewIntent"},
        {ApiKind::NavNavigate, "NavNavigate"},
        {ApiKind::SetOnClickListener, "SetOnClickListener"},
        {ApiKind::ThreadStart, "ThreadStart"},
        {ApiKind::AsyncExecute, "AsyncExecute"},
        {ApiKind::SendMessage, "SendMessage"},
};
} // namespace

const char* api_kind_name(ApiKind k)
{
    for (const auto& e : kApiNames) {
        if (e.kind == k)
            return e.name;
    }
    return "?";
}

std::optional<ApiKind> api_kind_from(const std::string& name)
{
    for (const auto& e : kApiNames) {
        if (name == e.name)
            return e.kind;
    }
    return std::nullopt;
}

std::vector<std::string> MethodIR::parameters() const
{
    std::vector<std::string> params;
    std::set<std::string> defined;
    auto use = [&](const std::string& reg) {
        if (reg.empty() || defined.count(reg))
            return;
        if (std::find(params.begin(), params.end(), reg) == params.end())
            params.push_back(reg);
    };
    for (const auto& in : instructions) {
        for (const auto& op : in.operands)
            use(op);
        if (!in.dst.empty())
            defined.insert(in.dst);
    }
    return params;
}

const MethodIR* AppClass::find_method(const std::string& name) const
{
    for (const auto& m : methods) {
        if (m.name == name)
            return &m;
    }
    return nullptr;
}

const AppClass* AppBundle::find_class(const std::string& name) const
{
    for (const auto& c : classes) {
        if (c.name == name)
            return &c;
    }
    return nullptr;
}

const LayoutResource* AppBundle::find_layout(const std::string& id) const
{
    for (const auto& l : layouts) {
        if (l.id == id)
            return &l;
    }
    return nullptr;
}

bool AppBundle::is_ui_class(const std::string& name) const
{
    const auto* c = find_class(name);
    return c
            && (c->kind == ClassKind::Activity
                || c->kind == ClassKind::Fragment);
}

} // namespace scenedet::app_ir
