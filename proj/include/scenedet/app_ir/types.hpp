#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace scenedet::app_ir {

enum class ListenerKind { OnClick, OnLongClick, OnKeyDown, Custom };

const char* listener_kind_name(ListenerKind k);
std::optional<ListenerKind> listener_kind_from(const std::string& name);

enum class ClassKind { Activity, Fragment, Listener, Plain };

const char* class_kind_name(ClassKind k);
std::optional<ClassKind> class_kind_from(const std::string& name);

// Widget tree node of a layout resource. widget_type may name a fragment
// class, which embeds that fragment into the owning UI class.
struct WidgetNode {
    std::string widget_type;
    std::string widget_id; // empty = none
    std::string icon;      // empty = none
    std::set<ListenerKind> listeners;
    std::vector<WidgetNode> children;

    bool operator==(const WidgetNode&) const = default;
};

struct LayoutResource {
    std::string id;
    WidgetNode root;

    bool operator==(const LayoutResource&) const = default;
};

struct NavGraphResource {
    std::string id;
    std::string host_class;
    std::vector<std::string> destinations;

    bool operator==(const NavGraphResource&) const = default;
};

enum class TextOpKind { Append, Assign, Replace, Concat };

const char* text_op_name(TextOpKind k);
std::optional<TextOpKind> text_op_from(const std::string& name);

enum class ApiKind {
    SetContentView,
    Inflate,
    FindViewById,
    NewWidget,
    AttachWidget,
    LoadUrl,
    StartActivity,
    StartActivityForResult,
    NewIntent,
    NavNavigate,
    SetOnClickListener,
    ThreadStart,
    AsyncExecute,
    SendMessage,
};

const char* api_kind_name(ApiKind k);
std::optional<ApiKind> api_kind_from(const std::string& name);

// Straight-line instruction. Field usage per kind:
//   ConstText:    dst, text_value
//   ResourceText: dst, resource_id
//   RuntimeText:  dst
//   TextOp:       dst, text_op, operands (registers)
//   Call:         dst (optional), target "pkg.Cls.method", operands = args
//   ApiCall:      api; dst where the API produces a value; resource_id for
//                 layout/widget ids; target for class-name/type arguments;
//                 operands for register arguments
//   Return:       operands = {register} or empty
struct Instruction {
    enum class Kind {
        ConstText,
        ResourceText,
        RuntimeText,
        TextOp,
        Call,
        ApiCall,
        Return,
    };

    Kind kind{};
    std::string dst;
    std::string text_value;
    std::string resource_id;
    TextOpKind text_op{};
    std::vector<std::string> operands;
    std::string target;
    ApiKind api{};

    bool operator==(const Instruction&) const = default;
};

struct MethodIR {
    std::string name;
    std::string signature;
    std::vector<Instruction> instructions;

    // Registers used before definition, in order of first use. These are
    // the method parameters; argument binding at call sites is positional.
    std::vector<std::string> parameters() const;

    bool operator==(const MethodIR&) const = default;
};

struct AppClass {
    std::string name;
    ClassKind kind{ClassKind::Plain};
    std::string inner_of; // empty = top-level
    std::vector<MethodIR> methods;
    std::set<std::string> overrides_system_listener;

    const MethodIR* find_method(const std::string& name) const;

    bool operator==(const AppClass&) const = default;
};

struct ManifestInfo {
    std::string package_name;
    std::string app_name;
    std::string cert_digest;
    std::set<std::string> permissions;
    std::set<std::string> declared_activities;

    bool operator==(const ManifestInfo&) const = default;
};

struct AppBundle {
    ManifestInfo manifest;
    std::vector<LayoutResource> layouts;
    std::map<std::string, std::string> string_resources;
    std::vector<NavGraphResource> nav_graphs;
    std::vector<AppClass> classes;

    const AppClass* find_class(const std::string& name) const;
    const LayoutResource* find_layout(const std::string& id) const;
    bool is_ui_class(const std::string& name) const;

    bool operator==(const AppBundle&) const = default;
};

} // namespace scenedet::app_ir
