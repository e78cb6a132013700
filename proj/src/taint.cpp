#include "scenedet/widgets/taint.hpp"

#include <algorithm>
#include <fstream>

#include "scenedet/analysis/callers.hpp"
#include "scenedet/common/errors.hpp"

namespace scenedet::widgets {

using app_ir::ApiKind;
using app_ir::AppBundle;
using app_ir::Instruction;
using app_ir::MethodIR;
using callgraph::MethodRef;

Stoplist default_stoplist()
{
    // "github" is the stoplist seed; scheme words carry no
    // discriminative content.
    return {"github", "http", "https", "www"};
}

Stoplist load_stoplist(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open stoplist " + path.string());
    Stoplist list;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        // trim
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos)
            continue;
        auto e = line.find_last_not_of(" \t\r");
        list.insert(line.substr(b, e - b + 1));
    }
    return list;
}

std::vector<std::string> split_url_tokens(const std::string& value)
{
    static const std::string delims = "/?&=:.";
    std::vector<std::string> out;
    std::string cur;
    for (char c : value) {
        if (delims.find(c) != std::string::npos) {
            if (!cur.empty())
                out.push_back(std::move(cur));
            cur.clear();
        }
        else {
            cur += c;
        }
    }
    if (!cur.empty())
        out.push_back(std::move(cur));
    return out;
}

namespace {

struct CallSite {
    MethodRef caller;
    int index;

    auto operator<=>(const CallSite&) const = default;
};

// Backward def-use walker. A trace state is (method, read position,
// register) plus the call-site context stack that tells parameter flows
// which concrete call site to return through; parameter flows of the
// outermost frame fan out to every call site of the method.
class Tracer {
public:
    Tracer(const AppBundle& bundle, const callgraph::CallGraph& cg,
           int max_depth, const Stoplist& stoplist, TaintResult& result)
        : bundle_(bundle), max_depth_(max_depth), stoplist_(stoplist),
          result_(result)
    {
        for (const auto& cls : bundle.classes) {
            for (const auto& m : cls.methods) {
                for (int i = 0; i < static_cast<int>(m.instructions.size());
                     ++i) {
                    const auto& in = m.instructions[i];
                    if (in.kind == Instruction::Kind::Call)
                        call_sites_[in.target].push_back(
                                {{cls.name, m.name}, i});
                }
            }
        }
        (void)cg;
    }

    void trace(const MethodRef& method, int read_index,
               const std::string& reg, std::vector<CallSite>& ctx, int depth)
    {
        std::string key = method.str() + "#" + std::to_string(read_index)
                + ":" + reg + "@" + ctx_digest(ctx);
        if (!visited_.insert(key).second)
            return;

        const MethodIR* m = find_method(method);
        if (!m)
            return;

        int def = -1;
        for (int j = read_index - 1; j >= 0; --j) {
            if (m->instructions[j].dst == reg) {
                def = j;
                break;
            }
        }
        if (def < 0) {
            trace_parameter(method, *m, reg, ctx, depth);
            return;
        }

        const Instruction& in = m->instructions[def];
        switch (in.kind) {
        case Instruction::Kind::ConstText:
            emit(in.text_value);
            break;
        case Instruction::Kind::ResourceText: {
            auto it = bundle_.string_resources.find(in.resource_id);
            if (it != bundle_.string_resources.end())
                emit(it->second);
            break;
        }
        case Instruction::Kind::RuntimeText:
            runtime_sites_.insert(method.str() + "#" + std::to_string(def));
            break;
        case Instruction::Kind::TextOp:
            for (const auto& op : in.operands)
                trace(method, def, op, ctx, depth);
            break;
        case Instruction::Kind::Call: {
            if (depth + 1 > max_depth_) {
                result_.depth_exhausted = true;
                break;
            }
            const MethodRef callee = parse_ref(in.target);
            const MethodIR* cm = find_method(callee);
            if (!cm)
                break;
            ctx.push_back({method, def});
            for (int j = 0; j < static_cast<int>(cm->instructions.size());
                 ++j) {
                const auto& ri = cm->instructions[j];
                if (ri.kind == Instruction::Kind::Return
                    && !ri.operands.empty())
                    trace(callee, j, ri.operands[0], ctx, depth + 1);
            }
            ctx.pop_back();
            break;
        }
        default:
            // Non-text definition (widget/intent API): nothing flows.
            break;
        }
    }

    int runtime_count() const
    {
        return static_cast<int>(runtime_sites_.size());
    }

private:
    void trace_parameter(const MethodRef& method, const MethodIR& m,
                         const std::string& reg, std::vector<CallSite>& ctx,
                         int depth)
    {
        auto params = m.parameters();
        auto pit = std::find(params.begin(), params.end(), reg);
        if (pit == params.end())
            return;
        std::size_t pindex =
                static_cast<std::size_t>(pit - params.begin());

        auto follow = [&](const CallSite& site, std::vector<CallSite>& nctx) {
            const MethodIR* caller = find_method(site.caller);
            if (!caller)
                return;
            const Instruction& call = caller->instructions[site.index];
            if (pindex >= call.operands.size())
                return; // unbound parameter: nothing flows
            trace(site.caller, site.index, call.operands[pindex], nctx,
                  depth + 1);
        };

        if (!ctx.empty()) {
            // Known entry frame: return through it without fan-out.
            if (depth + 1 > max_depth_) {
                result_.depth_exhausted = true;
                return;
            }
            CallSite frame = ctx.back();
            ctx.pop_back();
            follow(frame, ctx);
            ctx.push_back(frame);
            return;
        }
        auto sites = call_sites_.find(method.str());
        if (sites == call_sites_.end())
            return;
        if (depth + 1 > max_depth_) {
            result_.depth_exhausted = true;
            return;
        }
        for (const auto& site : sites->second) {
            std::vector<CallSite> empty_ctx;
            follow(site, empty_ctx);
        }
    }

    void emit(const std::string& value)
    {
        for (auto& tok : split_url_tokens(value)) {
            if (!stoplist_.count(tok))
                result_.tokens.insert(std::move(tok));
        }
    }

    static std::string ctx_digest(const std::vector<CallSite>& ctx)
    {
        std::string d;
        for (const auto& f : ctx)
            d += f.caller.str() + "#" + std::to_string(f.index) + "|";
        return d;
    }

    static MethodRef parse_ref(const std::string& target)
    {
        auto dot = target.rfind('.');
        if (dot == std::string::npos)
            return {"", target};
        return {target.substr(0, dot), target.substr(dot + 1)};
    }

    const MethodIR* find_method(const MethodRef& ref) const
    {
        const auto* cls = bundle_.find_class(ref.class_name);
        return cls ? cls->find_method(ref.method_name) : nullptr;
    }

    const AppBundle& bundle_;
    int max_depth_;
    const Stoplist& stoplist_;
    TaintResult& result_;
    std::map<std::string, std::vector<CallSite>> call_sites_;
    std::set<std::string> visited_;
    std::set<std::string> runtime_sites_;
};

} // namespace

TaintResult backward_taint_text(const AppBundle& bundle,
                                const callgraph::CallGraph& cg,
                                const SiteRef& sink,
                                const analysis::AnalysisConfig& cfg,
                                const Stoplist& stoplist)
{
    const auto* cls = bundle.find_class(sink.class_name);
    const MethodIR* m = cls ? cls->find_method(sink.method_name) : nullptr;
    if (!m || sink.instr_index < 0
        || sink.instr_index >= static_cast<int>(m->instructions.size()))
        throw UnknownMethod("no such sink " + sink.str());
    const Instruction& in = m->instructions[sink.instr_index];
    if (in.kind != Instruction::Kind::ApiCall || in.api != ApiKind::LoadUrl)
        throw SinkNotText("sink " + sink.str() + " is not a LoadUrl site");

    TaintResult result;
    result.sink = sink;

    MethodRef method{sink.class_name, sink.method_name};
    const std::string& reg = in.operands[0];

    // Reject sinks whose operand is produced by a non-text API.
    for (int j = sink.instr_index - 1; j >= 0; --j) {
        const auto& d = m->instructions[j];
        if (d.dst != reg)
            continue;
        if (d.kind == Instruction::Kind::ApiCall)
            throw SinkNotText("sink operand " + reg + " at " + sink.str()
                              + " is not text-typed");
        break;
    }

    Tracer tracer(bundle, cg, cfg.max_depth, stoplist, result);
    std::vector<CallSite> ctx;
    tracer.trace(method, sink.instr_index, reg, ctx, 0);
    result.discarded_runtime_sources = tracer.runtime_count();
    return result;
}

std::vector<SiteRef> loadurl_sites(const AppBundle& bundle)
{
    std::vector<SiteRef> sites;
    for (const auto& cls : bundle.classes) {
        for (const auto& m : cls.methods) {
            for (int i = 0; i < static_cast<int>(m.instructions.size());
                 ++i) {
                const auto& in = m.instructions[i];
                if (in.kind == Instruction::Kind::ApiCall
                    && in.api == ApiKind::LoadUrl)
                    sites.push_back({cls.name, m.name, i});
            }
        }
    }
    return sites;
}

namespace {

std::map<std::string, std::set<std::string>>
attribute_owners(const AppBundle& bundle, const callgraph::CallGraph& cg,
                 const analysis::AnalysisConfig& cfg)
{
    // site method -> owning UI classes
    analysis::ReachIndex reach(bundle, cg, cfg);
    analysis::CallerResolver resolver(bundle, cg, reach);
    std::map<std::string, std::set<std::string>> owners_of_method;
    for (const auto& site : loadurl_sites(bundle)) {
        MethodRef method{site.class_name, site.method_name};
        std::set<std::string>& owners = owners_of_method[method.str()];
        for (const auto& reaching : reach.reaching_classes(method)) {
            for (const auto& caller : resolver.resolve(reaching)) {
                if (bundle.is_ui_class(caller))
                    owners.insert(caller);
            }
        }
    }
    return owners_of_method;
}

} // namespace

std::map<std::string, std::set<std::string>>
generate_imprints(const AppBundle& bundle, const callgraph::CallGraph& cg,
                  const Stoplist& stoplist,
                  const analysis::AnalysisConfig& cfg)
{
    std::map<std::string, std::set<std::string>> out;
    for (const auto& cls : bundle.classes) {
        if (bundle.is_ui_class(cls.name))
            out[cls.name]; // every UI class gets an entry, possibly empty
    }
    auto owners_of_method = attribute_owners(bundle, cg, cfg);
    for (const auto& site : loadurl_sites(bundle)) {
        TaintResult r = backward_taint_text(bundle, cg, site, cfg, stoplist);
        MethodRef method{site.class_name, site.method_name};
        for (const auto& owner : owners_of_method[method.str()]) {
            for (const auto& tok : r.tokens)
                out[owner].insert(tok);
        }
    }
    return out;
}

std::map<std::string, int>
webview_sites_by_owner(const AppBundle& bundle,
                       const callgraph::CallGraph& cg,
                       const analysis::AnalysisConfig& cfg)
{
    std::map<std::string, int> counts;
    auto owners_of_method = attribute_owners(bundle, cg, cfg);
    for (const auto& site : loadurl_sites(bundle)) {
        MethodRef method{site.class_name, site.method_name};
        for (const auto& owner : owners_of_method[method.str()])
            ++counts[owner];
    }
    return counts;
}

} // namespace scenedet::widgets
