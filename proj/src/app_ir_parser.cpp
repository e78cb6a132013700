#include "scenedet/app_ir/parser.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "scenedet/common/errors.hpp"

namespace scenedet::app_ir {

namespace {

struct Token {
    enum class Kind { Ident, Str, Punct, End };
    Kind kind;
    std::string text;
    int line;
    int col;
};

bool is_ident_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'
            || c == '$' || c == '-' || c == '/';
}

// Tokenizes one physical line. '#' starts a comment outside of strings.
std::vector<Token> lex_line(const std::string& line, int lineno)
{
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        char c = line[i];
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            continue;
        }
        if (c == '#')
            break;
        int col = static_cast<int>(i) + 1;
        if (c == '"') {
            std::string s;
            ++i;
            bool closed = false;
            while (i < line.size()) {
                char d = line[i];
                if (d == '\\') {
                    if (i + 1 >= line.size())
                        throw SyntaxError(lineno, static_cast<int>(i) + 1,
                                          "dangling escape");
                    char e = line[i + 1];
                    switch (e) {
                    case 'n':
                        s += '\n';
                        break;
                    case 't':
                        s += '\t';
                        break;
                    case '"':
                        s += '"';
                        break;
                    case '\\':
                        s += '\\';
                        break;
                    default:
                        throw SyntaxError(lineno, static_cast<int>(i) + 2,
                                          "unknown escape");
                    }
                    i += 2;
                    continue;
                }
                if (d == '"') {
                    closed = true;
                    ++i;
                    break;
                }
                s += d;
                ++i;
            }
            if (!closed)
                throw SyntaxError(lineno, col, "unterminated string");
            out.push_back({Token::Kind::Str, s, lineno, col});
            continue;
        }
        if (c == '=' || c == '[' || c == ']' || c == ',' || c == '{'
            || c == '}') {
            out.push_back({Token::Kind::Punct, std::string(1, c), lineno, col});
            ++i;
            continue;
        }
        if (is_ident_char(c)) {
            std::size_t j = i;
            while (j < line.size() && is_ident_char(line[j]))
                ++j;
            out.push_back({Token::Kind::Ident, line.substr(i, j - i), lineno,
                           col});
            i = j;
            continue;
        }
        throw SyntaxError(lineno, col, std::string("unexpected character '")
                                  + c + "'");
    }
    out.push_back({Token::Kind::End, "", lineno,
                   static_cast<int>(line.size()) + 1});
    return out;
}

// Cursor over the tokens of a single line.
class Line {
public:
    Line(std::vector<Token> toks) : toks_(std::move(toks)) {}

    const Token& peek() const { return toks_[pos_]; }
    bool at_end() const { return peek().kind == Token::Kind::End; }

    const Token& next()
    {
        const Token& t = toks_[pos_];
        if (t.kind != Token::Kind::End)
            ++pos_;
        return t;
    }

    bool accept_punct(const char* p)
    {
        if (peek().kind == Token::Kind::Punct && peek().text == p) {
            next();
            return true;
        }
        return false;
    }

    std::string expect_ident(const char* what)
    {
        const Token& t = next();
        if (t.kind != Token::Kind::Ident)
            throw SyntaxError(t.line, t.col,
                              std::string("expected ") + what);
        return t.text;
    }

    std::string expect_str(const char* what)
    {
        const Token& t = next();
        if (t.kind != Token::Kind::Str)
            throw SyntaxError(t.line, t.col,
                              std::string("expected quoted ") + what);
        return t.text;
    }

    // Accepts either a quoted string or a bare identifier.
    std::string expect_name(const char* what)
    {
        const Token& t = next();
        if (t.kind != Token::Kind::Str && t.kind != Token::Kind::Ident)
            throw SyntaxError(t.line, t.col,
                              std::string("expected ") + what);
        return t.text;
    }

    void expect_punct(const char* p)
    {
        const Token& t = next();
        if (t.kind != Token::Kind::Punct || t.text != p)
            throw SyntaxError(t.line, t.col,
                              std::string("expected '") + p + "'");
    }

    void expect_end()
    {
        const Token& t = peek();
        if (t.kind != Token::Kind::End)
            throw SyntaxError(t.line, t.col, "trailing tokens");
    }

    // key=value attribute if the next two tokens are IDENT '='.
    bool peek_attr() const
    {
        return peek().kind == Token::Kind::Ident
                && toks_[pos_ + 1].kind == Token::Kind::Punct
                && toks_[pos_ + 1].text == "=";
    }

    std::vector<std::string> expect_list()
    {
        expect_punct("[");
        std::vector<std::string> items;
        if (accept_punct("]"))
            return items;
        while (true) {
            items.push_back(expect_name("list item"));
            if (accept_punct("]"))
                break;
            expect_punct(",");
        }
        return items;
    }

    int lineno() const { return toks_.empty() ? 0 : toks_[0].line; }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

class Parser {
public:
    explicit Parser(const std::string& source)
    {
        std::istringstream in(source);
        std::string raw;
        int lineno = 0;
        while (std::getline(in, raw)) {
            ++lineno;
            auto toks = lex_line(raw, lineno);
            if (toks.size() > 1) // more than just End
                lines_.emplace_back(std::move(toks));
        }
    }

    AppBundle run()
    {
        if (at_end())
            throw SyntaxError(1, 1, "empty input");
        Line& header = cur();
        std::string tag = header.expect_ident("format header");
        if (tag != "appir/1")
            throw SyntaxError(header.lineno(), 1,
                              "unsupported format header '" + tag + "'");
        header.expect_end();
        advance();

        while (!at_end())
            top_level();
        return std::move(bundle_);
    }

private:
    bool at_end() const { return idx_ >= lines_.size(); }
    Line& cur() { return lines_[idx_]; }
    void advance() { ++idx_; }

    [[noreturn]] void fail(Line& l, const std::string& msg)
    {
        throw SyntaxError(l.lineno(), 1, msg);
    }

    void top_level()
    {
        Line& l = cur();
        std::string head = l.expect_ident("directive");
        if (head == "package") {
            bundle_.manifest.package_name = l.expect_str("package name");
        }
        else if (head == "app_name") {
            bundle_.manifest.app_name = l.expect_str("app name");
        }
        else if (head == "cert") {
            bundle_.manifest.cert_digest = l.expect_str("certificate digest");
        }
        else if (head == "permission") {
            bundle_.manifest.permissions.insert(l.expect_str("permission"));
        }
        else if (head == "declares_activity") {
            bundle_.manifest.declared_activities.insert(
                    l.expect_str("activity class name"));
        }
        else if (head == "string_res") {
            std::string id = l.expect_ident("resource id");
            std::string value = l.expect_str("resource value");
            if (bundle_.string_resources.count(id))
                throw BundleError("duplicate_name", id,
                                  "duplicate string resource '" + id + "'");
            bundle_.string_resources[id] = value;
        }
        else if (head == "layout") {
            parse_layout(l);
            return; // parse_layout advances past the block
        }
        else if (head == "navgraph") {
            parse_navgraph(l);
        }
        else if (head == "class") {
            parse_class(l);
            return;
        }
        else {
            fail(l, "unknown directive '" + head + "'");
        }
        l.expect_end();
        advance();
    }

    void parse_navgraph(Line& l)
    {
        NavGraphResource nav;
        nav.id = l.expect_ident("navgraph id");
        while (l.peek_attr()) {
            std::string key = l.expect_ident("attribute");
            l.expect_punct("=");
            if (key == "host")
                nav.host_class = l.expect_name("host class");
            else if (key == "destinations")
                nav.destinations = l.expect_list();
            else
                fail(l, "unknown navgraph attribute '" + key + "'");
        }
        bundle_.nav_graphs.push_back(std::move(nav));
    }

    void parse_layout(Line& l)
    {
        LayoutResource layout;
        layout.id = l.expect_ident("layout id");
        l.expect_punct("{");
        l.expect_end();
        advance();

        std::vector<WidgetNode> roots = parse_widget_children();
        if (roots.size() != 1)
            throw SyntaxError(l.lineno(), 1,
                              "layout '" + layout.id
                                      + "' must have exactly one root widget");
        layout.root = std::move(roots[0]);
        layout_lines_[layout.id] = l.lineno();
        bundle_.layouts.push_back(std::move(layout));
    }

    // Parses widget lines until the closing '}' (consumed).
    std::vector<WidgetNode> parse_widget_children()
    {
        std::vector<WidgetNode> children;
        while (true) {
            if (at_end())
                throw SyntaxError(0, 0, "unterminated block");
            Line& l = cur();
            if (l.peek().kind == Token::Kind::Punct && l.peek().text == "}") {
                l.next();
                l.expect_end();
                advance();
                return children;
            }
            std::string head = l.expect_ident("widget");
            if (head != "widget")
                fail(l, "expected 'widget' or '}'");
            WidgetNode w;
            w.widget_type = l.expect_name("widget type");
            while (l.peek_attr()) {
                std::string key = l.expect_ident("attribute");
                l.expect_punct("=");
                if (key == "id") {
                    w.widget_id = l.expect_ident("widget id");
                }
                else if (key == "icon") {
                    w.icon = l.expect_ident("icon id");
                }
                else if (key == "listeners") {
                    for (const auto& item : l.expect_list()) {
                        auto k = listener_kind_from(item);
                        if (!k)
                            fail(l, "unknown listener kind '" + item + "'");
                        w.listeners.insert(*k);
                    }
                }
                else {
                    fail(l, "unknown widget attribute '" + key + "'");
                }
            }
            if (l.accept_punct("{")) {
                l.expect_end();
                advance();
                w.children = parse_widget_children();
            }
            else {
                l.expect_end();
                advance();
            }
            children.push_back(std::move(w));
        }
    }

    void parse_class(Line& l)
    {
        AppClass cls;
        cls.name = l.expect_name("class name");
        while (l.peek_attr()) {
            std::string key = l.expect_ident("attribute");
            l.expect_punct("=");
            if (key == "kind") {
                std::string kind = l.expect_ident("class kind");
                auto k = class_kind_from(kind);
                if (!k)
                    fail(l, "unknown class kind '" + kind + "'");
                cls.kind = *k;
            }
            else if (key == "inner_of") {
                cls.inner_of = l.expect_name("outer class");
            }
            else {
                fail(l, "unknown class attribute '" + key + "'");
            }
        }
        l.expect_punct("{");
        l.expect_end();
        class_lines_[cls.name] = l.lineno();
        advance();

        while (true) {
            if (at_end())
                throw SyntaxError(0, 0, "unterminated class block");
            Line& b = cur();
            if (b.peek().kind == Token::Kind::Punct && b.peek().text == "}") {
                b.next();
                b.expect_end();
                advance();
                break;
            }
            std::string head = b.expect_ident("class member");
            if (head == "overrides") {
                b.expect_punct("=");
                for (const auto& item : b.expect_list())
                    cls.overrides_system_listener.insert(item);
                b.expect_end();
                advance();
            }
            else if (head == "method") {
                parse_method(b, cls);
            }
            else {
                fail(b, "expected 'method', 'overrides' or '}'");
            }
        }
        bundle_.classes.push_back(std::move(cls));
    }

    void parse_method(Line& l, AppClass& cls)
    {
        MethodIR m;
        m.name = l.expect_ident("method name");
        if (l.peek().kind == Token::Kind::Str)
            m.signature = l.next().text;
        l.expect_punct("{");
        l.expect_end();
        advance();

        while (true) {
            if (at_end())
                throw SyntaxError(0, 0, "unterminated method block");
            Line& b = cur();
            if (b.peek().kind == Token::Kind::Punct && b.peek().text == "}") {
                b.next();
                b.expect_end();
                advance();
                break;
            }
            m.instructions.push_back(parse_instruction(b));
            b.expect_end();
            advance();
        }
        cls.methods.push_back(std::move(m));
    }

    Instruction parse_instruction(Line& l)
    {
        Instruction in;
        std::string head = l.expect_ident("instruction");
        if (head == "const") {
            in.kind = Instruction::Kind::ConstText;
            in.dst = l.expect_ident("destination register");
            in.text_value = l.expect_str("text value");
        }
        else if (head == "resource") {
            in.kind = Instruction::Kind::ResourceText;
            in.dst = l.expect_ident("destination register");
            in.resource_id = l.expect_ident("string resource id");
        }
        else if (head == "runtime") {
            in.kind = Instruction::Kind::RuntimeText;
            in.dst = l.expect_ident("destination register");
        }
        else if (head == "text") {
            in.kind = Instruction::Kind::TextOp;
            in.dst = l.expect_ident("destination register");
            std::string op = l.expect_ident("text operation");
            auto k = text_op_from(op);
            if (!k)
                fail(l, "unknown text operation '" + op + "'");
            in.text_op = *k;
            while (l.peek().kind == Token::Kind::Ident)
                in.operands.push_back(l.next().text);
            check_text_arity(l, in);
        }
        else if (head == "call") {
            in.kind = Instruction::Kind::Call;
            // Optional "dst =" prefix; the callee is always quoted.
            if (l.peek_attr() && l.peek().text != "args") {
                in.dst = l.expect_ident("destination register");
                l.expect_punct("=");
            }
            in.target = l.expect_str("call target");
            if (l.peek_attr()) {
                std::string key = l.expect_ident("attribute");
                l.expect_punct("=");
                if (key != "args")
                    fail(l, "unknown call attribute '" + key + "'");
                in.operands = l.expect_list();
            }
        }
        else if (head == "api") {
            in = parse_api(l);
        }
        else if (head == "return") {
            in.kind = Instruction::Kind::Return;
            if (l.peek().kind == Token::Kind::Ident)
                in.operands.push_back(l.next().text);
        }
        else {
            fail(l, "unknown instruction '" + head + "'");
        }
        return in;
    }

    void check_text_arity(Line& l, const Instruction& in)
    {
        std::size_t n = in.operands.size();
        switch (in.text_op) {
        case TextOpKind::Assign:
            if (n != 1)
                fail(l, "assign takes one operand");
            break;
        case TextOpKind::Append:
            if (n != 2)
                fail(l, "append takes two operands");
            break;
        case TextOpKind::Replace:
            if (n != 3)
                fail(l, "replace takes three operands");
            break;
        case TextOpKind::Concat:
            if (n < 2)
                fail(l, "concat takes at least two operands");
            break;
        }
    }

    Instruction parse_api(Line& l)
    {
        Instruction in;
        in.kind = Instruction::Kind::ApiCall;
        if (l.peek_attr()) {
            in.dst = l.expect_ident("destination register");
            l.expect_punct("=");
        }
        std::string name = l.expect_ident("api kind");
        auto kind = api_kind_from(name);
        if (!kind)
            fail(l, "unknown api kind '" + name + "'");
        in.api = *kind;
        switch (*kind) {
        case ApiKind::SetContentView:
        case ApiKind::Inflate:
            in.resource_id = l.expect_ident("layout id");
            break;
        case ApiKind::FindViewById:
            require_dst(l, in, name);
            in.resource_id = l.expect_ident("widget id");
            break;
        case ApiKind::NewWidget:
            require_dst(l, in, name);
            in.target = l.expect_name("widget type");
            break;
        case ApiKind::AttachWidget:
            in.operands.push_back(l.expect_ident("parent register"));
            in.operands.push_back(l.expect_ident("child register"));
            break;
        case ApiKind::LoadUrl:
            in.operands.push_back(l.expect_ident("url register"));
            break;
        case ApiKind::StartActivity:
        case ApiKind::StartActivityForResult:
            // Quoted = explicit class target, bare = intent register.
            if (l.peek().kind == Token::Kind::Str)
                in.target = l.next().text;
            else
                in.operands.push_back(l.expect_ident("intent register"));
            break;
        case ApiKind::NewIntent:
            require_dst(l, in, name);
            in.target = l.expect_str("target class");
            break;
        case ApiKind::NavNavigate:
            in.target = l.expect_str("destination class");
            break;
        case ApiKind::SetOnClickListener:
            in.operands.push_back(l.expect_ident("widget register"));
            in.target = l.expect_str("listener class");
            break;
        case ApiKind::ThreadStart:
        case ApiKind::AsyncExecute:
        case ApiKind::SendMessage:
            in.target = l.expect_str("target class");
            break;
        }
        return in;
    }

    void require_dst(Line& l, const Instruction& in, const std::string& api)
    {
        if (in.dst.empty())
            fail(l, api + " requires a destination register");
    }

    AppBundle bundle_;
    std::vector<Line> lines_;
    std::size_t idx_ = 0;

public:
    std::map<std::string, int> class_lines_;
    std::map<std::string, int> layout_lines_;
};

void quote_into(std::string& out, const std::string& s)
{
    out += '"';
    for (char c : s) {
        switch (c) {
        case '"':
            out += "\\\"";
            break;
        case '\\':
            out += "\\\\";
            break;
        case '\n':
            out += "\\n";
            break;
        case '\t':
            out += "\\t";
            break;
        default:
            out += c;
        }
    }
    out += '"';
}

std::string quoted(const std::string& s)
{
    std::string out;
    quote_into(out, s);
    return out;
}

void write_widget(std::string& out, const WidgetNode& w, int depth)
{
    out.append(static_cast<std::size_t>(depth) * 2, ' ');
    out += "widget ";
    bool plain = !w.widget_type.empty()
            && w.widget_type.find('.') == std::string::npos;
    out += plain ? w.widget_type : quoted(w.widget_type);
    if (!w.widget_id.empty())
        out += " id=" + w.widget_id;
    if (!w.icon.empty())
        out += " icon=" + w.icon;
    if (!w.listeners.empty()) {
        out += " listeners=[";
        bool first = true;
        for (auto k : w.listeners) {
            if (!first)
                out += ", ";
            out += listener_kind_name(k);
            first = false;
        }
        out += "]";
    }
    if (!w.children.empty()) {
        out += " {\n";
        for (const auto& c : w.children)
            write_widget(out, c, depth + 1);
        out.append(static_cast<std::size_t>(depth) * 2, ' ');
        out += "}\n";
    }
    else {
        out += "\n";
    }
}

void write_instruction(std::string& out, const Instruction& in)
{
    out += "    ";
    switch (in.kind) {
    case Instruction::Kind::ConstText:
        out += "const " + in.dst + " " + quoted(in.text_value);
        break;
    case Instruction::Kind::ResourceText:
        out += "resource " + in.dst + " " + in.resource_id;
        break;
    case Instruction::Kind::RuntimeText:
        out += "runtime " + in.dst;
        break;
    case Instruction::Kind::TextOp:
        out += "text " + in.dst + " " + text_op_name(in.text_op);
        for (const auto& op : in.operands)
            out += " " + op;
        break;
    case Instruction::Kind::Call:
        out += "call ";
        if (!in.dst.empty())
            out += in.dst + " = ";
        out += quoted(in.target);
        if (!in.operands.empty()) {
            out += " args=[";
            for (std::size_t i = 0; i < in.operands.size(); ++i) {
                if (i)
                    out += ", ";
                out += in.operands[i];
            }
            out += "]";
        }
        break;
    case Instruction::Kind::ApiCall: {
        out += "api ";
        if (!in.dst.empty())
            out += in.dst + " = ";
        out += api_kind_name(in.api);
        switch (in.api) {
        case ApiKind::SetContentView:
        case ApiKind::Inflate:
        case ApiKind::FindViewById:
            out += " " + in.resource_id;
            break;
        case ApiKind::NewWidget: {
            bool plain = !in.target.empty()
                    && in.target.find('.') == std::string::npos;
            out += " " + (plain ? in.target : quoted(in.target));
            break;
        }
        case ApiKind::AttachWidget:
            out += " " + in.operands[0] + " " + in.operands[1];
            break;
        case ApiKind::LoadUrl:
            out += " " + in.operands[0];
            break;
        case ApiKind::StartActivity:
        case ApiKind::StartActivityForResult:
            if (!in.target.empty())
                out += " " + quoted(in.target);
            else
                out += " " + in.operands[0];
            break;
        case ApiKind::NewIntent:
        case ApiKind::NavNavigate:
        case ApiKind::ThreadStart:
        case ApiKind::AsyncExecute:
        case ApiKind::SendMessage:
            out += " " + quoted(in.target);
            break;
        case ApiKind::SetOnClickListener:
            out += " " + in.operands[0] + " " + quoted(in.target);
            break;
        }
        break;
    }
    case Instruction::Kind::Return:
        out += "return";
        if (!in.operands.empty())
            out += " " + in.operands[0];
        break;
    }
    out += "\n";
}

} // namespace

AppBundle parse_text(const std::string& source)
{
    Parser p(source);
    return p.run();
}

AppBundle parse_bundle(const std::string& source)
{
    Parser p(source);
    AppBundle bundle = p.run();
    auto violations = validate(bundle);
    if (!violations.empty()) {
        Violation v = violations.front();
        if (v.line == 0) {
            auto it = p.class_lines_.find(v.subject);
            if (it != p.class_lines_.end())
                v.line = it->second;
        }
        throw BundleError(v.code, v.subject,
                          v.code + " (" + v.subject + "): " + v.message);
    }
    return bundle;
}

AppBundle parse_bundle_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_bundle(buf.str());
}

std::string serialize_bundle(const AppBundle& b)
{
    std::string out = "appir/1\n";
    out += "package " + quoted(b.manifest.package_name) + "\n";
    if (!b.manifest.app_name.empty())
        out += "app_name " + quoted(b.manifest.app_name) + "\n";
    if (!b.manifest.cert_digest.empty())
        out += "cert " + quoted(b.manifest.cert_digest) + "\n";
    for (const auto& p : b.manifest.permissions)
        out += "permission " + quoted(p) + "\n";
    for (const auto& a : b.manifest.declared_activities)
        out += "declares_activity " + quoted(a) + "\n";
    for (const auto& [id, value] : b.string_resources)
        out += "string_res " + id + " " + quoted(value) + "\n";
    for (const auto& l : b.layouts) {
        out += "layout " + l.id + " {\n";
        write_widget(out, l.root, 1);
        out += "}\n";
    }
    for (const auto& n : b.nav_graphs) {
        out += "navgraph " + n.id + " host=" + quoted(n.host_class)
                + " destinations=[";
        for (std::size_t i = 0; i < n.destinations.size(); ++i) {
            if (i)
                out += ", ";
            out += quoted(n.destinations[i]);
        }
        out += "]\n";
    }
    for (const auto& c : b.classes) {
        out += "class " + quoted(c.name) + " kind="
                + class_kind_name(c.kind);
        if (!c.inner_of.empty())
            out += " inner_of=" + quoted(c.inner_of);
        out += " {\n";
        if (!c.overrides_system_listener.empty()) {
            out += "  overrides=[";
            bool first = true;
            for (const auto& o : c.overrides_system_listener) {
                if (!first)
                    out += ", ";
                out += o;
                first = false;
            }
            out += "]\n";
        }
        for (const auto& m : c.methods) {
            out += "  method " + m.name;
            if (!m.signature.empty())
                out += " " + quoted(m.signature);
            out += " {\n";
            for (const auto& in : m.instructions)
                write_instruction(out, in);
            out += "  }\n";
        }
        out += "}\n";
    }
    return out;
}

} // namespace scenedet::app_ir
